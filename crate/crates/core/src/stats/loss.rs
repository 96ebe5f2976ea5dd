// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit_result::FitResult;

/// Frequency at which the loss-limited T1 is quoted.
pub const T1_LIMIT_FREQUENCY_HZ: f64 = 3e9;

/// `1/Q = δ_0 + δ_t·p_total`. Only the grouped interface loss tangent is
/// identifiable; no per-interface split is exposed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossModelFit {
    pub delta_0: f64,
    pub delta_t: f64,
    pub se_delta_0: f64,
    pub se_delta_t: f64,
    /// ms; `None` when the fitted intrinsic loss is not positive.
    pub t1_limit_at_3ghz: Option<f64>,
    pub n_points: usize,
    /// Weighted residual norm.
    pub residual_norm: f64,
    /// The unconstrained slope was negative and the fit fell back to δ_t = 0.
    pub slope_clamped: bool,
}

impl LossModelFit {
    pub fn predict(&self, p_total: f64) -> f64 {
        self.delta_0 + self.delta_t * p_total
    }

    pub fn to_fit_result(&self) -> FitResult {
        let mut r = FitResult::new(self.n_points, self.residual_norm, true)
            .with_param("delta_0", self.delta_0, self.se_delta_0)
            .with_param("delta_t", self.delta_t, self.se_delta_t);
        if let Some(t) = self.t1_limit_at_3ghz {
            r.params.insert("t1_limit_at_3ghz_ms".into(), t);
        }
        if self.slope_clamped {
            r = r.with_diagnostics("negative slope clamped to zero");
        }
        r
    }
}

pub fn t1_limit_ms(delta_0: f64) -> Option<f64> {
    (delta_0 > 0.0).then(|| 1e3 / (2.0 * std::f64::consts::PI * T1_LIMIT_FREQUENCY_HZ * delta_0))
}

/// Unweighted fit of `(p_total, 1/Q)` points.
pub fn fit_loss_model(points: &[(f64, f64)]) -> Result<LossModelFit> {
    let w = vec![1.0; points.len()];
    fit_loss_model_weighted(points, &w)
}

pub fn fit_loss_model_weighted(points: &[(f64, f64)], weights: &[f64]) -> Result<LossModelFit> {
    if weights.len() != points.len() {
        return Err(Error::Invalid("weights and points differ in length".into()));
    }
    if points.iter().any(|(p, y)| !p.is_finite() || !y.is_finite()) {
        return Err(Error::Invalid("non-finite loss point".into()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Invalid("weights must be positive".into()));
    }
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    match distinct.len() {
        0 => return Err(Error::insufficient("no loss points")),
        1 => return Err(Error::RankDeficient("single participation value".into())),
        2 => return Err(Error::insufficient("need at least 3 distinct participation values")),
        _ => {}
    }

    let n = points.len();
    let sw: f64 = weights.iter().sum();
    let xm = points.iter().zip(weights).map(|(p, w)| w * p.0).sum::<f64>() / sw;
    let ym = points.iter().zip(weights).map(|(p, w)| w * p.1).sum::<f64>() / sw;
    let sxx: f64 = points.iter().zip(weights).map(|(p, w)| w * (p.0 - xm).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .zip(weights)
        .map(|(p, w)| w * (p.0 - xm) * (p.1 - ym))
        .sum();
    if sxx <= 0.0 {
        return Err(Error::RankDeficient("degenerate participation spread".into()));
    }

    let mut slope = sxy / sxx;
    let mut intercept = ym - slope * xm;
    let clamped = slope < 0.0;
    if clamped {
        slope = 0.0;
        intercept = ym;
    }
    let wrss: f64 = points
        .iter()
        .zip(weights)
        .map(|(p, w)| w * (p.1 - intercept - slope * p.0).powi(2))
        .sum();

    let (se0, set) = if clamped {
        let s2 = if n > 1 { wrss / (n - 1) as f64 } else { 0.0 };
        ((s2 / sw).sqrt(), 0.0)
    } else {
        let s2 = if n > 2 { wrss / (n - 2) as f64 } else { 0.0 };
        ((s2 * (1.0 / sw + xm * xm / sxx)).sqrt(), (s2 / sxx).sqrt())
    };

    Ok(LossModelFit {
        delta_0: intercept,
        delta_t: slope,
        se_delta_0: se0,
        se_delta_t: set,
        t1_limit_at_3ghz: t1_limit_ms(intercept),
        n_points: n,
        residual_norm: wrss.sqrt(),
        slope_clamped: clamped,
    })
}
