// SPDX-License-Identifier: Apache-2.0

//! Area dependence of the normal-resistance spread.
//!
//! Model A (constant area variance): `RSD(A) = √(r² + (100·σ_A/A)²)`, σ_A in μm².
//! Model B (constant CD variance, `A = CD²`): `RSD(A) = √(r² + (0.2·σ_CD)²/A)`,
//! σ_CD in nm, A in μm². RSD values in percent throughout.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lm::{standard_errors, LeastSquaresProblem, LevenbergMarquardt};
use crate::error::{Error, Result};
use crate::fit_result::FitResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RsdModel {
    A,
    B,
}

impl RsdModel {
    /// Coefficient multiplying σ² in the squared model.
    fn basis(self, area: f64) -> f64 {
        match self {
            RsdModel::A => (100.0 / area).powi(2),
            RsdModel::B => 0.04 / area,
        }
    }

    pub fn sigma_name(self) -> &'static str {
        match self {
            RsdModel::A => "sigma_a",
            RsdModel::B => "sigma_cd",
        }
    }
}

/// Model value in percent.
pub fn rsd_model_value(model: RsdModel, rsd_ra: f64, sigma: f64, area: f64) -> f64 {
    (rsd_ra * rsd_ra + model.basis(area) * sigma * sigma).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsdModelFit {
    pub model: RsdModel,
    /// %
    pub rsd_ra: f64,
    /// σ_A in μm² (model A) or σ_CD in nm (model B).
    pub sigma: f64,
    pub se_rsd_ra: f64,
    pub se_sigma: f64,
    pub residual_norm: f64,
    pub n_points: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
}

impl RsdModelFit {
    pub fn sigma_a(&self) -> Option<f64> {
        (self.model == RsdModel::A).then_some(self.sigma)
    }

    pub fn sigma_cd(&self) -> Option<f64> {
        (self.model == RsdModel::B).then_some(self.sigma)
    }

    pub fn predict(&self, area: f64) -> f64 {
        rsd_model_value(self.model, self.rsd_ra, self.sigma, area)
    }

    /// Area contribution alone, `RSD_A(A)` in percent.
    pub fn area_rsd(&self, area: f64) -> f64 {
        self.model.basis(area).sqrt() * self.sigma
    }

    pub fn to_fit_result(&self) -> FitResult {
        let mut r = FitResult::new(self.n_points, self.residual_norm, self.converged)
            .with_param("rsd_ra", self.rsd_ra, self.se_rsd_ra)
            .with_param(self.model.sigma_name(), self.sigma, self.se_sigma);
        r.diagnostics = self.diagnostics.clone();
        r
    }
}

struct Problem<'a> {
    model: RsdModel,
    points: &'a [(f64, f64)],
}

impl LeastSquaresProblem for Problem<'_> {
    fn n_params(&self) -> usize {
        2
    }
    fn n_residuals(&self) -> usize {
        self.points.len()
    }
    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for (o, &(a, y)) in out.iter_mut().zip(self.points) {
            *o = rsd_model_value(self.model, p[0], p[1], a) - y;
        }
    }
    fn jacobian(&self, p: &[f64], out: &mut DMatrix<f64>) {
        for (i, &(a, _)) in self.points.iter().enumerate() {
            let c = self.model.basis(a);
            let m = rsd_model_value(self.model, p[0], p[1], a).max(1e-300);
            out[(i, 0)] = p[0] / m;
            out[(i, 1)] = c * p[1] / m;
        }
    }
}

/// Nonlinear least squares on `(area μm², rsd %)` points.
///
/// The model depends on the parameters only through their squares, so the
/// optimizer works on signed `(u, v)` and reports `(|u|, |v|)`.
pub fn fit_rsd_model(points: &[(f64, f64)], model: RsdModel) -> Result<RsdModelFit> {
    if points.iter().any(|&(a, y)| !(a.is_finite() && a > 0.0 && y.is_finite() && y >= 0.0)) {
        return Err(Error::Invalid("areas must be positive and RSD nonnegative".into()));
    }
    let mut areas: Vec<f64> = points.iter().map(|p| p.0).collect();
    areas.sort_by(f64::total_cmp);
    areas.dedup();
    if areas.len() < 3 {
        return Err(Error::insufficient("need at least 3 distinct areas"));
    }

    // Linear least squares of y² on [1, basis(A)] for the starting point.
    let n = points.len();
    let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { model.basis(points[i].0) });
    let y2 = nalgebra::DVector::from_iterator(n, points.iter().map(|p| p.1 * p.1));
    let init = x
        .clone()
        .svd(true, true)
        .solve(&y2, 1e-14)
        .map(|b| [b[0].max(0.0).sqrt(), b[1].max(0.0).sqrt()])
        .unwrap_or([points.iter().map(|p| p.1).fold(0.0, f64::max), 0.0]);
    // Keep off the exact zero where the Jacobian column vanishes.
    let ymax = points.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-12);
    let smax = (ymax * ymax / model.basis(areas[0])).sqrt();
    let start = [init[0].max(1e-6 * ymax), init[1].max(1e-6 * smax)];

    let problem = Problem { model, points };
    let report = LevenbergMarquardt::default().minimize(&problem, &start);
    let (u, v) = (report.params[0].abs(), report.params[1].abs());

    let mut jac = DMatrix::zeros(n, 2);
    problem.jacobian(&[u, v], &mut jac);
    let se = standard_errors(&jac, report.rss);

    Ok(RsdModelFit {
        model,
        rsd_ra: u,
        sigma: v,
        se_rsd_ra: se[0],
        se_sigma: se[1],
        residual_norm: report.rss.sqrt(),
        n_points: n,
        converged: report.converged(),
        diagnostics: (!report.converged())
            .then(|| format!("{:?} after {} iterations", report.termination, report.iterations)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    /// μm²; infinite when the barrier term vanishes.
    pub area: f64,
    pub infinite: bool,
}

/// Area above which the barrier term dominates: `RSD_A(A*) = rsd_ra`.
pub fn crossover_area(fit: &RsdModelFit) -> Result<Crossover> {
    if !fit.converged {
        return Err(Error::Invalid("crossover of an unconverged fit".into()));
    }
    if fit.rsd_ra <= 0.0 {
        return Ok(Crossover { area: f64::INFINITY, infinite: true });
    }
    let area = match fit.model {
        RsdModel::A => 100.0 * fit.sigma / fit.rsd_ra,
        RsdModel::B => (0.2 * fit.sigma / fit.rsd_ra).powi(2),
    };
    Ok(Crossover { area, infinite: false })
}
