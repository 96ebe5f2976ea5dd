// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::dataset::WAFER_RADIUS_MM;
use crate::error::{Error, Result};

pub const DEFAULT_RADIAL_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialBin {
    pub r_lo: f64,
    pub r_hi: f64,
    pub n: usize,
    /// `NaN` for empty bins.
    pub mean: f64,
    pub std: f64,
    pub mean_radius: f64,
}

/// Radius-binned means with a piecewise-linear evaluator through the
/// (mean radius, mean value) of occupied bins. The end segments extend
/// linearly to the innermost/outermost sampled radius; beyond that the value
/// is held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub bins: Vec<RadialBin>,
    pub r_min: f64,
    pub r_max: f64,
}

impl RadialProfile {
    pub fn edges(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.bins.iter().map(|b| b.r_lo).collect();
        e.extend(self.bins.last().map(|b| b.r_hi));
        e
    }

    fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.bins.iter().filter(|b| b.n > 0).map(|b| (b.mean_radius, b.mean))
    }

    pub fn eval(&self, r: f64) -> f64 {
        let knots: Vec<(f64, f64)> = self.knots().collect();
        if knots.len() == 1 {
            return knots[0].1;
        }
        let r = r.clamp(self.r_min, self.r_max);
        let k = knots.partition_point(|&(x, _)| x <= r).clamp(1, knots.len() - 1);
        let ((x0, y0), (x1, y1)) = (knots[k - 1], knots[k]);
        y0 + (y1 - y0) * (r - x0) / (x1 - x0)
    }
}

pub fn radial_profile(positions: &[(f64, f64)], values: &[f64]) -> Result<RadialProfile> {
    radial_profile_with_bins(positions, values, DEFAULT_RADIAL_BINS)
}

pub fn radial_profile_with_bins(
    positions: &[(f64, f64)],
    values: &[f64],
    n_bins: usize,
) -> Result<RadialProfile> {
    if positions.len() != values.len() {
        return Err(Error::Invalid("positions and values differ in length".into()));
    }
    if n_bins == 0 {
        return Err(Error::Invalid("zero bins".into()));
    }
    let radii: Vec<f64> = positions.iter().map(|&(x, y)| x.hypot(y)).collect();
    let mut distinct: Vec<i64> = radii.iter().map(|r| (r * 1e6).round() as i64).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if values.len() < 5 || distinct.len() < 3 {
        return Err(Error::insufficient(format!(
            "insufficient radii: {} points at {} distinct radii",
            values.len(),
            distinct.len()
        )));
    }

    let width = WAFER_RADIUS_MM / n_bins as f64;
    let mut members: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n_bins];
    for (&r, &v) in radii.iter().zip(values) {
        let i = ((r / width) as usize).min(n_bins - 1);
        members[i].push((r, v));
    }
    let bins = members
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let vs: Vec<f64> = m.iter().map(|p| p.1).collect();
            let rs: Vec<f64> = m.iter().map(|p| p.0).collect();
            let empty = m.is_empty();
            RadialBin {
                r_lo: i as f64 * width,
                r_hi: (i + 1) as f64 * width,
                n: m.len(),
                mean: if empty { f64::NAN } else { super::mean(&vs) },
                std: super::sample_std(&vs),
                mean_radius: if empty { f64::NAN } else { super::mean(&rs) },
            }
        })
        .collect();
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    Ok(RadialProfile { bins, r_min, r_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::GridPosition;

    fn die_centers() -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for c in -6..=6 {
            for r in -5..=5 {
                let p = GridPosition(c, r);
                if p.center_radius() < 140.0 {
                    out.push(p.center_mm());
                }
            }
        }
        out
    }

    #[test]
    fn constant_field() {
        let pos = die_centers();
        let prof = radial_profile(&pos, &vec![75.0; pos.len()]).unwrap();
        for r in [0.0, 33.0, 77.7, 150.0] {
            assert!((prof.eval(r) - 75.0).abs() < 1e-12);
        }
        assert_eq!(prof.edges().len(), 11);
        assert_eq!(prof.edges()[10], 150.0);
    }

    #[test]
    fn planted_quadratic() {
        let truth = |r: f64| 113.0 - 71.0 * (r / 150.0).powi(2);
        let pos = die_centers();
        let vals: Vec<f64> = pos.iter().map(|p| truth(p.0.hypot(p.1))).collect();
        let prof = radial_profile(&pos, &vals).unwrap();
        for p in &pos {
            let r = p.0.hypot(p.1);
            assert!((prof.eval(r) - truth(r)).abs() < 0.05 * truth(r), "r={r}");
        }
    }

    #[test]
    fn rotation_invariant() {
        let pos = die_centers();
        let vals: Vec<f64> = pos.iter().map(|p| p.0.hypot(p.1).sqrt()).collect();
        let rot: Vec<(f64, f64)> = pos.iter().map(|&(x, y)| (-y, x)).collect();
        let a = serde_json::to_string(&radial_profile(&pos, &vals).unwrap()).unwrap();
        let b = serde_json::to_string(&radial_profile(&rot, &vals).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_radius_is_an_error() {
        let pos = [(10.0, 0.0), (0.0, 10.0), (-10.0, 0.0), (0.0, -10.0), (6.0, 8.0)];
        let e = radial_profile(&pos, &[1.0; 5]).unwrap_err();
        assert!(e.to_string().contains("insufficient radii"));
    }
}
