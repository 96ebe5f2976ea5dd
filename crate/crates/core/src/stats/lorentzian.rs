// SPDX-License-Identifier: Apache-2.0

//! Telegraph-noise spectrum fit.
//!
//! A symmetric telegraph process of amplitude ±a switching at rate γ has the
//! two-sided spectrum `S(f) = 4a²γ / (4γ² + (2πf)²)`, with `S(0) = a²/γ`,
//! half power at `f = γ/π` and `∫S df = a²` over all f.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lm::{standard_errors, LeastSquaresProblem, LevenbergMarquardt};
use crate::error::{Error, Result};
use crate::fit_result::FitResult;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Two-sided Lorentzian without floor.
pub fn lorentzian_psd(f: f64, variance: f64, gamma: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * f;
    4.0 * variance * gamma / (4.0 * gamma * gamma + w * w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianOptions {
    /// Input is a one-sided density (`∫_0^∞ S df = variance`).
    pub one_sided: bool,
    pub fit_floor: bool,
    /// Input is a raw periodogram: log-residuals are χ²₂-distributed and
    /// biased by −γ_E.
    pub periodogram: bool,
}

impl Default for LorentzianOptions {
    fn default() -> Self {
        Self { one_sided: true, fit_floor: true, periodogram: false }
    }
}

impl LorentzianOptions {
    pub fn periodogram() -> Self {
        Self { periodogram: true, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    /// a², the telegraph variance.
    pub variance: f64,
    /// Hz
    pub gamma: f64,
    /// White level in the input's sidedness convention.
    pub floor: f64,
    pub se_variance: f64,
    pub se_gamma: f64,
    pub se_floor: f64,
    pub residual_norm: f64,
    pub n_points: usize,
    pub converged: bool,
    /// The data do not constrain a Lorentzian beyond a white floor.
    pub gamma_unconstrained: bool,
    pub one_sided: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
}

impl LorentzianFit {
    /// Fitted spectrum in the input's convention.
    pub fn psd(&self, f: f64) -> f64 {
        let side = if self.one_sided { 2.0 } else { 1.0 };
        side * lorentzian_psd(f, self.variance, self.gamma) + self.floor
    }

    /// Two-sided zero-frequency value of the Lorentzian part.
    pub fn s0(&self) -> f64 {
        self.variance / self.gamma
    }

    pub fn half_power_frequency(&self) -> f64 {
        self.gamma / std::f64::consts::PI
    }

    pub fn to_fit_result(&self) -> FitResult {
        let mut r = FitResult::new(self.n_points, self.residual_norm, self.converged)
            .with_param("variance", self.variance, self.se_variance)
            .with_param("gamma", self.gamma, self.se_gamma)
            .with_param("floor", self.floor, self.se_floor);
        r.diagnostics = self.diagnostics.clone();
        if self.gamma_unconstrained {
            r.diagnostics = Some("gamma unconstrained".into());
        }
        r
    }
}

struct LogProblem<'a> {
    omega2: &'a [f64],
    log_p: &'a [f64],
    bias: f64,
    fit_floor: bool,
}

impl LogProblem<'_> {
    fn parts(&self, p: &[f64]) -> (f64, f64, f64) {
        let floor = if self.fit_floor { p[2].exp() } else { 0.0 };
        (p[0].exp(), p[1].exp(), floor)
    }
}

impl LeastSquaresProblem for LogProblem<'_> {
    fn n_params(&self) -> usize {
        if self.fit_floor {
            3
        } else {
            2
        }
    }
    fn n_residuals(&self) -> usize {
        self.log_p.len()
    }
    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let (a2, g, c) = self.parts(p);
        for (i, o) in out.iter_mut().enumerate() {
            let m = 4.0 * a2 * g / (4.0 * g * g + self.omega2[i]) + c;
            *o = m.ln() - self.bias - self.log_p[i];
        }
    }
    fn jacobian(&self, p: &[f64], out: &mut DMatrix<f64>) {
        let (a2, g, c) = self.parts(p);
        for i in 0..self.log_p.len() {
            let d = 4.0 * g * g + self.omega2[i];
            let shape = 4.0 * g / d;
            let m = a2 * shape + c;
            out[(i, 0)] = a2 * shape / m;
            out[(i, 1)] = a2 * g * 4.0 * (self.omega2[i] - 4.0 * g * g) / (d * d) / m;
            if self.fit_floor {
                out[(i, 2)] = c / m;
            }
        }
    }
}

impl LogProblem<'_> {
    /// Model spectrum for log-parameters `p`.
    fn spectrum(&self, p: &[f64]) -> Vec<f64> {
        let (a2, g, c) = self.parts(p);
        self.omega2.iter().map(|w2| 4.0 * a2 * g / (4.0 * g * g + w2) + c).collect()
    }

    /// Whittle negative log-likelihood `Σ ln S + P/S` of periodogram values.
    fn whittle_nll(&self, p: &[f64], power: &[f64]) -> f64 {
        self.spectrum(p).iter().zip(power).map(|(s, x)| s.ln() + x / s).sum()
    }
}

struct Estimate {
    params: Vec<f64>,
    se_log: Vec<f64>,
    converged: bool,
    diagnostics: Option<String>,
}

/// Damped Fisher scoring on the Whittle likelihood over the `free` subset of
/// log-parameters.
fn whittle_scoring(problem: &LogProblem, power: &[f64], mut p: Vec<f64>, free: &[usize]) -> (Vec<f64>, f64, bool) {
    let n = power.len();
    let k = free.len();
    let mut nll = problem.whittle_nll(&p, power);
    let mut jac = DMatrix::zeros(n, problem.n_params());
    let mut lambda: f64 = 1e-3;
    for _ in 0..300 {
        problem.jacobian(&p, &mut jac);
        let s = problem.spectrum(&p);
        let mut grad = nalgebra::DVector::<f64>::zeros(k);
        let mut info = DMatrix::<f64>::zeros(k, k);
        for i in 0..n {
            let w = 1.0 - power[i] / s[i];
            for (a, &fa) in free.iter().enumerate() {
                grad[a] += w * jac[(i, fa)];
                for (b, &fb) in free.iter().enumerate() {
                    info[(a, b)] += jac[(i, fa)] * jac[(i, fb)];
                }
            }
        }
        if !nll.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return (p, nll, false);
        }
        if grad.amax() < 1e-9 {
            return (p, nll, true);
        }
        let floor = 1e-12 * info.diagonal().amax().max(f64::MIN_POSITIVE);
        loop {
            let mut a = info.clone();
            for d in 0..k {
                a[(d, d)] += lambda * info[(d, d)].max(floor);
            }
            let step = a.cholesky().map(|c| c.solve(&(-&grad)));
            if let Some(step) = step {
                let mut trial = p.clone();
                for (a, &fa) in free.iter().enumerate() {
                    trial[fa] += step[a];
                }
                let t = problem.whittle_nll(&trial, power);
                if t.is_finite() && t <= nll {
                    let done = nll - t <= 1e-13 * n as f64;
                    p = trial;
                    nll = t;
                    lambda = (lambda / 10.0).max(1e-12);
                    if done {
                        return (p, nll, true);
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                return (p, nll, true);
            }
        }
    }
    (p, nll, false)
}

/// Fits `freqs` (Hz) and `psd` (Hz²/Hz). The DC bin (empty after mean
/// removal, up to roundoff) and bins with non-positive power are skipped.
///
/// Smooth spectra are fitted by least squares in `ln S`; raw periodograms
/// (`opts.periodogram`) by maximising the Whittle likelihood. In both cases
/// the corner `γ/π` is confined to a band around the observed frequencies,
/// outside of which a Lorentzian is indistinguishable from a power law or a
/// floor.
pub fn fit_lorentzian_psd(freqs: &[f64], psd: &[f64], opts: LorentzianOptions) -> Result<LorentzianFit> {
    if freqs.len() != psd.len() {
        return Err(Error::Invalid("freqs and psd differ in length".into()));
    }
    let side = if opts.one_sided { 0.5 } else { 1.0 };
    let pts: Vec<(f64, f64)> = freqs
        .iter()
        .zip(psd)
        .filter(|(f, p)| f.is_finite() && p.is_finite() && **f > 0.0 && **p > 0.0)
        .map(|(&f, &p)| (f, p * side))
        .collect();
    if pts.len() < 6 {
        return Err(Error::insufficient(format!("{} usable frequency points, need 6", pts.len())));
    }
    let fmin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let fmax = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    if !(fmax >= 10.0 * fmin) {
        return Err(Error::insufficient("frequency points span less than a decade"));
    }

    let two_pi = 2.0 * std::f64::consts::PI;
    let omega2: Vec<f64> = pts.iter().map(|p| (two_pi * p.0).powi(2)).collect();
    let power: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let log_p: Vec<f64> = power.iter().map(|p| p.ln()).collect();
    let bias = if opts.periodogram { -EULER_GAMMA } else { 0.0 };
    let n = pts.len();
    let problem = LogProblem { omega2: &omega2, log_p: &log_p, bias, fit_floor: opts.fit_floor };
    let (glo, ghi) = ((std::f64::consts::PI * fmin / 30.0).ln(), (std::f64::consts::PI * fmax * 3.0).ln());
    let grid: Vec<f64> = (0..=120).map(|k| glo + (ghi - glo) * k as f64 / 120.0).collect();

    // Amplitude and floor for a fixed γ by relative-error linear least squares.
    let linear_start = |lg: f64| -> Vec<f64> {
        let g = lg.exp();
        let shape: Vec<f64> = omega2.iter().map(|w2| 4.0 * g / (4.0 * g * g + w2)).collect();
        let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (s, p) in shape.iter().zip(&power) {
            let (x1, x2) = (s / p, 1.0 / p);
            s11 += x1 * x1;
            s12 += x1 * x2;
            s22 += x2 * x2;
            b1 += x1;
            b2 += x2;
        }
        let (mut a2, mut c) = (b1 / s11, 0.0);
        if opts.fit_floor {
            let det = s11 * s22 - s12 * s12;
            let (a, cc) = ((b1 * s22 - b2 * s12) / det, (s11 * b2 - s12 * b1) / det);
            if a > 0.0 && cc > 0.0 {
                (a2, c) = (a, cc);
            } else {
                c = 1e-3 * power.iter().copied().fold(f64::INFINITY, f64::min);
            }
        }
        let mut p = vec![a2.max(f64::MIN_POSITIVE).ln(), lg];
        if opts.fit_floor {
            p.push(c.max(f64::MIN_POSITIVE).ln());
        }
        p
    };
    let in_band = |lg: f64| lg >= glo && lg <= ghi;

    let (est, white_gap, threshold, residual_norm) = if opts.periodogram {
        let nuisance: Vec<usize> = if opts.fit_floor { vec![0, 2] } else { vec![0] };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for &lg in &grid {
            let (p, nll, _) = whittle_scoring(&problem, &power, linear_start(lg), &nuisance);
            if nll.is_finite() && best.as_ref().is_none_or(|b| nll < b.0) {
                best = Some((nll, p));
            }
        }
        let (profile_nll, profile_p) = best.ok_or_else(|| Error::Invalid("no finite starting point".into()))?;
        let all: Vec<usize> = (0..problem.n_params()).collect();
        let (polished, nll, converged) = whittle_scoring(&problem, &power, profile_p.clone(), &all);
        let (params, nll) = if in_band(polished[1]) && nll <= profile_nll {
            (polished, nll)
        } else {
            (profile_p, profile_nll)
        };

        let mut jac = DMatrix::zeros(n, problem.n_params());
        problem.jacobian(&params, &mut jac);
        let info = jac.transpose() * &jac;
        let se_log = info
            .try_inverse()
            .map(|c| (0..c.nrows()).map(|k| c[(k, k)].abs().sqrt()).collect())
            .unwrap_or_else(|| vec![f64::NAN; problem.n_params()]);
        let mean_p = power.iter().sum::<f64>() / n as f64;
        let white_nll = n as f64 * (mean_p.ln() + 1.0);
        let mut r = vec![0.0; n];
        problem.residuals(&params, &mut r);
        let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        // Likelihood ratio against a white spectrum, 99% point of χ²₂.
        (Estimate { params, se_log, converged, diagnostics: None }, 2.0 * (white_nll - nll), 9.21, rn)
    } else {
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut r = vec![0.0; n];
        for &lg in &grid {
            let p = linear_start(lg);
            problem.residuals(&p, &mut r);
            let cost: f64 = r.iter().map(|x| x * x).sum();
            if cost.is_finite() && best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, p));
            }
        }
        let (start_cost, start) = best.ok_or_else(|| Error::Invalid("no finite starting point".into()))?;
        let report = LevenbergMarquardt::default().with_max_iterations(1000).minimize(&problem, &start);
        let (params, rss) = if in_band(report.params[1]) {
            (report.params.clone(), report.rss)
        } else {
            (start, start_cost)
        };
        let mut jac = DMatrix::zeros(n, problem.n_params());
        problem.jacobian(&params, &mut jac);
        let se_log = standard_errors(&jac, rss);
        let mean_log = log_p.iter().sum::<f64>() / n as f64;
        let cost_white: f64 = log_p.iter().map(|l| (l - mean_log).powi(2)).sum();
        let diagnostics = (!report.converged())
            .then(|| format!("{:?} after {} iterations", report.termination, report.iterations));
        (
            Estimate { params, se_log, converged: report.converged(), diagnostics },
            cost_white - rss,
            1e-9 * n as f64,
            rss.sqrt(),
        )
    };

    let (a2, g, c) = problem.parts(&est.params);
    let at_edge = est.params[1] <= grid[1] || est.params[1] >= grid[grid.len() - 2];
    let gamma_unconstrained = white_gap < threshold || at_edge;
    let out_side = 1.0 / side;

    let (floor, se_floor) = if gamma_unconstrained {
        // white-only model: geometric mean for smooth input, arithmetic mean
        // (the Whittle estimate) for a periodogram
        let fl = if opts.periodogram {
            power.iter().sum::<f64>() / n as f64
        } else {
            (log_p.iter().sum::<f64>() / n as f64).exp()
        };
        let sd = if opts.periodogram { 1.0 } else { crate::stats::sample_std(&log_p) };
        (fl * out_side, fl * out_side * sd / (n as f64).sqrt())
    } else if opts.fit_floor {
        (c * out_side, c * out_side * est.se_log[2])
    } else {
        (0.0, 0.0)
    };

    Ok(LorentzianFit {
        variance: a2,
        gamma: g,
        floor,
        se_variance: a2 * est.se_log[0],
        se_gamma: g * est.se_log[1],
        se_floor,
        residual_norm,
        n_points: n,
        converged: est.converged,
        gamma_unconstrained,
        one_sided: opts.one_sided,
        diagnostics: est.diagnostics,
    })
}
