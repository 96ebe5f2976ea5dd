// SPDX-License-Identifier: Apache-2.0

//! Levenberg-Marquardt for small dense least-squares problems.
//!
//! Minimises `Σ rᵢ(p)²` with Marquardt's diagonal scaling of the damped
//! normal equations `(JᵀJ + λ·diag(JᵀJ))·δ = −Jᵀr`.

use nalgebra::{DMatrix, DVector};

pub trait LeastSquaresProblem {
    fn n_params(&self) -> usize;
    fn n_residuals(&self) -> usize;
    fn residuals(&self, params: &[f64], out: &mut [f64]);

    /// Row-major `n_residuals × n_params` Jacobian. Central differences by
    /// default.
    fn jacobian(&self, params: &[f64], out: &mut DMatrix<f64>) {
        let m = self.n_residuals();
        let mut p = params.to_vec();
        let mut plus = vec![0.0; m];
        let mut minus = vec![0.0; m];
        for j in 0..self.n_params() {
            let h = 1e-7 * params[j].abs().max(1e-7);
            p[j] = params[j] + h;
            self.residuals(&p, &mut plus);
            p[j] = params[j] - h;
            self.residuals(&p, &mut minus);
            p[j] = params[j];
            for i in 0..m {
                out[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Residual sum of squares reached (numerical) zero.
    ExactFit,
    CostTolerance,
    StepTolerance,
    GradientTolerance,
    /// Damping grew without finding a downhill step.
    Stalled,
    MaxIterations,
    NonFinite,
}

impl Termination {
    pub fn converged(self) -> bool {
        !matches!(
            self,
            Termination::MaxIterations | Termination::NonFinite
        )
    }
}

#[derive(Debug, Clone)]
pub struct LmReport {
    pub params: Vec<f64>,
    /// Residual sum of squares.
    pub rss: f64,
    pub iterations: usize,
    pub termination: Termination,
}

impl LmReport {
    pub fn converged(&self) -> bool {
        self.termination.converged()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LevenbergMarquardt {
    pub max_iterations: usize,
    pub ftol: f64,
    pub xtol: f64,
    pub gtol: f64,
    pub initial_lambda: f64,
}

impl Default for LevenbergMarquardt {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            ftol: 1e-15,
            xtol: 1e-14,
            gtol: 1e-15,
            initial_lambda: 1e-3,
        }
    }
}

fn rss(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

impl LevenbergMarquardt {
    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn minimize<P: LeastSquaresProblem>(&self, problem: &P, initial: &[f64]) -> LmReport {
        let n = problem.n_params();
        let m = problem.n_residuals();
        let mut p = initial.to_vec();
        let mut r = vec![0.0; m];
        problem.residuals(&p, &mut r);
        let mut cost = rss(&r);
        if !cost.is_finite() {
            return LmReport { params: p, rss: cost, iterations: 0, termination: Termination::NonFinite };
        }
        let mut lambda = self.initial_lambda;
        let mut jac = DMatrix::zeros(m, n);
        let mut trial = vec![0.0; n];
        let mut r_trial = vec![0.0; m];

        for iter in 0..self.max_iterations {
            if cost <= f64::MIN_POSITIVE {
                return LmReport { params: p, rss: cost, iterations: iter, termination: Termination::ExactFit };
            }
            problem.jacobian(&p, &mut jac);
            let rv = DVector::from_column_slice(&r);
            let jtj = jac.transpose() * &jac;
            let g = jac.transpose() * rv;
            let gmax = g.amax();
            if !gmax.is_finite() {
                return LmReport { params: p, rss: cost, iterations: iter, termination: Termination::NonFinite };
            }
            if gmax <= self.gtol * cost.max(f64::MIN_POSITIVE).sqrt() * jtj.diagonal().amax().sqrt() {
                return LmReport { params: p, rss: cost, iterations: iter, termination: Termination::GradientTolerance };
            }

            let diag_floor = 1e-30 * jtj.diagonal().amax().max(f64::MIN_POSITIVE);
            loop {
                let mut a = jtj.clone();
                for k in 0..n {
                    a[(k, k)] += lambda * jtj[(k, k)].max(diag_floor);
                }
                let step = match a.cholesky() {
                    Some(ch) => ch.solve(&(-&g)),
                    None => {
                        lambda *= 10.0;
                        if lambda > 1e20 {
                            return LmReport { params: p, rss: cost, iterations: iter, termination: Termination::Stalled };
                        }
                        continue;
                    }
                };
                for k in 0..n {
                    trial[k] = p[k] + step[k];
                }
                problem.residuals(&trial, &mut r_trial);
                let cost_trial = rss(&r_trial);
                if cost_trial.is_finite() && cost_trial < cost {
                    let step_norm = step.norm();
                    let p_norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let reduction = cost - cost_trial;
                    p.copy_from_slice(&trial);
                    r.copy_from_slice(&r_trial);
                    cost = cost_trial;
                    lambda = (lambda / 10.0).max(1e-15);
                    if reduction <= self.ftol * cost {
                        return LmReport { params: p, rss: cost, iterations: iter + 1, termination: Termination::CostTolerance };
                    }
                    if step_norm <= self.xtol * (p_norm + self.xtol) {
                        return LmReport { params: p, rss: cost, iterations: iter + 1, termination: Termination::StepTolerance };
                    }
                    break;
                }
                lambda *= 10.0;
                if lambda > 1e20 {
                    return LmReport { params: p, rss: cost, iterations: iter + 1, termination: Termination::Stalled };
                }
            }
        }
        LmReport { params: p, rss: cost, iterations: self.max_iterations, termination: Termination::MaxIterations }
    }
}

/// Parameter standard errors `√diag(s²·(JᵀJ)⁺)` with `s² = rss/(n − p)`, from
/// the Jacobian of the residuals with respect to the reported parameters.
pub fn standard_errors(jac: &DMatrix<f64>, rss: f64) -> Vec<f64> {
    let (m, n) = jac.shape();
    let dof = m.saturating_sub(n);
    let s2 = if dof > 0 { rss / dof as f64 } else { 0.0 };
    let jtj = jac.transpose() * jac;
    if jtj.iter().any(|x| !x.is_finite()) {
        return vec![f64::NAN; n];
    }
    let cov = jtj
        .clone()
        .try_inverse()
        .filter(|c| c.iter().all(|x| x.is_finite()))
        .or_else(|| {
            let scale = jtj.amax();
            jtj.clone().try_svd(true, true, f64::EPSILON, 10_000)
                .and_then(|svd| svd.pseudo_inverse(1e-14 * scale).ok())
        })
        .unwrap_or_else(|| DMatrix::zeros(n, n));
    (0..n).map(|k| (s2 * cov[(k, k)]).abs().sqrt()).collect()
}
