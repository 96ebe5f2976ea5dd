// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit_result::FitResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub mu: f64,
    pub sigma: f64,
    pub se_mu: f64,
    pub se_sigma: f64,
    pub n: usize,
    /// All samples equal.
    pub degenerate: bool,
}

impl GaussianFit {
    pub fn to_fit_result(&self) -> FitResult {
        let r = FitResult::new(self.n, 0.0, true)
            .with_param("mu", self.mu, self.se_mu)
            .with_param("sigma", self.sigma, self.se_sigma);
        if self.degenerate {
            r.with_diagnostics("degenerate: sigma = 0")
        } else {
            r
        }
    }
}

/// Maximum-likelihood normal fit (1/n variance).
pub fn fit_gaussian(samples: &[f64]) -> Result<GaussianFit> {
    let n = samples.len();
    if n < 8 {
        return Err(Error::insufficient(format!("{n} samples, need at least 8")));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("non-finite sample".into()));
    }
    let nf = n as f64;
    let mu = super::mean(samples);
    let sigma = (samples.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / nf).sqrt();
    let degenerate = samples.iter().all(|&x| x == samples[0]);
    let (mu, sigma) = if degenerate { (samples[0], 0.0) } else { (mu, sigma) };
    Ok(GaussianFit {
        mu,
        sigma,
        se_mu: sigma / nf.sqrt(),
        se_sigma: sigma / (2.0 * nf).sqrt(),
        n,
        degenerate,
    })
}
