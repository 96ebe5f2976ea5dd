// SPDX-License-Identifier: Apache-2.0

//! Estimators: outlier filtering, linear and nonlinear least squares for the
//! loss, variability and noise models, radial wafer profiles and grouped
//! summaries.

mod gaussian;
mod iqr;
mod jump;
pub mod lm;
mod lorentzian;
mod loss;
mod radial;
mod rsd;
mod summary;

pub use gaussian::{fit_gaussian, GaussianFit};
pub use iqr::{iqr_filter, quantile, IqrSplit};
pub use jump::{detect_jump, JumpEvent};
pub use lorentzian::{fit_lorentzian_psd, lorentzian_psd, LorentzianFit, LorentzianOptions};
pub use loss::{fit_loss_model, fit_loss_model_weighted, t1_limit_ms, LossModelFit};
pub use radial::{radial_profile, radial_profile_with_bins, RadialBin, RadialProfile};
pub use rsd::{crossover_area, fit_rsd_model, rsd_model_value, Crossover, RsdModel, RsdModelFit};
pub use summary::{group_summary, GroupSummary};

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1).
pub(crate) fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}
