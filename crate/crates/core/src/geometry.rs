// SPDX-License-Identifier: Apache-2.0

//! Best-effort junction area from designed critical dimensions.
//!
//! The bottom electrode's milled top surface is modelled as half an ellipse
//! with semi-axes `cd_be/2` and `h_be`; the overlap area is the top-electrode
//! width times that arc length. Location-dependent cd drift is deliberately
//! not included here.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Electrode {
    Be,
    Te,
}

/// Constant cd corrections (nm) and bottom-electrode ellipse minor radius (nm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdCalibration {
    #[serde(default)]
    pub offset_be: f64,
    #[serde(default)]
    pub offset_te: f64,
    #[serde(default = "default_h_be")]
    pub h_be: f64,
}

fn default_h_be() -> f64 {
    59.0
}

impl Default for CdCalibration {
    fn default() -> Self {
        Self {
            offset_be: 0.0,
            offset_te: 0.0,
            h_be: default_h_be(),
        }
    }
}

impl CdCalibration {
    pub fn is_valid(&self) -> bool {
        self.h_be > 0.0 && self.offset_be.is_finite() && self.offset_te.is_finite()
    }

    pub fn with_offset(mut self, electrode: Electrode, offset: f64) -> Self {
        match electrode {
            Electrode::Be => self.offset_be = offset,
            Electrode::Te => self.offset_te = offset,
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetFit {
    pub electrode: Electrode,
    pub offset: f64,
    pub std_error: f64,
    pub n_points: usize,
}

/// Least-squares offset for `cd_measured = cd_design + offset` (unit slope).
pub fn fit_cd_offsets(pairs: &[(f64, f64)], electrode: Electrode) -> Result<OffsetFit> {
    if pairs.len() < 2 {
        return Err(Error::insufficient(format!(
            "cd offset fit needs at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let diffs: Vec<f64> = pairs.iter().map(|(d, m)| m - d).collect();
    let offset = diffs.iter().sum::<f64>() / n;
    let ss: f64 = diffs.iter().map(|d| (d - offset).powi(2)).sum();
    let std_error = (ss / (n - 1.0)).sqrt() / n.sqrt();
    Ok(OffsetFit {
        electrode,
        offset,
        std_error,
        n_points: pairs.len(),
    })
}

/// Ellipse circumference, Ramanujan's second approximation.
pub fn ellipse_circumference(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == 0.0 {
        return 0.0;
    }
    let h = ((a - b) / s).powi(2);
    PI * s * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()))
}

/// Arc length over the rounded bottom electrode (nm): half the circumference
/// of the ellipse with semi-axes `cd_be/2` and `h_be`.
pub fn bottom_electrode_arc(cd_be: f64, h_be: f64) -> f64 {
    0.5 * ellipse_circumference(0.5 * cd_be, h_be)
}

/// Junction area in μm² from designed cds (nm) and the calibration.
pub fn estimate_area(cd_design_be: f64, cd_design_te: f64, cal: &CdCalibration) -> Result<f64> {
    let be = cd_design_be + cal.offset_be;
    let te = cd_design_te + cal.offset_te;
    if !(be > 0.0 && te > 0.0) {
        return Err(Error::domain(format!(
            "corrected critical dimensions must be positive (BE {be} nm, TE {te} nm)"
        )));
    }
    if !(cal.h_be > 0.0) {
        return Err(Error::domain("h_be must be positive"));
    }
    Ok(te * bottom_electrode_arc(be, cal.h_be) * 1e-6)
}
