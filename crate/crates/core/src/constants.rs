// SPDX-License-Identifier: Apache-2.0

//! Physical constants used by the transmon and junction relations.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Planck constant, J·s (exact, SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge, C (exact, SI 2019).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;

/// Constants entering the Ambegaokar-Baratoff and transmon relations.
///
/// `delta_al` is the aluminium superconducting gap in eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub h: f64,
    pub hbar: f64,
    pub e: f64,
    pub delta_al: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            h: PLANCK,
            hbar: PLANCK / (2.0 * PI),
            e: ELEMENTARY_CHARGE,
            delta_al: 180e-6,
        }
    }
}

impl PhysicalConstants {
    pub fn with_gap(delta_al_ev: f64) -> Self {
        Self {
            delta_al: delta_al_ev,
            ..Self::default()
        }
    }

    /// Resistance quantum h/e², Ω.
    pub fn resistance_quantum(&self) -> f64 {
        self.h / (self.e * self.e)
    }

    /// Superconducting gap in joules.
    pub fn gap_joules(&self) -> f64 {
        self.delta_al * self.e
    }

    /// Returns the list of broken invariants, empty when consistent.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("h", self.h),
            ("hbar", self.hbar),
            ("e", self.e),
            ("delta_al", self.delta_al),
        ] {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!("{name} must be strictly positive"));
            }
        }
        let rel = (self.hbar - self.h / (2.0 * PI)).abs() / (self.h / (2.0 * PI));
        if !(rel <= 1e-12) {
            out.push("hbar must equal h/(2*pi)".to_string());
        }
        out
    }
}
