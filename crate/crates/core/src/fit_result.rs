// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Generic fit outcome, the serialized form of every estimator's result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: BTreeMap<String, f64>,
    pub std_errors: BTreeMap<String, f64>,
    pub residual_norm: f64,
    pub n_points: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
}

impl FitResult {
    pub fn new(n_points: usize, residual_norm: f64, converged: bool) -> Self {
        Self {
            params: BTreeMap::new(),
            std_errors: BTreeMap::new(),
            residual_norm,
            n_points,
            converged,
            diagnostics: None,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64, std_error: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self.std_errors.insert(name.to_string(), std_error.abs());
        self
    }

    pub fn with_diagnostics(mut self, msg: impl Into<String>) -> Self {
        self.diagnostics = Some(msg.into());
        self
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.std_errors.get(name).copied()
    }

    /// `std_errors` nonnegative, and a converged fit has a finite residual.
    pub fn is_consistent(&self) -> bool {
        self.std_errors.values().all(|s| *s >= 0.0 || s.is_nan())
            && (!self.converged || self.residual_norm.is_finite())
    }
}
