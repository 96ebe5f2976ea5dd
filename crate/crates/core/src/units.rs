// SPDX-License-Identifier: Apache-2.0

//! Frequency newtypes. Table I mixes MHz and GHz, so the transmon relations
//! take typed arguments instead of bare floats.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ghz(pub f64);

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mhz(pub f64);

impl Ghz {
    pub fn hz(self) -> f64 {
        self.0 * 1e9
    }

    pub fn from_hz(hz: f64) -> Self {
        Ghz(hz * 1e-9)
    }
}

impl Mhz {
    pub fn hz(self) -> f64 {
        self.0 * 1e6
    }
}

impl From<Mhz> for Ghz {
    fn from(m: Mhz) -> Self {
        Ghz(m.0 * 1e-3)
    }
}

impl From<Ghz> for Mhz {
    fn from(g: Ghz) -> Self {
        Mhz(g.0 * 1e3)
    }
}

impl fmt::Display for Ghz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} GHz", self.0)
    }
}

impl fmt::Display for Mhz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} MHz", self.0)
    }
}
