// SPDX-License-Identifier: Apache-2.0

//! Wafer-scale transmon fabrication variability: physical relations,
//! junction geometry, participation ratios, estimators, TLS spectroscopy
//! analysis and a seeded fabrication simulator.

pub mod analysis;
pub mod bundled;
pub mod constants;
pub mod dataset;
pub mod designs;
pub mod epr;
pub mod error;
pub mod fit_result;
pub mod geometry;
pub mod sim;
pub mod stats;
pub mod tls;
pub mod transmon;
pub mod units;

pub use constants::PhysicalConstants;
pub use dataset::*;
pub use error::{Error, Result};
pub use fit_result::FitResult;
pub use units::{Ghz, Mhz};
