// SPDX-License-Identifier: Apache-2.0

//! Recipes, reports and plots behind the `waferqc` command.

pub mod recipes;
pub mod report;
pub mod svg;

pub use recipes::{run_recipe, Inputs, Recipe, RecipeParams};
pub use report::{AnalysisReport, Table};
pub use svg::{emit_wafer_map, DieValue};

/// Failure classes, each with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("fit did not converge: {0}")]
    NonConvergence(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::NonConvergence(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<waferqc_core::Error> for CliError {
    fn from(e: waferqc_core::Error) -> Self {
        match e {
            waferqc_core::Error::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub const THREADS_ENV: &str = "WAFERQC_THREADS";

/// Caps the global rayon pool at `WAFERQC_THREADS` when set. Call once,
/// before any parallel work.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Validation(format!("{THREADS_ENV}={v} is not a positive integer")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
