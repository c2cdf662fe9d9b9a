//! Objective functions: weighted cell coverage and information-gain log-det.

mod coverage;
mod logdet;

pub use coverage::{CoverageFunction, MAX_CELLS};
pub use logdet::{InfoMatrix, LogDetFunction};
