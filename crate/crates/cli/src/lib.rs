//! Config-driven experiment runner over `nclp-core`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::time::Instant;

pub use config::{ExperimentConfig, Format};
pub use error::CliError;
pub use report::{Comparison, Report, Row};

/// Validates `config` and runs its experiment.
pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let start = Instant::now();
    let rows = experiments::dispatch(config)?;
    Ok(Report::new(config.clone(), rows, start.elapsed().as_secs_f64()))
}
