use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown experiment `{0}` (expected one of: {list})", list = crate::config::EXPERIMENTS.join(", "))]
    UnknownExperiment(String),
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("computation failed: {0}")]
    Core(#[from] nclp_core::Error),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn invalid(what: &str, e: impl std::fmt::Display) -> Self {
        Self::Invalid(format!("{what}: {e}"))
    }
}
