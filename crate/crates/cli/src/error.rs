use std::process::ExitCode;

use cogsec_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(Error::RateConstraint { .. } | Error::InvalidScheme(_)) => ExitCode::from(4),
            _ => ExitCode::from(2),
        }
    }
}
