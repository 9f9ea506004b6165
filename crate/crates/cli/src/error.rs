//! CLI error taxonomy with stable exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("ingestion error: {0}")]
    Ingestion(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("compute error: {0}")]
    Compute(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Exit codes: 2 config, 3 ingestion, 4 fit, 5 compute, 6 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Ingestion(_) => 3,
            CliError::Fit(_) => 4,
            CliError::Compute(_) => 5,
            CliError::Io(_) => 6,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
