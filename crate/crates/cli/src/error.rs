use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config error at line {line}: {msg}")]
    ConfigLine { line: usize, msg: String },
    #[error("invalid point: {0}")]
    Domain(hpqfim::Error),
    #[error("numerical error at theta_I = {theta:?}: {source}")]
    Numerical {
        theta: Vec<f64>,
        #[source]
        source: hpqfim::Error,
    },
    #[error("numerical error: {0}")]
    Core(#[from] hpqfim::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("verification failed: {failed} of {total} checks")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    /// 1 verification failure, 2 configuration or input error, 3 numerical
    /// failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification { .. } => 1,
            CliError::Config(_)
            | CliError::ConfigLine { .. }
            | CliError::Domain(_)
            | CliError::Io { .. }
            | CliError::Csv(_) => 2,
            CliError::Numerical { .. } | CliError::Core(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
