use std::path::PathBuf;

use thiserror::Error;

/// Everything the front end can fail with, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Config { path: String, line: usize, msg: String },
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Data(_) | CliError::Io { .. } => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<ngr_core::Error> for CliError {
    fn from(e: ngr_core::Error) -> Self {
        match e {
            ngr_core::Error::NonFinite { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
