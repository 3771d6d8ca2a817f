use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("output directory {0} is owned by another run (remove .entrolab.lock if stale)")]
    LockHeld(PathBuf),
    #[error("{path}: schema version {found}, expected {expected}")]
    SchemaMismatch { path: PathBuf, found: String, expected: u32 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed report: {message}")]
    BadReport { path: PathBuf, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] entrolab::Error),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl ToString) -> CliError {
        CliError::Config { path: path.into(), message: message.to_string() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> CliError {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit status, following the sysexits conventions.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 64,
            CliError::SchemaMismatch { .. } | CliError::BadReport { .. } => 65,
            CliError::Core(_) => 70,
            CliError::Io { .. } | CliError::Csv(_) => 74,
            CliError::LockHeld(_) => 75,
        }
    }
}
