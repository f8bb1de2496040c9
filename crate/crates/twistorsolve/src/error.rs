//! Failures of a run and their exit codes.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    /// Exit code 2.
    #[error("config invalid: {0}")]
    Config(String),
    /// Exit code 3.
    #[error("solver failure: {0}")]
    Solver(String),
    /// Exit code 4.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Exit code 4, for malformed input files.
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl AppError {
    pub fn config(message: impl Into<String>) -> Self {
        AppError::Config(message.into())
    }

    pub fn solver(message: impl Into<String>) -> Self {
        AppError::Solver(message.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        AppError::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Solver(_) => 3,
            AppError::Io { .. } | AppError::Parse { .. } => 4,
        }
    }
}
