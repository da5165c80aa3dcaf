//! Crate-wide error type.
//!
//! Recoverable failures (bad configuration, malformed data, I/O) are
//! reported through [`Error`]. Violations of documented call contracts
//! (dimension mismatches on pure math functions, out-of-range indices)
//! panic instead; they indicate a bug in the caller, not a data problem.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid sampler or scenario configuration, detected before any work.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}
