use std::path::PathBuf;

use thiserror::Error;

/// Harness errors.
#[derive(Debug, Error)]
pub enum Error {
    /// Configuration rejected by validation.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Estimator or model error.
    #[error(transparent)]
    Core(#[from] aoa_nlos::Error),
    /// Malformed input row.
    #[error("{path}:{line}: {message}")]
    Parse {
        /// Input file.
        path: PathBuf,
        /// 1-based line number.
        line: u64,
        /// What was wrong.
        message: String,
    },
    /// Mismatched or empty inputs.
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{path}: {source}")]
    /// File could not be read or written.
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// CSV encoding or decoding failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// JSON config failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// Worker pool could not be built.
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Result alias for the harness.
pub type Result<T> = std::result::Result<T, Error>;
