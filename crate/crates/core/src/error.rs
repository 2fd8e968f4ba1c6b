//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the denoising, tuning, and experiment routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two vectors that must have equal length do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A tuning grid is empty.
    #[error("empty parameter grid")]
    EmptyGrid,

    /// An iterative solver produced non-finite values.
    #[error("numerical divergence at iteration {iteration}")]
    Divergence { iteration: usize },

    /// An I/O failure, annotated with the path being accessed.
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
