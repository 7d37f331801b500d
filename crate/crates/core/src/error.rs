//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors produced by grid construction, spectral operators, parameter
/// selection and file I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A field contains NaN or infinite samples.
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// Two fields (or a field and a symbol) live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The discrepancy target exceeds half the data norm, so the
    /// a-posteriori rule has no solution.
    #[error("noise-dominated data: target {target:.6e} exceeds half the data norm {half_norm:.6e}")]
    NoiseDominated { target: f64, half_norm: f64 },

    /// An iterative procedure ran out of iterations.
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    /// A file could not be read or written.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file exists but does not match its declared format.
    #[error("malformed file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
