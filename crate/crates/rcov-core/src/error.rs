//! Shared error type for all core operations.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid degrees of freedom: {0}")]
    InvalidDegreesOfFreedom(String),

    #[error("series too short: {0}")]
    SeriesTooShort(String),

    #[error("singular design matrix: {0}")]
    SingularDesign(String),

    #[error("log-likelihood not finite: {0}")]
    NonFiniteLikelihood(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("empty split: {0}")]
    EmptySplit(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
