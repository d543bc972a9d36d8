use thiserror::Error;

/// Errors raised by the construction and evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point outside domain: {0}")]
    Domain(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("eigenvalue iteration did not converge at index {index}")]
    NoConvergence { index: usize },

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("input exceeds frame capacity: degree {degree} > {capacity}")]
    Capacity { degree: usize, capacity: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
