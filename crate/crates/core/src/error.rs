use thiserror::Error;

/// Errors raised by geometry, averaging and experiment code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point does not belong to the space (non-SPD matrix, off-hyperboloid vector, NaN, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument is outside its admissible range (t outside [0,1], empty input, bad indices, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numerical routine failed to produce a usable result.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// An iterative solver stopped before reaching its tolerance.
    #[error("did not converge after {iterations} iterations (last step {last_step:e})")]
    NotConverged { iterations: usize, last_step: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
