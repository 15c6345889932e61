use thiserror::Error;

/// Errors raised by the exact and numeric layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation (zero polynomial,
    /// off-curve point, pole of a function, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented case the implementation does not cover.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A stated precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The working precision ran out before the requested result was certified.
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
