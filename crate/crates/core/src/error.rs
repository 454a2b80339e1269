use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid arguments or a violated precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// A configured memory or size budget would be exceeded.
    #[error("resource error: {0}")]
    Resource(String),

    /// Initial data failed the curl constraint in check mode.
    #[error("constraint violation: L2 residual {residual:e} exceeds tolerance {tolerance:e}")]
    ConstraintViolation { residual: f64, tolerance: f64 },

    /// `RHS = 0` while `LHS > 0` in a ratio that must not degenerate.
    #[error("contradiction: {0}")]
    Contradiction(String),

    /// Quadrature or iteration failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Non-finite values appeared during time stepping.
    #[error("blowup at t = {time}")]
    Blowup { time: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
