use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: expected {expected} samples, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("incompatible grids: {0}")]
    IncompatibleGrid(String),
    #[error("iteration did not converge: {what} (residual {residual:e})")]
    NoConvergence { what: String, residual: f64 },
    #[error("regime not met: {0}")]
    Regime(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
