use thiserror::Error;

/// Errors raised by model validation and numerical evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter fell outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exponential-size enumeration was requested beyond the hard cap.
    #[error("size limit exceeded: {what} = {got} (max {max})")]
    SizeLimit {
        what: &'static str,
        got: usize,
        max: usize,
    },

    /// Two inputs that must agree in length did not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A quadrature, truncation or series did not meet its tolerance.
    #[error("precision error: {0}")]
    Precision(String),

    /// A quantity that must be finite diverged (e.g. zero sample variance in a ratio).
    #[error("divergence: {0}")]
    Divergence(String),

    /// The requested combination of model and operation is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Validates `cond`, otherwise returns a domain error built from `msg`.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}
