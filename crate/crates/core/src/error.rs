use thiserror::Error;

/// Errors raised by library operations.
///
/// Statistical or structural outcomes (a certificate that does not pass, a
/// flower search that degenerates) are reported as data, never as errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("space too large: {0}")]
    CapExceeded(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("operands live in different spaces: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
