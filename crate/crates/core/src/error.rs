use thiserror::Error;

/// Errors produced by the estimators, the MI pipeline and the file readers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a precondition (empty counts, length mismatch, n too small, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A value outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The data cannot support the requested construction (e.g. zero IQR).
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    /// Estimator kind cannot be used for this operation.
    #[error("unsupported estimator: {0}")]
    UnsupportedEstimator(String),
    /// Malformed text input (CSV, counts file, config file).
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
