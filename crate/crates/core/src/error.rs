use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The behavior's scenario does not match what the operation expects.
    #[error("scenario mismatch: expected {expected}, got {actual}")]
    Scenario { expected: String, actual: String },

    /// Strategy enumeration would exceed the configured cap.
    #[error("strategy count {count} exceeds cap {cap}")]
    Size { count: u128, cap: u128 },

    #[error("estimation error: {0}")]
    Estimation(String),

    /// The simplex engine or an optimizer failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
