//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Instance file could not be parsed; carries the 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A structural invariant of the input data does not hold.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// A point or candidate id is out of range or otherwise invalid.
    #[error("invalid id: {0}")]
    InvalidId(String),

    /// The requested operation does not apply to this metric or objective.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Exhaustive enumeration would exceed the configured subset limit.
    #[error("enumeration limit exceeded: {required} subsets required, limit is {limit}")]
    LimitExceeded { required: u128, limit: u128 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
