use thiserror::Error;

/// Errors raised by the library's constructors and operations.
///
/// Validation failures of a schedule are *not* errors: they are returned as
/// data by the validator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("field modulus {p} invalid: {reason}")]
    Field { p: u64, reason: String },

    #[error("invalid library: {0}")]
    Library(String),

    #[error("invalid demand vector: {0}")]
    Demand(String),

    #[error("decode failed: {0}")]
    Decode(String),

    #[error("scheme undefined: {0}")]
    Unsupported(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("oracle: {0}")]
    Oracle(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
