//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors produced by geometry kernels, index queries, generators and file IO.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Query and reference set do not live in the same ambient dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation requires a nonempty point cloud.
    #[error("empty point cloud")]
    EmptyCloud,

    /// A precondition on the inputs was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A text file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
