//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by capture simulation, scoring, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Plane through the optical center (c = 0) has no finite disparity map.
    #[error("degenerate plane: c = 0")]
    DegeneratePlane,

    #[error("degenerate probes: {0}")]
    DegenerateProbes(String),

    #[error("ambiguous match: {0}")]
    AmbiguousMatch(String),

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    /// Scene description that cannot be rendered (e.g. disparity out of range).
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed file contents (bad magic, truncated payload, bad header).
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
