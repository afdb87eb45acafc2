use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frame {frame} has {found} subcarriers, stream {stream} expects {expected}")]
    ShapeMismatch {
        frame: usize,
        stream: u16,
        expected: usize,
        found: usize,
    },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate frame at row {row}: amplitude sum is zero")]
    DegenerateFrame { row: usize },

    #[error("lag {lag} out of range for length {len}")]
    LagOutOfRange { lag: usize, len: usize },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("window index misalignment: {0}")]
    Misaligned(String),

    #[error("ROC needs both classes (positives: {positives}, negatives: {negatives})")]
    SingleClass { positives: usize, negatives: usize },

    #[error("unsupported format version: {0}")]
    Version(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
