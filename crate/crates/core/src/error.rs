use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate partition: {train} train / {val} validation examples")]
    DegeneratePartition { train: usize, val: usize },

    #[error("iteration {iteration} out of range (model has {stages} stages)")]
    IterationOutOfRange { iteration: usize, stages: usize },

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("too large to enumerate: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
