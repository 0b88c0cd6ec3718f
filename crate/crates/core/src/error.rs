use thiserror::Error;

/// Errors produced by the simulator, graph routines and verification harness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported order {0}: Sylvester construction needs a power of two >= 4")]
    UnsupportedOrder(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
