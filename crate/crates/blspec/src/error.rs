use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("n must be even and >= 2 (got {0})")]
    InvalidN(u64),
    #[error("n must be an even perfect square (got {0})")]
    NotEvenSquare(u64),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("drift identity E(D|W) = -lambda*(W-1) violated: {0}")]
    Drift(String),
    #[error("exact identity violated: {0}")]
    Identity(String),
    #[error("empty grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
