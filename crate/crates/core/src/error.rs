use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid symmetric set: {0}")]
    InvalidSet(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("state has support outside the ensemble density operator: {0}")]
    SupportViolation(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("degenerate stage: {0}")]
    DegenerateStage(String),

    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),

    #[error("probability bookkeeping error: {0}")]
    Probability(String),
}

pub type Result<T> = std::result::Result<T, Error>;
