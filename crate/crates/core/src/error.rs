use thiserror::Error;

/// Errors produced anywhere in the corruption pipeline or the analysis suite.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed binary corpus: {0}")]
    Binary(String),

    #[error("token id {id} out of range for vocabulary of size {vocab_size}")]
    Range { id: u32, vocab_size: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("PMI undefined: sub-segment {0:?} has zero count")]
    UndefinedScore(Vec<u32>),

    #[error("scorer contract violated: {0}")]
    ContractViolation(String),

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
