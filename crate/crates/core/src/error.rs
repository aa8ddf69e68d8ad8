use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid leaf labels: {0}")]
    Labels(String),

    #[error("tree does not fit bracketing kind {kind}: {msg}")]
    KindViolation { kind: &'static str, msg: String },

    #[error("tree is already labeled")]
    AlreadyLabeled,

    #[error("invalid weight sequence: {0}")]
    InvalidWeights(String),

    #[error("no tree with {n} leaves has positive weight")]
    UndefinedMeasure { n: usize },

    #[error("size {n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("gave up after {attempts} rejection attempts")]
    RetryBudget { attempts: u64 },

    #[error("characteristic system: {0}")]
    Solver(String),

    #[error("inconsistent parameters: {0}")]
    Inconsistent(String),

    #[error("empty sample")]
    EmptySample,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
