use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("incompatible rows: {0}")]
    IncompatibleRows(String),
    #[error("duplicate index label `{0}`")]
    DuplicateIndex(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("bad distribution: {0}")]
    BadDistribution(String),
    #[error("not a channel: {0}")]
    NotAChannel(String),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("division by zero: {0}")]
    DivideByZero(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
