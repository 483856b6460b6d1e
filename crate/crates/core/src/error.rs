use thiserror::Error;

use crate::tree::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tree is not a plane tree: {0}")]
    InvalidTree(Violation),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("exact mode is capped at {cap} nodes but the tree has {size}; use the log-space ranking instead")]
    ExactCapExceeded { size: usize, cap: usize },

    #[error("enumeration budget of {budget} words exceeded ({partial} accepted so far)")]
    BudgetExceeded { budget: usize, partial: usize },

    #[error("no entry above 1/2 within the first {horizon} values")]
    NoPivot { horizon: usize },

    #[error("missing table entry for word {0}")]
    MissingEntry(String),

    #[error("preflow is not {d}-ary: nonzero value at {word}")]
    NotDary { d: u32, word: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
