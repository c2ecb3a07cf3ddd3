use thiserror::Error;

use crate::model::FactorizationTrace;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("ill-typed input: {0}")]
    IllTyped(String),

    #[error("search budget of {budget} candidate assignments exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("small object argument did not terminate within {cap} steps")]
    CapExhausted {
        cap: usize,
        trace: Box<FactorizationTrace>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("object lies outside the classified corpus: {0}")]
    OutsideCorpus(String),
}

pub type Result<T> = std::result::Result<T, Error>;
