use thiserror::Error;
use troplin_chain::ChainError;
use troplin_core::CoreError;

#[derive(Debug, Error)]
pub enum IndepError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("family of functions is empty")]
    EmptyFamily,
    #[error("malformed multiset family: {0}")]
    BadFamily(String),
    #[error("family has {funcs} functions but the combination has {consts} constants")]
    SizeMismatch { funcs: usize, consts: usize },
    #[error("divisor is not effective: {0}")]
    NotEffective(String),
    #[error("malformed pattern: {0}")]
    BadPattern(String),
    #[error("pattern constraints are inconsistent: {0}")]
    InconsistentPattern(String),
    #[error("search budget exhausted after {explored} steps; result undecided")]
    Undecided { explored: u64 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type IndepResult<T> = Result<T, IndepError>;
