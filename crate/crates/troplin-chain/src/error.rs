use thiserror::Error;
use troplin_core::CoreError;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid chain parameters: {0}")]
    BadParams(String),
    #[error("bottom lengths admit a small integer relation: {0}")]
    RelationFound(String),
    #[error("cannot certify relation-freeness exhaustively for genus {0}; use make_admissible_chain or mark the lengths trusted")]
    RelationCheckTooLarge(usize),
    #[error("invalid divisor data: {0}")]
    BadData(String),
    #[error("not a standard rectangular tableau: {0}")]
    NotStandard(String),
    #[error("path has lingering steps, so it does not correspond to a tableau")]
    LingeringSteps,
    #[error("divisor class has rank {found}, need at least {need}")]
    RankTooLow { need: usize, found: usize },
    #[error("divisor class is not vertex avoiding: {0}")]
    NotVertexAvoiding(String),
    #[error("representative index {0} exceeds the rank")]
    IndexRange(usize),
    #[error("multiset of size {0} exceeds the supported size {1} baked into the chain lengths")]
    MultisetTooLarge(usize, usize),
    #[error("loop {k} lies outside the region of column {col}")]
    OutsideRegion { k: usize, col: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type ChainResult<T> = Result<T, ChainError>;
