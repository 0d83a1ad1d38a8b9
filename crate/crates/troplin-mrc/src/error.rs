use thiserror::Error;
use troplin_chain::ChainError;
use troplin_core::CoreError;
use troplin_indep::IndepError;

#[derive(Debug, Error)]
pub enum MrcError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Indep(#[from] IndepError),
    #[error("parameters out of range: {0}")]
    BadParameters(String),
    #[error("Brill-Noether number is negative: rho({genus},{r},{d}) = {rho}")]
    NegativeRho { genus: i64, r: i64, d: i64, rho: i64 },
    #[error("divisor construction failed: {0}")]
    BadBuild(String),
    #[error("window replay failed: {0}")]
    ReplayFailed(String),
    #[error("certificate is internally inconsistent: {0}")]
    BadCertificate(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type MrcResult<T> = Result<T, MrcError>;
