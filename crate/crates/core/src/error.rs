use thiserror::Error;

/// Errors raised by the algebraic core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("unsupported field size q = {0} (supported: prime powers up to 16)")]
    UnsupportedField(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("matrix does not have full row rank")]
    RankDeficient,
    #[error("enumeration of {needed} objects exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("vectors live in different batches or spaces")]
    BatchMismatch,
    #[error("zero vector has no leading term")]
    ZeroVector,
    #[error("root ({0},{1}) is not in the monomial subgroup for this batch")]
    RootOutsideUpsilon(usize, usize),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("pattern does not fit the tableau")]
    PatternMismatch,
    #[error("label is not eligible to be a leading term")]
    NotEligible,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("interpolation failed: {0}")]
    Interpolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
