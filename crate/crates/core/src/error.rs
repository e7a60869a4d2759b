use thiserror::Error;

/// Errors shared across the numeric and combinatorial layers.
///
/// Every routine that can lose certainty about a discrete answer (a pivot
/// valuation, a rank, a divisor exponent) fails loudly instead of guessing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("denominator overflow: {0}")]
    DenominatorOverflow(String),

    #[error("operator is singular: {0}")]
    SingularOperator(String),

    #[error("form is degenerate: {0}")]
    DegenerateForm(String),

    #[error("matrix is rank deficient: {0}")]
    RankDeficient(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("element is not a unit")]
    NotUnit,

    #[error("element is not in the even part")]
    NotEven,

    #[error("inclusion chain did not increase: {0}")]
    ChainNotIncreasing(String),

    #[error("graph is not 2-colorable: {0}")]
    NotBipartite(String),

    #[error("idempotent search failed after {0} attempts")]
    IdempotentSearchFailed(u64),

    #[error("lattice is not a Dieudonne lattice: {0}")]
    NotDieudonne(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
