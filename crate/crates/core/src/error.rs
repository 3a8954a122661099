use thiserror::Error;

/// Errors raised by the verification engine.
///
/// Hypothesis failures are errors, never clamped values: a silently clamped
/// bound could turn a failed verification into a false confirmation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid precision context: {0}")]
    Precision(String),

    #[error("domain error in {func}: {reason}")]
    Domain { func: &'static str, reason: String },

    #[error("hypothesis violated in {func}: {reason}")]
    Hypothesis { func: &'static str, reason: String },

    #[error("invalid factorization: {0}")]
    Factorization(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("prime table too small: need index {needed}, table holds {available}")]
    TableTooSmall { needed: usize, available: usize },

    #[error("integer {value} exceeds the materialization bound {bound}")]
    TooLarge { value: String, bound: u64 },

    #[error("no sign change found for root bracket after {doublings} doublings")]
    NoBracket { doublings: u32 },

    #[error("declared monotonicity contradicted at {at}")]
    Monotonicity { at: String },

    #[error("unimodality check failed: {0}")]
    Unimodality(String),

    #[error("box cardinality {cardinality} exceeds the guard {guard}; rerun with the long-running flag")]
    CardinalityGuard { cardinality: u128, guard: u128 },

    #[error("empty exponent window for prime index {prime_index} on interval {j}")]
    EmptyWindow { prime_index: usize, j: u32 },

    #[error("checkpoint I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error("checkpoint record: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain { func, reason: reason.into() }
    }

    pub(crate) fn hypothesis(func: &'static str, reason: impl Into<String>) -> Self {
        Error::Hypothesis { func, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
