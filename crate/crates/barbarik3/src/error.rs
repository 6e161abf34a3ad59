//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by distribution construction, oracle access, and test runs.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must live on the same {0,1}^n disagree about n.
    #[error("dimension mismatch: expected {expected} variables, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// An operation needed to enumerate a support that is too large to list.
    #[error("distribution is not enumerable: {0}")]
    NotEnumerable(String),

    /// A constructor or derived-parameter formula was given values outside
    /// its admissible range.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A pair-conditional query was issued for a pair with zero sampler mass.
    #[error("pair-conditional query on a zero-mass pair")]
    ZeroMassPair,

    /// Rejection-mode pair conditioning drew `cap` samples without hitting
    /// either element of the pair.
    #[error("pair-conditional rejection sampling exhausted its cap of {cap} attempts")]
    PcondCapExhausted { cap: u64 },

    /// A fault injector could not realize its declared distance.
    #[error("fault construction failed: {0}")]
    FaultConstruction(String),

    /// An empirical distribution was requested over zero samples.
    #[error("empty sample set")]
    EmptySamples,

    /// The sampler-query budget ran out mid-run. The test driver converts
    /// this into a `BudgetExceeded` verdict; it is an error only for callers
    /// that invoke oracles directly.
    #[error("sampler-query budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("descriptor parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
