use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("not a quadratic extension: {0}")]
    NotAnExtension(String),

    #[error("case {case} is unavailable: {reason}")]
    UnavailableCase { case: String, reason: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("change of variables is not unimodular (det = {0})")]
    NonUnimodular(String),

    #[error("regular semisimple condition fails: {0}")]
    Irregular(String),

    #[error("no norm map for type {0} classes")]
    NoNormMap(String),

    #[error("precision cap exceeded: level {needed} requested, cap is {cap}")]
    Precision { needed: u32, cap: u32 },

    #[error("enumeration budget exceeded: {points} points requested, budget is {budget}")]
    Budget { points: u128, budget: u64 },

    #[error("count overflow: p^(4k) does not fit in 128 bits for p = {p}, k = {k}")]
    Overflow { p: u64, k: u32 },

    #[error("tail not detected: {0}")]
    TailUndetected(String),

    #[error("pole at X = {0}")]
    Pole(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
