use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("limit exceeded: {0}")]
    Limit(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("F must be non-empty")]
    EmptyF,

    #[error("1/2 lies in exactly one of F and F1 ({0})")]
    HalfPointViolation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("infeasible sandwich: {0}")]
    Infeasible(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("not an order unit: {0}")]
    NotOrderUnit(String),

    #[error("positive representative infeasible at t = 1/2: {0}")]
    HalfPointInfeasible(String),

    #[error("atom {0} lies outside F")]
    AtomOutsideF(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
