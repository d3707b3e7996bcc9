use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("potential is not convex at knot {index} (slope {left} followed by {right})")]
    NotLogConcave { index: usize, left: f64, right: f64 },

    #[error("density has unbounded support and no truncation mass was supplied")]
    UnboundedSupport,

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("size budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("grid budget of {max_points} points exhausted before convergence (last change {last_change:e})")]
    GridBudget { max_points: usize, last_change: f64 },

    #[error("inconsistent certificate input: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
