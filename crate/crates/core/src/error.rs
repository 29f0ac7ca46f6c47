use thiserror::Error;

/// Errors raised by the analytic and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iteration did not reach its tolerance within its budget.
    #[error("precision error: {what} (achieved {achieved:e} after {terms} terms)")]
    Precision {
        what: String,
        achieved: f64,
        terms: usize,
    },

    /// Exact integer arithmetic overflowed; use the log-scaled variant.
    #[error("integer overflow computing {0}; use the log-scaled variant")]
    Overflow(String),

    /// The hypothesis of a bound is not met at these parameters.
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    /// A bracketed root search found no sign change.
    #[error("no root in bracket: {0}")]
    NoRoot(String),

    /// Two independent evaluation routes disagree beyond tolerance.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// Invalid user-supplied configuration.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
