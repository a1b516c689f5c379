use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a numeric routine.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{routine} failed to converge after {iterations} iterations")]
    NoConvergence { routine: &'static str, iterations: usize },

    #[error("insufficient data: {what} needs at least {needed} values, got {got}")]
    InsufficientData { what: String, needed: usize, got: usize },

    #[error("non-finite value {value} at index {index} in sample '{label}'")]
    NonFinite { label: String, index: usize, value: f64 },

    #[error("log transform undefined: nonpositive value {value} at index {index} in sample '{label}'")]
    NonPositiveValue { label: String, index: usize, value: f64 },

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("infinite effect: standardizer is zero but the difference is {diff}")]
    InfiniteEffect { diff: f64 },

    #[error("length mismatch: {left} has {left_len} values, {right} has {right_len}")]
    LengthMismatch {
        left: String,
        left_len: usize,
        right: String,
        right_len: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("nothing to render: {0}")]
    Empty(String),

    #[error("duplicate comparison name '{0}'")]
    DuplicateName(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures caused by the data itself (too few values, zero
    /// spread, nonpositive values on the log pathway).
    pub fn is_statistical(&self) -> bool {
        matches!(
            self,
            Error::InsufficientData { .. }
                | Error::NonPositiveValue { .. }
                | Error::DegenerateVariance(_)
                | Error::InfiniteEffect { .. }
        )
    }

    /// True for internal numeric failures.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::NoConvergence { .. })
    }
}
