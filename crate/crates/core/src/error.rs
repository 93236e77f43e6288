use thiserror::Error;

/// Errors produced by the estimators, band builders and calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the allowed range {range}")]
    Range {
        name: &'static str,
        value: String,
        range: String,
    },

    #[error("need at least {required} samples, got {got}")]
    InsufficientData { required: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{what} has size {got}, above the enumeration guard {limit}")]
    Size {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} failed to converge")]
    Convergence(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn range(name: &'static str, value: impl ToString, range: impl ToString) -> Self {
        Error::Range {
            name,
            value: value.to_string(),
            range: range.to_string(),
        }
    }
}

/// Checks `lo <= k <= hi` and reports a range error naming `name` otherwise.
pub(crate) fn check_index(name: &'static str, k: usize, lo: usize, hi: usize) -> Result<()> {
    if k < lo || k > hi {
        return Err(Error::range(name, k, format!("[{lo}, {hi}]")));
    }
    Ok(())
}
