use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("enumeration of {count} supports exceeds the cap of {cap}; {hint}")]
    EnumerationCap {
        count: u128,
        cap: u128,
        hint: &'static str,
    },
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("{parameter} = {value} outside admissible interval {interval}")]
    Range {
        parameter: &'static str,
        value: f64,
        interval: String,
    },
    #[error("quadrature for entry (q = {q}, j = {j}) did not converge: change {change:e}")]
    Quadrature { q: usize, j: usize, change: f64 },
    #[error("truncation condition unreachable within cap {cap}: best tail {tail:e} > threshold {threshold:e}")]
    Truncation {
        cap: usize,
        tail: f64,
        threshold: f64,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
