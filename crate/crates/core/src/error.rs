use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` = {value} is out of domain: {reason}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("size error: {0}")]
    Size(String),
    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, got {actual} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("degenerate signal: {0}")]
    DegenerateSignal(&'static str),
    #[error("initialization error: {0}")]
    Initialization(String),
    #[error("objective diverged after {} iterations", trace.len())]
    Divergence { trace: Vec<f64> },
    #[error("chain has no retained post-burn-in samples")]
    EmptyChain,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("malformed {format}: {reason}")]
    Format { format: &'static str, reason: String },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::ParameterDomain { name, value, reason }
    }
}
