use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid product space: {0}")]
    InvalidSpace(String),
    #[error("malformed rational literal `{0}`")]
    MalformedRational(String),
    #[error("invalid marginal for subspace {index}: {reason}")]
    InvalidMarginal { index: usize, reason: String },
    #[error("marginals must cover each subspace exactly once: {0}")]
    MarginalCoverage(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("invalid collection: {0}")]
    InvalidCollection(String),
    #[error("distribution is not a member of the correlation set")]
    NotInCorrelationSet,
    #[error("enumeration guard exceeded: {size} > {limit}")]
    GuardExceeded { size: usize, limit: usize },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("marginal mismatch: {0}")]
    MarginalMismatch(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
