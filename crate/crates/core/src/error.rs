use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("{what}: size {size} exceeds the configured cap {cap}; lower the degree or field size, or raise {env}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
        env: &'static str,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("no embedding of F_{from} into F_{to}")]
    IncompatibleTower { from: u64, to: u64 },
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("unsupported problem shape: {0}")]
    Unsupported(String),
    #[error("zeta product diverges at s = {s} for a scheme of dimension {dim}")]
    Divergence { s: u32, dim: i64 },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
