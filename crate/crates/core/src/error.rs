use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix index {index} out of range (m = {m})")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("instance schema error at {field}: {message}")]
    Schema { field: String, message: String },

    #[error("mixed arithmetic domains: {0}")]
    MixedArithmetic(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("empty point set")]
    EmptyPointSet,

    #[error("LP solver failure on point {point}: {message}")]
    LpFailure { point: usize, message: String },

    #[error("LP is {0}")]
    LpStatus(String),

    #[error("enumeration cap exceeded: {candidates} sequences > cap {cap}")]
    EnumerationCap { candidates: u128, cap: u64 },

    #[error("minimization is not supported: maximizing a convex objective is required for correctness")]
    MinimizeRefused,

    #[error("rescaling requires a positively homogeneous objective")]
    RescaleNonHomogeneous,

    #[error("external objective oracle `{0}` is not registered")]
    OracleMissing(String),

    #[error("matrix entries must be non-negative for the mortality check")]
    NegativeEntries,

    #[error("initial vector must have unit {0}-norm")]
    NotUnitNorm(String),

    #[error("malformed clause: {0}")]
    MalformedClause(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
