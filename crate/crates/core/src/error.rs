use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Hilbert-space factors: {0}")]
    InvalidDims(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid subsystem index set {indices:?} for {factors} factors")]
    InvalidIndexSet { indices: Vec<usize>, factors: usize },

    #[error("total dimension {dim} exceeds the dense limit of {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("truncation {cutoff} is too small for an oscillator (need at least 2)")]
    TruncationTooSmall { cutoff: usize },

    #[error("unsupported scenario: {0}")]
    Unsupported(String),

    #[error("observable requires a two-level target")]
    NotQubit,

    #[error("Bloch system matrix is singular (|det| = {det:.3e})")]
    SingularBlochMatrix { det: f64 },

    #[error("time step {dt:.3e} exceeds stability bound {bound:.3e}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("analytic-moment clusters carry no explicit bath state; collisions need exact-tensor mode")]
    AnalyticModeRejected,
}

impl Error {
    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
