use thiserror::Error;

/// Errors produced by state construction, solvers and bound evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("eigenvalue list has {eigenvalues} entries but amplitude list has {amplitudes}")]
    LengthMismatch {
        eigenvalues: usize,
        amplitudes: usize,
    },

    #[error("state must contain at least one level")]
    EmptyState,

    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("state norm {norm} lies outside the tolerance band 1 ± {band}")]
    NormOutsideBand { norm: f64, band: f64 },

    #[error("dimension {dim} exceeds the dense-operator limit {limit}")]
    DenseLimitExceeded { dim: usize, limit: usize },

    #[error("zero-variance spectrum: {0}")]
    ZeroVariance(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("net enumeration needs 10^{size_log10:.2} points, above the cap of {cap}")]
    EnumerationCapExceeded { size_log10: f64, cap: u64 },

    #[error("support subset has zero mass")]
    ZeroMass,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed state file: {0}")]
    MalformedState(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
