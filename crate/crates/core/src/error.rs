use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max |U^dagger U - I| = {0:e})")]
    NotUnitary(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigendecomposition did not converge within {iterations} iterations")]
    EigenNotConverged { iterations: usize },

    #[error("qubit count {0} outside supported range 1..=5")]
    UnsupportedQubitCount(usize),

    #[error("penalty weight q = {0} must be >= 1")]
    InvalidPenalty(f64),

    #[error("invalid metric weights: {0}")]
    InvalidWeights(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("geodesic search failed: best endpoint error {best_error:e} exceeds tolerance {tolerance:e}")]
    GeodesicNotFound { best_error: f64, tolerance: f64 },

    #[error("numerical inconsistency in {operation}: {detail}")]
    Numerical {
        operation: &'static str,
        detail: String,
    },

    #[error("determinant {re:.3e}{im:+.3e}i is not 1")]
    NotSpecialUnitary { re: f64, im: f64 },

    #[error("gate index pair ({a}, {b}) invalid for dimension {dim}")]
    IndexOutOfRange { a: usize, b: usize, dim: usize },

    #[error("config error at {field}: {message}")]
    Config { field: String, message: String },

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
