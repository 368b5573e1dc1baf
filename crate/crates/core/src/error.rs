use thiserror::Error;

/// Errors reported by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("value not representable in double precision: {0}")]
    Overflow(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coincident points (distance {0:e})")]
    Coincidence(f64),
    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),
    #[error("matrix is numerically singular (pivot ratio {0:e})")]
    Singular(f64),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("adaptive quadrature did not converge (estimated error {0:e})")]
    QuadratureNonConvergence(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value produced in {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
