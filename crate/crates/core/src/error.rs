use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree overflow: {left} + {right} exceeds ambient dimension {dim}")]
    DegreeOverflow { left: usize, right: usize, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular basis (|det| = {0:e})")]
    SingularBasis(f64),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration exceeded the cap of {limit} lattice points (radius {radius})")]
    ResourceLimit { limit: usize, radius: f64 },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
