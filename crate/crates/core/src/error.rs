use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what}: membership residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Membership {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("matrix is numerically singular")]
    Singular,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root finder did not converge: {0}")]
    RootFinding(String),

    #[error("flow left the admissible window of radius {radius}")]
    Excursion { radius: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
