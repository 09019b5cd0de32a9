use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {dim} for {op}")]
    UnsupportedDimension { dim: usize, op: String },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation point at the origin: the compensated field is identically zero there")]
    OriginEvalPoint,

    #[error("point lies outside the body")]
    PointOutsideBody,

    #[error("spectral measure has no atoms")]
    EmptyMeasure,

    #[error("grid of size {n} exceeds the dense-factorization cap {cap}")]
    GridTooLarge { n: usize, cap: usize },

    #[error(
        "covariance matrix is not positive semidefinite even after jitter \
         (min eigenvalue {min_eig:.6e}, trace {trace:.6e}); the gauge body is \
         not an L_p ball for p = 2H at these points, so the Gaussian field does not exist"
    )]
    NotPositiveSemidefinite { min_eig: f64, trace: f64 },

    #[error("rejection sampler acceptance rate {rate:.3e} fell below the floor {floor:.3e}")]
    AcceptanceTooLow { rate: f64, floor: f64 },

    #[error(
        "quadrature did not converge: coarse pass gave {coarse:.12e}, \
         refined pass gave {fine:.12e}"
    )]
    QuadratureNotConverged { coarse: f64, fine: f64 },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
