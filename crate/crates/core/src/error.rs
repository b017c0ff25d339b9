use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("cannot parse domain spec at token `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("{operation} is not supported in dimension {dim}")]
    DimensionUnsupported { operation: &'static str, dim: usize },

    #[error("eigensolver supports interval/box only")]
    UnsupportedDomain,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency cutoff too small: tail bound {bound:.3e} exceeds tolerance {allowed:.3e}")]
    TailBoundExceeded { bound: f64, allowed: f64 },

    #[error("adaptive quadrature did not converge (estimated error {error:.3e})")]
    QuadratureNonConvergence { error: f64 },

    #[error("mass matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("eigensolver failed: {0}")]
    EigenConvergence(String),

    #[error("moment integral diverges: function does not vanish after its last knot")]
    DivergentIntegral,

    #[error("sampling cutoff too small: boundary samples reach {ratio:.3e} of the maximum")]
    CutoffTooSmall { ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
