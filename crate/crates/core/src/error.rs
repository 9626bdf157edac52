use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("point outside the kernel domain: modulus {modulus} must be below {radius}")]
    Domain { modulus: f64, radius: f64 },
    #[error("moment Gram matrix is ill-conditioned (condition estimate {cond:e})")]
    Conditioning { cond: f64 },
    #[error("degree {degree} needs {needed} support points, the shifted measure has {available}")]
    Rank {
        degree: usize,
        needed: usize,
        available: usize,
    },
    #[error("moment s_{0} is not available")]
    MomentUnavailable(usize),
    #[error("radius estimation needs at least {needed} moments, {available} given")]
    Estimation { needed: usize, available: usize },
    #[error("index out of range: {0}")]
    Index(String),
    #[error("shape mismatch: {left} coordinates against {right}")]
    Shape { left: usize, right: usize },
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("quadrature rule cannot resolve the integrand: {0}")]
    Configuration(String),
}
