//! Error type shared by every module.

use thiserror::Error;

use crate::quadrature::IntegralResult;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("quadrature did not converge (best estimate {:.6e}, error estimate {:.3e})", .0.value, .0.abs_error)]
    Quadrature(IntegralResult),

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
