use thiserror::Error;

/// Errors raised by grid construction, fitting and pricing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Gauss-Hermite root iteration did not converge (order {order}, node {node})")]
    RootNotConverged { order: usize, node: usize },

    #[error("invalid quadrature order {0}: supported range is {1}")]
    InvalidOrder(usize, &'static str),

    #[error("moment system is singular or ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("point {x} outside the valid stencil range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
