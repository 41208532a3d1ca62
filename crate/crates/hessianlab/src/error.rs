//! Shared error type for the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix not positive definite: pivot {pivot:.3e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("unsupported background form: {0}")]
    UnsupportedBackground(String),
    #[error("matrix too close to the cone boundary (margin {0:.3e})")]
    OnConeBoundary(f64),
    #[error("field is singular at the requested point")]
    SingularPoint,
    #[error("point within {0:.3e} of a singular set or domain boundary")]
    TooCloseToSingularity(f64),
    #[error("density is negative at r = {0}")]
    NegativeDensity(f64),
    #[error("density is identically zero")]
    ZeroDensity,
    #[error("radial profile is not usable at r = {0}")]
    SingularRadius(f64),
    #[error("hessian off the operator cone: {0}")]
    OffCone(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("right-hand side is identically zero")]
    ZeroRightHandSide,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("eigensolver failed to converge after {0} sweeps")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
