use thiserror::Error;

use crate::covariance::ExistenceVerdict;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("field does not exist: {0}")]
    NotExists(Box<ExistenceVerdict>),

    #[error("truncation limit reached: {message} (achieved bound {achieved:e})")]
    Truncation { message: String, achieved: f64 },

    #[error("quadrature failed: {message} (error estimate {error_estimate:e})")]
    Quadrature { message: String, error_estimate: f64 },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("matrix factorization failed: {0}")]
    Conditioning(String),

    #[error("binning error: {0}")]
    Binning(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("points too far apart: distance {distance} exceeds guard {guard}")]
    Guard { distance: f64, guard: f64 },
}

pub type Result<T> = std::result::Result<T, FieldError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(FieldError::Domain(msg.into()))
}
