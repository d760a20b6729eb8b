//! Gaussian random fields on Riemannian manifolds built from heat kernels.
//!
//! Three field families are supported: the origin-pinned Riesz field, its
//! stationary variant, and the exponentially damped Bessel field. Covariances
//! are evaluated either by Laplace eigen-sums or by power-weighted time
//! quadrature of the heat kernel.

pub mod analysis;
pub mod covariance;
pub mod error;
pub mod export;
pub mod heat_kernel;
pub mod manifold;
pub mod quadrature;
pub mod sampling;

pub use covariance::{
    bessel_covariance, existence_check, gram, increment_variance, riesz_covariance,
    stationary_riesz_covariance, CovarianceModel, CovarianceOptions, ExistenceStatus,
    ExistenceVerdict, FieldKind, FieldSpec, GramMatrix, PathChoice,
};
pub use error::{FieldError, Result};
pub use heat_kernel::{heat_kernel, spectrum, KernelValue, SpectrumSlice};
pub use manifold::{Compactness, Isometry, ManifoldSpec, Point};
pub use sampling::{sample_cholesky, sample_kl, SampleEnsemble};
