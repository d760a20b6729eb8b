//! Seeded sample paths: truncated Karhunen–Loève series on spectral
//! manifolds, Cholesky factors of Gram matrices anywhere.
//!
//! Replicate `i` always draws its normals from `rng_stream(seed, i)`, so an
//! ensemble depends only on its inputs, never on scheduling.

mod rng;

pub use rng::{rng_stream, NormalStream};
pub(crate) use rng::{rng_for, ISOMETRY_STREAM, POINT_STREAM};

use nalgebra::{Cholesky, DMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::covariance::{CovarianceModel, CovarianceOptions, FieldKind, FieldSpec, GramMatrix, Truncated};
use crate::error::{FieldError, Result};
use crate::manifold::{ManifoldSpec, Point};

/// Replicates filled per matrix product.
const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SampleMethod {
    /// `levels` eigenvalue levels, `modes` eigenfunctions counted with multiplicity.
    Kl { levels: usize, modes: usize },
    Cholesky { jitter: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleEnsemble {
    pub manifold: ManifoldSpec,
    pub field: FieldSpec,
    pub points: Vec<Point>,
    /// `N × n`, one replicate per row.
    pub samples: DMatrix<f64>,
    pub seed: u64,
    pub method: SampleMethod,
    /// Truncated variance minus the target variance, per point (KL only).
    pub variance_deficit: Option<Vec<f64>>,
}

impl SampleEnsemble {
    pub fn replicates(&self) -> usize {
        self.samples.nrows()
    }

    /// Empirical covariance about the known zero mean.
    pub fn empirical_covariance(&self) -> DMatrix<f64> {
        let n = self.replicates().max(1) as f64;
        self.samples.transpose() * &self.samples / n
    }
}

/// Rows `Ξ Φᵀ` where row `i` of `Ξ` is the start of stream `i`.
fn project(features: &DMatrix<f64>, n: usize, seed: u64) -> DMatrix<f64> {
    let (k, p) = (features.nrows(), features.ncols());
    let chunks: Vec<DMatrix<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let rows = CHUNK.min(n - lo);
            let mut xi = DMatrix::zeros(rows, k);
            let mut buf = vec![0.0; k];
            for r in 0..rows {
                rng_stream(seed, (lo + r) as u64).fill(&mut buf);
                for (j, v) in buf.iter().enumerate() {
                    xi[(r, j)] = *v;
                }
            }
            xi * features
        })
        .collect();
    let mut out = DMatrix::zeros(n, p);
    for (c, block) in chunks.into_iter().enumerate() {
        out.rows_mut(c * CHUNK, block.nrows()).copy_from(&block);
    }
    out
}

/// KL ensemble truncated to the lowest `levels` nonzero eigenvalue levels.
///
/// Each eigenfunction gets its own normal coefficient; its exact covariance
/// is the truncated spectral Gram at the same `levels`.
pub fn sample_kl(
    m: &ManifoldSpec,
    fs: &FieldSpec,
    points: &[Point],
    n: usize,
    levels: usize,
    seed: u64,
) -> Result<SampleEnsemble> {
    if n == 0 {
        return Err(FieldError::Domain("at least one replicate is required".into()));
    }
    // validates existence and the spectral requirement
    CovarianceModel::new(m, fs, CovarianceOptions::truncated(levels))?;
    points.iter().try_for_each(|p| m.validate_point(p))?;
    let basis = Truncated::new(m, fs, levels)?;
    let k = basis.slice.len();
    let origin = match fs.kind {
        FieldKind::Riesz => Some(basis.slice.evaluate_all(fs.origin.as_ref().expect("validated"))?),
        _ => None,
    };
    let mut features = DMatrix::zeros(k, points.len());
    for (j, p) in points.iter().enumerate() {
        let phi = basis.slice.evaluate_all(p)?;
        for i in 0..k {
            let shifted = match &origin {
                Some(_) if Some(p) == fs.origin.as_ref() => 0.0,
                Some(o) => phi[i] - o[i],
                None => phi[i],
            };
            features[(i, j)] = basis.weights[i].sqrt() * shifted;
        }
    }
    let samples = project(&features, n, seed);

    let target = CovarianceModel::new(m, fs, CovarianceOptions::default())?.gram(points)?;
    let deficit = (0..points.len())
        .map(|j| features.column(j).norm_squared() - target.values[(j, j)])
        .collect();
    Ok(SampleEnsemble {
        manifold: *m,
        field: fs.clone(),
        points: points.to_vec(),
        samples,
        seed,
        method: SampleMethod::Kl { levels, modes: k },
        variance_deficit: Some(deficit),
    })
}

/// Jitter ladder, in units of the largest diagonal entry.
#[derive(Debug, Clone, PartialEq)]
pub struct JitterPolicy {
    pub steps: Vec<f64>,
}

impl Default for JitterPolicy {
    fn default() -> Self {
        JitterPolicy {
            steps: vec![0.0, 1e-12, 1e-10, 1e-8],
        }
    }
}

/// Lower factor of the positive-diagonal block, with the jitter used.
fn factor(a: &DMatrix<f64>, policy: &JitterPolicy) -> Result<(DMatrix<f64>, f64)> {
    let scale = a.diagonal().max();
    for &step in &policy.steps {
        let eps = step * scale;
        let mut m = a.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += eps;
        }
        if let Some(c) = Cholesky::new(m) {
            return Ok((c.l(), eps));
        }
    }
    Err(FieldError::Conditioning(format!(
        "Cholesky failed at the largest jitter {:e}",
        policy.steps.last().copied().unwrap_or(0.0) * scale
    )))
}

/// Ensemble `L z` from a factor of the Gram matrix.
///
/// Points whose variance is exactly zero (the Riesz origin) sample as
/// exactly zero and are left out of the factorization.
pub fn sample_cholesky(gram: &GramMatrix, n: usize, seed: u64, policy: &JitterPolicy) -> Result<SampleEnsemble> {
    if n == 0 {
        return Err(FieldError::Domain("at least one replicate is required".into()));
    }
    if gram.max_asymmetry() > 0.0 {
        return Err(FieldError::Precondition("Gram matrix is not symmetric".into()));
    }
    let p = gram.len();
    let active: Vec<usize> = (0..p).filter(|&i| gram.values[(i, i)] != 0.0).collect();
    for i in (0..p).filter(|i| !active.contains(i)) {
        if gram.values.row(i).iter().any(|&v| v != 0.0) {
            return Err(FieldError::Precondition(format!("zero variance at point {i} with nonzero covariances")));
        }
    }
    let mut samples = DMatrix::zeros(n, p);
    let mut jitter = 0.0;
    if !active.is_empty() {
        let sub = DMatrix::from_fn(active.len(), active.len(), |i, j| gram.values[(active[i], active[j])]);
        let (l, eps) = factor(&sub, policy)?;
        jitter = eps;
        let draws = project(&l.transpose(), n, seed);
        for (c, &j) in active.iter().enumerate() {
            samples.column_mut(j).copy_from(&draws.column(c));
        }
    }
    Ok(SampleEnsemble {
        manifold: gram.manifold,
        field: gram.field.clone(),
        points: gram.points.clone(),
        samples,
        seed,
        method: SampleMethod::Cholesky { jitter },
        variance_deficit: None,
    })
}
