//! Evaluator plumbing shared by every covariance route.

use rayon::prelude::*;

use super::{FieldKind, FieldSpec};
use crate::error::{FieldError, Result};
use crate::heat_kernel::{spectrum, spectrum_below, SpectrumSlice, MAX_TERMS};
use crate::manifold::{ManifoldSpec, Point};

/// Values for a batch of requests plus bookkeeping.
#[derive(Debug, Clone, Default)]
pub(crate) struct Batch {
    pub values: Vec<f64>,
    pub terms: Option<usize>,
    /// Worst error bound over the batch.
    pub bound: f64,
}

/// A finite symmetric kernel `g`: the stationary covariance itself, and the
/// Riesz covariance through `g(x,y) − g(x,o) − g(y,o) + g(o,o)`.
pub(crate) trait Generator: Send + Sync {
    fn batch(&self, pts: &[Point], pairs: &[(usize, usize)]) -> Result<Batch>;
}

/// Routes where only zero-sum combinations `Σ w_i H_t(p_i, q_i)` integrate.
pub(crate) trait Combination: Send + Sync {
    fn combine(&self, pts: &[Point], combos: &[Vec<(f64, usize, usize)>]) -> Result<Batch>;
}

pub(crate) enum Evaluator {
    Kernel(Box<dyn Generator>),
    Combination(Box<dyn Combination>),
}

/// Evaluates `f` on every request in parallel; results keep request order.
pub(crate) fn collect<T, F>(items: &[T], f: F) -> Result<Batch>
where
    T: Sync,
    F: Fn(&T) -> Result<(f64, f64)> + Sync + Send,
{
    let out: Vec<(f64, f64)> = items.par_iter().map(f).collect::<Result<_>>()?;
    Ok(Batch {
        bound: out.iter().map(|r| r.1).fold(0.0, f64::max),
        values: out.into_iter().map(|r| r.0).collect(),
        terms: None,
    })
}

/// Spectral weight of an eigenvalue: `λ^{−s}` for the Riesz kinds (the zero
/// mode dropped), `(1+λ)^{−s}` for the Bessel kind.
pub(crate) fn spectral_weight(kind: FieldKind, s: f64, lambda: f64) -> f64 {
    match kind {
        FieldKind::Bessel => (1.0 + lambda).powf(-s),
        _ if lambda <= 0.0 => 0.0,
        _ => lambda.powf(-s),
    }
}

fn same_level(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// The `levels`-th distinct nonzero eigenvalue.
pub(crate) fn level_cut(m: &ManifoldSpec, levels: usize) -> Result<f64> {
    if levels == 0 {
        return Err(FieldError::Domain("truncation must keep at least one level".into()));
    }
    if levels > MAX_TERMS {
        return Err(FieldError::Truncation {
            message: format!("{levels} levels requested, at most {MAX_TERMS} supported"),
            achieved: MAX_TERMS as f64,
        });
    }
    let k = levels as f64;
    match *m {
        ManifoldSpec::Circle { radius } => Ok((k / radius).powi(2)),
        ManifoldSpec::Sphere2 { radius } => Ok(k * (k + 1.0) / (radius * radius)),
        _ => {
            let mut count = 4 * levels + 8;
            loop {
                let slice = spectrum(m, count)?;
                let mut distinct: Vec<f64> = Vec::new();
                for &l in slice.eigenvalues() {
                    if l > 0.0 && !distinct.last().is_some_and(|&p| same_level(p, l)) {
                        distinct.push(l);
                    }
                }
                // the last level may be cut short by the count; require one more
                if distinct.len() > levels {
                    return Ok(distinct[levels - 1]);
                }
                if count > 8 * MAX_TERMS {
                    return Err(FieldError::Truncation {
                        message: format!("could not resolve {levels} eigenvalue levels"),
                        achieved: distinct.len() as f64,
                    });
                }
                count *= 2;
            }
        }
    }
}

/// Sharp eigen-sum over the lowest `levels` nonzero eigenvalue levels.
pub(crate) struct Truncated {
    pub slice: SpectrumSlice,
    pub weights: Vec<f64>,
    pub levels: usize,
}

impl Truncated {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec, levels: usize) -> Result<Self> {
        let cut = level_cut(m, levels)?;
        let slice = spectrum_below(m, cut * (1.0 + 1e-12))?;
        let s = fs.exponent(m);
        let weights = slice.eigenvalues().iter().map(|&l| spectral_weight(fs.kind, s, l)).collect();
        Ok(Truncated { slice, weights, levels })
    }
}

impl Generator for Truncated {
    fn batch(&self, pts: &[Point], pairs: &[(usize, usize)]) -> Result<Batch> {
        let phi: Vec<Vec<f64>> = pts.par_iter().map(|p| self.slice.evaluate_all(p)).collect::<Result<_>>()?;
        let values = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = (&phi[i], &phi[j]);
                self.weights.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
            })
            .collect();
        Ok(Batch {
            values,
            terms: Some(self.levels),
            bound: 0.0,
        })
    }
}
