//! Binned mean squared increments and log-log slope fits.

use serde::Serialize;

use super::report::{digest, PropertyReport};
use crate::covariance::CovarianceModel;
use crate::error::{FieldError, Result};
use crate::manifold::{pairs_at_distance, ManifoldSpec, Point};
use crate::sampling::SampleEnsemble;

/// Fewest pairs accepted in one bin.
pub const MIN_PAIRS_PER_BIN: usize = 10;
/// Fewest replicates accepted for an empirical estimate.
pub const MIN_REPLICATES: usize = 100;
/// Fewest bins accepted by a slope fit.
pub const MIN_FIT_BINS: usize = 5;
/// Fit ranges are capped at this fraction of the injectivity guard.
pub const GUARD_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariogramMode {
    Analytic,
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariogramBin {
    pub lower: f64,
    pub upper: f64,
    /// Mean geodesic distance of the pairs in the bin.
    pub distance: f64,
    /// Mean squared increment.
    pub value: f64,
    pub pairs: usize,
    /// Standard error over replicates (empirical mode only).
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariogramEstimate {
    pub mode: VariogramMode,
    pub bins: Vec<VariogramBin>,
    /// Injectivity guard of the manifold the estimate was taken on.
    pub guard: f64,
}

/// `n` geometrically spaced bin edges spanning `[lo, hi]`, giving `n − 1` bins.
pub fn log_edges(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(FieldError::Binning(format!("bad edge spec [{lo}, {hi}] with {n} edges")));
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    let mut e: Vec<f64> = (0..n).map(|i| lo * (r * i as f64).exp()).collect();
    e[n - 1] = hi;
    Ok(e)
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) || edges[0] < 0.0 {
        return Err(FieldError::Binning("bin edges must be nonnegative and strictly increasing".into()));
    }
    Ok(())
}

/// Bin index of each distance, `None` outside `[edges₀, edges_last)`.
fn assign(distances: &[f64], edges: &[f64]) -> Vec<Option<usize>> {
    distances
        .iter()
        .map(|&d| {
            if !(d >= edges[0] && d < edges[edges.len() - 1]) {
                return None;
            }
            Some(edges.partition_point(|&e| e <= d) - 1)
        })
        .collect()
}

/// Members of each bin; every bin must reach [`MIN_PAIRS_PER_BIN`].
fn members(distances: &[f64], edges: &[f64]) -> Result<Vec<Vec<usize>>> {
    check_edges(edges)?;
    let mut out = vec![Vec::new(); edges.len() - 1];
    for (k, b) in assign(distances, edges).into_iter().enumerate() {
        if let Some(b) = b {
            out[b].push(k);
        }
    }
    if let Some((b, m)) = out.iter().enumerate().find(|(_, m)| m.len() < MIN_PAIRS_PER_BIN) {
        return Err(FieldError::Binning(format!(
            "bin [{}, {}) holds {} pairs, need at least {MIN_PAIRS_PER_BIN}",
            edges[b],
            edges[b + 1],
            m.len()
        )));
    }
    Ok(out)
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Analytic variogram: increment variances of `pairs`, binned by distance.
pub fn variogram_analytic(model: &CovarianceModel, pairs: &[(Point, Point)], edges: &[f64]) -> Result<VariogramEstimate> {
    let m = model.manifold();
    let dist: Vec<f64> = pairs.iter().map(|(x, y)| m.geodesic_distance(x, y)).collect::<Result<_>>()?;
    let bins = members(&dist, edges)?;
    let used: Vec<usize> = bins.iter().flatten().copied().collect();
    let sub: Vec<(Point, Point)> = used.iter().map(|&k| pairs[k].clone()).collect();
    let vals = model.increment_variances(&sub)?;
    let mut value = vec![0.0; pairs.len()];
    for (&k, v) in used.iter().zip(vals) {
        value[k] = v;
    }
    let bins = bins
        .iter()
        .enumerate()
        .map(|(b, idx)| VariogramBin {
            lower: edges[b],
            upper: edges[b + 1],
            distance: mean(idx.iter().map(|&k| dist[k])),
            value: mean(idx.iter().map(|&k| value[k])),
            pairs: idx.len(),
            std_error: None,
        })
        .collect();
    Ok(VariogramEstimate {
        mode: VariogramMode::Analytic,
        bins,
        guard: m.injectivity_guard(),
    })
}

/// Analytic variogram sampled at exact distances, `per_bin` random pairs each.
///
/// Bin `k` spans the midpoints between neighbouring distances, so its mean
/// distance is `distances[k]` up to round-off.
pub fn variogram_at_distances(model: &CovarianceModel, distances: &[f64], per_bin: usize, seed: u64) -> Result<VariogramEstimate> {
    if distances.is_empty() || distances.windows(2).any(|w| !(w[1] > w[0])) || !(distances[0] > 0.0) {
        return Err(FieldError::Binning("distances must be positive and strictly increasing".into()));
    }
    let mut pairs = Vec::with_capacity(distances.len() * per_bin);
    for (k, &d) in distances.iter().enumerate() {
        pairs.extend(pairs_at_distance(model.manifold(), d, per_bin, seed.wrapping_add(k as u64))?);
    }
    let n = distances.len();
    let mut edges = Vec::with_capacity(n + 1);
    edges.push(0.5 * distances[0]);
    for w in distances.windows(2) {
        edges.push((w[0] * w[1]).sqrt());
    }
    edges.push(2.0 * distances[n - 1]);
    variogram_analytic(model, &pairs, &edges)
}

/// All index pairs `i < j` with their geodesic distances.
pub fn ensemble_pairs(m: &ManifoldSpec, points: &[Point]) -> Result<Vec<((usize, usize), f64)>> {
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            out.push(((i, j), m.geodesic_distance(&points[i], &points[j])?));
        }
    }
    Ok(out)
}

/// Empirical variogram from all point pairs of an ensemble.
///
/// Each replicate gives one bin mean; the standard error is the spread of
/// those means over `√N`, which accounts for correlation between pairs.
pub fn variogram_empirical(e: &SampleEnsemble, edges: &[f64]) -> Result<VariogramEstimate> {
    let n = e.replicates();
    if n < MIN_REPLICATES {
        return Err(FieldError::Precondition(format!(
            "empirical variogram needs at least {MIN_REPLICATES} replicates, got {n}"
        )));
    }
    let all = ensemble_pairs(&e.manifold, &e.points)?;
    let dist: Vec<f64> = all.iter().map(|p| p.1).collect();
    let bins = members(&dist, edges)?;
    let out = bins
        .iter()
        .enumerate()
        .map(|(b, idx)| {
            let per: Vec<f64> = (0..n)
                .map(|r| {
                    let row = e.samples.row(r);
                    mean(idx.iter().map(|&k| {
                        let (i, j) = all[k].0;
                        (row[i] - row[j]).powi(2)
                    }))
                })
                .collect();
            let m = mean(per.iter().copied());
            let var = per.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            VariogramBin {
                lower: edges[b],
                upper: edges[b + 1],
                distance: mean(idx.iter().map(|&k| dist[k])),
                value: m,
                pairs: idx.len(),
                std_error: Some((var / n as f64).sqrt()),
            }
        })
        .collect();
    Ok(VariogramEstimate {
        mode: VariogramMode::Empirical,
        bins: out,
        guard: e.manifold.injectivity_guard(),
    })
}

/// Analytic bin values for exactly the pairs an empirical estimate used.
pub fn variogram_matching(model: &CovarianceModel, e: &SampleEnsemble, edges: &[f64]) -> Result<VariogramEstimate> {
    let pairs: Vec<(Point, Point)> = ensemble_pairs(&e.manifold, &e.points)?
        .into_iter()
        .map(|((i, j), _)| (e.points[i].clone(), e.points[j].clone()))
        .collect();
    variogram_analytic(model, &pairs, edges)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderFit {
    pub slope: f64,
    pub intercept: f64,
    /// `slope / 2`.
    pub alpha_hat: f64,
    /// Coefficient of determination of the log-log regression.
    pub r_squared: f64,
    /// Distance range actually used.
    pub range: (f64, f64),
    pub bins: usize,
}

/// Least-squares line through `(ln distance, ln value)` for bins in `range`.
///
/// The upper end is capped at [`GUARD_FRACTION`] of the injectivity guard.
pub fn holder_fit(v: &VariogramEstimate, range: (f64, f64)) -> Result<HolderFit> {
    holder_fit_capped(v, range, GUARD_FRACTION)
}

pub fn holder_fit_capped(v: &VariogramEstimate, range: (f64, f64), guard_fraction: f64) -> Result<HolderFit> {
    let hi = range.1.min(guard_fraction * v.guard);
    let used: Vec<&VariogramBin> = v.bins.iter().filter(|b| b.distance >= range.0 && b.distance <= hi).collect();
    if used.len() < MIN_FIT_BINS {
        return Err(FieldError::Fit(format!(
            "{} bins in [{}, {hi}], need at least {MIN_FIT_BINS}",
            used.len(),
            range.0
        )));
    }
    if let Some(b) = used.iter().find(|b| !(b.value > 0.0) || !(b.distance > 0.0)) {
        return Err(FieldError::Fit(format!("non-positive bin value {} at distance {}", b.value, b.distance)));
    }
    let xs: Vec<f64> = used.iter().map(|b| b.distance.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|b| b.value.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(HolderFit {
        slope,
        intercept,
        alpha_hat: slope / 2.0,
        r_squared,
        range: (used[0].distance, used[used.len() - 1].distance),
        bins: used.len(),
    })
}

/// Ratio `γ(d)/d^{2(α+δ)}` at the smallest bin over the largest; the
/// variogram beats order `α + δ` when it exceeds 2.
pub fn holder_excess_check(v: &VariogramEstimate, alpha: f64, delta: f64) -> Result<PropertyReport> {
    let (first, last) = match (v.bins.first(), v.bins.last()) {
        (Some(a), Some(b)) if v.bins.len() >= 2 => (a, b),
        _ => return Err(FieldError::Fit("need at least two bins".into())),
    };
    let ratio = |b: &VariogramBin| b.value / b.distance.powf(2.0 * (alpha + delta));
    let growth = ratio(first) / ratio(last);
    Ok(PropertyReport::new(
        "holder_excess",
        growth > 2.0,
        growth,
        2.0,
        "variogram-ratio-above-order",
        digest(&(v.mode, alpha, delta, v.bins.len(), first.distance, last.distance)),
    ))
}
