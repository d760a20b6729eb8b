//! Two half-order fields on the unit circle with the same increment law up
//! to a factor: `√2 R^{1/2}` from the eigen-sum and the field `R_{1/2}` built
//! from the coefficients `d_k`. Their variances differ by the even modes,
//! `Σ_{k≠0} (1/π) |2k|^{−2} |e^{i2kx} − 1|²`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::covariance::{istas_coefficients, CovarianceModel, CovarianceOptions, FieldSpec};
use crate::error::Result;
use crate::manifold::{wrap_angle, ManifoldSpec, Point};

/// Coefficients summed explicitly by the direct route.
pub const DIRECT_TERMS: usize = 4096;

/// Closed form of the even-mode series. With `θ = 2x mod 2π`,
/// `Σ_{j≥1} cos(jθ)/j² = π²/6 − πθ/2 + θ²/4` gives `(πθ/2 − θ²/4)/π`.
pub fn gap_series(x: f64) -> f64 {
    let theta = wrap_angle(2.0 * x);
    (PI * theta / 2.0 - theta * theta / 4.0) / PI
}

/// `2 Var R^{1/2}(x) − Σ_{k≠0} d_k² |e^{ikx} − 1|²`, the first term from the
/// covariance evaluator, the second from the numerical coefficients.
///
/// Beyond [`DIRECT_TERMS`] the coefficients are replaced by their parity
/// average `d_k² ≈ 1/(2πk²)`; the alternating remainder is `O(K^{−2})`.
pub fn gap_direct(x: f64) -> Result<f64> {
    let m = ManifoldSpec::circle(1.0)?;
    let fs = FieldSpec::riesz(0.5, Point::Circle(0.0));
    let model = CovarianceModel::new(&m, &fs, CovarianceOptions::default().with_tolerance(1e-12))?;
    let var = model.variance(&Point::Circle(wrap_angle(x)))?;
    let d = istas_coefficients(0.5, DIRECT_TERMS)?;
    let explicit: f64 = d
        .iter()
        .enumerate()
        .rev()
        .map(|(i, dk)| {
            let k = (i + 1) as f64;
            // both signs of k
            2.0 * dk * dk * 2.0 * (1.0 - (k * x).cos())
        })
        .sum();
    // parity-averaged tail (2/π) Σ_{k>K} (1 − cos kx)/k², as the full sum
    // πθ/2 − θ²/4 (θ = x mod 2π) minus its first K terms
    let theta = wrap_angle(x);
    let head: f64 = (1..=DIRECT_TERMS).rev().map(|k| (1.0 - (k as f64 * x).cos()) / (k * k) as f64).sum();
    let tail = 2.0 / PI * (PI * theta / 2.0 - theta * theta / 4.0 - head);
    Ok(2.0 * var - explicit - tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapValue {
    pub x: f64,
    pub series: f64,
    pub direct: f64,
}

/// Both routes at `x`; the series value is the reported gap.
pub fn nonuniqueness_gap(x: f64) -> Result<GapValue> {
    Ok(GapValue {
        x,
        series: gap_series(x),
        direct: gap_direct(x)?,
    })
}
