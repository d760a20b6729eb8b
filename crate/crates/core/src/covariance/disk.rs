//! Dirichlet unit disk.
//!
//! The plain eigen-sum `Σ (μ+λ)^{−s} φφ` converges like `K^{−α}`, so the time
//! integral is split at a short time `T`. Beyond `T` the modes carry weights
//! `(μ+λ)^{−s} Q(s, (μ+λ)T)` and decay like `e^{−λT}`. Below `T` the Dirichlet
//! kernel is replaced by the free Gaussian, which it undercuts by at most
//! `(4πt)^{−1} e^{−δ²/4t}` with `δ` the larger distance to the boundary
//! (maximum principle). Both pieces are positive-definite kernels.
//!
//! The spectral path uses the closed-form weights, the quadrature path
//! integrates the truncated heat kernel numerically from `T/4` on.

use std::f64::consts::PI;

use super::engine::{collect, Batch, Generator};
use super::{FieldKind, FieldSpec};
use crate::error::{FieldError, Result};
use crate::heat_kernel::{bessel_j, disk_envelope, disk_zeros};
use crate::manifold::{ManifoldSpec, Point};
use crate::quadrature::{gamma, gamma_q, integrate, PowerWeightedIntegral};

/// Largest Bessel zero used.
const CEILING: f64 = 200.0;
/// Longest split time.
const T_MAX: f64 = 0.05;

pub(crate) struct DiskSeries {
    s: f64,
    alpha: f64,
    mu: f64,
    factor: f64,
    tol: f64,
    quad: bool,
}

/// Per-point mode values `c J_k(jρ) cos kθ` and `c J_k(jρ) sin kθ`.
struct Features {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

fn polar(p: &Point) -> Result<(f64, f64)> {
    match p {
        Point::Disk { radius, angle } => Ok((*radius, *angle)),
        _ => Err(FieldError::Domain("point kind does not match the manifold".into())),
    }
}

fn chart_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (xa, ya) = (a.0 * a.1.cos(), a.0 * a.1.sin());
    let (xb, yb) = (b.0 * b.1.cos(), b.0 * b.1.sin());
    (xa - xb).hypot(ya - yb)
}

impl DiskSeries {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec, tol: f64, quad: bool) -> Result<Self> {
        let ManifoldSpec::UnitDisk { scale } = *m else {
            return Err(FieldError::Inconsistency("disk series on another manifold".into()));
        };
        Ok(DiskSeries {
            s: fs.exponent(m),
            alpha: fs.alpha,
            mu: if fs.kind == FieldKind::Bessel { scale * scale } else { 0.0 },
            factor: scale.powf(2.0 * fs.alpha),
            tol,
            quad,
        })
    }

    /// `Γ(s)^{−1} ∫₀^T t^{α−1} e^{−μt − ρ²/4t} dt / 4π`, with `t = T w^{1/α}`.
    fn parametrix(&self, rho: f64, t_split: f64) -> Result<(f64, f64)> {
        let b = rho * rho / (4.0 * t_split);
        if b > 745.0 {
            return Ok((0.0, 0.0));
        }
        let inv = 1.0 / self.alpha;
        let f = |w: f64| {
            if w <= 0.0 {
                return if rho == 0.0 { 1.0 } else { 0.0 };
            }
            let x = w.powf(inv);
            (-self.mu * t_split * x - b / x).exp()
        };
        let r = integrate(f, 0.0, 1.0, 1e-300, 1e-13, 1000)?;
        let pre = t_split.powf(self.alpha) / (self.alpha * 4.0 * PI * gamma(self.s));
        Ok((pre * r.value, pre * r.error))
    }

    /// Split time and ceiling from the smallest boundary distance.
    fn plan(&self, delta_min: f64) -> (f64, f64) {
        let l = (1.0 / self.tol).ln();
        let t = (delta_min * delta_min / (4.0 * l)).min(T_MAX);
        let j = ((l + 10.0) / t).sqrt();
        if j > CEILING {
            (CEILING, self.resolved_time(CEILING))
        } else {
            (j, t)
        }
    }

    /// Shortest time at which modes up to `ceiling` resolve the kernel.
    fn resolved_time(&self, ceiling: f64) -> f64 {
        ((1.0 / self.tol).ln() + 10.0) / (ceiling * ceiling)
    }

    fn features(&self, modes: &[(usize, f64, f64)], p: (f64, f64)) -> Features {
        let mut cos = Vec::with_capacity(modes.len());
        let mut sin = Vec::with_capacity(modes.len());
        for &(k, j, c) in modes {
            let v = c * bessel_j(k, j * p.0);
            let (sn, cs) = (k as f64 * p.1).sin_cos();
            cos.push(v * cs);
            sin.push(v * sn);
        }
        Features { cos, sin }
    }

    /// Bound on the dropped modes beyond `J` for the closed-form weights.
    fn tail_bound(&self, envelope: f64, ceiling: f64, t_split: f64) -> f64 {
        let lam = ceiling * ceiling;
        1.5 * envelope / 4.0 * lam.powf(0.5 - self.s) * gamma_q(self.s, lam * t_split) / t_split
    }
}

fn pair_sum(w: &[f64], a: &Features, b: &Features) -> f64 {
    w.iter()
        .zip(a.cos.iter().zip(&b.cos))
        .zip(a.sin.iter().zip(&b.sin))
        .map(|((w, (p, q)), (r, s))| w * (p * q + r * s))
        .sum()
}

impl Generator for DiskSeries {
    fn batch(&self, pts: &[Point], pairs: &[(usize, usize)]) -> Result<Batch> {
        let polars: Vec<(f64, f64)> = pts.iter().map(polar).collect::<Result<_>>()?;
        let delta_min = polars.iter().map(|p| 1.0 - p.0).fold(1.0, f64::min);
        let (mut ceiling, t_split) = self.plan(delta_min);
        let mut t_low = t_split;
        if self.quad {
            // twice the zeros, down to T/4, unless the ceiling cuts it short
            ceiling = (ceiling * 2.0).min(CEILING);
            t_low = (0.25 * t_split).max(self.resolved_time(ceiling));
        }
        let all = disk_zeros(CEILING);
        let mut modes: Vec<(usize, f64, f64)> = all.iter().copied().filter(|m| m.1 <= ceiling).collect();
        modes.sort_by(|a, b| a.1.total_cmp(&b.1));
        let envelope = disk_envelope(&modes);
        let feats: Vec<Features> = {
            use rayon::prelude::*;
            polars.par_iter().map(|&p| self.features(&modes, p)).collect()
        };

        let b = if self.quad {
            let lams: Vec<f64> = modes.iter().map(|m| m.1 * m.1).collect();
            let heat_tail = |t: f64| crate::heat_kernel::disk_tail(envelope, ceiling, t);
            collect(pairs, |&(i, j)| {
                let (fa, fb) = (&feats[i], &feats[j]);
                let kernel = |t: f64| {
                    let mut acc = 0.0;
                    for (m, &lam) in lams.iter().enumerate() {
                        if lam * t > 745.0 {
                            break;
                        }
                        acc += (-lam * t).exp() * (fa.cos[m] * fb.cos[m] + fa.sin[m] * fb.sin[m]);
                    }
                    (-self.mu * t).exp() * acc
                };
                // finite piece [T, t_mid] in ln t; the outward march starts at
                // the first-mode time scale so it never extrapolates past T
                let t_mid = t_low.max(1.0 / lams[0]);
                let near = integrate(
                    |v: f64| (self.s * v).exp() * kernel(v.exp()),
                    t_low.ln(),
                    t_mid.ln(),
                    1e-5 * self.tol,
                    0.1 * self.tol,
                    400,
                )?;
                let far = PowerWeightedIntegral::new(self.s, |t: f64| if t < t_mid { 0.0 } else { kernel(t) })
                    .split(t_mid)
                    .tolerance(0.1 * self.tol)
                    .abs_tolerance(1e-4 * self.tol)
                    .integrate()?;
                let Some(v) = far.value() else {
                    return Err(FieldError::Quadrature {
                        message: "disk time integral does not converge".into(),
                        error_estimate: f64::INFINITY,
                    });
                };
                let gs = gamma(self.s);
                let (v, v_err) = ((near.value + v) / gs, (near.error + far.error_estimate) / gs);
                let d = chart_distance(polars[i], polars[j]);
                let (p, pe) = self.parametrix(d, t_low)?;
                let (gap, _) = self.parametrix(1.0 - polars[i].0.min(polars[j].0), t_low)?;
                // dropped modes: ∫_T^∞ t^{s−1} tail(t) dt / Γ(s) ≈ T^{s−1} tail(T) / (λ_J Γ(s))
                let tail = t_low.powf(self.s - 1.0) * heat_tail(t_low) / (ceiling * ceiling * gamma(self.s));
                Ok((v + p, v_err + pe + gap + tail))
            })?
        } else {
            let w: Vec<f64> = modes
                .iter()
                .map(|m| {
                    let x = self.mu + m.1 * m.1;
                    x.powf(-self.s) * gamma_q(self.s, x * t_split)
                })
                .collect();
            let tail = self.tail_bound(envelope, ceiling, t_split);
            collect(pairs, |&(i, j)| {
                let d = chart_distance(polars[i], polars[j]);
                let (p, pe) = self.parametrix(d, t_split)?;
                let (gap, _) = self.parametrix(1.0 - polars[i].0.min(polars[j].0), t_split)?;
                Ok((pair_sum(&w, &feats[i], &feats[j]) + p, pe + gap + tail))
            })?
        };
        Ok(Batch {
            values: b.values.iter().map(|v| v * self.factor).collect(),
            terms: Some(modes.len()),
            bound: b.bound * self.factor,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat_kernel::bessel_zeros;

    fn series(kind: FieldKind, alpha: f64, quad: bool) -> DiskSeries {
        let fs = FieldSpec { kind, alpha, origin: None };
        DiskSeries::new(&ManifoldSpec::unit_disk(), &fs, 1e-10, quad).unwrap()
    }

    /// `Σ_l j^{−2s} / (π J₁(j)²)` over the zeros of `J₀`, long explicit
    /// stretch plus the asymptotic tail `Σ j^{1−2s}/2`.
    fn center_oracle(s: f64) -> f64 {
        let n = 3000;
        let zeros = bessel_zeros(0, n);
        let direct: f64 = zeros.iter().rev().map(|&j| j.powf(-2.0 * s) / (PI * bessel_j(1, j).powi(2))).sum();
        // j_l ≈ (l − ¼)π; midpoint rule for the remaining sum
        let e = 2.0 * s - 1.0;
        let x = n as f64 + 0.5 - 0.25;
        direct + 0.5 * PI.powf(-e) * x.powf(1.0 - e) / (e - 1.0)
    }

    #[test]
    fn center_variance_against_long_series() {
        let g = series(FieldKind::StationaryRiesz, 0.5, false);
        let p = Point::Disk { radius: 0.0, angle: 0.0 };
        let got = g.batch(std::slice::from_ref(&p), &[(0, 0)]).unwrap().values[0];
        let want = center_oracle(1.5);
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn paths_agree_in_the_interior() {
        let pts = vec![
            Point::Disk { radius: 0.1, angle: 0.3 },
            Point::Disk { radius: 0.5, angle: 2.0 },
            Point::Disk { radius: 0.6, angle: 4.0 },
            Point::Disk { radius: 0.8, angle: 5.5 },
        ];
        let pairs = [(0, 0), (0, 1), (1, 2), (2, 2), (1, 3), (3, 3)];
        for (kind, alpha) in [(FieldKind::StationaryRiesz, 0.3), (FieldKind::Bessel, 0.75)] {
            let a = series(kind, alpha, false).batch(&pts, &pairs).unwrap();
            let b = series(kind, alpha, true).batch(&pts, &pairs).unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).abs() < 1e-8 * x.abs().max(1.0), "{kind}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn parametrix_small_time_closed_form() {
        // ρ = 0, μ = 0: T^α / (4π α Γ(1+α))
        let g = series(FieldKind::StationaryRiesz, 0.4, false);
        let (v, _) = g.parametrix(0.0, 0.01).unwrap();
        let want = 0.01f64.powf(0.4) / (4.0 * PI * 0.4 * gamma(1.4));
        assert!(((v - want) / want).abs() < 1e-12);
    }
}
