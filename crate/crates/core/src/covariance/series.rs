//! Grouped eigen-sums on the circle and the round sphere.
//!
//! In unit coordinates the generator is `S(θ) = Σ_k c_k cos kθ` on the circle
//! and `S(θ) = Σ_l c_l P_l(cos θ)` on the sphere. The sum is cut at `N`, the
//! smooth remainder `Σ_{k>N} c_k` is added at coincident points only, and the
//! oscillating remainder elsewhere is bounded by summation by parts.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::engine::{Batch, Generator};
use super::{FieldKind, FieldSpec};
use crate::error::{FieldError, Result};
use crate::manifold::{angle_gap, ManifoldSpec, Point};

const MIN_LOG2: u32 = 10;
const MAX_LOG2: u32 = 20;

pub(crate) struct RoundSeries {
    sphere: bool,
    s: f64,
    /// Mass in unit coordinates: `r²` for the Bessel kind, 0 otherwise.
    mu: f64,
    /// First index kept; the zero mode is dropped for the Riesz kind.
    first: usize,
    factor: f64,
    tol: f64,
    /// `S(0)` estimate, the reference for relative accuracy.
    scale: f64,
}

impl RoundSeries {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec, tol: f64) -> Result<Self> {
        let (sphere, r) = match *m {
            ManifoldSpec::Circle { radius } => (false, radius),
            ManifoldSpec::Sphere2 { radius } => (true, radius),
            _ => return Err(FieldError::Inconsistency("round series on a non-round manifold".into())),
        };
        let (mu, first) = match fs.kind {
            FieldKind::Riesz => (0.0, 1),
            FieldKind::Bessel => (r * r, 0),
            FieldKind::StationaryRiesz => {
                return Err(FieldError::Inconsistency("stationary Riesz series on a compact manifold".into()))
            }
        };
        let mut me = RoundSeries {
            sphere,
            s: fs.exponent(m),
            mu,
            first,
            factor: r.powf(2.0 * fs.alpha),
            tol,
            scale: 1.0,
        };
        let n = 1usize << MIN_LOG2;
        me.scale = (first..=n).map(|k| me.coef(k)).sum::<f64>() + me.tail(n);
        Ok(me)
    }

    fn coef(&self, k: usize) -> f64 {
        let kf = k as f64;
        if self.sphere {
            (2.0 * kf + 1.0) * (self.mu + kf * (kf + 1.0)).powf(-self.s) / (4.0 * PI)
        } else if k == 0 {
            self.mu.powf(-self.s) / (2.0 * PI)
        } else {
            (self.mu + kf * kf).powf(-self.s) / PI
        }
    }

    /// `Σ_{k>n} c_k` by the midpoint Euler–Maclaurin rule
    /// `∫_{n+½}^∞ f + f'(n+½)/24`.
    fn tail(&self, n: usize) -> f64 {
        let (x, s, mu) = (n as f64 + 0.5, self.s, self.mu);
        if self.sphere {
            let q = mu + x * (x + 1.0);
            let int = q.powf(1.0 - s) / ((s - 1.0) * 4.0 * PI);
            let d = (2.0 * q.powf(-s) - s * (2.0 * x + 1.0).powi(2) * q.powf(-s - 1.0)) / (4.0 * PI);
            return int + d / 24.0;
        }
        let q = mu + x * x;
        let d = -2.0 * s * x * q.powf(-s - 1.0) / PI;
        let int = if mu == 0.0 {
            x.powf(1.0 - 2.0 * s) / ((2.0 * s - 1.0) * PI)
        } else if mu < 0.25 * x * x {
            // (μ + x²)^{−s} = x^{−2s} Σ_j C(−s, j) (μ/x²)^j
            let (mut b, mut acc) = (1.0, 0.0);
            for j in 0..200 {
                let jf = j as f64;
                let term = b * mu.powf(jf) * x.powf(1.0 - 2.0 * s - 2.0 * jf) / (2.0 * s + 2.0 * jf - 1.0);
                acc += term;
                if term.abs() < 1e-17 * acc.abs() {
                    break;
                }
                b *= (-s - jf) / (jf + 1.0);
            }
            acc / PI
        } else {
            // x/u substitution on (0, 1]
            crate::quadrature::integrate(
                |u: f64| {
                    if u <= 0.0 {
                        0.0
                    } else {
                        u.powf(2.0 * s - 2.0) * x * (mu * u * u + x * x).powf(-s) / PI
                    }
                },
                0.0,
                1.0,
                0.0,
                1e-13,
                2000,
            )
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
        };
        int + d / 24.0
    }

    /// Bound on `|Σ_{k>n} c_k e_k(θ)|` for `θ ∈ (0, π]`.
    fn remainder(&self, n: usize, theta: f64, u: f64, tail: f64) -> f64 {
        let nf = n as f64;
        let abel = if self.sphere {
            // A_L = Σ_{l≤L}(2l+1)P_l = (L+1)(P_L − P_{L+1})/(1−u), Bernstein for |P|
            let st = theta.sin();
            let b = |l: f64| {
                if st <= 0.0 {
                    1.0
                } else {
                    (2.0 / (PI * l * st)).sqrt().min(1.0)
                }
            };
            let cd = (nf + 1.0) * (b(nf) + b(nf + 1.0)) / (1.0 - u);
            let g = (self.mu + (nf + 1.0) * (nf + 2.0)).powf(-self.s) / (4.0 * PI);
            let s2 = 2.0 * self.s;
            let corr = (1.0 + 1.0 / (nf + 1.0) + self.mu / (nf + 1.0).powi(2)).powf(self.s);
            g * cd * (1.0 + (nf + 1.0) / nf * (1.0 + corr / (s2 - 1.0)))
        } else {
            self.coef(n + 1) / (0.5 * theta).sin()
        };
        abel.min(tail)
    }

    fn sum_circle(&self, c: &[f64], delta: f64) -> f64 {
        let (c1, s1) = (delta.cos(), delta.sin());
        let (mut cs, mut sn) = (1.0, 0.0);
        let mut acc = if self.first == 0 { c[0] } else { 0.0 };
        for (k, &ck) in c.iter().enumerate().skip(1) {
            let nc = cs * c1 - sn * s1;
            sn = sn * c1 + cs * s1;
            cs = nc;
            if k % 1024 == 0 {
                let (a, b) = (k as f64 * delta).sin_cos();
                sn = a;
                cs = b;
            }
            acc += ck * cs;
        }
        acc
    }

    fn sum_sphere(&self, c: &[f64], inv: &[f64], u: f64) -> f64 {
        let (mut p0, mut p1) = (1.0, u);
        let mut acc = if self.first == 0 { c[0] } else { 0.0 };
        if c.len() > 1 {
            acc += c[1] * u;
        }
        for l in 1..c.len() - 1 {
            let lf = l as f64;
            let p2 = ((2.0 * lf + 1.0) * u * p1 - lf * p0) * inv[l];
            p0 = p1;
            p1 = p2;
            acc += c[l + 1] * p2;
        }
        acc
    }
}

/// Angular key of a pair: `Δθ ∈ [0, π]` on the circle, `⟨x, y⟩` on the sphere.
fn key(sphere: bool, x: &Point, y: &Point) -> Result<f64> {
    match (x, y) {
        (Point::Circle(a), Point::Circle(b)) if !sphere => Ok(angle_gap(*a, *b)),
        (Point::Sphere(a), Point::Sphere(b)) if sphere => {
            Ok((a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0))
        }
        _ => Err(FieldError::Domain("point kind does not match the manifold".into())),
    }
}

impl Generator for RoundSeries {
    fn batch(&self, pts: &[Point], pairs: &[(usize, usize)]) -> Result<Batch> {
        let mut slot: HashMap<u64, usize> = HashMap::new();
        let mut keys: Vec<f64> = Vec::new();
        let mut which = Vec::with_capacity(pairs.len());
        for &(i, j) in pairs {
            let k = if i == j || pts[i] == pts[j] { if self.sphere { 1.0 } else { 0.0 } } else { key(self.sphere, &pts[i], &pts[j])? };
            let id = *slot.entry(k.to_bits()).or_insert_with(|| {
                keys.push(k);
                keys.len() - 1
            });
            which.push(id);
        }
        let coincident = |k: f64| if self.sphere { k >= 1.0 } else { k <= 0.0 };
        let angle = |k: f64| if self.sphere { k.acos() } else { k };
        let geometry = |k: f64| if self.sphere { k } else { k.cos() };

        // smallest N whose remainder bound meets the tolerance at every angle
        let target = self.tol * self.scale;
        let mut chosen = None;
        for p in MIN_LOG2..=MAX_LOG2 {
            let n = 1usize << p;
            let tail = self.tail(n);
            let worst = keys
                .iter()
                .filter(|&&k| !coincident(k))
                .map(|&k| self.remainder(n, angle(k), geometry(k), tail))
                .fold(0.0, f64::max);
            chosen = Some((n, worst, tail));
            if worst <= target {
                break;
            }
        }
        let (n, worst, tail) = chosen.expect("candidate range is nonempty");
        let c: Vec<f64> = (0..=n).map(|k| if k < self.first { 0.0 } else { self.coef(k) }).collect();
        let inv: Vec<f64> = (0..=n).map(|l| 1.0 / (l as f64 + 1.0)).collect();
        let diag = c.iter().sum::<f64>() + tail;
        let vals: Vec<f64> = keys
            .par_iter()
            .map(|&k| {
                if coincident(k) {
                    diag
                } else if self.sphere {
                    self.sum_sphere(&c, &inv, k)
                } else {
                    self.sum_circle(&c, k)
                }
            })
            .collect();
        Ok(Batch {
            values: which.iter().map(|&w| vals[w] * self.factor).collect(),
            terms: Some(n),
            bound: worst * self.factor,
        })
    }
}
