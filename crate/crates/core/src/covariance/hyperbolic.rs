//! Hyperbolic plane. In unit curvature the covariance is
//! `Γ(s)^{−1} ∫ t^{s−1} e^{−μt} H_t(ρ) dt` with the McKean kernel `H_t`.
//!
//! The nested route swaps the two integrals. The time integral is then
//! `I(σ) = ∫ t^{α−3/2} e^{−(μ+¼)t − σ²/4t} dt`, a Bessel-K integral, and
//! `cov = √2 / ((4π)^{3/2} Γ(s)) ∫_ρ^∞ σ I(σ) / √(cosh σ − cosh ρ) dσ`.

use std::f64::consts::{PI, SQRT_2};

use super::engine::{collect, Batch, Generator};
use super::{FieldKind, FieldSpec};
use crate::error::{FieldError, Result};
use crate::heat_kernel::hyperbolic::{ln_sinh, mckean};
use crate::manifold::{ManifoldSpec, Point};
use crate::quadrature::{gamma, integrate, k_integral, PowerWeightedIntegral};

struct Unit {
    m: ManifoldSpec,
    /// Metric scale `L`.
    scale: f64,
    alpha: f64,
    s: f64,
    mu: f64,
    factor: f64,
    tol: f64,
}

impl Unit {
    fn new(m: &ManifoldSpec, fs: &FieldSpec, tol: f64) -> Result<Self> {
        let ManifoldSpec::HyperbolicPlane { scale } = *m else {
            return Err(FieldError::Inconsistency("hyperbolic route on another manifold".into()));
        };
        Ok(Unit {
            m: *m,
            scale,
            alpha: fs.alpha,
            s: fs.exponent(m),
            mu: if fs.kind == FieldKind::Bessel { scale * scale } else { 0.0 },
            factor: scale.powf(2.0 * fs.alpha),
            tol,
        })
    }

    fn rho(&self, x: &Point, y: &Point) -> f64 {
        self.m.distance_unchecked(x, y) / self.scale
    }

    fn scaled(&self, mut b: Batch) -> Batch {
        b.values.iter_mut().for_each(|v| *v *= self.factor);
        b.bound *= self.factor;
        b
    }
}

/// Spatial integral of the closed-form time integral.
pub(crate) struct Nested(Unit);

impl Nested {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec, tol: f64) -> Result<Self> {
        Ok(Nested(Unit::new(m, fs, tol)?))
    }

    fn value(&self, rho: f64) -> Result<(f64, f64)> {
        let u = &self.0;
        let (nu, a) = (u.alpha - 0.5, u.mu + 0.25);
        // σ = ρ + w^{2q}: q smooths the σ^{2α−1} start at ρ = 0
        let q = (0.25 / u.alpha).max(1.0);
        let decay = a.sqrt() + 0.5;
        let wmax = (45.0 / decay).powf(0.5 / q);
        let f = |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let x = w.powf(2.0 * q);
            if x == 0.0 {
                return 0.0;
            }
            let sigma = rho + x;
            // d σ = 2q w^{2q−1} dw; cosh σ − cosh ρ = 2 sinh(ρ + x/2) sinh(x/2)
            let jac = 2.0 * q * x / w;
            let ln_den = 0.5 * (std::f64::consts::LN_2 + ln_sinh(rho + 0.5 * x) + ln_sinh(0.5 * x));
            jac * sigma * (-ln_den).exp() * k_integral(nu, a, 0.25 * sigma * sigma)
        };
        let r = integrate(f, 0.0, wmax, 0.0, 0.1 * u.tol, 2000)?;
        let pre = SQRT_2 / ((4.0 * PI).powf(1.5) * gamma(u.s));
        Ok((pre * r.value, pre * r.error))
    }
}

impl Generator for Nested {
    fn batch(&self, pts: &[Point], pairs: &[(usize, usize)]) -> Result<Batch> {
        let b = collect(pairs, |&(i, j)| self.value(self.0.rho(&pts[i], &pts[j])))?;
        Ok(self.0.scaled(b))
    }
}

/// Time quadrature of the McKean kernel.
pub(crate) struct TimeQuadrature(Unit);

impl TimeQuadrature {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec, tol: f64) -> Result<Self> {
        Ok(TimeQuadrature(Unit::new(m, fs, tol)?))
    }

    fn value(&self, rho: f64) -> Result<(f64, f64)> {
        let u = &self.0;
        let kt = (1e-2 * u.tol).max(1e-13);
        let f = |t: f64| match mckean(t, rho, kt) {
            Ok((v, _, _)) => (-u.mu * t).exp() * v,
            Err(_) => f64::NAN,
        };
        let r = PowerWeightedIntegral::new(u.s, f)
            .split(if u.mu > 0.0 { 1.0 / u.mu } else { 1.0 })
            .tolerance(u.tol)
            .abs_tolerance(1e-3 * u.tol / (4.0 * PI))
            .normalized()
            .integrate()?;
        match r.value() {
            Some(v) => Ok((v, r.error_estimate)),
            None => Err(FieldError::Quadrature {
                message: "hyperbolic time integral does not converge".into(),
                error_estimate: f64::INFINITY,
            }),
        }
    }
}

impl Generator for TimeQuadrature {
    fn batch(&self, pts: &[Point], pairs: &[(usize, usize)]) -> Result<Batch> {
        let b = collect(pairs, |&(i, j)| self.value(self.0.rho(&pts[i], &pts[j])))?;
        Ok(self.0.scaled(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both(kind: FieldKind, alpha: f64, rho: f64) -> (f64, f64) {
        let m = ManifoldSpec::hyperbolic_plane();
        let fs = FieldSpec { kind, alpha, origin: None };
        let a = Nested::new(&m, &fs, 1e-9).unwrap().value(rho).unwrap().0;
        let b = TimeQuadrature::new(&m, &fs, 1e-9).unwrap().value(rho).unwrap().0;
        (a, b)
    }

    #[test]
    fn routes_agree() {
        for (kind, alpha) in [(FieldKind::StationaryRiesz, 0.5), (FieldKind::StationaryRiesz, 0.15), (FieldKind::Bessel, 0.7)] {
            for rho in [0.0, 0.05, 1.0, 4.0] {
                let (a, b) = both(kind, alpha, rho);
                assert!(((a - b) / a).abs() < 1e-6, "{kind} α={alpha} ρ={rho}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn generator_decreases_with_distance() {
        let m = ManifoldSpec::hyperbolic_plane();
        let g = Nested::new(&m, &FieldSpec::stationary_riesz(0.5), 1e-9).unwrap();
        let v: Vec<f64> = [0.0, 0.3, 1.0, 3.0, 8.0].iter().map(|&r| g.value(r).unwrap().0).collect();
        assert!(v.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0), "{v:?}");
    }
}
