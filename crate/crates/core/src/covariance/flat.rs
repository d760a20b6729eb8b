//! Flat geometries: Euclidean closed forms, and time quadrature on the
//! Euclidean space, the cylinder, the circle and the flat torus.

use std::f64::consts::PI;

use super::engine::{collect, Batch, Combination, Generator};
use super::{FieldKind, FieldSpec};
use crate::error::{FieldError, Result};
use crate::heat_kernel::{circle_unit, line_kernel};
use crate::manifold::{angle_gap, ManifoldSpec, Point};
use crate::quadrature::{gamma, k_integral, PowerWeightedIntegral};

/// Truncation target of the periodic heat kernels inside time integrals.
const KERNEL_TOL: f64 = 1e-14;

/// `C_{d,α} = −Γ(−α) / (4^{d/2+α} π^{d/2} Γ(d/2+α))`, the constant in
/// `E|X_x − X_y|² = 2 C_{d,α} |x − y|^{2α}` on `ℝ^d`.
pub fn riesz_constant(d: usize, alpha: f64) -> Result<f64> {
    if d == 0 {
        return Err(FieldError::Domain("dimension must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FieldError::Domain(format!("order α must lie in (0, 1), got {alpha}")));
    }
    let h = d as f64 / 2.0;
    Ok(-gamma(-alpha) / (4f64.powf(h + alpha) * PI.powf(h) * gamma(h + alpha)))
}

/// Riesz covariance on the standard `ℝ^d` with origin `o`:
/// `C (|x−o|^{2α} + |y−o|^{2α} − |x−y|^{2α})`.
pub fn euclidean_closed_form(d: usize, alpha: f64, x: &[f64], y: &[f64], o: &[f64]) -> Result<f64> {
    if x.len() != d || y.len() != d || o.len() != d {
        return Err(FieldError::Domain(format!("points must have {d} coordinates")));
    }
    let c = riesz_constant(d, alpha)?;
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let p = 2.0 * alpha;
    Ok(c * (dist(x, o).powf(p) + dist(y, o).powf(p) - dist(x, y).powf(p)))
}

/// Closed forms on `ℝ^d`: the intrinsic Riesz generator `−C r^{2α}`, and the
/// Matérn covariance `(4π)^{−d/2} Γ(s)^{−1} ∫ t^{α−1} e^{−t − r²/4t} dt`.
pub(crate) struct EuclideanClosed {
    m: ManifoldSpec,
    kind: FieldKind,
    alpha: f64,
    c: f64,
}

impl EuclideanClosed {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec) -> Result<Self> {
        let ManifoldSpec::Euclidean { dim, .. } = *m else {
            return Err(FieldError::Inconsistency("Euclidean closed form on another manifold".into()));
        };
        let c = match fs.kind {
            FieldKind::Riesz => riesz_constant(dim, fs.alpha)?,
            FieldKind::Bessel => {
                let h = dim as f64 / 2.0;
                (4.0 * PI).powf(-h) / gamma(h + fs.alpha)
            }
            FieldKind::StationaryRiesz => {
                return Err(FieldError::Inconsistency("stationary Riesz field on Euclidean space".into()))
            }
        };
        Ok(EuclideanClosed {
            m: *m,
            kind: fs.kind,
            alpha: fs.alpha,
            c,
        })
    }
}

impl Generator for EuclideanClosed {
    fn batch(&self, pts: &[Point], pairs: &[(usize, usize)]) -> Result<Batch> {
        collect(pairs, |&(i, j)| {
            let r = self.m.distance_unchecked(&pts[i], &pts[j]);
            let v = match self.kind {
                FieldKind::Riesz => -self.c * r.powf(2.0 * self.alpha),
                _ => self.c * k_integral(self.alpha, 1.0, 0.25 * r * r),
            };
            Ok((v, 0.0))
        })
    }
}

/// Unit-coordinate layout of the flat non-compact kinds.
#[derive(Clone, Copy)]
enum Layout {
    /// `ℝ^d` with `L = scale`.
    Euclid { dim: usize },
    /// `S¹ × ℝ` with `L = radius`; `q` converts heights to unit lengths.
    Cylinder { q: f64 },
}

impl Layout {
    fn of(m: &ManifoldSpec) -> Result<(Layout, f64)> {
        match *m {
            ManifoldSpec::Euclidean { dim, scale } => Ok((Layout::Euclid { dim }, scale)),
            ManifoldSpec::Cylinder { radius, axial_scale } => Ok((Layout::Cylinder { q: axial_scale / radius }, radius)),
            _ => Err(FieldError::Inconsistency("flat quadrature on a non-flat manifold".into())),
        }
    }

    /// `(angular gap, linear gap)` in unit coordinates; the Euclidean gap is
    /// the chart distance.
    fn gaps(&self, x: &Point, y: &Point) -> Result<(f64, f64)> {
        match (self, x, y) {
            (Layout::Euclid { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
                Ok((0.0, a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()))
            }
            (
                Layout::Cylinder { q },
                Point::Cylinder { angle: a, height: ha },
                Point::Cylinder { angle: b, height: hb },
            ) => Ok((angle_gap(*a, *b), q * (ha - hb).abs())),
            _ => Err(FieldError::Domain("point kind does not match the manifold".into())),
        }
    }

    fn kernel(&self, tau: f64, (delta, z): (f64, f64)) -> f64 {
        match *self {
            Layout::Euclid { dim } => (4.0 * PI * tau).powf(-(dim as f64) / 2.0) * (-z * z / (4.0 * tau)).exp(),
            Layout::Cylinder { .. } => circle_unit(tau, delta, KERNEL_TOL, false).value * line_kernel(tau, z),
        }
    }
}

fn result_of<F: Fn(f64) -> f64>(spec: PowerWeightedIntegral<F>, what: &str) -> Result<(f64, f64)> {
    let r = spec.integrate()?;
    match r.value() {
        Some(v) => Ok((v, r.error_estimate)),
        None => Err(FieldError::Quadrature {
            message: format!("{what}: the time integral does not converge"),
            error_estimate: f64::INFINITY,
        }),
    }
}

fn abs_floor(tol: f64) -> f64 {
    1e-3 * tol / (4.0 * PI)
}

/// Riesz combinations on `ℝ^d` and the cylinder, where `H_t` itself is not
/// integrable against `t^{s−1}` and only zero-sum combinations converge.
pub(crate) struct FlatCombination {
    layout: Layout,
    s: f64,
    factor: f64,
    tol: f64,
}

impl FlatCombination {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec, tol: f64) -> Result<Self> {
        let (layout, l) = Layout::of(m)?;
        Ok(FlatCombination {
            layout,
            s: fs.exponent(m),
            factor: l.powf(2.0 * fs.alpha),
            tol,
        })
    }

    fn integrand(&self, tau: f64, terms: &[(f64, (f64, f64))]) -> f64 {
        let quarter = 1.0 / (4.0 * tau);
        match self.layout {
            Layout::Euclid { dim } => {
                // Σw = 0, so Σ w e^{−r²/4t} = Σ w expm1(−r²/4t)
                let s: f64 = terms.iter().map(|&(w, (_, r))| w * (-r * r * quarter).exp_m1()).sum();
                (4.0 * PI * tau).powf(-(dim as f64) / 2.0) * s
            }
            Layout::Cylinder { .. } => {
                let mean = 1.0 / (2.0 * PI);
                let mut acc = 0.0;
                for &(w, (delta, z)) in terms {
                    let e = (-z * z * quarter).exp_m1();
                    let dc = circle_unit(tau, delta, KERNEL_TOL, true).value;
                    acc += w * (mean * e + dc * (1.0 + e));
                }
                acc / (4.0 * PI * tau).sqrt()
            }
        }
    }
}

impl Combination for FlatCombination {
    fn combine(&self, pts: &[Point], combos: &[Vec<(f64, usize, usize)>]) -> Result<Batch> {
        let prepared: Vec<Vec<(f64, (f64, f64))>> = combos
            .iter()
            .map(|c| {
                c.iter()
                    .filter(|t| t.0 != 0.0)
                    .map(|&(w, i, j)| Ok((w, self.layout.gaps(&pts[i], &pts[j])?)))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let mut b = collect(&prepared, |terms| {
            if terms.iter().all(|t| t.1 == (0.0, 0.0)) {
                return Ok((0.0, 0.0));
            }
            let spec = PowerWeightedIntegral::new(self.s, |t| self.integrand(t, terms))
                .tolerance(self.tol)
                .abs_tolerance(abs_floor(self.tol))
                .normalized();
            result_of(spec, "Riesz combination")
        })?;
        b.values.iter_mut().for_each(|v| *v *= self.factor);
        b.bound *= self.factor;
        Ok(b)
    }
}

/// Bessel covariance on `ℝ^d` and the cylinder by direct time quadrature.
pub(crate) struct FlatQuadrature {
    layout: Layout,
    s: f64,
    mu: f64,
    factor: f64,
    tol: f64,
}

impl FlatQuadrature {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec, tol: f64) -> Result<Self> {
        if fs.kind != FieldKind::Bessel {
            return Err(FieldError::Inconsistency(format!("{} field has no finite flat generator", fs.kind)));
        }
        let (layout, l) = Layout::of(m)?;
        Ok(FlatQuadrature {
            layout,
            s: fs.exponent(m),
            mu: l * l,
            factor: l.powf(2.0 * fs.alpha),
            tol,
        })
    }
}

impl Generator for FlatQuadrature {
    fn batch(&self, pts: &[Point], pairs: &[(usize, usize)]) -> Result<Batch> {
        let gaps: Vec<(f64, f64)> = pairs.iter().map(|&(i, j)| self.layout.gaps(&pts[i], &pts[j])).collect::<Result<_>>()?;
        let mut b = collect(&gaps, |&g| {
            let spec = PowerWeightedIntegral::new(self.s, |t| (-self.mu * t).exp() * self.layout.kernel(t, g))
                .split(1.0 / self.mu)
                .tolerance(self.tol)
                .abs_tolerance(abs_floor(self.tol))
                .normalized();
            result_of(spec, "Bessel covariance")
        })?;
        b.values.iter_mut().for_each(|v| *v *= self.factor);
        b.bound *= self.factor;
        Ok(b)
    }
}

/// Circle and flat torus by time quadrature of the heat kernel, with the
/// constant mode removed for the Riesz kind.
pub(crate) struct PeriodicQuadrature {
    /// `r2/r1` for the torus, `None` on the circle.
    ratio: Option<f64>,
    riesz: bool,
    s: f64,
    mu: f64,
    factor: f64,
    tol: f64,
}

impl PeriodicQuadrature {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec, tol: f64) -> Result<Self> {
        let (ratio, l) = match *m {
            ManifoldSpec::Circle { radius } => (None, radius),
            ManifoldSpec::FlatTorus { r1, r2 } => (Some(r2 / r1), r1),
            _ => return Err(FieldError::Inconsistency("periodic quadrature on a non-periodic manifold".into())),
        };
        let riesz = match fs.kind {
            FieldKind::Riesz => true,
            FieldKind::Bessel => false,
            FieldKind::StationaryRiesz => {
                return Err(FieldError::Inconsistency("stationary Riesz field on a compact manifold".into()))
            }
        };
        Ok(PeriodicQuadrature {
            ratio,
            riesz,
            s: fs.exponent(m),
            mu: if riesz { 0.0 } else { l * l },
            factor: l.powf(2.0 * fs.alpha),
            tol,
        })
    }

    fn gaps(&self, x: &Point, y: &Point) -> Result<(f64, f64)> {
        match (x, y) {
            (Point::Circle(a), Point::Circle(b)) if self.ratio.is_none() => Ok((angle_gap(*a, *b), 0.0)),
            (Point::Torus(a), Point::Torus(b)) if self.ratio.is_some() => {
                Ok((angle_gap(a[0], b[0]), angle_gap(a[1], b[1])))
            }
            _ => Err(FieldError::Domain("point kind does not match the manifold".into())),
        }
    }

    fn integrand(&self, tau: f64, (d1, d2): (f64, f64)) -> f64 {
        let f1 = circle_unit(tau, d1, KERNEL_TOL, self.riesz).value;
        let Some(q) = self.ratio else {
            return if self.riesz { f1 } else { (-self.mu * tau).exp() * f1 };
        };
        let f2 = circle_unit(tau / (q * q), d2, KERNEL_TOL, self.riesz).value / q;
        if self.riesz {
            // H − 1/V = m₁f₂ + f₁m₂ + f₁f₂ with the fluctuating factors
            let (m1, m2) = (1.0 / (2.0 * PI), 1.0 / (2.0 * PI * q));
            m1 * f2 + f1 * m2 + f1 * f2
        } else {
            (-self.mu * tau).exp() * f1 * f2
        }
    }
}

impl Generator for PeriodicQuadrature {
    fn batch(&self, pts: &[Point], pairs: &[(usize, usize)]) -> Result<Batch> {
        let gaps: Vec<(f64, f64)> = pairs.iter().map(|&(i, j)| self.gaps(&pts[i], &pts[j])).collect::<Result<_>>()?;
        let split = if self.mu > 0.0 { 1.0 / self.mu } else { 1.0 };
        let mut b = collect(&gaps, |&g| {
            let spec = PowerWeightedIntegral::new(self.s, |t| self.integrand(t, g))
                .split(split)
                .tolerance(self.tol)
                .abs_tolerance(abs_floor(self.tol))
                .normalized();
            result_of(spec, "periodic covariance")
        })?;
        b.values.iter_mut().for_each(|v| *v *= self.factor);
        b.bound *= self.factor;
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_constant_at_one_half() {
        let c = riesz_constant(2, 0.5).unwrap();
        assert!((c - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_constant() {
        // d = 1, α = ½ is Brownian motion: 2C = 1
        let c = riesz_constant(1, 0.5).unwrap();
        assert!((c - 0.5).abs() < 1e-15, "{c}");
    }

    #[test]
    fn euclidean_quadrature_matches_closed_form() {
        let m = ManifoldSpec::euclidean(2).unwrap();
        let fs = FieldSpec::riesz(0.4, Point::Euclidean(vec![0.0, 0.0]));
        let comb = FlatCombination::new(&m, &fs, 1e-10).unwrap();
        let pts = vec![
            Point::Euclidean(vec![0.3, -0.2]),
            Point::Euclidean(vec![-1.1, 0.5]),
            Point::Euclidean(vec![0.0, 0.0]),
        ];
        let combos = vec![vec![(1.0, 0, 1), (-1.0, 0, 2), (-1.0, 1, 2), (1.0, 2, 2)]];
        let got = comb.combine(&pts, &combos).unwrap().values[0];
        let want = euclidean_closed_form(2, 0.4, &[0.3, -0.2], &[-1.1, 0.5], &[0.0, 0.0]).unwrap();
        assert!(((got - want) / want).abs() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn matern_against_half_order_form() {
        // d = 1, α = ½: (4π)^{−1/2}/Γ(1)·2(r/2)^{1/2}K_{1/2}(r) = e^{−r}/2
        let m = ManifoldSpec::euclidean(1).unwrap();
        let g = EuclideanClosed::new(&m, &FieldSpec::bessel(0.5)).unwrap();
        let q = FlatQuadrature::new(&m, &FieldSpec::bessel(0.5), 1e-11).unwrap();
        let pts = vec![Point::Euclidean(vec![0.0]), Point::Euclidean(vec![0.7])];
        let a = g.batch(&pts, &[(0, 1), (0, 0)]).unwrap().values;
        let b = q.batch(&pts, &[(0, 1), (0, 0)]).unwrap().values;
        for (v, r) in [(a[0], 0.7), (a[1], 0.0), (b[0], 0.7), (b[1], 0.0)] {
            let want = 0.5 * f64::exp(-r);
            assert!((v - want).abs() < 1e-10, "{v} vs {want}");
        }
    }

    #[test]
    fn torus_with_equal_radii_factorizes_on_axes() {
        // along one axis the torus generator is a circle generator plus the
        // mean-free second factor at zero gap; compare against direct series
        let m = ManifoldSpec::flat_torus(1.0, 1.0).unwrap();
        let fs = FieldSpec::riesz(0.5, Point::Torus([0.0, 0.0]));
        let g = PeriodicQuadrature::new(&m, &fs, 1e-10).unwrap();
        let pts = vec![Point::Torus([0.0, 0.0]), Point::Torus([1.0, 2.0])];
        let got = g.batch(&pts, &[(0, 1)]).unwrap().values[0];
        let mut want = 0.0;
        for a in -300i64..=300 {
            for b in -300i64..=300 {
                if a == 0 && b == 0 {
                    continue;
                }
                let lam = (a * a + b * b) as f64;
                want += (a as f64 * 1.0 + b as f64 * 2.0).cos() * lam.powf(-1.5);
            }
        }
        want /= 4.0 * PI * PI;
        // the truncated lattice sum carries an O(1/300) tail
        assert!((got - want).abs() < 2e-3, "{got} vs {want}");
    }
}
