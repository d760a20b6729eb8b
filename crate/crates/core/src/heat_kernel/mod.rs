//! Heat kernels, Laplace spectra and the special functions behind them.

mod bessel;
mod harmonics;
pub(crate) mod hyperbolic;
mod legendre;
mod spectrum;

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

pub use bessel::{bessel_j, bessel_j_pair, bessel_zeros, ZeroTable};
pub use harmonics::{harmonic_degree_order, harmonic_index, real_harmonics};
pub use legendre::{legendre_p, LegendreSeq};
pub use spectrum::{spectrum, spectrum_below, Mode, SpectrumSlice};
pub(crate) use spectrum::disk_zeros;

use crate::error::{FieldError, Result};
use crate::manifold::{angle_gap, sphere_angle, ManifoldSpec, Point};

/// Default truncation tolerance, relative to the equilibrium scale of the kind.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Largest grouped-series length any spectral sum may use.
pub const MAX_TERMS: usize = 1_000_000;
/// Unit-disk zeros are tabulated up to this ceiling at most.
pub const DISK_ZERO_CEILING: f64 = 400.0;
/// Below `t = CIRCLE_IMAGE_SWITCH · r²` the circle uses the image sum.
pub const CIRCLE_IMAGE_SWITCH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    ClosedForm,
    Spectral,
    /// Periodised Gaussian (method of images).
    Images,
    Integral,
}

impl fmt::Display for KernelMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelMethod::ClosedForm => "closed_form",
            KernelMethod::Spectral => "spectral",
            KernelMethod::Images => "images",
            KernelMethod::Integral => "integral",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub method: KernelMethod,
    /// Series terms (or quadrature subintervals) used.
    pub terms: usize,
    /// Bound on the neglected part (truncation or quadrature error).
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Kern {
    pub value: f64,
    pub terms: usize,
    pub tail: f64,
    pub method: KernelMethod,
}

/// Unit circle: `Σ_k e^{−k²τ} e^{ikΔ}/(2π)`, without the constant when
/// `fluct` is set.
pub(crate) fn circle_unit(tau: f64, delta: f64, tol: f64, fluct: bool) -> Kern {
    let mean = 1.0 / (2.0 * PI);
    let images = || {
        let pre = (4.0 * PI * tau).powf(-0.5);
        let mut s = 0.0;
        for n in -3i32..=3 {
            let z = delta + 2.0 * PI * n as f64;
            s += (-z * z / (4.0 * tau)).exp();
        }
        let far = 7.0 * PI;
        let tail = 2.0 * pre * (-far * far / (4.0 * tau)).exp();
        Kern {
            value: pre * s - if fluct { mean } else { 0.0 },
            terms: 7,
            tail,
            method: KernelMethod::Images,
        }
    };
    if tau < CIRCLE_IMAGE_SWITCH {
        return images();
    }
    let bound = |k: f64| (-(k * k) * tau).exp() * (1.0 + 1.0 / (2.0 * k * tau)) / PI;
    let mut kmax = 1usize;
    while bound(kmax as f64 + 1.0) > tol * mean && kmax < MAX_TERMS {
        kmax = (kmax * 2).max(kmax + 1);
    }
    // tighten by bisection on the monotone bound
    let (mut lo, mut hi) = (kmax / 2, kmax);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if bound(mid as f64 + 1.0) > tol * mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let kmax = hi.max(1);
    let (c1, s1) = (delta.cos(), delta.sin());
    let (mut c, mut s) = (1.0, 0.0);
    let mut acc = 0.0;
    for k in 1..=kmax {
        let nc = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = nc;
        if k % 1024 == 0 {
            let (sn, cs) = (k as f64 * delta).sin_cos();
            c = cs;
            s = sn;
        }
        acc += (-((k * k) as f64) * tau).exp() * c;
    }
    let total = acc / PI + mean;
    // deep in the far side the cosine sum is all cancellation; the
    // positive image sum is exact there while τ stays moderate
    if total < 1e-6 * mean && tau < 1.0 {
        return images();
    }
    Kern {
        value: if fluct { total - mean } else { total },
        terms: kmax + 1,
        tail: bound(kmax as f64 + 1.0),
        method: KernelMethod::Spectral,
    }
}

/// Unit sphere: `Σ_l (2l+1)/(4π) e^{−l(l+1)τ} P_l(u)`.
pub(crate) fn sphere_unit(tau: f64, u: f64, tol: f64, fluct: bool) -> Result<Kern> {
    let refv = 1.0 / (4.0 * PI);
    let bound = |l: f64| (-(l * (l + 1.0)) * tau).exp() / (4.0 * PI * tau);
    let mut lmax = ((30.0 / tau).sqrt() as usize).max(4);
    while bound(lmax as f64) > tol * refv {
        lmax = lmax * 5 / 4 + 1;
        if lmax > MAX_TERMS {
            return Err(FieldError::Truncation {
                message: format!("sphere heat kernel at τ = {tau} needs more than {MAX_TERMS} degrees"),
                achieved: bound(MAX_TERMS as f64),
            });
        }
    }
    let mut acc = 0.0;
    for (l, p) in LegendreSeq::new(u).take(lmax + 1).enumerate() {
        if l == 0 && fluct {
            continue;
        }
        let lf = l as f64;
        acc += (2.0 * lf + 1.0) * (-(lf * (lf + 1.0)) * tau).exp() * p;
    }
    Ok(Kern {
        value: acc * refv,
        terms: lmax + 1,
        tail: bound(lmax as f64),
        method: KernelMethod::Spectral,
    })
}

/// Envelope constant for `|φ_{k,l}|² ≤ E·j_{k,l}` on the unit disk,
/// from Landau's bound `|J_k| ≤ 0.674885·k^{−1/3}`.
pub(crate) fn disk_envelope(modes: &[(usize, f64, f64)]) -> f64 {
    modes
        .iter()
        .map(|&(k, j, c)| {
            let s = if k == 0 { 1.0 } else { (0.674_885 * (k as f64).powf(-1.0 / 3.0)).min(1.0) };
            c * c * s * s / j
        })
        .fold(0.5, f64::max)
}

/// `Σ_{λ > J²} e^{−λτ}|φ(x)φ(y)|` envelope for the unit disk.
pub(crate) fn disk_tail(e: f64, ceiling: f64, tau: f64) -> f64 {
    let lam = ceiling * ceiling;
    e * (ceiling / (4.0 * tau) + 1.0 / (8.0 * tau * tau * ceiling)) * (-lam * tau).exp()
}

/// Unit disk Dirichlet kernel at polar points `(ρ, θ)`.
pub(crate) fn disk_unit(tau: f64, x: (f64, f64), y: (f64, f64), tol: f64) -> Result<Kern> {
    let refv = (-5.783_185_962_946_784 * tau).exp() / PI;
    let probe = disk_zeros(40.0);
    let e = disk_envelope(&probe);
    let mut ceiling = 10.0f64;
    while disk_tail(e, ceiling, tau) > tol * refv {
        ceiling *= 1.25;
        if ceiling > DISK_ZERO_CEILING {
            return Err(FieldError::Truncation {
                message: format!("unit-disk heat kernel at τ = {tau} needs zeros beyond {DISK_ZERO_CEILING}"),
                achieved: disk_tail(e, DISK_ZERO_CEILING, tau),
            });
        }
    }
    let ceiling = ceiling.ceil();
    let modes = disk_zeros(ceiling);
    let e = disk_envelope(&modes);
    let dth = x.1 - y.1;
    let mut acc = 0.0;
    for &(k, j, c) in modes.iter() {
        let w = (-j * j * tau).exp();
        if w == 0.0 {
            continue;
        }
        let ang = if k == 0 { 1.0 } else { (k as f64 * dth).cos() };
        acc += w * c * c * bessel_j(k, j * x.0) * bessel_j(k, j * y.0) * ang;
    }
    Ok(Kern {
        value: acc,
        terms: modes.len(),
        tail: disk_tail(e, ceiling, tau),
        method: KernelMethod::Spectral,
    })
}

/// `(4πt)^{−1/2} e^{−z²/4t}`.
pub(crate) fn line_kernel(t: f64, z: f64) -> f64 {
    (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// `H_t(x, y)` at the default tolerance.
pub fn heat_kernel(m: &ManifoldSpec, t: f64, x: &Point, y: &Point) -> Result<KernelValue> {
    heat_kernel_tol(m, t, x, y, DEFAULT_TOLERANCE)
}

/// `H_t(x, y)` with the truncation tail held below `tol` times the
/// equilibrium scale of the kind.
pub fn heat_kernel_tol(m: &ManifoldSpec, t: f64, x: &Point, y: &Point, tol: f64) -> Result<KernelValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(FieldError::Domain(format!("heat kernel time must be positive, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(FieldError::Domain("tolerance must be positive".into()));
    }
    m.validate()?;
    m.validate_point(x)?;
    m.validate_point(y)?;
    let wrap = |k: Kern, scale: f64| KernelValue {
        value: k.value * scale,
        method: k.method,
        terms: k.terms,
        tail_bound: k.tail * scale,
    };
    Ok(match (*m, x, y) {
        (ManifoldSpec::Euclidean { dim, .. }, _, _) => {
            let d = m.distance_unchecked(x, y);
            KernelValue {
                value: (4.0 * PI * t).powf(-(dim as f64) / 2.0) * (-d * d / (4.0 * t)).exp(),
                method: KernelMethod::ClosedForm,
                terms: 1,
                tail_bound: 0.0,
            }
        }
        (ManifoldSpec::Circle { radius }, Point::Circle(a), Point::Circle(b)) => {
            wrap(circle_unit(t / (radius * radius), angle_gap(*a, *b), tol, false), 1.0 / radius)
        }
        (ManifoldSpec::Sphere2 { radius }, Point::Sphere(a), Point::Sphere(b)) => {
            let u = sphere_angle(a, b).cos();
            wrap(sphere_unit(t / (radius * radius), u, tol, false)?, 1.0 / (radius * radius))
        }
        (ManifoldSpec::FlatTorus { r1, r2 }, Point::Torus(a), Point::Torus(b)) => {
            let k1 = circle_unit(t / (r1 * r1), angle_gap(a[0], b[0]), tol, false);
            let k2 = circle_unit(t / (r2 * r2), angle_gap(a[1], b[1]), tol, false);
            let (v1, v2) = (k1.value / r1, k2.value / r2);
            let (e1, e2) = (k1.tail / r1, k2.tail / r2);
            KernelValue {
                value: v1 * v2,
                method: if k1.method == k2.method { k1.method } else { KernelMethod::Spectral },
                terms: k1.terms * k2.terms,
                tail_bound: v1.abs() * e2 + v2.abs() * e1 + e1 * e2,
            }
        }
        (
            ManifoldSpec::Cylinder { radius, axial_scale },
            Point::Cylinder { angle: a, height: h1 },
            Point::Cylinder { angle: b, height: h2 },
        ) => {
            let k = circle_unit(t / (radius * radius), angle_gap(*a, *b), tol, false);
            let line = line_kernel(t, axial_scale * (h1 - h2));
            KernelValue {
                value: k.value / radius * line,
                method: k.method,
                terms: k.terms,
                tail_bound: k.tail / radius * line,
            }
        }
        (
            ManifoldSpec::UnitDisk { scale },
            Point::Disk { radius: r1, angle: a1 },
            Point::Disk { radius: r2, angle: a2 },
        ) => wrap(disk_unit(t / (scale * scale), (*r1, *a1), (*r2, *a2), tol)?, 1.0 / (scale * scale)),
        (ManifoldSpec::HyperbolicPlane { scale }, _, _) => {
            let rho = m.distance_unchecked(x, y) / scale;
            let (v, err, n) = hyperbolic::mckean(t / (scale * scale), rho, tol.max(1e-13))?;
            KernelValue {
                value: v / (scale * scale),
                method: KernelMethod::Integral,
                terms: n,
                tail_bound: err / (scale * scale),
            }
        }
        _ => return Err(FieldError::Domain("point kind does not match the manifold".into())),
    })
}

/// `H_t(x,y) / ((4πt)^{−d/2} e^{−d(x,y)²/4t})`.
pub fn small_time_ratio(m: &ManifoldSpec, t: f64, x: &Point, y: &Point) -> Result<f64> {
    let d = m.geodesic_distance(x, y)?;
    let guard = m.injectivity_guard();
    if d >= guard {
        return Err(FieldError::Guard { distance: d, guard });
    }
    if let ManifoldSpec::Euclidean { .. } = m {
        if !(t > 0.0) {
            return Err(FieldError::Domain(format!("heat kernel time must be positive, got {t}")));
        }
        return Ok(1.0);
    }
    let h = heat_kernel(m, t, x, y)?.value;
    let dim = m.dim() as f64;
    // compare in logs so that far-apart points at small t do not underflow
    let log_e = -0.5 * dim * (4.0 * PI * t).ln() - d * d / (4.0 * t);
    Ok((h.ln() - log_e).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::sample_points;

    #[test]
    fn quoted_examples() {
        let e = ManifoldSpec::euclidean(2).unwrap();
        let o = Point::Euclidean(vec![0.3, -0.2]);
        let v = heat_kernel(&e, 1.0, &o, &o).unwrap().value;
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!((v - 0.079_577_5).abs() < 1e-7);

        let c = ManifoldSpec::circle(1.0).unwrap();
        let v = heat_kernel(&c, 50.0, &Point::Circle(0.3), &Point::Circle(2.9)).unwrap().value;
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-10);

        let s = ManifoldSpec::sphere2(1.0).unwrap();
        let n = Point::Sphere([0.0, 0.0, 1.0]);
        let v = heat_kernel(&s, 0.5, &n, &n).unwrap().value;
        let oracle: f64 = (0..50)
            .map(|k| (2 * k + 1) as f64 / (4.0 * PI) * (-((k * (k + 1)) as f64) / 2.0).exp())
            .sum();
        assert!((v - oracle).abs() < 1e-13);
    }

    #[test]
    fn circle_crossover_agrees() {
        for r in [0.5, 1.0, 3.0] {
            let t = CIRCLE_IMAGE_SWITCH;
            for d in [0.0, 0.4, 1.7, PI] {
                let images = circle_unit(t * (1.0 - 1e-15), d, 1e-14, false).value;
                let spectral = circle_unit(t, d, 1e-14, false).value;
                assert_eq!(circle_unit(t * 0.99, d, 1e-12, false).method, KernelMethod::Images);
                assert!((images - spectral).abs() < 1e-10, "r={r} d={d}: {images} {spectral}");
            }
        }
    }

    fn kinds() -> Vec<ManifoldSpec> {
        vec![
            ManifoldSpec::euclidean(3).unwrap(),
            ManifoldSpec::circle(1.3).unwrap(),
            ManifoldSpec::sphere2(0.9).unwrap(),
            ManifoldSpec::flat_torus(1.0, 1.6).unwrap(),
            ManifoldSpec::cylinder(1.0).unwrap(),
            ManifoldSpec::unit_disk(),
            ManifoldSpec::hyperbolic_plane(),
        ]
    }

    #[test]
    fn positive_and_symmetric() {
        for m in kinds() {
            let pts = sample_points(&m, 6, 21);
            for t in [0.05, 0.3, 2.0] {
                for x in &pts {
                    for y in &pts {
                        let a = heat_kernel(&m, t, x, y).unwrap().value;
                        let b = heat_kernel(&m, t, y, x).unwrap().value;
                        assert!(a > 0.0, "{} t={t} {a}", m.kind_name());
                        assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{}", m.kind_name());
                    }
                }
            }
        }
    }

    #[test]
    fn metric_scaling() {
        for m in kinds() {
            for c in [0.5, 2.0] {
                let big = m.scale_metric(c).unwrap();
                let pts = sample_points(&m, 4, 5);
                for x in &pts {
                    for y in &pts {
                        let t = 0.4;
                        let lhs = heat_kernel(&big, t, x, y).unwrap().value;
                        let rhs = c.powi(-(m.dim() as i32)) * heat_kernel(&m, t / (c * c), x, y).unwrap().value;
                        assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1e-3), "{} c={c}: {lhs} {rhs}", m.kind_name());
                    }
                }
            }
        }
    }

    #[test]
    fn isometry_invariance() {
        use crate::manifold::Isometry;
        for m in kinds() {
            let iso = Isometry::random(&m, 4);
            let pts = sample_points(&m, 4, 6);
            for x in &pts {
                for y in &pts {
                    let (ix, iy) = (iso.apply(&m, x).unwrap(), iso.apply(&m, y).unwrap());
                    let a = heat_kernel(&m, 0.3, x, y).unwrap().value;
                    let b = heat_kernel(&m, 0.3, &ix, &iy).unwrap().value;
                    assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{}: {a} {b}", m.kind_name());
                }
            }
        }
    }

    #[test]
    fn stochastic_completeness_by_lattice() {
        // circle: trapezoid on a uniform grid is spectrally accurate
        let c = ManifoldSpec::circle(1.0).unwrap();
        let n = 400;
        let x = Point::Circle(0.7);
        let s: f64 = (0..n)
            .map(|i| heat_kernel(&c, 0.2, &x, &Point::Circle(2.0 * PI * i as f64 / n as f64)).unwrap().value)
            .sum::<f64>()
            * 2.0
            * PI
            / n as f64;
        assert!((s - 1.0).abs() < 1e-6, "{s}");

        // sphere: Gauss–Legendre in cos θ times uniform φ about the base point
        let sp = ManifoldSpec::sphere2(1.0).unwrap();
        let base = Point::Sphere([0.0, 0.0, 1.0]);
        let (nodes, weights) = gauss_legendre(60);
        let mut total = 0.0;
        for (u, w) in nodes.iter().zip(&weights) {
            let st = (1.0 - u * u).sqrt();
            let y = Point::Sphere([st, 0.0, *u]);
            total += w * 2.0 * PI * heat_kernel(&sp, 0.2, &base, &y).unwrap().value;
        }
        assert!((total - 1.0).abs() < 1e-6, "{total}");

        // flat torus: product grid
        let tor = ManifoldSpec::flat_torus(1.0, 1.5).unwrap();
        let x = Point::Torus([0.3, 4.0]);
        let n = 60;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let y = Point::Torus([2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64]);
                acc += heat_kernel(&tor, 0.3, &x, &y).unwrap().value;
            }
        }
        acc *= tor.volume().unwrap() / (n * n) as f64;
        assert!((acc - 1.0).abs() < 1e-6, "{acc}");
    }

    pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let dp = {
                        let (mut p0, mut p1) = (1.0, z);
                        for k in 2..=n {
                            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                            p0 = p1;
                            p1 = p2;
                        }
                        n as f64 * (z * p1 - p0) / (z * z - 1.0)
                    };
                    x[i] = z;
                    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                    break;
                }
            }
        }
        (x, w)
    }

    #[test]
    fn small_time_ratio_examples() {
        let e = ManifoldSpec::euclidean(2).unwrap();
        let a = Point::Euclidean(vec![0.0, 0.0]);
        let b = Point::Euclidean(vec![3.0, 1.0]);
        assert_eq!(small_time_ratio(&e, 0.7, &a, &b).unwrap(), 1.0);

        let s = ManifoldSpec::sphere2(1.0).unwrap();
        let n = Point::Sphere([0.0, 0.0, 1.0]);
        assert!((small_time_ratio(&s, 1e-3, &n, &n).unwrap() - 1.0).abs() < 1e-2);

        let c = ManifoldSpec::circle(1.0).unwrap();
        let r = small_time_ratio(&c, 1e-3, &Point::Circle(0.0), &Point::Circle(0.1)).unwrap();
        assert!((r - 1.0).abs() < 1e-3);

        let far = Point::Sphere([0.0, 0.0, -1.0]);
        assert!(matches!(small_time_ratio(&s, 1e-3, &n, &far), Err(FieldError::Guard { .. })));
    }

    #[test]
    fn small_time_ratio_converges_monotonically() {
        let s = ManifoldSpec::sphere2(1.0).unwrap();
        let x = Point::Sphere([0.0, 0.0, 1.0]);
        let y = Point::sphere_from([0.05, 0.0, 1.0]).unwrap();
        let gaps: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&t| (small_time_ratio(&s, t, &x, &y).unwrap() - 1.0).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    #[test]
    fn rejects_bad_time() {
        let c = ManifoldSpec::circle(1.0).unwrap();
        assert!(heat_kernel(&c, 0.0, &Point::Circle(0.0), &Point::Circle(0.0)).is_err());
        assert!(heat_kernel(&c, -1.0, &Point::Circle(0.0), &Point::Circle(0.0)).is_err());
    }
}
