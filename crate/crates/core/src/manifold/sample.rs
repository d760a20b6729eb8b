use rand::Rng;
use rand_distr::StandardNormal;

use super::{angle_gap, wrap_angle, ManifoldSpec, Point, TWO_PI};
use crate::error::{domain, Result};
use crate::sampling::{rng_for, POINT_STREAM};

/// Uniform point sampler over the volume measure of a bounded chart window.
///
/// Default windows for the non-compact kinds: the unit ball (Euclidean),
/// `|h| ≤ 1` (cylinder) and `[-1, 1] × [1/2, 2]` (half-plane).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSampler {
    pub seed: u64,
    /// Equally spaced angles on the circle instead of random draws.
    pub stratified: bool,
}

impl PointSampler {
    pub fn new(seed: u64) -> Self {
        PointSampler {
            seed,
            stratified: false,
        }
    }

    pub fn stratified(seed: u64) -> Self {
        PointSampler {
            seed,
            stratified: true,
        }
    }

    pub fn sample(&self, m: &ManifoldSpec, n: usize) -> Result<Vec<Point>> {
        if self.stratified {
            return match m {
                ManifoldSpec::Circle { .. } => Ok((0..n)
                    .map(|j| Point::Circle(TWO_PI * j as f64 / n as f64))
                    .collect()),
                _ => domain("stratified sampling is only defined on the circle"),
            };
        }
        let mut rng = rng_for(self.seed, POINT_STREAM);
        Ok((0..n).map(|_| draw(m, &mut rng)).collect())
    }
}

/// `n` uniform points on `m` (see [`PointSampler`] for the windows).
pub fn sample_points(m: &ManifoldSpec, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = rng_for(seed, POINT_STREAM);
    (0..n).map(|_| draw(m, &mut rng)).collect()
}

fn angle(rng: &mut impl Rng) -> f64 {
    wrap_angle(rng.random::<f64>() * TWO_PI)
}

fn draw(m: &ManifoldSpec, rng: &mut impl Rng) -> Point {
    match *m {
        ManifoldSpec::Euclidean { dim, .. } => loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n > 0.0 {
                let r = rng.random::<f64>().powf(1.0 / dim as f64);
                break Point::Euclidean(v.iter().map(|a| a * r / n).collect());
            }
        },
        ManifoldSpec::Circle { .. } => Point::Circle(angle(rng)),
        ManifoldSpec::Sphere2 { .. } => loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if let Ok(p) = Point::sphere_from(v) {
                break p;
            }
        },
        ManifoldSpec::FlatTorus { .. } => Point::Torus([angle(rng), angle(rng)]),
        ManifoldSpec::Cylinder { .. } => Point::Cylinder {
            angle: angle(rng),
            height: 2.0 * rng.random::<f64>() - 1.0,
        },
        ManifoldSpec::UnitDisk { .. } => Point::Disk {
            radius: rng.random::<f64>().sqrt(),
            angle: angle(rng),
        },
        ManifoldSpec::HyperbolicPlane { .. } => {
            let x = 2.0 * rng.random::<f64>() - 1.0;
            // inverse CDF of the density ∝ y⁻² on [1/2, 2]
            let y = 1.0 / (2.0 - 1.5 * rng.random::<f64>());
            Point::HalfPlane { x, y }
        }
    }
}

/// `count` point pairs at geodesic distance exactly `dist` (to round-off).
///
/// Base points come from the default window; the partner is reached along a
/// geodesic in a random direction. Fails when `dist` exceeds what the chart
/// can realise without wrapping.
pub fn pairs_at_distance(
    m: &ManifoldSpec,
    dist: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<(Point, Point)>> {
    if !(dist.is_finite() && dist >= 0.0) {
        return domain(format!("pair distance must be nonnegative, got {dist}"));
    }
    let mut rng = rng_for(seed, POINT_STREAM ^ dist.to_bits());
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return domain(format!("cannot place pairs at distance {dist} on {}", m.kind_name()));
        }
        let x = draw(m, &mut rng);
        if let Some(y) = partner(m, &x, dist, &mut rng) {
            if m.validate_point(&y).is_ok() {
                out.push((x, y));
            }
        }
    }
    Ok(out)
}

fn partner(m: &ManifoldSpec, x: &Point, dist: f64, rng: &mut impl Rng) -> Option<Point> {
    match (*m, x) {
        (ManifoldSpec::Euclidean { scale, .. }, Point::Euclidean(v)) => {
            let u: Vec<f64> = (0..v.len()).map(|_| rng.sample(StandardNormal)).collect();
            let n = u.iter().map(|a| a * a).sum::<f64>().sqrt();
            Some(Point::Euclidean(
                v.iter().zip(&u).map(|(a, b)| a + dist / scale * b / n).collect(),
            ))
        }
        (ManifoldSpec::Circle { radius }, Point::Circle(a)) => {
            let step = dist / radius;
            if step > std::f64::consts::PI {
                return None;
            }
            let s = if rng.random::<bool>() { step } else { -step };
            Some(Point::Circle(wrap_angle(a + s)))
        }
        (ManifoldSpec::Sphere2 { radius }, Point::Sphere(v)) => {
            let theta = dist / radius;
            if theta > std::f64::consts::PI {
                return None;
            }
            let g: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let dot = g[0] * v[0] + g[1] * v[1] + g[2] * v[2];
            let t = [g[0] - dot * v[0], g[1] - dot * v[1], g[2] - dot * v[2]];
            let tn = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
            if tn < 1e-8 {
                return None;
            }
            let (s, c) = theta.sin_cos();
            Point::sphere_from(std::array::from_fn(|i| c * v[i] + s * t[i] / tn)).ok()
        }
        (ManifoldSpec::FlatTorus { r1, r2 }, Point::Torus(a)) => {
            let psi = rng.random::<f64>() * TWO_PI;
            let (d1, d2) = (dist * psi.cos() / r1, dist * psi.sin() / r2);
            let y = Point::Torus([wrap_angle(a[0] + d1), wrap_angle(a[1] + d2)]);
            // wrapping would shorten the path
            let exact = (angle_gap(a[0], a[0] + d1) - d1.abs()).abs() < 1e-12
                && (angle_gap(a[1], a[1] + d2) - d2.abs()).abs() < 1e-12;
            exact.then_some(y)
        }
        (
            ManifoldSpec::Cylinder {
                radius,
                axial_scale,
            },
            Point::Cylinder { angle, height },
        ) => {
            let psi = rng.random::<f64>() * TWO_PI;
            let (da, dh) = (dist * psi.cos() / radius, dist * psi.sin() / axial_scale);
            (da.abs() <= std::f64::consts::PI).then(|| Point::Cylinder {
                angle: wrap_angle(angle + da),
                height: height + dh,
            })
        }
        (ManifoldSpec::UnitDisk { scale }, Point::Disk { radius, angle }) => {
            let psi = rng.random::<f64>() * TWO_PI;
            let (x0, y0) = (radius * angle.cos(), radius * angle.sin());
            let (x1, y1) = (x0 + dist / scale * psi.cos(), y0 + dist / scale * psi.sin());
            let r = x1.hypot(y1);
            (r < 1.0).then(|| Point::Disk {
                radius: r,
                angle: wrap_angle(y1.atan2(x1)),
            })
        }
        (ManifoldSpec::HyperbolicPlane { scale }, Point::HalfPlane { x, y }) => {
            // i e^ρ rotated about i, then carried to (x, y)
            let rho = dist / scale;
            let phi = rng.random::<f64>() * std::f64::consts::PI;
            let (s, c) = phi.sin_cos();
            let w = rho.exp();
            // (c z + s) / (−s z + c) at z = i w
            let (nr, ni) = (s, c * w);
            let (dr, di) = (c, -s * w);
            let den = dr * dr + di * di;
            let zr = (nr * dr + ni * di) / den;
            let zi = (ni * dr - nr * di) / den;
            Some(Point::HalfPlane {
                x: x + y * zr,
                y: y * zi,
            })
        }
        _ => None,
    }
}
