use rand::Rng;
use rand_distr::StandardNormal;

use super::{wrap_angle, ManifoldSpec, Point, TWO_PI};
use crate::error::{domain, FieldError, Result};

const ORTHO_TOL: f64 = 1e-10;
const MOBIUS_TOL: f64 = 1e-12;

/// An isometry of one of the supported manifolds, in chart form.
#[derive(Debug, Clone, PartialEq)]
pub enum Isometry {
    Identity,
    /// `x ↦ Q x + b` with `Q` row-major `d × d`.
    Euclidean {
        rotation: Vec<f64>,
        translation: Vec<f64>,
    },
    /// `θ ↦ ±θ + shift`.
    Circle { shift: f64, reflect: bool },
    Sphere { rotation: [[f64; 3]; 3] },
    Torus { shift: [f64; 2], reflect: [bool; 2] },
    Cylinder {
        shift: f64,
        offset: f64,
        reflect_angle: bool,
        reflect_axis: bool,
    },
    Disk { rotation: f64, reflect: bool },
    /// `z ↦ (a z + b) / (c z + d)` with `ad − bc = 1`.
    Mobius { a: f64, b: f64, c: f64, d: f64 },
}

fn check_orthogonal(q: &[f64], n: usize) -> Result<()> {
    if q.len() != n * n || q.iter().any(|v| !v.is_finite()) {
        return domain("rotation matrix has wrong shape or non-finite entries");
    }
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = (0..n).map(|k| q[k * n + i] * q[k * n + j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (dot - want).abs() > ORTHO_TOL {
                return domain(format!("matrix is not orthogonal (QᵀQ[{i}][{j}] = {dot})"));
            }
        }
    }
    Ok(())
}

impl Isometry {
    pub fn euclidean(rotation: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let d = translation.len();
        check_orthogonal(&rotation, d)?;
        Ok(Isometry::Euclidean {
            rotation,
            translation,
        })
    }

    pub fn sphere(rotation: [[f64; 3]; 3]) -> Result<Self> {
        let flat: Vec<f64> = rotation.iter().flatten().copied().collect();
        check_orthogonal(&flat, 3)?;
        Ok(Isometry::Sphere { rotation })
    }

    /// Rotation by `angle` about the unit axis `axis` (Rodrigues).
    pub fn sphere_rotation(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return domain("rotation axis must be nonzero");
        }
        let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Self::sphere([
            [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
            [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
            [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
        ])
    }

    pub fn mobius(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if ![a, b, c, d].iter().all(|v| v.is_finite()) || (det - 1.0).abs() > MOBIUS_TOL {
            return domain(format!("Möbius map needs ad − bc = 1, got {det}"));
        }
        Ok(Isometry::Mobius { a, b, c, d })
    }

    fn fits(&self, m: &ManifoldSpec) -> bool {
        matches!(
            (self, m),
            (Isometry::Identity, _)
                | (Isometry::Euclidean { .. }, ManifoldSpec::Euclidean { .. })
                | (Isometry::Circle { .. }, ManifoldSpec::Circle { .. })
                | (Isometry::Sphere { .. }, ManifoldSpec::Sphere2 { .. })
                | (Isometry::Torus { .. }, ManifoldSpec::FlatTorus { .. })
                | (Isometry::Cylinder { .. }, ManifoldSpec::Cylinder { .. })
                | (Isometry::Disk { .. }, ManifoldSpec::UnitDisk { .. })
                | (Isometry::Mobius { .. }, ManifoldSpec::HyperbolicPlane { .. })
        )
    }

    pub fn apply(&self, m: &ManifoldSpec, x: &Point) -> Result<Point> {
        if !self.fits(m) {
            return Err(FieldError::Domain(format!(
                "isometry {self:?} does not act on a {}",
                m.kind_name()
            )));
        }
        m.validate_point(x)?;
        let flip = |a: f64, r: bool| if r { -a } else { a };
        let p = match (self, x) {
            (Isometry::Identity, p) => p.clone(),
            (
                Isometry::Euclidean {
                    rotation,
                    translation,
                },
                Point::Euclidean(v),
            ) => {
                let d = v.len();
                if translation.len() != d {
                    return domain("isometry dimension mismatch");
                }
                Point::Euclidean(
                    (0..d)
                        .map(|i| {
                            (0..d).map(|k| rotation[i * d + k] * v[k]).sum::<f64>()
                                + translation[i]
                        })
                        .collect(),
                )
            }
            (Isometry::Circle { shift, reflect }, Point::Circle(a)) => {
                Point::Circle(wrap_angle(flip(*a, *reflect) + shift))
            }
            (Isometry::Sphere { rotation: q }, Point::Sphere(v)) => {
                let w: [f64; 3] =
                    std::array::from_fn(|i| q[i][0] * v[0] + q[i][1] * v[1] + q[i][2] * v[2]);
                let n = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                Point::Sphere([w[0] / n, w[1] / n, w[2] / n])
            }
            (Isometry::Torus { shift, reflect }, Point::Torus(a)) => Point::Torus([
                wrap_angle(flip(a[0], reflect[0]) + shift[0]),
                wrap_angle(flip(a[1], reflect[1]) + shift[1]),
            ]),
            (
                Isometry::Cylinder {
                    shift,
                    offset,
                    reflect_angle,
                    reflect_axis,
                },
                Point::Cylinder { angle, height },
            ) => Point::Cylinder {
                angle: wrap_angle(flip(*angle, *reflect_angle) + shift),
                height: flip(*height, *reflect_axis) + offset,
            },
            (Isometry::Disk { rotation, reflect }, Point::Disk { radius, angle }) => Point::Disk {
                radius: *radius,
                angle: wrap_angle(flip(*angle, *reflect) + rotation),
            },
            (Isometry::Mobius { a, b, c, d }, Point::HalfPlane { x, y }) => {
                let (re, im) = (c * x + d, c * y);
                let den = re * re + im * im;
                let nx = ((a * x + b) * re + a * y * im) / den;
                let ny = y / den;
                Point::HalfPlane { x: nx, y: ny }
            }
            _ => return domain("isometry and point kinds differ"),
        };
        Ok(p)
    }

    /// A pseudo-random isometry of `m`, deterministic in `seed`.
    pub fn random(m: &ManifoldSpec, seed: u64) -> Isometry {
        let mut rng = crate::sampling::rng_for(seed, crate::sampling::ISOMETRY_STREAM);
        match *m {
            ManifoldSpec::Euclidean { dim, .. } => {
                let q = random_orthogonal(dim, &mut rng);
                let t = (0..dim)
                    .map(|_| 0.5 * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                Isometry::Euclidean {
                    rotation: q,
                    translation: t,
                }
            }
            ManifoldSpec::Circle { .. } => {
                let shift = rand_angle(&mut rng);
                Isometry::Circle {
                    shift,
                    reflect: rng.random(),
                }
            }
            ManifoldSpec::Sphere2 { .. } => {
                let q = random_orthogonal(3, &mut rng);
                Isometry::Sphere {
                    rotation: std::array::from_fn(|i| std::array::from_fn(|j| q[i * 3 + j])),
                }
            }
            ManifoldSpec::FlatTorus { .. } => {
                let shift = [rand_angle(&mut rng), rand_angle(&mut rng)];
                Isometry::Torus {
                    shift,
                    reflect: [rng.random(), rng.random()],
                }
            }
            ManifoldSpec::Cylinder { .. } => {
                let shift = rand_angle(&mut rng);
                Isometry::Cylinder {
                    shift,
                    offset: rng.random::<f64>() - 0.5,
                    reflect_angle: rng.random(),
                    reflect_axis: rng.random(),
                }
            }
            ManifoldSpec::UnitDisk { .. } => {
                let rotation = rand_angle(&mut rng);
                Isometry::Disk {
                    rotation,
                    reflect: rng.random(),
                }
            }
            ManifoldSpec::HyperbolicPlane { .. } => {
                let phi = rand_angle(&mut rng) / 2.0;
                let k = 0.7 + 0.7 * rng.random::<f64>();
                let x0 = rng.random::<f64>() - 0.5;
                // (z ↦ k z + x0) ∘ (rotation about i)
                let (s, c) = phi.sin_cos();
                let sk = k.sqrt();
                let (p, q, r, t) = (sk, x0 / sk, 0.0, 1.0 / sk);
                Isometry::Mobius {
                    a: p * c - q * s,
                    b: p * s + q * c,
                    c: r * c - t * s,
                    d: r * s + t * c,
                }
            }
        }
    }
}

fn rand_angle(rng: &mut impl Rng) -> f64 {
    rng.random::<f64>() * TWO_PI
}

/// Orthogonal matrix from modified Gram–Schmidt on a Gaussian matrix.
fn random_orthogonal(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for c in &cols {
                let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|a| *a /= norm);
            cols.push(v);
        }
    }
    let mut q = vec![0.0; n * n];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            q[i * n + j] = c[i];
        }
    }
    q
}
