use super::{ManifoldSpec, TWO_PI};
use crate::error::{domain, Result};

/// A point in the standard chart of a manifold kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Euclidean(Vec<f64>),
    Circle(f64),
    /// Unit 3-vector; the radius enters only through distances.
    Sphere([f64; 3]),
    Torus([f64; 2]),
    Cylinder { angle: f64, height: f64 },
    /// Polar chart `(ρ, θ)` with `ρ ∈ [0, 1)`.
    Disk { radius: f64, angle: f64 },
    HalfPlane { x: f64, y: f64 },
}

const SPHERE_NORM_TOL: f64 = 1e-12;

fn check_angle(a: f64) -> Result<()> {
    if a.is_finite() && (0.0..TWO_PI).contains(&a) {
        Ok(())
    } else {
        domain(format!("angle {a} outside [0, 2π)"))
    }
}

fn check_finite(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        domain("non-finite coordinate")
    }
}

impl Point {
    /// Builds a point from a flat coordinate list in the chart of `m`.
    pub fn from_coords(m: &ManifoldSpec, c: &[f64]) -> Result<Point> {
        let want = match m {
            ManifoldSpec::Euclidean { dim, .. } => *dim,
            ManifoldSpec::Circle { .. } => 1,
            ManifoldSpec::Sphere2 { .. } => 3,
            _ => 2,
        };
        if c.len() != want {
            return domain(format!(
                "{} points need {want} coordinates, got {}",
                m.kind_name(),
                c.len()
            ));
        }
        let p = match m {
            ManifoldSpec::Euclidean { .. } => Point::Euclidean(c.to_vec()),
            ManifoldSpec::Circle { .. } => Point::Circle(c[0]),
            ManifoldSpec::Sphere2 { .. } => Point::Sphere([c[0], c[1], c[2]]),
            ManifoldSpec::FlatTorus { .. } => Point::Torus([c[0], c[1]]),
            ManifoldSpec::Cylinder { .. } => Point::Cylinder {
                angle: c[0],
                height: c[1],
            },
            ManifoldSpec::UnitDisk { .. } => Point::Disk {
                radius: c[0],
                angle: c[1],
            },
            ManifoldSpec::HyperbolicPlane { .. } => Point::HalfPlane { x: c[0], y: c[1] },
        };
        p.validate_for(m)?;
        Ok(p)
    }

    pub fn coords(&self) -> Vec<f64> {
        match self {
            Point::Euclidean(v) => v.clone(),
            Point::Circle(a) => vec![*a],
            Point::Sphere(v) => v.to_vec(),
            Point::Torus(a) => a.to_vec(),
            Point::Cylinder { angle, height } => vec![*angle, *height],
            Point::Disk { radius, angle } => vec![*radius, *angle],
            Point::HalfPlane { x, y } => vec![*x, *y],
        }
    }

    pub fn validate_for(&self, m: &ManifoldSpec) -> Result<()> {
        match (m, self) {
            (ManifoldSpec::Euclidean { dim, .. }, Point::Euclidean(v)) => {
                if v.len() != *dim {
                    return domain(format!("expected {dim} coordinates, got {}", v.len()));
                }
                v.iter().try_for_each(|&x| check_finite(x))
            }
            (ManifoldSpec::Circle { .. }, Point::Circle(a)) => check_angle(*a),
            (ManifoldSpec::Sphere2 { .. }, Point::Sphere(v)) => {
                v.iter().try_for_each(|&x| check_finite(x))?;
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if (n - 1.0).abs() > SPHERE_NORM_TOL {
                    return domain(format!("sphere point has norm {n}, expected 1"));
                }
                Ok(())
            }
            (ManifoldSpec::FlatTorus { .. }, Point::Torus(a)) => {
                check_angle(a[0])?;
                check_angle(a[1])
            }
            (ManifoldSpec::Cylinder { .. }, Point::Cylinder { angle, height }) => {
                check_angle(*angle)?;
                check_finite(*height)
            }
            (ManifoldSpec::UnitDisk { .. }, Point::Disk { radius, angle }) => {
                check_angle(*angle)?;
                if radius.is_finite() && (0.0..1.0).contains(radius) {
                    Ok(())
                } else {
                    domain(format!("disk radius {radius} outside [0, 1)"))
                }
            }
            (ManifoldSpec::HyperbolicPlane { .. }, Point::HalfPlane { x, y }) => {
                check_finite(*x)?;
                if y.is_finite() && *y > 0.0 {
                    Ok(())
                } else {
                    domain(format!("half-plane point needs y > 0, got {y}"))
                }
            }
            _ => domain(format!("point {self:?} does not belong to a {}", m.kind_name())),
        }
    }

    /// Sphere point normalised from an arbitrary nonzero vector.
    pub fn sphere_from(v: [f64; 3]) -> Result<Point> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return domain("cannot normalise a zero vector");
        }
        Ok(Point::Sphere([v[0] / n, v[1] / n, v[2] / n]))
    }
}
