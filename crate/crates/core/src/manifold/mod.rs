//! Supported manifolds, chart points, geodesic distances and metric scaling.

mod isometry;
mod point;
mod sample;

pub use isometry::Isometry;
pub use point::Point;
pub use sample::{pairs_at_distance, sample_points, PointSampler};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Result};

pub(crate) const TWO_PI: f64 = 2.0 * PI;

fn unit() -> f64 {
    1.0
}

/// A manifold together with its metric parameters.
///
/// Kinds without an intrinsic radius carry a `scale` factor `c` so that the
/// metric is `c² g` for the standard model metric `g`. Points are always
/// given in the standard chart; only distances, volumes and spectra change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    Euclidean {
        dim: usize,
        #[serde(default = "unit")]
        scale: f64,
    },
    Circle {
        radius: f64,
    },
    Sphere2 {
        radius: f64,
    },
    FlatTorus {
        r1: f64,
        r2: f64,
    },
    /// `S¹(radius) × ℝ`, the line factor scaled by `axial_scale`.
    Cylinder {
        radius: f64,
        #[serde(default = "unit")]
        axial_scale: f64,
    },
    /// Flat disk of radius `scale` with the Dirichlet Laplacian.
    UnitDisk {
        #[serde(default = "unit")]
        scale: f64,
    },
    /// Upper half-plane with metric `scale² (dx² + dy²) / y²`.
    HyperbolicPlane {
        #[serde(default = "unit")]
        scale: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compactness {
    Compact,
    RegularDomain,
    NonCompact,
}

/// Large-time heat kernel behaviour used by the existence rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelDecay {
    /// `H_t → 1/Vol(M)` as `t → ∞`.
    Equilibrium,
    /// `H_t(x,x) ≤ C t^{-(d/2 + shift)}` for `t ≥ 1`.
    Power { shift: f64 },
    /// `H_t ≤ C e^{-rate t}` for `t ≥ 1`.
    Exponential { rate: f64 },
}

/// Declarative curvature and volume data for a manifold kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryInfo {
    pub dim: f64,
    pub ricci_lower_bound: f64,
    pub finite_volume: bool,
    /// Exponent `g` with `V_x(r) ≤ C r^g` for large `r`, when polynomial.
    pub volume_growth: Option<f64>,
    pub decay: KernelDecay,
    /// Bottom of the spectrum over regular subdomains, when known.
    pub spectral_floor: Option<f64>,
    /// Smallest `α` at which an explicit computation shows the Riesz
    /// integral diverging, when one is known for this kind.
    pub riesz_obstruction: Option<f64>,
}

impl ManifoldSpec {
    pub fn euclidean(dim: usize) -> Result<Self> {
        let m = ManifoldSpec::Euclidean { dim, scale: 1.0 };
        m.validate()?;
        Ok(m)
    }

    pub fn circle(radius: f64) -> Result<Self> {
        let m = ManifoldSpec::Circle { radius };
        m.validate()?;
        Ok(m)
    }

    pub fn sphere2(radius: f64) -> Result<Self> {
        let m = ManifoldSpec::Sphere2 { radius };
        m.validate()?;
        Ok(m)
    }

    pub fn flat_torus(r1: f64, r2: f64) -> Result<Self> {
        let m = ManifoldSpec::FlatTorus { r1, r2 };
        m.validate()?;
        Ok(m)
    }

    pub fn cylinder(radius: f64) -> Result<Self> {
        let m = ManifoldSpec::Cylinder {
            radius,
            axial_scale: 1.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn unit_disk() -> Self {
        ManifoldSpec::UnitDisk { scale: 1.0 }
    }

    pub fn hyperbolic_plane() -> Self {
        ManifoldSpec::HyperbolicPlane { scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                domain(format!("{name} must be finite and positive, got {v}"))
            }
        };
        match *self {
            ManifoldSpec::Euclidean { dim, scale } => {
                if dim == 0 {
                    return domain("euclidean dimension must be at least 1");
                }
                positive("scale", scale)
            }
            ManifoldSpec::Circle { radius } | ManifoldSpec::Sphere2 { radius } => {
                positive("radius", radius)
            }
            ManifoldSpec::FlatTorus { r1, r2 } => {
                positive("r1", r1)?;
                positive("r2", r2)
            }
            ManifoldSpec::Cylinder {
                radius,
                axial_scale,
            } => {
                positive("radius", radius)?;
                positive("axial_scale", axial_scale)
            }
            ManifoldSpec::UnitDisk { scale } | ManifoldSpec::HyperbolicPlane { scale } => {
                positive("scale", scale)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ManifoldSpec::Euclidean { .. } => "euclidean",
            ManifoldSpec::Circle { .. } => "circle",
            ManifoldSpec::Sphere2 { .. } => "sphere2",
            ManifoldSpec::FlatTorus { .. } => "flat_torus",
            ManifoldSpec::Cylinder { .. } => "cylinder",
            ManifoldSpec::UnitDisk { .. } => "unit_disk",
            ManifoldSpec::HyperbolicPlane { .. } => "hyperbolic_plane",
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            ManifoldSpec::Euclidean { dim, .. } => dim,
            ManifoldSpec::Circle { .. } => 1,
            _ => 2,
        }
    }

    pub fn compactness(&self) -> Compactness {
        match self {
            ManifoldSpec::Circle { .. }
            | ManifoldSpec::Sphere2 { .. }
            | ManifoldSpec::FlatTorus { .. } => Compactness::Compact,
            ManifoldSpec::UnitDisk { .. } => Compactness::RegularDomain,
            _ => Compactness::NonCompact,
        }
    }

    pub fn is_spectral(&self) -> bool {
        self.compactness() != Compactness::NonCompact
    }

    /// Riemannian volume, when finite.
    pub fn volume(&self) -> Option<f64> {
        match *self {
            ManifoldSpec::Circle { radius } => Some(TWO_PI * radius),
            ManifoldSpec::Sphere2 { radius } => Some(4.0 * PI * radius * radius),
            ManifoldSpec::FlatTorus { r1, r2 } => Some(TWO_PI * TWO_PI * r1 * r2),
            ManifoldSpec::UnitDisk { scale } => Some(PI * scale * scale),
            _ => None,
        }
    }

    pub fn geometry(&self) -> GeometryInfo {
        let d = self.dim() as f64;
        match *self {
            ManifoldSpec::Euclidean { .. } => GeometryInfo {
                dim: d,
                ricci_lower_bound: 0.0,
                finite_volume: false,
                volume_growth: Some(d),
                decay: KernelDecay::Power { shift: 0.0 },
                spectral_floor: Some(0.0),
                riesz_obstruction: None,
            },
            ManifoldSpec::Circle { .. } | ManifoldSpec::FlatTorus { .. } => GeometryInfo {
                dim: d,
                ricci_lower_bound: 0.0,
                finite_volume: true,
                volume_growth: Some(0.0),
                decay: KernelDecay::Equilibrium,
                spectral_floor: None,
                riesz_obstruction: None,
            },
            ManifoldSpec::Sphere2 { radius } => GeometryInfo {
                dim: d,
                ricci_lower_bound: 1.0 / (radius * radius),
                finite_volume: true,
                volume_growth: Some(0.0),
                decay: KernelDecay::Equilibrium,
                spectral_floor: None,
                riesz_obstruction: None,
            },
            ManifoldSpec::Cylinder { .. } => GeometryInfo {
                dim: d,
                ricci_lower_bound: 0.0,
                finite_volume: false,
                volume_growth: Some(1.0),
                decay: KernelDecay::Power { shift: -0.5 },
                spectral_floor: Some(0.0),
                riesz_obstruction: Some(0.5),
            },
            ManifoldSpec::UnitDisk { scale } => {
                let j = crate::heat_kernel::bessel_zeros(0, 1)[0];
                GeometryInfo {
                    dim: d,
                    ricci_lower_bound: 0.0,
                    finite_volume: true,
                    volume_growth: Some(0.0),
                    decay: KernelDecay::Exponential {
                        rate: j * j / (scale * scale),
                    },
                    spectral_floor: Some(j * j / (scale * scale)),
                    riesz_obstruction: None,
                }
            }
            ManifoldSpec::HyperbolicPlane { scale } => GeometryInfo {
                dim: d,
                ricci_lower_bound: -1.0 / (scale * scale),
                finite_volume: false,
                volume_growth: None,
                decay: KernelDecay::Exponential {
                    rate: 0.25 / (scale * scale),
                },
                spectral_floor: Some(0.25 / (scale * scale)),
                riesz_obstruction: None,
            },
        }
    }

    /// Returns the manifold `(M, c² g)`.
    pub fn scale_metric(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return domain(format!("metric scale must be positive, got {c}"));
        }
        Ok(match *self {
            ManifoldSpec::Euclidean { dim, scale } => ManifoldSpec::Euclidean {
                dim,
                scale: scale * c,
            },
            ManifoldSpec::Circle { radius } => ManifoldSpec::Circle { radius: radius * c },
            ManifoldSpec::Sphere2 { radius } => ManifoldSpec::Sphere2 { radius: radius * c },
            ManifoldSpec::FlatTorus { r1, r2 } => ManifoldSpec::FlatTorus {
                r1: r1 * c,
                r2: r2 * c,
            },
            ManifoldSpec::Cylinder {
                radius,
                axial_scale,
            } => ManifoldSpec::Cylinder {
                radius: radius * c,
                axial_scale: axial_scale * c,
            },
            ManifoldSpec::UnitDisk { scale } => ManifoldSpec::UnitDisk { scale: scale * c },
            ManifoldSpec::HyperbolicPlane { scale } => {
                ManifoldSpec::HyperbolicPlane { scale: scale * c }
            }
        })
    }

    /// Overall length scale: radius for round kinds, `scale` otherwise.
    pub fn length_scale(&self) -> f64 {
        match *self {
            ManifoldSpec::Euclidean { scale, .. }
            | ManifoldSpec::UnitDisk { scale }
            | ManifoldSpec::HyperbolicPlane { scale } => scale,
            ManifoldSpec::Circle { radius }
            | ManifoldSpec::Sphere2 { radius }
            | ManifoldSpec::Cylinder { radius, .. } => radius,
            ManifoldSpec::FlatTorus { r1, r2 } => r1.min(r2),
        }
    }

    /// Distance below which the small-time comparison and Hölder fits apply.
    ///
    /// Round kinds use a quarter of the shortest closed geodesic. The disk
    /// uses half its radius; flat and hyperbolic planes have no cut locus.
    pub fn injectivity_guard(&self) -> f64 {
        match *self {
            ManifoldSpec::Euclidean { .. } | ManifoldSpec::HyperbolicPlane { .. } => {
                f64::INFINITY
            }
            ManifoldSpec::Circle { radius }
            | ManifoldSpec::Sphere2 { radius }
            | ManifoldSpec::Cylinder { radius, .. } => PI * radius / 2.0,
            ManifoldSpec::FlatTorus { r1, r2 } => PI * r1.min(r2) / 2.0,
            ManifoldSpec::UnitDisk { scale } => 0.5 * scale,
        }
    }

    pub fn validate_point(&self, p: &Point) -> Result<()> {
        p.validate_for(self)
    }

    pub fn geodesic_distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.validate_point(x)?;
        self.validate_point(y)?;
        Ok(self.distance_unchecked(x, y))
    }

    /// Distance for points already known to be valid for this manifold.
    pub(crate) fn distance_unchecked(&self, x: &Point, y: &Point) -> f64 {
        match (*self, x, y) {
            (ManifoldSpec::Euclidean { scale, .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
                scale * euclid(a, b)
            }
            (ManifoldSpec::Circle { radius }, Point::Circle(a), Point::Circle(b)) => {
                radius * angle_gap(*a, *b)
            }
            (ManifoldSpec::Sphere2 { radius }, Point::Sphere(a), Point::Sphere(b)) => {
                radius * sphere_angle(a, b)
            }
            (ManifoldSpec::FlatTorus { r1, r2 }, Point::Torus(a), Point::Torus(b)) => {
                (r1 * angle_gap(a[0], b[0])).hypot(r2 * angle_gap(a[1], b[1]))
            }
            (
                ManifoldSpec::Cylinder {
                    radius,
                    axial_scale,
                },
                Point::Cylinder {
                    angle: a,
                    height: ha,
                },
                Point::Cylinder {
                    angle: b,
                    height: hb,
                },
            ) => (radius * angle_gap(*a, *b)).hypot(axial_scale * (ha - hb)),
            (
                ManifoldSpec::UnitDisk { scale },
                Point::Disk {
                    radius: ra,
                    angle: ta,
                },
                Point::Disk {
                    radius: rb,
                    angle: tb,
                },
            ) => {
                let (xa, ya) = (ra * ta.cos(), ra * ta.sin());
                let (xb, yb) = (rb * tb.cos(), rb * tb.sin());
                scale * (xa - xb).hypot(ya - yb)
            }
            (
                ManifoldSpec::HyperbolicPlane { scale },
                Point::HalfPlane { x: xa, y: ya },
                Point::HalfPlane { x: xb, y: yb },
            ) => {
                let q = ((xa - xb).powi(2) + (ya - yb).powi(2)) / (2.0 * ya * yb);
                scale * acosh_1p(q)
            }
            _ => f64::NAN,
        }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// `arccosh(1 + q)` without cancellation for small `q`.
pub(crate) fn acosh_1p(q: f64) -> f64 {
    (q + (q * (q + 2.0)).sqrt()).ln_1p()
}

/// Angle folded into `[0, 2π)`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TWO_PI);
    if w >= TWO_PI {
        0.0
    } else {
        w
    }
}

/// Shorter arc between two angles, in `[0, π]`.
pub(crate) fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(TWO_PI);
    d.min(TWO_PI - d).max(0.0)
}

/// Angle between unit vectors via `atan2(|a×b|, a·b)`.
pub(crate) fn sphere_angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let s = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    s.atan2(c)
}
