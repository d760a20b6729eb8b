//! Positive definiteness, metric scaling, isometry invariance and the
//! existence table.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::report::{digest, PropertyReport};
use crate::covariance::{classify, CovarianceModel, CovarianceOptions, ExistenceStatus, FieldKind, FieldSpec, GramMatrix};
use crate::error::{FieldError, Result};
use crate::manifold::{Compactness, Isometry, ManifoldSpec, Point};

/// Entries below this fraction of the largest entry are compared absolutely.
const RELATIVE_FLOOR: f64 = 1e-8;

pub const SELF_SIMILARITY_SPECTRAL: f64 = 1e-10;
pub const SELF_SIMILARITY_QUADRATURE: f64 = 1e-6;
pub const STATIONARITY_SPECTRAL: f64 = 1e-8;
pub const STATIONARITY_QUADRATURE: f64 = 1e-5;
/// Largest distance distortion tolerated from a claimed isometry.
const ISOMETRY_SLACK: f64 = 1e-9;

/// Smallest eigenvalue relative to the largest; passes when it is at least `−tol`.
pub fn psd_check(g: &GramMatrix, tol: f64) -> Result<PropertyReport> {
    if g.max_asymmetry() > 0.0 {
        return Err(FieldError::Precondition("Gram matrix is not symmetric".into()));
    }
    let (lo, hi) = extreme_eigenvalues(&g.values);
    let scale = hi.abs().max(f64::MIN_POSITIVE);
    let deviation = (-lo / scale).max(0.0);
    Ok(PropertyReport::new(
        "psd",
        lo >= -tol * hi.max(0.0),
        deviation,
        tol,
        "symmetric-positive-definite-covariance",
        digest(&(g.manifold, &g.field, &g.points, g.method, g.tolerance)),
    )
    .with_detail("min_eigenvalue", lo)
    .with_detail("max_eigenvalue", hi))
}

pub(crate) fn extreme_eigenvalues(a: &DMatrix<f64>) -> (f64, f64) {
    if a.is_empty() {
        return (0.0, 0.0);
    }
    let e = SymmetricEigen::new(a.clone()).eigenvalues;
    (e.min(), e.max())
}

/// `max |a − b| / max(|b|, floor)` with the floor a fraction of `max |b|`.
pub fn relative_deviation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let top = b.amax();
    let floor = (RELATIVE_FLOOR * top).max(f64::MIN_POSITIVE);
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs() / y.abs().max(floor)).fold(0.0, f64::max)
}

/// `c^{2α}` times the Gram on `m` against the Gram on `(M, c² g)`.
pub fn self_similarity_check(
    m: &ManifoldSpec,
    fs: &FieldSpec,
    c: f64,
    points: &[Point],
    options: CovarianceOptions,
) -> Result<PropertyReport> {
    let scaled = m.scale_metric(c)?;
    let base = CovarianceModel::new(m, fs, options)?;
    let other = CovarianceModel::new(&scaled, fs, options)?;
    let a = base.gram(points)?.values * c.powf(2.0 * fs.alpha);
    let b = other.gram(points)?.values;
    let dev = relative_deviation(&a, &b);
    let threshold = if base.method().is_spectral_like() {
        SELF_SIMILARITY_SPECTRAL
    } else {
        SELF_SIMILARITY_QUADRATURE
    };
    Ok(PropertyReport::new(
        "self_similarity",
        dev <= threshold,
        dev,
        threshold,
        "metric-scaling-self-similarity",
        digest(&(m, fs, c, points, options)),
    ))
}

fn check_isometry(m: &ManifoldSpec, iso: &Isometry, points: &[Point], moved: &[Point]) -> Result<()> {
    for i in 0..points.len() {
        for j in i..points.len() {
            let d = m.geodesic_distance(&points[i], &points[j])?;
            let e = m.geodesic_distance(&moved[i], &moved[j])?;
            if (d - e).abs() > ISOMETRY_SLACK * d.max(1.0) {
                return Err(FieldError::Precondition(format!(
                    "{iso:?} moves the distance {d} between points {i} and {j} to {e}"
                )));
            }
        }
    }
    Ok(())
}

fn increment_matrix(model: &CovarianceModel, points: &[Point]) -> Result<DMatrix<f64>> {
    let n = points.len();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((points[i].clone(), points[j].clone()));
        }
    }
    let v = model.increment_variances(&pairs)?;
    let mut out = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            out[(i, j)] = v[k];
            out[(j, i)] = v[k];
            k += 1;
        }
    }
    Ok(out)
}

/// Invariance under `iso`: the full Gram for stationary and Bessel fields,
/// the increment variances for the origin-pinned field.
pub fn stationarity_check(
    m: &ManifoldSpec,
    fs: &FieldSpec,
    iso: &Isometry,
    points: &[Point],
    options: CovarianceOptions,
) -> Result<PropertyReport> {
    let moved: Vec<Point> = points.iter().map(|p| iso.apply(m, p)).collect::<Result<_>>()?;
    check_isometry(m, iso, points, &moved)?;
    let model = CovarianceModel::new(m, fs, options)?;
    let threshold = if model.method().is_spectral_like() {
        STATIONARITY_SPECTRAL
    } else {
        STATIONARITY_QUADRATURE
    };
    let inputs = digest(&(m, fs, iso, points, options));
    let gram_dev = relative_deviation(&model.gram(&moved)?.values, &model.gram(points)?.values);
    let report = match fs.kind {
        FieldKind::Riesz => {
            let dev = relative_deviation(&increment_matrix(&model, &moved)?, &increment_matrix(&model, points)?);
            PropertyReport::new("stationarity", dev <= threshold, dev, threshold, "stationary-increments", inputs)
                .with_detail("covariance_deviation", gram_dev)
        }
        _ => PropertyReport::new("stationarity", gram_dev <= threshold, gram_dev, threshold, "stationary-field", inputs),
    };
    Ok(report)
}

/// Expected verdict for the supported kinds, written out case by case.
pub fn expected_existence(m: &ManifoldSpec, kind: FieldKind, alpha: f64) -> bool {
    if !(alpha > 0.0 && alpha < 1.0) {
        return false;
    }
    match (kind, m) {
        (FieldKind::Bessel, _) => true,
        (_, ManifoldSpec::UnitDisk { .. } | ManifoldSpec::HyperbolicPlane { .. }) => true,
        (FieldKind::Riesz, ManifoldSpec::Cylinder { .. }) => alpha < 0.5,
        (FieldKind::Riesz, _) => true,
        (FieldKind::StationaryRiesz, _) => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceRow {
    pub manifold: String,
    pub compactness: Compactness,
    pub field: FieldKind,
    pub alpha: f64,
    pub expected: bool,
    pub status: ExistenceStatus,
    pub citation: String,
}

impl ExistenceRow {
    pub fn matches(&self) -> bool {
        (self.status == ExistenceStatus::Exists) == self.expected
    }
}

/// One instance of every supported kind, with non-unit metric parameters.
pub fn reference_manifolds() -> Vec<ManifoldSpec> {
    let mut out: Vec<ManifoldSpec> = (1..=3).map(|d| ManifoldSpec::euclidean(d).expect("valid")).collect();
    out.extend([
        ManifoldSpec::circle(1.0).expect("valid"),
        ManifoldSpec::circle(2.5).expect("valid"),
        ManifoldSpec::sphere2(1.0).expect("valid"),
        ManifoldSpec::sphere2(0.3).expect("valid"),
        ManifoldSpec::flat_torus(1.0, 1.7).expect("valid"),
        ManifoldSpec::cylinder(1.0).expect("valid"),
        ManifoldSpec::cylinder(3.0).expect("valid"),
        ManifoldSpec::unit_disk(),
        ManifoldSpec::hyperbolic_plane(),
        ManifoldSpec::HyperbolicPlane { scale: 2.0 },
    ]);
    out
}

/// Classifier output against [`expected_existence`] over manifolds × kinds × `alphas`.
pub fn existence_table(manifolds: &[ManifoldSpec], alphas: &[f64]) -> Vec<ExistenceRow> {
    let mut rows = Vec::new();
    for m in manifolds {
        for kind in [FieldKind::Riesz, FieldKind::StationaryRiesz, FieldKind::Bessel] {
            for &alpha in alphas {
                let v = classify(m, kind, alpha);
                rows.push(ExistenceRow {
                    manifold: m.kind_name().to_string(),
                    compactness: m.compactness(),
                    field: kind,
                    alpha,
                    expected: expected_existence(m, kind, alpha),
                    status: v.status,
                    citation: v.citation,
                });
            }
        }
    }
    rows
}

pub fn existence_report(manifolds: &[ManifoldSpec], alphas: &[f64]) -> PropertyReport {
    let rows = existence_table(manifolds, alphas);
    let bad = rows.iter().filter(|r| !r.matches()).count();
    PropertyReport::new(
        "existence",
        bad == 0,
        bad as f64,
        0.0,
        "existence-classification",
        digest(&(manifolds, alphas)),
    )
    .with_detail("rows", rows.len() as f64)
}
