//! Riesz, stationary Riesz and Bessel covariances.
//!
//! Every evaluator works in the unit coordinates of its manifold, where the
//! metric length scale `L` is 1, and multiplies back by `L^{2α}`. The Bessel
//! weight `e^{−t}` becomes `e^{−μτ}` in unit time `τ = t/L²` with `μ = L²`.

mod disk;
mod engine;
mod existence;
mod flat;
mod hyperbolic;
mod istas;
mod series;

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use existence::{citation, classify, ExistenceStatus, ExistenceVerdict};
pub use flat::{euclidean_closed_form, riesz_constant};
pub use istas::{istas_coefficient, istas_coefficients};

pub(crate) use engine::Truncated;
use engine::{Evaluator, Generator};

use crate::error::{FieldError, Result};
use crate::manifold::{ManifoldSpec, Point};

/// Default relative tolerance of covariance evaluation.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Origin-pinned field.
    Riesz,
    StationaryRiesz,
    Bessel,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::Riesz => "riesz",
            FieldKind::StationaryRiesz => "stationary_riesz",
            FieldKind::Bessel => "bessel",
        })
    }
}

/// A field family, its order `α ∈ (0, 1)` and, for the Riesz kind, its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub alpha: f64,
    pub origin: Option<Point>,
}

impl FieldSpec {
    pub fn riesz(alpha: f64, origin: Point) -> Self {
        FieldSpec {
            kind: FieldKind::Riesz,
            alpha,
            origin: Some(origin),
        }
    }

    pub fn stationary_riesz(alpha: f64) -> Self {
        FieldSpec {
            kind: FieldKind::StationaryRiesz,
            alpha,
            origin: None,
        }
    }

    pub fn bessel(alpha: f64) -> Self {
        FieldSpec {
            kind: FieldKind::Bessel,
            alpha,
            origin: None,
        }
    }

    /// `s = d/2 + α`.
    pub fn exponent(&self, m: &ManifoldSpec) -> f64 {
        m.dim() as f64 / 2.0 + self.alpha
    }

    pub fn validate_for(&self, m: &ManifoldSpec) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(FieldError::Domain(format!("order α must lie in (0, 1), got {}", self.alpha)));
        }
        match (&self.kind, &self.origin) {
            (FieldKind::Riesz, Some(o)) => m.validate_point(o),
            (FieldKind::Riesz, None) => Err(FieldError::Domain("the Riesz field needs an origin".into())),
            (_, Some(_)) => Err(FieldError::Domain(format!("the {} field takes no origin", self.kind))),
            (_, None) => Ok(()),
        }
    }
}

/// Which evaluation route to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathChoice {
    #[default]
    Auto,
    ClosedForm,
    Spectral,
    Quadrature,
    /// Spatial integral of a closed-form time integral (hyperbolic plane).
    Nested,
}

/// The route actually taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Spectral,
    Quadrature,
    Nested,
}

impl Method {
    /// Exact up to summation round-off once the truncation is fixed.
    pub fn is_spectral_like(&self) -> bool {
        matches!(self, Method::ClosedForm | Method::Spectral)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Spectral => "spectral",
            Method::Quadrature => "quadrature",
            Method::Nested => "nested",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovarianceOptions {
    pub path: PathChoice,
    /// Relative accuracy target.
    pub tolerance: f64,
    /// Keep exactly this many nonzero eigenvalue levels (sharp truncation).
    pub truncation: Option<usize>,
}

impl Default for CovarianceOptions {
    fn default() -> Self {
        CovarianceOptions {
            path: PathChoice::Auto,
            tolerance: DEFAULT_TOLERANCE,
            truncation: None,
        }
    }
}

impl CovarianceOptions {
    pub fn path(path: PathChoice) -> Self {
        CovarianceOptions {
            path,
            ..Self::default()
        }
    }

    pub fn truncated(levels: usize) -> Self {
        CovarianceOptions {
            path: PathChoice::Spectral,
            truncation: Some(levels),
            ..Self::default()
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

/// Covariance of a field at a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub manifold: ManifoldSpec,
    pub field: FieldSpec,
    pub points: Vec<Point>,
    pub values: DMatrix<f64>,
    pub method: Method,
    pub tolerance: f64,
    /// Series length used (levels or terms), when a series was summed.
    pub truncation: Option<usize>,
    /// Largest per-entry error bound reported by the evaluator.
    pub error_bound: f64,
}

impl GramMatrix {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Gram built from a raw symmetric matrix, e.g. for tests and external input.
    pub fn from_values(manifold: ManifoldSpec, field: FieldSpec, points: Vec<Point>, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != values.ncols() || values.nrows() != points.len() {
            return Err(FieldError::Domain(format!(
                "matrix is {}×{} for {} points",
                values.nrows(),
                values.ncols(),
                points.len()
            )));
        }
        Ok(GramMatrix {
            manifold,
            field,
            points,
            values,
            method: Method::ClosedForm,
            tolerance: 0.0,
            truncation: None,
            error_bound: 0.0,
        })
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.values.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.values[(i, j)] - self.values[(j, i)]).abs());
            }
        }
        worst
    }
}

/// A validated field on a manifold with a chosen evaluation route.
pub struct CovarianceModel {
    manifold: ManifoldSpec,
    field: FieldSpec,
    options: CovarianceOptions,
    method: Method,
    eval: Evaluator,
}

impl fmt::Debug for CovarianceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CovarianceModel")
            .field("manifold", &self.manifold)
            .field("field", &self.field)
            .field("options", &self.options)
            .field("method", &self.method)
            .finish()
    }
}

fn unsupported<T>(m: &ManifoldSpec, what: &str) -> Result<T> {
    Err(FieldError::Unsupported(format!("{what} is not available on {}", m.kind_name())))
}

impl CovarianceModel {
    pub fn new(m: &ManifoldSpec, fs: &FieldSpec, options: CovarianceOptions) -> Result<Self> {
        m.validate()?;
        fs.validate_for(m)?;
        if !(options.tolerance > 0.0 && options.tolerance < 1.0) {
            return Err(FieldError::Domain(format!("tolerance must lie in (0, 1), got {}", options.tolerance)));
        }
        let verdict = classify(m, fs.kind, fs.alpha);
        if !verdict.exists() {
            return Err(FieldError::NotExists(Box::new(verdict)));
        }
        let (method, eval) = Self::route(m, fs, &options)?;
        Ok(CovarianceModel {
            manifold: *m,
            field: fs.clone(),
            options,
            method,
            eval,
        })
    }

    fn route(m: &ManifoldSpec, fs: &FieldSpec, o: &CovarianceOptions) -> Result<(Method, Evaluator)> {
        use PathChoice as P;
        let tol = o.tolerance;
        if let Some(levels) = o.truncation {
            if !m.is_spectral() {
                return unsupported(m, "an explicit eigen-sum truncation");
            }
            if !matches!(o.path, P::Auto | P::Spectral) {
                return Err(FieldError::Domain("explicit truncation requires the spectral path".into()));
            }
            let g = engine::Truncated::new(m, fs, levels)?;
            return Ok((Method::Spectral, Evaluator::Kernel(Box::new(g))));
        }
        let kernel = |g: Box<dyn Generator>, method| Ok((method, Evaluator::Kernel(g)));
        match (*m, o.path) {
            (ManifoldSpec::Circle { .. } | ManifoldSpec::Sphere2 { .. }, P::Auto | P::Spectral) => {
                kernel(Box::new(series::RoundSeries::new(m, fs, tol)?), Method::Spectral)
            }
            (ManifoldSpec::Circle { .. }, P::Quadrature)
            | (ManifoldSpec::FlatTorus { .. }, P::Auto | P::Quadrature) => {
                kernel(Box::new(flat::PeriodicQuadrature::new(m, fs, tol)?), Method::Quadrature)
            }
            (ManifoldSpec::FlatTorus { .. }, P::Spectral) => Err(FieldError::Unsupported(
                "the flat-torus eigen-sum needs an explicit truncation; use the quadrature path otherwise".into(),
            )),
            (ManifoldSpec::UnitDisk { .. }, P::Auto | P::Spectral) => {
                kernel(Box::new(disk::DiskSeries::new(m, fs, tol, false)?), Method::Spectral)
            }
            (ManifoldSpec::UnitDisk { .. }, P::Quadrature) => {
                kernel(Box::new(disk::DiskSeries::new(m, fs, tol, true)?), Method::Quadrature)
            }
            (ManifoldSpec::Euclidean { .. }, P::Auto | P::ClosedForm) => {
                kernel(Box::new(flat::EuclideanClosed::new(m, fs)?), Method::ClosedForm)
            }
            (ManifoldSpec::Euclidean { .. } | ManifoldSpec::Cylinder { .. }, P::Quadrature)
            | (ManifoldSpec::Cylinder { .. }, P::Auto) => match fs.kind {
                FieldKind::Riesz => Ok((
                    Method::Quadrature,
                    Evaluator::Combination(Box::new(flat::FlatCombination::new(m, fs, tol)?)),
                )),
                _ => kernel(Box::new(flat::FlatQuadrature::new(m, fs, tol)?), Method::Quadrature),
            },
            (ManifoldSpec::HyperbolicPlane { .. }, P::Auto | P::Nested) => {
                kernel(Box::new(hyperbolic::Nested::new(m, fs, tol)?), Method::Nested)
            }
            (ManifoldSpec::HyperbolicPlane { .. }, P::Quadrature) => {
                kernel(Box::new(hyperbolic::TimeQuadrature::new(m, fs, tol)?), Method::Quadrature)
            }
            (_, path) => unsupported(m, &format!("the {path:?} path")),
        }
    }

    pub fn manifold(&self) -> &ManifoldSpec {
        &self.manifold
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn options(&self) -> &CovarianceOptions {
        &self.options
    }

    fn check(&self, pts: &[Point]) -> Result<()> {
        pts.iter().try_for_each(|p| self.manifold.validate_point(p))
    }

    fn origin(&self) -> Option<&Point> {
        match self.field.kind {
            FieldKind::Riesz => self.field.origin.as_ref(),
            _ => None,
        }
    }

    /// Covariance of the field at `points`, with the Riesz origin row pinned to 0.
    pub fn gram(&self, points: &[Point]) -> Result<GramMatrix> {
        self.check(points)?;
        let n = points.len();
        let (values, batch) = match (&self.eval, self.origin()) {
            (Evaluator::Kernel(g), origin) => {
                let mut all: Vec<Point> = points.to_vec();
                if let Some(o) = origin {
                    all.push(o.clone());
                }
                let m = all.len();
                let mut pairs = Vec::with_capacity(m * (m + 1) / 2);
                for i in 0..m {
                    for j in i..m {
                        pairs.push((i, j));
                    }
                }
                let b = g.batch(&all, &pairs)?;
                let mut full = DMatrix::zeros(m, m);
                for (&(i, j), &v) in pairs.iter().zip(&b.values) {
                    full[(i, j)] = v;
                    full[(j, i)] = v;
                }
                let values = match origin {
                    // same operation order for (i, j) and (j, i) keeps the result exactly symmetric
                    Some(_) => DMatrix::from_fn(n, n, |i, j| {
                        let (a, b) = (i.min(j), i.max(j));
                        full[(a, b)] - full[(a, n)] - full[(b, n)] + full[(n, n)]
                    }),
                    None => full,
                };
                (values, b)
            }
            (Evaluator::Combination(c), Some(o)) => {
                let mut all: Vec<Point> = points.to_vec();
                all.push(o.clone());
                let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
                for i in 0..n {
                    for j in i..n {
                        pairs.push((i, j));
                    }
                }
                let combos: Vec<_> = pairs
                    .iter()
                    .map(|&(i, j)| vec![(1.0, i, j), (-1.0, i, n), (-1.0, j, n), (1.0, n, n)])
                    .collect();
                let b = c.combine(&all, &combos)?;
                let mut values = DMatrix::zeros(n, n);
                for (&(i, j), &v) in pairs.iter().zip(&b.values) {
                    values[(i, j)] = v;
                    values[(j, i)] = v;
                }
                (values, b)
            }
            (Evaluator::Combination(_), None) => {
                return Err(FieldError::Inconsistency("combination evaluator without an origin".into()))
            }
        };
        let mut values = values;
        if let Some(o) = self.origin() {
            for (i, p) in points.iter().enumerate() {
                if p == o {
                    values.row_mut(i).fill(0.0);
                    values.column_mut(i).fill(0.0);
                }
            }
        }
        Ok(GramMatrix {
            manifold: self.manifold,
            field: self.field.clone(),
            points: points.to_vec(),
            values,
            method: self.method,
            tolerance: self.options.tolerance,
            truncation: batch.terms,
            error_bound: batch.bound,
        })
    }

    pub fn covariance(&self, x: &Point, y: &Point) -> Result<f64> {
        let g = self.gram(&[x.clone(), y.clone()])?;
        Ok(g.values[(0, 1)])
    }

    pub fn variance(&self, x: &Point) -> Result<f64> {
        let g = self.gram(std::slice::from_ref(x))?;
        Ok(g.values[(0, 0)])
    }

    /// `E|X_x − X_y|²` for one pair.
    pub fn increment_variance(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(self.increment_variances(&[(x.clone(), y.clone())])?[0])
    }

    /// `E|X_x − X_y|²` for many pairs, sharing setup across the batch.
    ///
    /// The origin never enters: it cancels from the four-term combination.
    pub fn increment_variances(&self, pairs: &[(Point, Point)]) -> Result<Vec<f64>> {
        let mut uniq: Vec<Point> = Vec::new();
        let mut index = |p: &Point| -> usize {
            match uniq.iter().position(|q| q == p) {
                Some(i) => i,
                None => {
                    uniq.push(p.clone());
                    uniq.len() - 1
                }
            }
        };
        let idx: Vec<(usize, usize)> = pairs.iter().map(|(a, b)| (index(a), index(b))).collect();
        self.check(&uniq)?;
        match &self.eval {
            Evaluator::Kernel(g) => {
                let mut want: Vec<(usize, usize)> = (0..uniq.len()).map(|i| (i, i)).collect();
                want.extend(idx.iter().map(|&(a, b)| (a.min(b), a.max(b))));
                let b = g.batch(&uniq, &want)?;
                let u = uniq.len();
                Ok(idx
                    .iter()
                    .enumerate()
                    .map(|(k, &(a, c))| {
                        if a == c {
                            0.0
                        } else {
                            (b.values[a] + b.values[c] - 2.0 * b.values[u + k]).max(0.0)
                        }
                    })
                    .collect())
            }
            Evaluator::Combination(c) => {
                let combos: Vec<_> = idx.iter().map(|&(a, b)| vec![(1.0, a, a), (1.0, b, b), (-2.0, a, b)]).collect();
                let b = c.combine(&uniq, &combos)?;
                Ok(idx
                    .iter()
                    .zip(b.values)
                    .map(|(&(a, c), v)| if a == c { 0.0 } else { v.max(0.0) })
                    .collect())
            }
        }
    }
}

fn model(m: &ManifoldSpec, fs: &FieldSpec, kind: FieldKind) -> Result<CovarianceModel> {
    if fs.kind != kind {
        return Err(FieldError::Domain(format!("expected a {kind} field spec, got {}", fs.kind)));
    }
    CovarianceModel::new(m, fs, CovarianceOptions::default())
}

/// Origin-pinned Riesz covariance at default options.
pub fn riesz_covariance(m: &ManifoldSpec, fs: &FieldSpec, x: &Point, y: &Point) -> Result<f64> {
    model(m, fs, FieldKind::Riesz)?.covariance(x, y)
}

pub fn stationary_riesz_covariance(m: &ManifoldSpec, fs: &FieldSpec, x: &Point, y: &Point) -> Result<f64> {
    model(m, fs, FieldKind::StationaryRiesz)?.covariance(x, y)
}

pub fn bessel_covariance(m: &ManifoldSpec, fs: &FieldSpec, x: &Point, y: &Point) -> Result<f64> {
    model(m, fs, FieldKind::Bessel)?.covariance(x, y)
}

pub fn increment_variance(m: &ManifoldSpec, fs: &FieldSpec, x: &Point, y: &Point) -> Result<f64> {
    CovarianceModel::new(m, fs, CovarianceOptions::default())?.increment_variance(x, y)
}

pub fn gram(m: &ManifoldSpec, fs: &FieldSpec, points: &[Point]) -> Result<GramMatrix> {
    CovarianceModel::new(m, fs, CovarianceOptions::default())?.gram(points)
}

pub fn existence_check(m: &ManifoldSpec, fs: &FieldSpec) -> ExistenceVerdict {
    classify(m, fs.kind, fs.alpha)
}
