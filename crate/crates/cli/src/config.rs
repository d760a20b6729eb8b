//! Run configuration, read from JSON.
//!
//! ```json
//! {
//!   "manifold": { "kind": "sphere2", "radius": 1.0 },
//!   "field": { "kind": "riesz", "alpha": 0.5, "origin": [0.0, 0.0, 1.0] },
//!   "points": { "sample": { "n": 20, "seed": 1 } },
//!   "covariance": { "path": "auto", "tolerance": 1e-8 },
//!   "sample": { "replicates": 1000, "levels": 100, "seed": 7, "method": "kl" },
//!   "variogram": { "bins": 12, "range": [0.01, 0.5], "mode": "analytic" },
//!   "verify": { "properties": ["psd", "self_similarity"] },
//!   "kernel_probe": { "times": [0.01, 0.1, 1.0] },
//!   "output": { "prefix": "run" }
//! }
//! ```
//!
//! Points are either `{"explicit": [[...], ...]}` in chart coordinates or
//! `{"sample": {"n", "seed", "stratified"}}`. Every block rejects unknown keys.

use fieldgen_core::covariance::CovarianceOptions;
use fieldgen_core::manifold::PointSampler;
use fieldgen_core::{FieldKind, FieldSpec, ManifoldSpec, Point};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifold: ManifoldSpec,
    pub field: FieldConfig,
    pub points: PointsConfig,
    #[serde(default)]
    pub covariance: CovarianceOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variogram: Option<VariogramConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_probe: Option<KernelProbeConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub kind: FieldKind,
    pub alpha: f64,
    /// Chart coordinates of the Riesz origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointsConfig {
    Explicit(Vec<Vec<f64>>),
    Sample(SamplerConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub stratified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMethodConfig {
    #[default]
    Kl,
    Cholesky,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    /// Number of replicates `N`.
    pub replicates: usize,
    /// Eigenvalue levels `K` kept by the KL sampler.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub method: SampleMethodConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariogramSource {
    /// Exact increment variances at sampled pairs.
    #[default]
    Analytic,
    /// Bin averages of a sampled ensemble (needs a `sample` block).
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariogramConfig {
    pub bins: usize,
    /// Distance range `[lo, hi]`, split into log-spaced bins.
    pub range: [f64; 2],
    #[serde(default)]
    pub mode: VariogramSource,
    /// Pairs drawn per bin in analytic mode.
    #[serde(default = "default_pairs_per_bin")]
    pub pairs_per_bin: usize,
    /// Distance range of the log-log fit; defaults to `range`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_range: Option<[f64; 2]>,
    /// Seed of the analytic pair draws.
    #[serde(default)]
    pub seed: u64,
}

fn default_pairs_per_bin() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Psd,
    SelfSimilarity,
    Stationarity,
    Nonuniqueness,
    Existence,
}

impl Property {
    pub fn default_suite() -> Vec<Property> {
        vec![Property::Existence, Property::Psd, Property::SelfSimilarity, Property::Stationarity]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "Property::default_suite")]
    pub properties: Vec<Property>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Metric scale factors for the self-similarity check.
    #[serde(default = "default_scales")]
    pub scales: Vec<f64>,
    /// Seed of the random isometry for the stationarity check.
    #[serde(default)]
    pub isometry_seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            properties: Property::default_suite(),
            tolerances: Tolerances::default(),
            scales: default_scales(),
            isometry_seed: 0,
        }
    }
}

fn default_scales() -> Vec<f64> {
    vec![0.5, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed `−λ_min / λ_max`.
    pub psd: f64,
    /// Allowed disagreement between the two gap routes.
    pub nonuniqueness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            psd: 1e-8,
            nonuniqueness: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelProbeConfig {
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// File name stem; outputs are `<prefix>_gram.csv` and so on.
    pub prefix: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { prefix: "fieldgen".into() }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn field_spec(&self) -> Result<FieldSpec, CliError> {
        let f = &self.field;
        match (f.kind, &f.origin) {
            (FieldKind::Riesz, Some(o)) => Ok(FieldSpec::riesz(f.alpha, Point::from_coords(&self.manifold, o)?)),
            (FieldKind::Riesz, None) => Err(CliError::Config("riesz field needs an origin".into())),
            (_, Some(_)) => Err(CliError::Config(format!("{} field takes no origin", f.kind))),
            (FieldKind::StationaryRiesz, None) => Ok(FieldSpec::stationary_riesz(f.alpha)),
            (FieldKind::Bessel, None) => Ok(FieldSpec::bessel(f.alpha)),
        }
    }

    /// The point set, with `seed` replacing the sampler seed when given.
    pub fn point_set(&self, seed: Option<u64>) -> Result<Vec<Point>, CliError> {
        let pts = match &self.points {
            PointsConfig::Explicit(list) => list
                .iter()
                .map(|c| Point::from_coords(&self.manifold, c))
                .collect::<Result<Vec<_>, _>>()?,
            PointsConfig::Sample(s) => {
                let seed = seed.unwrap_or(s.seed);
                let sampler = if s.stratified { PointSampler::stratified(seed) } else { PointSampler::new(seed) };
                sampler.sample(&self.manifold, s.n)?
            }
        };
        if pts.is_empty() {
            return Err(CliError::Config("point list is empty".into()));
        }
        Ok(pts)
    }

    pub fn apply_overrides(&mut self, seed: Option<u64>, tolerance: Option<f64>) {
        if let Some(t) = tolerance {
            self.covariance.tolerance = t;
        }
        if let Some(seed) = seed {
            if let Some(s) = self.sample.as_mut() {
                s.seed = seed;
            }
            if let Some(v) = self.variogram.as_mut() {
                v.seed = seed;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = r#"{
        "manifold": {"kind": "sphere2", "radius": 1.0},
        "field": {"kind": "riesz", "alpha": 0.5, "origin": [0, 0, 1]},
        "points": {"sample": {"n": 4, "seed": 3}},
        "sample": {"replicates": 10, "levels": 5, "seed": 1},
        "verify": {}
    }"#;

    #[test]
    fn round_trip() {
        let c = RunConfig::parse(SPHERE).unwrap();
        let again = RunConfig::parse(&c.to_json()).unwrap();
        assert_eq!(c, again);
        assert_eq!(again.to_json(), c.to_json());
        assert_eq!(c.verify.unwrap().properties, Property::default_suite());
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = SPHERE.replace("\"seed\": 3", "\"seed\": 3, \"colour\": 1");
        assert!(matches!(RunConfig::parse(&bad), Err(CliError::Config(_))));
        let bad = SPHERE.replace("\"radius\": 1.0", "\"radius\": 1.0, \"r\": 2");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn origin_rules() {
        let c = RunConfig::parse(&SPHERE.replace("\"riesz\"", "\"bessel\"")).unwrap();
        assert!(c.field_spec().is_err());
        let c = RunConfig::parse(&SPHERE.replace(", \"origin\": [0, 0, 1]", "")).unwrap();
        assert!(c.field_spec().is_err());
    }

    #[test]
    fn seed_override_moves_sampled_points() {
        let c = RunConfig::parse(SPHERE).unwrap();
        assert_eq!(c.point_set(None).unwrap(), c.point_set(Some(3)).unwrap());
        assert_ne!(c.point_set(None).unwrap(), c.point_set(Some(4)).unwrap());
    }
}
