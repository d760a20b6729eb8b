use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fieldgen_core::analysis::{
    digest, existence_table, expected_existence, holder_fit, log_edges, nonuniqueness_gap, psd_check, self_similarity_check,
    stationarity_check, variogram_at_distances, variogram_empirical, PropertyReport,
};
use fieldgen_core::covariance::classify;
use fieldgen_core::export::{ensemble_csv, format_float, gram_csv, report_json, variogram_csv, write_atomic};
use fieldgen_core::heat_kernel::{heat_kernel_tol, small_time_ratio};
use fieldgen_core::sampling::JitterPolicy;
use fieldgen_core::{
    existence_check, sample_cholesky, sample_kl, CovarianceModel, FieldSpec, Isometry, ManifoldSpec, Point,
    SampleEnsemble,
};
use serde::Serialize;

use crate::config::{Property, RunConfig, SampleMethodConfig, VariogramSource};
use crate::error::CliError;

/// A parsed configuration plus the command-line overrides.
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

impl Context {
    fn path(&self, suffix: &str) -> PathBuf {
        self.out_dir.join(format!("{}_{suffix}", self.config.output.prefix))
    }

    fn write(&self, suffix: &str, contents: &str) -> Result<PathBuf, CliError> {
        let p = self.path(suffix);
        write_atomic(&p, contents.as_bytes()).map_err(|e| CliError::io(&p, e))?;
        Ok(p)
    }

    /// Field spec and points, refused unless the field exists.
    fn validated(&self) -> Result<(FieldSpec, Vec<Point>), CliError> {
        let fs = self.config.field_spec()?;
        let verdict = existence_check(&self.config.manifold, &fs);
        if !verdict.exists() {
            return Err(fieldgen_core::FieldError::NotExists(Box::new(verdict)).into());
        }
        let pts = self.config.point_set(self.seed)?;
        Ok((fs, pts))
    }

    fn model(&self, fs: &FieldSpec) -> Result<CovarianceModel, CliError> {
        Ok(CovarianceModel::new(&self.config.manifold, fs, self.config.covariance)?)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct GramMeta<'a> {
    manifold: &'a ManifoldSpec,
    field: &'a crate::config::FieldConfig,
    points: usize,
    method: String,
    tolerance: f64,
    truncation: Option<usize>,
    error_bound: f64,
    max_asymmetry: f64,
}

pub fn gram(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let (fs, pts) = ctx.validated()?;
    let g = ctx.model(&fs)?.gram(&pts)?;
    let meta = GramMeta {
        manifold: &ctx.config.manifold,
        field: &ctx.config.field,
        points: g.len(),
        method: g.method.to_string(),
        tolerance: g.tolerance,
        truncation: g.truncation,
        error_bound: g.error_bound,
        max_asymmetry: g.max_asymmetry(),
    };
    Ok(vec![ctx.write("gram.csv", &gram_csv(&g))?, ctx.write("gram.json", &to_json(&meta))?])
}

fn ensemble(ctx: &Context, fs: &FieldSpec, pts: &[Point]) -> Result<SampleEnsemble, CliError> {
    let s = ctx
        .config
        .sample
        .as_ref()
        .ok_or_else(|| CliError::Config("a \"sample\" block is required".into()))?;
    let seed = ctx.seed.unwrap_or(s.seed);
    Ok(match s.method {
        SampleMethodConfig::Kl => {
            let levels = s
                .levels
                .ok_or_else(|| CliError::Config("KL sampling needs \"levels\"".into()))?;
            sample_kl(&ctx.config.manifold, fs, pts, s.replicates, levels, seed)?
        }
        SampleMethodConfig::Cholesky => {
            let g = ctx.model(fs)?.gram(pts)?;
            sample_cholesky(&g, s.replicates, seed, &JitterPolicy::default())?
        }
    })
}

pub fn sample(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let (fs, pts) = ctx.validated()?;
    let e = ensemble(ctx, &fs, &pts)?;
    Ok(vec![ctx.write("samples.csv", &ensemble_csv(&e))?])
}

#[derive(Serialize)]
struct FitFile {
    alpha: f64,
    fit: Option<fieldgen_core::analysis::HolderFit>,
    error: Option<String>,
}

pub fn variogram(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let v = ctx
        .config
        .variogram
        .as_ref()
        .ok_or_else(|| CliError::Config("a \"variogram\" block is required".into()))?;
    let (fs, pts) = ctx.validated()?;
    let [lo, hi] = v.range;
    let edges = log_edges(lo, hi, v.bins + 1)?;
    let est = match v.mode {
        VariogramSource::Analytic => {
            let centres: Vec<f64> = edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
            variogram_at_distances(&ctx.model(&fs)?, &centres, v.pairs_per_bin, v.seed)?
        }
        VariogramSource::Empirical => variogram_empirical(&ensemble(ctx, &fs, &pts)?, &edges)?,
    };
    let [flo, fhi] = v.fit_range.unwrap_or(v.range);
    let fit = holder_fit(&est, (flo, fhi));
    let file = FitFile {
        alpha: fs.alpha,
        error: fit.as_ref().err().map(|e| e.to_string()),
        fit: fit.ok(),
    };
    Ok(vec![ctx.write("variogram.csv", &variogram_csv(&est))?, ctx.write("holder.json", &to_json(&file))?])
}

/// Points on which the gap routes are compared; `π/2` is always included.
const GAP_GRID: [f64; 5] = [0.3, 1.0, PI / 2.0, 2.2, 2.9];
const GAP_QUARTER_PI: f64 = 1e-4;

fn existence_property(m: &ManifoldSpec, ctx: &Context) -> PropertyReport {
    let f = &ctx.config.field;
    let v = classify(m, f.kind, f.alpha);
    let expected = expected_existence(m, f.kind, f.alpha);
    let pass = v.exists() == expected;
    PropertyReport::new(
        "existence",
        pass,
        if pass { 0.0 } else { 1.0 },
        0.0,
        &v.citation,
        digest(&(m, f.kind, f.alpha)),
    )
    .with_detail("exists", v.exists() as u8 as f64)
    .with_detail("expected", expected as u8 as f64)
}

fn nonuniqueness_property(m: &ManifoldSpec, tol: f64) -> Result<PropertyReport, CliError> {
    if !matches!(m, ManifoldSpec::Circle { radius } if *radius == 1.0) {
        return Err(CliError::Config("the nonuniqueness property is defined on the unit circle".into()));
    }
    let mut dev: f64 = 0.0;
    let mut at_half_pi = None;
    for x in GAP_GRID {
        let g = nonuniqueness_gap(x)?;
        dev = dev.max((g.series - g.direct).abs());
        if x == PI / 2.0 {
            at_half_pi = Some(g);
        }
    }
    let g = at_half_pi.expect("grid contains π/2");
    let quarter = (g.series - PI / 4.0).abs();
    Ok(PropertyReport::new(
        "nonuniqueness",
        dev <= tol && quarter <= GAP_QUARTER_PI,
        dev,
        tol,
        "circle-half-order-nonuniqueness",
        digest(&GAP_GRID),
    )
    .with_detail("gap_half_pi", g.series)
    .with_detail("gap_half_pi_direct", g.direct)
    .with_detail("quarter_pi_error", quarter))
}

pub fn verify(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let vc = ctx.config.verify.clone().unwrap_or_default();
    if vc.properties.is_empty() {
        return Err(CliError::Config("verify needs at least one property".into()));
    }
    let m = ctx.config.manifold;
    let needs_field = vc
        .properties
        .iter()
        .any(|p| matches!(p, Property::Psd | Property::SelfSimilarity | Property::Stationarity));
    let field = if needs_field { Some(ctx.validated()?) } else { None };
    let mut reports = Vec::new();
    for p in &vc.properties {
        match p {
            Property::Existence => reports.push(existence_property(&m, ctx)),
            Property::Nonuniqueness => reports.push(nonuniqueness_property(&m, vc.tolerances.nonuniqueness)?),
            Property::Psd => {
                let (fs, pts) = field.as_ref().expect("validated");
                reports.push(psd_check(&ctx.model(fs)?.gram(pts)?, vc.tolerances.psd)?);
            }
            Property::SelfSimilarity => {
                let (fs, pts) = field.as_ref().expect("validated");
                for &c in &vc.scales {
                    let r = self_similarity_check(&m, fs, c, pts, ctx.config.covariance)?;
                    reports.push(r.with_detail("scale", c));
                }
            }
            Property::Stationarity => {
                let (fs, pts) = field.as_ref().expect("validated");
                let iso = Isometry::random(&m, vc.isometry_seed);
                reports.push(stationarity_check(&m, fs, &iso, pts, ctx.config.covariance)?);
            }
        }
    }
    let path = ctx.write("report.json", &report_json(&reports))?;
    for r in &reports {
        println!("{} {} (deviation {:e}, threshold {:e})", if r.pass { "PASS" } else { "FAIL" }, r.name, r.deviation, r.threshold);
    }
    let failures: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.name.clone()).collect();
    if failures.is_empty() {
        Ok(vec![path])
    } else {
        Err(CliError::Verify { failures })
    }
}

#[derive(Serialize)]
struct ExistenceFile {
    verdict: fieldgen_core::ExistenceVerdict,
    message: String,
    /// All field kinds and a grid of orders on this manifold.
    table: Vec<fieldgen_core::analysis::ExistenceRow>,
}

/// Writes the verdict and the table for this manifold. A negative verdict is
/// a result here, not an error.
pub fn existence(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let m = ctx.config.manifold;
    m.validate()?;
    let f = &ctx.config.field;
    let verdict = classify(&m, f.kind, f.alpha);
    println!("{verdict}");
    let file = ExistenceFile {
        message: verdict.to_string(),
        verdict,
        table: existence_table(&[m], &[0.1, 0.25, 0.5, 0.75, 0.9]),
    };
    Ok(vec![ctx.write("existence.json", &to_json(&file))?])
}

/// Heat kernel between the first point and every point, at each time.
pub fn kernel_probe(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let kp = ctx
        .config
        .kernel_probe
        .as_ref()
        .ok_or_else(|| CliError::Config("a \"kernel_probe\" block is required".into()))?;
    if kp.times.is_empty() {
        return Err(CliError::Config("kernel_probe needs at least one time".into()));
    }
    let m = ctx.config.manifold;
    let pts = ctx.config.point_set(ctx.seed)?;
    let tol = ctx.config.covariance.tolerance;
    let mut out = String::new();
    let _ = writeln!(out, "# manifold: {}", serde_json::to_string(&m).expect("serializes"));
    let _ = writeln!(out, "# tolerance: {}", format_float(tol));
    out.push_str("t,i,j,distance,value,tail_bound,terms,method,small_time_ratio\n");
    for &t in &kp.times {
        for (j, y) in pts.iter().enumerate() {
            let k = heat_kernel_tol(&m, t, &pts[0], y, tol)?;
            let d = m.geodesic_distance(&pts[0], y)?;
            let ratio = small_time_ratio(&m, t, &pts[0], y).map(format_float).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},0,{j},{},{},{},{},{},{ratio}",
                format_float(t),
                format_float(d),
                format_float(k.value),
                format_float(k.tail_bound),
                k.terms,
                k.method
            );
        }
    }
    Ok(vec![ctx.write("kernel.csv", &out)?])
}

pub fn ensure_dir(p: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(p).map_err(|e| CliError::io(p, e))
}
