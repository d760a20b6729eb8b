//! CSV and JSON output with `#` metadata headers.
//!
//! Floats are written in shortest round-trip form so that identical inputs
//! give byte-identical files. Files are written to a temporary sibling and
//! renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::analysis::{PropertyReport, VariogramEstimate};
use crate::covariance::{FieldSpec, GramMatrix};
use crate::error::{FieldError, Result};
use crate::manifold::Point;
use crate::sampling::{SampleEnsemble, SampleMethod};

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        // drop the sign of negative zero
        return "0".into();
    }
    let s = format!("{v:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

fn join(v: impl IntoIterator<Item = f64>) -> String {
    v.into_iter().map(format_float).collect::<Vec<_>>().join(",")
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("metadata serializes")
}

#[derive(Serialize)]
struct FieldMeta {
    kind: String,
    alpha: f64,
    origin: Option<Vec<f64>>,
}

fn field_meta(fs: &FieldSpec) -> String {
    json(&FieldMeta {
        kind: fs.kind.to_string(),
        alpha: fs.alpha,
        origin: fs.origin.as_ref().map(Point::coords),
    })
}

fn header(out: &mut String, key: &str, value: &str) {
    let _ = writeln!(out, "# {key}: {value}");
}

fn point_header(out: &mut String, points: &[Point]) {
    let coords: Vec<Vec<f64>> = points.iter().map(Point::coords).collect();
    header(out, "points", &json(&coords));
}

fn matrix_rows(out: &mut String, m: &DMatrix<f64>) {
    for r in 0..m.nrows() {
        out.push_str(&join(m.row(r).iter().copied()));
        out.push('\n');
    }
}

pub fn gram_csv(g: &GramMatrix) -> String {
    let mut out = String::new();
    header(&mut out, "manifold", &json(&g.manifold));
    header(&mut out, "field", &field_meta(&g.field));
    header(&mut out, "method", &g.method.to_string());
    header(&mut out, "tolerance", &format_float(g.tolerance));
    header(&mut out, "truncation", &g.truncation.map_or("none".into(), |t| t.to_string()));
    header(&mut out, "error_bound", &format_float(g.error_bound));
    point_header(&mut out, &g.points);
    matrix_rows(&mut out, &g.values);
    out
}

/// One row per replicate, one column per point.
pub fn ensemble_csv(e: &SampleEnsemble) -> String {
    let mut out = String::new();
    header(&mut out, "manifold", &json(&e.manifold));
    header(&mut out, "field", &field_meta(&e.field));
    header(&mut out, "seed", &e.seed.to_string());
    header(&mut out, "replicates", &e.replicates().to_string());
    match e.method {
        SampleMethod::Kl { levels, modes } => {
            header(&mut out, "method", "kl");
            header(&mut out, "truncation", &format!("{levels} levels, {modes} modes"));
        }
        SampleMethod::Cholesky { jitter } => {
            header(&mut out, "method", "cholesky");
            header(&mut out, "jitter", &format_float(jitter));
        }
    }
    if let Some(d) = &e.variance_deficit {
        header(&mut out, "variance_deficit", &join(d.iter().copied()));
    }
    point_header(&mut out, &e.points);
    matrix_rows(&mut out, &e.samples);
    out
}

pub fn variogram_csv(v: &VariogramEstimate) -> String {
    let mut out = String::new();
    header(&mut out, "mode", json(&v.mode).trim_matches('"'));
    header(&mut out, "guard", &format_float(v.guard));
    out.push_str("lower,upper,distance,value,pairs,std_error\n");
    for b in &v.bins {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_float(b.lower),
            format_float(b.upper),
            format_float(b.distance),
            format_float(b.value),
            b.pairs,
            b.std_error.map_or(String::new(), format_float)
        );
    }
    out
}

#[derive(Serialize)]
struct ReportFile<'a> {
    pass: bool,
    properties: &'a [PropertyReport],
}

/// `{pass, properties: [...]}` with two-space indentation.
pub fn report_json(reports: &[PropertyReport]) -> String {
    let doc = ReportFile {
        pass: reports.iter().all(|r| r.pass),
        properties: reports,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}

/// Numeric rows of a CSV written here, skipping `#` lines and a text header.
pub fn parse_csv_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        match line.split(',').map(|c| c.trim().parse::<f64>()).collect::<std::result::Result<Vec<f64>, _>>() {
            Ok(r) => rows.push(r),
            Err(_) if rows.is_empty() => continue,
            Err(e) => return Err(FieldError::Domain(format!("bad CSV row {line:?}: {e}"))),
        }
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(FieldError::Domain("ragged CSV rows".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// The `# key: value` metadata lines.
pub fn parse_header(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Writes `contents` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp.{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
