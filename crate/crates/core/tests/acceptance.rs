//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Oracles are computed here independently of the library where possible:
//! a Lanczos gamma for the Euclidean constant, direct eigen-sums, and a
//! Gauss-Legendre product rule for volume integrals on the sphere.

use std::f64::consts::PI;
use std::time::Instant;

use fieldgen_core::analysis::{
    holder_fit, log_edges, nonuniqueness_gap, psd_check, relative_deviation, self_similarity_check,
    stationarity_check, variogram_at_distances, variogram_empirical,
};
use fieldgen_core::covariance::{classify, Method};
use fieldgen_core::heat_kernel::small_time_ratio;
use fieldgen_core::manifold::sample_points;
use fieldgen_core::sampling::JitterPolicy;
use fieldgen_core::{
    heat_kernel, sample_cholesky, sample_kl, CovarianceModel, CovarianceOptions, FieldKind, FieldSpec, Isometry,
    ManifoldSpec, PathChoice, Point,
};
use nalgebra::{DMatrix, SymmetricEigen};

type Outcome = Result<String, String>;

fn check(ok: bool, summary: String) -> Outcome {
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

// Lanczos (g = 7, n = 9), accurate to ~1e-15 for x > 0.5
fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

fn euclid_constant(d: usize, alpha: f64) -> f64 {
    let h = d as f64 / 2.0;
    -gamma(-alpha) / (4f64.powf(h + alpha) * PI.powf(h) * gamma(h + alpha))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn min_max_eig(a: &DMatrix<f64>) -> (f64, f64) {
    let e = SymmetricEigen::new(a.clone()).eigenvalues;
    (e.min(), e.max())
}

fn c1_euclidean_closed_form() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    // the quoted value for d = 2, α = 1/4, x = (1, 0), y = (−1, 0)
    let quoted = euclid_constant(2, 0.25) * (2.0 - 2f64.powf(0.5));
    if (quoted - 0.17826).abs() > 5e-5 {
        return Err(format!("oracle constant gives {quoted}"));
    }
    for d in [2, 3] {
        let m = ManifoldSpec::euclidean(d).map_err(err)?;
        let o = vec![0.0; d];
        let pts = sample_points(&m, 20, 100 + d as u64);
        for alpha in [0.25, 0.5, 0.75] {
            let fs = FieldSpec::riesz(alpha, Point::Euclidean(o.clone()));
            let model = CovarianceModel::new(&m, &fs, CovarianceOptions::path(PathChoice::Quadrature)).map_err(err)?;
            if model.method() != Method::Quadrature {
                return Err(format!("route is {}", model.method()));
            }
            let c = euclid_constant(d, alpha);
            for k in 0..10 {
                let (x, y) = (&pts[2 * k], &pts[2 * k + 1]);
                let (xc, yc) = (x.coords(), y.coords());
                let diff: Vec<f64> = xc.iter().zip(&yc).map(|(a, b)| a - b).collect();
                let want = c * (norm(&xc).powf(2.0 * alpha) + norm(&yc).powf(2.0 * alpha) - norm(&diff).powf(2.0 * alpha));
                let got = model.covariance(x, y).map_err(err)?;
                worst = worst.max((got - want).abs() / want.abs().max(1e-8));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-4 && secs < 10.0, format!("max relative error {worst:.2e}, {secs:.1} s"))
}

fn c2_circle_oracle() -> Outcome {
    let m = ManifoldSpec::circle(1.0).map_err(err)?;
    let fs = FieldSpec::riesz(0.5, Point::Circle(0.0));
    let levels = 10_000;
    let x = Point::Circle(PI);
    // Σ_{k≠0} (1/2π) k^{−2} |e^{ikπ} − 1|², both signs of k
    let oracle: f64 = (1..=levels).rev().map(|k| 2.0 / (2.0 * PI) / (k * k) as f64 * (2.0 - 2.0 * (k as f64 * PI).cos())).sum();
    let model = CovarianceModel::new(&m, &fs, CovarianceOptions::truncated(levels)).map_err(err)?;
    let truncated = model.variance(&x).map_err(err)?;
    let e = sample_kl(&m, &fs, &[x.clone()], 1, levels, 0).map_err(err)?;
    let full = CovarianceModel::new(&m, &fs, CovarianceOptions::default()).map_err(err)?.variance(&x).map_err(err)?;
    // KL variance of the single point, from the recorded deficit
    let kl = full + e.variance_deficit.as_ref().expect("KL records its deficit")[0];
    let dev = [(truncated - PI / 2.0).abs(), (kl - PI / 2.0).abs()];
    check(
        dev[0] <= 1e-4 && dev[1] <= 1e-4 && (truncated - oracle).abs() < 1e-10 && (kl - oracle).abs() < 1e-10,
        format!("truncated {truncated:.8}, KL {kl:.8}, eigen-sum {oracle:.8}, π/2 = {:.8}", PI / 2.0),
    )
}

fn c3_gap() -> Outcome {
    let g = nonuniqueness_gap(PI / 2.0).map_err(err)?;
    let at = (g.series - PI / 4.0).abs();
    let mut worst: f64 = (g.series - g.direct).abs();
    for k in 0..100 {
        let x = 2.0 * PI * (k as f64 + 0.5) / 100.0;
        let g = nonuniqueness_gap(x).map_err(err)?;
        worst = worst.max((g.series - g.direct).abs());
    }
    check(at <= 1e-4 && worst <= 1e-6, format!("gap(π/2) − π/4 = {at:.1e}, routes differ by ≤ {worst:.1e} on 100 points"))
}

/// The six kinds of the PSD and Bessel criteria.
fn six_kinds() -> Vec<ManifoldSpec> {
    vec![
        ManifoldSpec::circle(1.0).unwrap(),
        ManifoldSpec::sphere2(1.0).unwrap(),
        ManifoldSpec::flat_torus(1.0, 1.3).unwrap(),
        ManifoldSpec::unit_disk(),
        ManifoldSpec::euclidean(2).unwrap(),
        ManifoldSpec::hyperbolic_plane(),
    ]
}

fn fields(m: &ManifoldSpec, pts: &[Point], alpha: f64) -> Vec<FieldSpec> {
    [
        FieldSpec::riesz(alpha, pts[0].clone()),
        FieldSpec::stationary_riesz(alpha),
        FieldSpec::bessel(alpha),
    ]
    .into_iter()
    .filter(|fs| classify(m, fs.kind, alpha).exists())
    .collect()
}

fn c4_psd() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for m in six_kinds() {
        let pts = sample_points(&m, 50, 4);
        for alpha in [0.25, 0.5, 0.75] {
            for fs in fields(&m, &pts, alpha) {
                let g = fieldgen_core::gram(&m, &fs, &pts).map_err(err)?;
                let r = psd_check(&g, 1e-8).map_err(err)?;
                if !r.pass {
                    return Err(format!("{} {} α={alpha}: {r:?}", m.kind_name(), fs.kind));
                }
                let (lo, hi) = min_max_eig(&g.values);
                if -lo / hi > worst {
                    worst = -lo / hi;
                }
                count += 1;
            }
        }
    }
    check(worst <= 1e-8, format!("{count} Grams, worst −λmin/λmax = {worst:.1e}"))
}

fn c5_self_similarity() -> Outcome {
    let cases: Vec<(ManifoldSpec, FieldKind, PathChoice)> = vec![
        (ManifoldSpec::circle(1.0).unwrap(), FieldKind::Riesz, PathChoice::Auto),
        (ManifoldSpec::sphere2(1.0).unwrap(), FieldKind::Riesz, PathChoice::Auto),
        (ManifoldSpec::unit_disk(), FieldKind::StationaryRiesz, PathChoice::Auto),
        (ManifoldSpec::euclidean(2).unwrap(), FieldKind::Riesz, PathChoice::Auto),
        (ManifoldSpec::euclidean(2).unwrap(), FieldKind::Riesz, PathChoice::Quadrature),
        (ManifoldSpec::flat_torus(1.0, 1.3).unwrap(), FieldKind::Riesz, PathChoice::Auto),
        (ManifoldSpec::cylinder(1.0).unwrap(), FieldKind::Riesz, PathChoice::Auto),
        (ManifoldSpec::hyperbolic_plane(), FieldKind::StationaryRiesz, PathChoice::Auto),
        (ManifoldSpec::circle(1.0).unwrap(), FieldKind::Riesz, PathChoice::Quadrature),
    ];
    let (mut spec_worst, mut quad_worst) = (0.0f64, 0.0f64);
    for (m, kind, path) in cases {
        let pts = sample_points(&m, 8, 5);
        let alpha = 0.3;
        let fs = match kind {
            FieldKind::Riesz => FieldSpec::riesz(alpha, pts[0].clone()),
            FieldKind::StationaryRiesz => FieldSpec::stationary_riesz(alpha),
            FieldKind::Bessel => FieldSpec::bessel(alpha),
        };
        let opts = CovarianceOptions::path(path);
        let spectral = CovarianceModel::new(&m, &fs, opts).map_err(err)?.method().is_spectral_like();
        for c in [0.5, 2.0] {
            let r = self_similarity_check(&m, &fs, c, &pts, opts).map_err(err)?;
            if !r.pass {
                return Err(format!("{} {kind} {path:?} c={c}: deviation {:.2e}", m.kind_name(), r.deviation));
            }
            if spectral {
                spec_worst = spec_worst.max(r.deviation);
            } else {
                quad_worst = quad_worst.max(r.deviation);
            }
        }
    }
    check(
        spec_worst <= 1e-10 && quad_worst <= 1e-6,
        format!("spectral ≤ {spec_worst:.1e}, quadrature ≤ {quad_worst:.1e}"),
    )
}

fn c6_stationarity() -> Outcome {
    let disk = ManifoldSpec::unit_disk();
    let pts = sample_points(&disk, 15, 6);
    let rot = Isometry::Disk { rotation: 1.1, reflect: false };
    let d = stationarity_check(&disk, &FieldSpec::stationary_riesz(0.5), &rot, &pts, CovarianceOptions::default())
        .map_err(err)?
        .deviation;

    let sphere = ManifoldSpec::sphere2(1.0).map_err(err)?;
    let spts = sample_points(&sphere, 15, 7);
    let srot = Isometry::sphere_rotation([0.3, -0.5, 0.8], 0.9).map_err(err)?;
    let s = stationarity_check(&sphere, &FieldSpec::riesz(0.5, spts[0].clone()), &srot, &spts, CovarianceOptions::default())
        .map_err(err)?
        .deviation;

    let mut bessel: f64 = 0.0;
    let mut kinds = six_kinds();
    kinds.push(ManifoldSpec::cylinder(1.0).unwrap());
    for m in kinds {
        let p = sample_points(&m, 8, 8);
        let iso = Isometry::random(&m, 9);
        let r = stationarity_check(&m, &FieldSpec::bessel(0.5), &iso, &p, CovarianceOptions::default().with_tolerance(1e-10))
            .map_err(err)?;
        bessel = bessel.max(r.deviation);
    }
    check(
        d <= 1e-8 && s <= 1e-8 && bessel <= 1e-6,
        format!("disk {d:.1e}, sphere increments {s:.1e}, Bessel on 7 kinds ≤ {bessel:.1e}"),
    )
}

/// Expected existence, written from the classification results directly.
fn expected(m: &ManifoldSpec, kind: FieldKind, alpha: f64) -> bool {
    match kind {
        FieldKind::Bessel => true,
        FieldKind::Riesz => match m {
            ManifoldSpec::Cylinder { .. } => alpha < 0.5,
            _ => true,
        },
        FieldKind::StationaryRiesz => matches!(m, ManifoldSpec::UnitDisk { .. } | ManifoldSpec::HyperbolicPlane { .. }),
    }
}

fn c7_existence() -> Outcome {
    let mut ms: Vec<ManifoldSpec> = (1..=4).map(|d| ManifoldSpec::euclidean(d).unwrap()).collect();
    for r in [0.5, 1.0, 3.0] {
        ms.push(ManifoldSpec::circle(r).unwrap());
        ms.push(ManifoldSpec::sphere2(r).unwrap());
        ms.push(ManifoldSpec::cylinder(r).unwrap());
        ms.push(ManifoldSpec::flat_torus(r, 1.0 + r).unwrap());
        ms.push(ManifoldSpec::UnitDisk { scale: r });
        ms.push(ManifoldSpec::HyperbolicPlane { scale: r });
    }
    let alphas = [0.01, 0.1, 0.25, 0.4, 0.49, 0.5, 0.51, 0.6, 0.75, 0.9, 0.99];
    let mut rows = 0;
    let mut bad = Vec::new();
    for m in &ms {
        for kind in [FieldKind::Riesz, FieldKind::StationaryRiesz, FieldKind::Bessel] {
            for &alpha in &alphas {
                rows += 1;
                let v = classify(m, kind, alpha);
                if v.exists() != expected(m, kind, alpha) {
                    bad.push(format!("{v}"));
                }
            }
        }
    }
    let first = bad.first().map_or(String::new(), |b| format!(", first {b:?}"));
    check(bad.is_empty(), format!("{rows} rows, {} mismatches{first}", bad.len()))
}

fn c8_holder() -> Outcome {
    let start = Instant::now();
    let mut worst_analytic: f64 = 0.0;
    let distances: Vec<f64> = (0..10).map(|k| 0.01 * 20f64.powf(k as f64 / 9.0)).collect();
    for m in [ManifoldSpec::sphere2(1.0).unwrap(), ManifoldSpec::circle(1.0).unwrap()] {
        let o = sample_points(&m, 1, 10).remove(0);
        for alpha in [0.25, 0.5, 0.75] {
            let model = CovarianceModel::new(&m, &FieldSpec::riesz(alpha, o.clone()), CovarianceOptions::default()).map_err(err)?;
            let v = variogram_at_distances(&model, &distances, 10, 11).map_err(err)?;
            let fit = holder_fit(&v, (0.01, 0.2)).map_err(err)?;
            worst_analytic = worst_analytic.max((fit.alpha_hat - alpha).abs());
        }
    }

    // empirical: KL samples at irregular points on an arc of the circle
    let m = ManifoldSpec::circle(1.0).unwrap();
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let pts: Vec<Point> = (0..60).map(|j| Point::Circle(1.2 * ((j as f64 * golden) % 1.0))).collect();
    let edges = log_edges(0.05, 0.3, 7).map_err(err)?;
    let mut worst_empirical: f64 = 0.0;
    let mut fits = Vec::new();
    for alpha in [0.25, 0.5, 0.75] {
        let e = sample_kl(&m, &FieldSpec::riesz(alpha, Point::Circle(0.0)), &pts, 100_000, 1000, 12).map_err(err)?;
        let v = variogram_empirical(&e, &edges).map_err(err)?;
        let fit = holder_fit(&v, (0.05, 0.3)).map_err(err)?;
        worst_empirical = worst_empirical.max((fit.alpha_hat - alpha).abs());
        fits.push(fit.alpha_hat);
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_analytic <= 0.05 && worst_empirical <= 0.1 && secs < 60.0,
        format!(
            "analytic |α̂ − α| ≤ {worst_analytic:.3}, empirical ≤ {worst_empirical:.3} (α̂ = {:.3}, {:.3}, {:.3}), {secs:.1} s",
            fits[0], fits[1], fits[2]
        ),
    )
}

/// Largest |empirical − analytic| in units of the per-entry standard error.
fn max_z(samples: &DMatrix<f64>, analytic: &DMatrix<f64>) -> f64 {
    let (n, p) = (samples.nrows(), samples.ncols());
    let mut worst: f64 = 0.0;
    for i in 0..p {
        for j in i..p {
            let prod: Vec<f64> = (0..n).map(|r| samples[(r, i)] * samples[(r, j)]).collect();
            let mean = prod.iter().sum::<f64>() / n as f64;
            let var = prod.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            if se > 0.0 {
                worst = worst.max((mean - analytic[(i, j)]).abs() / se);
            } else if mean != analytic[(i, j)] {
                return f64::INFINITY;
            }
        }
    }
    worst
}

fn c9_monte_carlo() -> Outcome {
    let start = Instant::now();
    let m = ManifoldSpec::sphere2(1.0).map_err(err)?;
    let pts = sample_points(&m, 20, 13);
    let fs = FieldSpec::riesz(0.5, Point::Sphere([0.0, 0.0, 1.0]));
    let n = 50_000;
    let g = CovarianceModel::new(&m, &fs, CovarianceOptions::default()).map_err(err)?.gram(&pts).map_err(err)?;
    let chol = sample_cholesky(&g, n, 14, &JitterPolicy::default()).map_err(err)?;
    let z_chol = max_z(&chol.samples, &g.values);
    let levels = 40;
    let kl = sample_kl(&m, &fs, &pts, n, levels, 15).map_err(err)?;
    let gk = CovarianceModel::new(&m, &fs, CovarianceOptions::truncated(levels)).map_err(err)?.gram(&pts).map_err(err)?;
    let z_kl = max_z(&kl.samples, &gk.values);
    let secs = start.elapsed().as_secs_f64();
    check(
        z_chol <= 5.0 && z_kl <= 5.0 && secs < 60.0,
        format!("max z: Cholesky {z_chol:.2}, KL(K={levels}) {z_kl:.2}, {secs:.1} s"),
    )
}

/// Gauss-Legendre nodes and weights on [−1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (mut q0, mut q1) = (1.0, x);
                    for k in 2..=n {
                        let q2 = ((2 * k - 1) as f64 * x * q1 - (k - 1) as f64 * q0) / k as f64;
                        q0 = q1;
                        q1 = q2;
                    }
                    let dq = n as f64 * (x * q1 - q0) / (x * x - 1.0);
                    return (x, 2.0 / ((1.0 - x * x) * dq * dq));
                }
            }
        })
        .collect()
}

fn c10_semigroup() -> Outcome {
    let h = |m: &ManifoldSpec, t: f64, x: &Point, y: &Point| heat_kernel(m, t, x, y).map(|k| k.value).map_err(err);
    let mut worst: f64 = 0.0;
    let circle = ManifoldSpec::circle(1.0).unwrap();
    let sphere = ManifoldSpec::sphere2(1.0).unwrap();
    let (cx, cy) = (Point::Circle(0.4), Point::Circle(2.5));
    let (sx, sy) = (Point::Sphere([0.0, 0.0, 1.0]), Point::Sphere([0.7f64.sin(), 0.0, 0.7f64.cos()]));
    let gl = gauss_legendre(48);
    let nphi = 96;
    for t in [0.1, 0.5] {
        for s in [0.1, 0.5] {
            // trapezoid rule, exact for trigonometric polynomials of this degree
            let n = 512;
            let mut acc = 0.0;
            for k in 0..n {
                let z = Point::Circle(2.0 * PI * k as f64 / n as f64);
                acc += h(&circle, t, &cx, &z)? * h(&circle, s, &z, &cy)?;
            }
            worst = worst.max((acc * 2.0 * PI / n as f64 - h(&circle, t + s, &cx, &cy)?).abs());

            let mut acc = 0.0;
            for &(u, w) in &gl {
                let r = (1.0 - u * u).sqrt();
                for k in 0..nphi {
                    let phi = 2.0 * PI * k as f64 / nphi as f64;
                    let z = Point::Sphere([r * phi.cos(), r * phi.sin(), u]);
                    acc += w * h(&sphere, t, &sx, &z)? * h(&sphere, s, &z, &sy)?;
                }
            }
            worst = worst.max((acc * 2.0 * PI / nphi as f64 - h(&sphere, t + s, &sx, &sy)?).abs());
        }
    }
    let near = Point::Sphere([0.05f64.sin(), 0.0, 0.05f64.cos()]);
    let phi = small_time_ratio(&sphere, 1e-3, &sx, &near).map_err(err)?;
    let phi0 = small_time_ratio(&sphere, 1e-3, &sx, &sx).map_err(err)?;
    check(
        worst <= 1e-6 && (phi - 1.0).abs() <= 1e-2 && (phi0 - 1.0).abs() <= 1e-2,
        format!("semigroup defect ≤ {worst:.1e}, Φ(1e-3) = {phi:.5} at distance 0.05, {phi0:.5} on the diagonal"),
    )
}

fn c11_bessel() -> Outcome {
    let mut kinds = six_kinds();
    kinds.push(ManifoldSpec::cylinder(1.0).unwrap());
    let mut worst: f64 = 0.0;
    for m in &kinds {
        let pts = sample_points(m, 20, 16);
        let g = fieldgen_core::gram(m, &FieldSpec::bessel(0.75), &pts).map_err(err)?;
        if g.values.iter().any(|v| !v.is_finite()) {
            return Err(format!("non-finite Bessel covariance on {}", m.kind_name()));
        }
        let (lo, hi) = min_max_eig(&g.values);
        if lo < -1e-8 * hi {
            return Err(format!("{}: λmin = {lo:e}, λmax = {hi:e}", m.kind_name()));
        }
        if -lo / hi > worst {
            worst = -lo / hi;
        }
    }
    let cyl = ManifoldSpec::cylinder(1.0).unwrap();
    let riesz_fails = !classify(&cyl, FieldKind::Riesz, 0.75).exists() && !classify(&cyl, FieldKind::StationaryRiesz, 0.75).exists();

    // interior points: within ~0.1 of the boundary the split time is capped
    // by the zero ceiling and both paths report bounds near 1e-3
    let disk = ManifoldSpec::unit_disk();
    let pts: Vec<Point> = sample_points(&disk, 8, 17)
        .into_iter()
        .map(|p| match p {
            Point::Disk { radius, angle } => Point::Disk { radius: 0.8 * radius, angle },
            p => p,
        })
        .collect();
    let fs = FieldSpec::bessel(0.5);
    let a = CovarianceModel::new(&disk, &fs, CovarianceOptions::path(PathChoice::Spectral)).map_err(err)?.gram(&pts).map_err(err)?;
    let b = CovarianceModel::new(&disk, &fs, CovarianceOptions::path(PathChoice::Quadrature)).map_err(err)?.gram(&pts).map_err(err)?;
    let dev = relative_deviation(&b.values, &a.values);
    check(
        riesz_fails && dev <= 1e-6,
        format!("PSD on 7 kinds (worst −λmin/λmax {worst:.1e}), disk spectral vs quadrature {dev:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("euclidean closed form", c1_euclidean_closed_form),
        ("circle eigen-sum oracle", c2_circle_oracle),
        ("non-uniqueness gap", c3_gap),
        ("positive semidefiniteness", c4_psd),
        ("self-similarity", c5_self_similarity),
        ("stationarity", c6_stationarity),
        ("existence table", c7_existence),
        ("Hölder recovery", c8_holder),
        ("Monte Carlo covariance", c9_monte_carlo),
        ("heat-kernel semigroup", c10_semigroup),
        ("Bessel field", c11_bessel),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(s) => println!("PASS {:>2} {name}: {s} [{secs:.1} s]", i + 1),
            Err(s) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {s} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
