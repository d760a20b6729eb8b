//! Laplace–Beltrami eigenpairs for the kinds with discrete spectrum.

use std::f64::consts::PI;
use std::sync::Arc;

use super::bessel::{bessel_j, bessel_j_pair, ZeroTable};
use super::harmonics::{harmonic_degree_order, real_harmonics};
use crate::error::{FieldError, Result};
use crate::manifold::{ManifoldSpec, Point};

/// Descriptor of one orthonormal eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// `cos(kθ)` (or `sin` when `sine`) on a circle; `k = 0` is the constant.
    Circle { k: usize, sine: bool },
    Sphere { l: usize, m: i64 },
    Torus { a: (usize, bool), b: (usize, bool) },
    /// `norm · J_k(zero · ρ) · {cos, sin}(kθ)` on the unit disk.
    Disk { k: usize, zero: f64, norm: f64, sine: bool },
}

impl Mode {
    /// Index of the degenerate group the mode belongs to; modes sharing it
    /// have equal eigenvalues by symmetry.
    pub fn group(&self) -> (usize, usize) {
        match *self {
            Mode::Circle { k, .. } => (k, 0),
            Mode::Sphere { l, .. } => (l, 0),
            Mode::Torus { a, b } => (a.0, b.0),
            Mode::Disk { k, zero, .. } => (k, zero.to_bits() as usize),
        }
    }
}

/// The lowest part of the spectrum, eigenvalues ascending with repetition.
#[derive(Debug, Clone)]
pub struct SpectrumSlice {
    manifold: ManifoldSpec,
    eigenvalues: Vec<f64>,
    modes: Vec<Mode>,
}

impl SpectrumSlice {
    pub fn manifold(&self) -> &ManifoldSpec {
        &self.manifold
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// `φ_k(x)`.
    pub fn eigenfunction(&self, k: usize, x: &Point) -> Result<f64> {
        self.manifold.validate_point(x)?;
        let mode = self.modes.get(k).ok_or_else(|| {
            FieldError::Truncation {
                message: format!("mode {k} beyond the {} computed", self.modes.len()),
                achieved: self.modes.len() as f64,
            }
        })?;
        Ok(eval_mode(&self.manifold, mode, x))
    }

    /// `φ_0(x), …, φ_{K−1}(x)` in one pass.
    pub fn evaluate_all(&self, x: &Point) -> Result<Vec<f64>> {
        self.manifold.validate_point(x)?;
        Ok(match (&self.manifold, x) {
            (ManifoldSpec::Circle { radius }, Point::Circle(a)) => {
                let kmax = self.modes.iter().map(|m| m.group().0).max().unwrap_or(0);
                let (c, s) = trig_table(*a, kmax);
                self.modes
                    .iter()
                    .map(|m| match *m {
                        Mode::Circle { k, sine } => circle_basis(*radius, k, sine, &c, &s),
                        _ => unreachable!(),
                    })
                    .collect()
            }
            (ManifoldSpec::Sphere2 { radius }, Point::Sphere(v)) => {
                let lmax = self.modes.iter().map(|m| m.group().0).max().unwrap_or(0);
                let y = real_harmonics(lmax, *v);
                (0..self.modes.len()).map(|i| y[i] / radius).collect()
            }
            (ManifoldSpec::FlatTorus { r1, r2 }, Point::Torus(a)) => {
                let k1 = self.modes.iter().map(|m| m.group().0).max().unwrap_or(0);
                let k2 = self.modes.iter().map(|m| m.group().1).max().unwrap_or(0);
                let (c1, s1) = trig_table(a[0], k1);
                let (c2, s2) = trig_table(a[1], k2);
                self.modes
                    .iter()
                    .map(|m| match *m {
                        Mode::Torus { a, b } => {
                            circle_basis(*r1, a.0, a.1, &c1, &s1) * circle_basis(*r2, b.0, b.1, &c2, &s2)
                        }
                        _ => unreachable!(),
                    })
                    .collect()
            }
            _ => self.modes.iter().map(|m| eval_mode(&self.manifold, m, x)).collect(),
        })
    }
}

pub(crate) fn trig_table(a: f64, kmax: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c = Vec::with_capacity(kmax + 1);
    let mut s = Vec::with_capacity(kmax + 1);
    let (c1, s1) = (a.cos(), a.sin());
    let (mut ck, mut sk) = (1.0, 0.0);
    for k in 0..=kmax {
        if k % 1024 == 0 && k > 0 {
            // reseed to keep the rotation from drifting
            let (sn, cs) = (k as f64 * a).sin_cos();
            ck = cs;
            sk = sn;
        }
        c.push(ck);
        s.push(sk);
        let next = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = next;
    }
    (c, s)
}

fn circle_basis(r: f64, k: usize, sine: bool, c: &[f64], s: &[f64]) -> f64 {
    if k == 0 {
        1.0 / (2.0 * PI * r).sqrt()
    } else if sine {
        s[k] / (PI * r).sqrt()
    } else {
        c[k] / (PI * r).sqrt()
    }
}

fn circle_mode(r: f64, k: usize, sine: bool, a: f64) -> f64 {
    if k == 0 {
        1.0 / (2.0 * PI * r).sqrt()
    } else {
        let (s, c) = (k as f64 * a).sin_cos();
        (if sine { s } else { c }) / (PI * r).sqrt()
    }
}

fn eval_mode(m: &ManifoldSpec, mode: &Mode, x: &Point) -> f64 {
    match (m, mode, x) {
        (ManifoldSpec::Circle { radius }, Mode::Circle { k, sine }, Point::Circle(a)) => {
            circle_mode(*radius, *k, *sine, *a)
        }
        (ManifoldSpec::Sphere2 { radius }, Mode::Sphere { l, m }, Point::Sphere(v)) => {
            let y = real_harmonics(*l, *v);
            y[super::harmonics::harmonic_index(*l, *m)] / radius
        }
        (ManifoldSpec::FlatTorus { r1, r2 }, Mode::Torus { a, b }, Point::Torus(p)) => {
            circle_mode(*r1, a.0, a.1, p[0]) * circle_mode(*r2, b.0, b.1, p[1])
        }
        (ManifoldSpec::UnitDisk { scale }, Mode::Disk { k, zero, norm, sine }, Point::Disk { radius, angle }) => {
            let ang = if *k == 0 {
                1.0
            } else if *sine {
                (*k as f64 * angle).sin()
            } else {
                (*k as f64 * angle).cos()
            };
            norm * bessel_j(*k, zero * radius) * ang / scale
        }
        _ => f64::NAN,
    }
}

fn unsupported(m: &ManifoldSpec) -> FieldError {
    FieldError::Unsupported(format!("{} has no discrete Laplace spectrum", m.kind_name()))
}

/// The `count` lowest eigenpairs. Degenerate groups may be cut at the end.
pub fn spectrum(m: &ManifoldSpec, count: usize) -> Result<SpectrumSlice> {
    m.validate()?;
    if count == 0 {
        return Err(FieldError::Domain("spectrum needs at least one mode".into()));
    }
    let mut cut = match *m {
        ManifoldSpec::Circle { radius } => ((count / 2 + 1) as f64 / radius).powi(2),
        ManifoldSpec::Sphere2 { radius } => {
            let l = (count as f64).sqrt().ceil();
            l * (l + 1.0) / (radius * radius)
        }
        ManifoldSpec::FlatTorus { r1, r2 } => count as f64 / (PI * r1 * r2),
        ManifoldSpec::UnitDisk { scale } => (4.0 * count as f64 + 40.0) / (scale * scale),
        _ => return Err(unsupported(m)),
    };
    loop {
        let full = spectrum_below(m, cut)?;
        if full.len() >= count {
            let mut s = full;
            s.eigenvalues.truncate(count);
            s.modes.truncate(count);
            return Ok(s);
        }
        cut *= 1.5;
    }
}

/// Every eigenpair with `λ ≤ cut`; degenerate groups are always complete.
pub fn spectrum_below(m: &ManifoldSpec, cut: f64) -> Result<SpectrumSlice> {
    m.validate()?;
    let mut pairs: Vec<(f64, Mode)> = Vec::new();
    match *m {
        ManifoldSpec::Circle { radius } => {
            let kmax = (cut.max(0.0).sqrt() * radius).floor() as usize;
            pairs.push((0.0, Mode::Circle { k: 0, sine: false }));
            for k in 1..=kmax {
                let lam = (k as f64 / radius).powi(2);
                pairs.push((lam, Mode::Circle { k, sine: false }));
                pairs.push((lam, Mode::Circle { k, sine: true }));
            }
        }
        ManifoldSpec::Sphere2 { radius } => {
            let mut l = 0usize;
            loop {
                let lam = (l * (l + 1)) as f64 / (radius * radius);
                if lam > cut {
                    break;
                }
                for i in l * l..(l + 1) * (l + 1) {
                    let (_, mm) = harmonic_degree_order(i);
                    pairs.push((lam, Mode::Sphere { l, m: mm }));
                }
                l += 1;
            }
        }
        ManifoldSpec::FlatTorus { r1, r2 } => {
            let k1max = (cut.max(0.0).sqrt() * r1).floor() as usize;
            let k2max = (cut.max(0.0).sqrt() * r2).floor() as usize;
            let opts = |k: usize| if k == 0 { vec![(0, false)] } else { vec![(k, false), (k, true)] };
            for k1 in 0..=k1max {
                for k2 in 0..=k2max {
                    let lam = (k1 as f64 / r1).powi(2) + (k2 as f64 / r2).powi(2);
                    if lam > cut {
                        continue;
                    }
                    for a in opts(k1) {
                        for b in opts(k2) {
                            pairs.push((lam, Mode::Torus { a, b }));
                        }
                    }
                }
            }
        }
        ManifoldSpec::UnitDisk { scale } => {
            let ceiling = cut.max(0.0).sqrt() * scale;
            for (k, zero, norm) in disk_zeros(ceiling).iter() {
                let lam = (zero / scale).powi(2);
                pairs.push((lam, Mode::Disk { k: *k, zero: *zero, norm: *norm, sine: false }));
                if *k > 0 {
                    pairs.push((lam, Mode::Disk { k: *k, zero: *zero, norm: *norm, sine: true }));
                }
            }
        }
        _ => return Err(unsupported(m)),
    }
    // stable sort keeps each degenerate group contiguous and ordered
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (eigenvalues, modes) = pairs.into_iter().unzip();
    Ok(SpectrumSlice {
        manifold: *m,
        eigenvalues,
        modes,
    })
}

/// `(k, j_{k,l}, c_{k,l})` for all unit-disk zeros up to `ceiling`, with
/// `c_{0,l} = 1/(√π |J₁(j)|)` and `c_{k,l} = √2/(√π |J_{k+1}(j)|)`.
pub(crate) fn disk_zeros(ceiling: f64) -> Arc<Vec<(usize, f64, f64)>> {
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<Option<(f64, Arc<Vec<(usize, f64, f64)>>)>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| Mutex::new(None));
    {
        let guard = cell.lock().unwrap_or_else(|e| e.into_inner());
        if let Some((c, v)) = guard.as_ref() {
            if *c == ceiling {
                return Arc::clone(v);
            }
        }
    }
    let table = ZeroTable::cached(ceiling);
    let mut out = Vec::new();
    for (k, zs) in table.by_order.iter().enumerate() {
        for &j in zs.iter().take_while(|&&j| j <= ceiling) {
            let (_, jk1) = bessel_j_pair(k, j);
            let norm = if k == 0 { 1.0 } else { std::f64::consts::SQRT_2 } / (PI.sqrt() * jk1.abs());
            out.push((k, j, norm));
        }
    }
    let v = Arc::new(out);
    *cell.lock().unwrap_or_else(|e| e.into_inner()) = Some((ceiling, Arc::clone(&v)));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::sample_points;

    #[test]
    fn quoted_spectra() {
        let s = spectrum(&ManifoldSpec::sphere2(1.0).unwrap(), 9).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0]);
        let c = spectrum(&ManifoldSpec::circle(1.0).unwrap(), 7).unwrap();
        assert_eq!(c.eigenvalues(), &[0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0]);
        let d = spectrum(&ManifoldSpec::unit_disk(), 3).unwrap();
        assert!((d.eigenvalues()[0] - 5.783_185_962_946_784).abs() < 1e-10);
        assert!(d.eigenvalues()[0] > 0.0);
    }

    #[test]
    fn constant_mode_on_compact_kinds() {
        for m in [
            ManifoldSpec::circle(1.7).unwrap(),
            ManifoldSpec::sphere2(0.8).unwrap(),
            ManifoldSpec::flat_torus(1.0, 2.0).unwrap(),
        ] {
            let s = spectrum(&m, 5).unwrap();
            assert_eq!(s.eigenvalues()[0], 0.0);
            let x = sample_points(&m, 1, 3).pop().unwrap();
            let v = s.eigenfunction(0, &x).unwrap();
            assert!((v - m.volume().unwrap().powf(-0.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn torus_is_ordered_product() {
        let t = spectrum(&ManifoldSpec::flat_torus(1.0, 2.0).unwrap(), 12).unwrap();
        let ev = t.eigenvalues();
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(&ev[..5], &[0.0, 0.25, 0.25, 1.0, 1.0]);
    }

    #[test]
    fn evaluate_all_matches_single() {
        for m in [
            ManifoldSpec::circle(2.0).unwrap(),
            ManifoldSpec::sphere2(1.5).unwrap(),
            ManifoldSpec::flat_torus(1.0, 0.7).unwrap(),
            ManifoldSpec::UnitDisk { scale: 2.0 },
        ] {
            let s = spectrum(&m, 40).unwrap();
            for x in sample_points(&m, 3, 8) {
                let all = s.evaluate_all(&x).unwrap();
                for (k, v) in all.iter().enumerate() {
                    assert!((v - s.eigenfunction(k, &x).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn groups_are_complete_below_cut() {
        let d = spectrum_below(&ManifoldSpec::unit_disk(), 400.0).unwrap();
        for (lam, m) in d.eigenvalues().iter().zip(d.modes()) {
            if let Mode::Disk { k, .. } = m {
                let same = d.eigenvalues().iter().filter(|l| *l == lam).count();
                assert_eq!(same, if *k == 0 { 1 } else { 2 });
            }
        }
        assert!(spectrum(&ManifoldSpec::hyperbolic_plane(), 3).is_err());
    }

    #[test]
    fn monte_carlo_orthonormality() {
        // uniform volume sampling: ⟨φ_j, φ_k⟩ ≈ Vol · mean(φ_j φ_k)
        let n = 20_000;
        for m in [
            ManifoldSpec::circle(1.0).unwrap(),
            ManifoldSpec::sphere2(1.0).unwrap(),
            ManifoldSpec::flat_torus(1.0, 1.3).unwrap(),
            ManifoldSpec::unit_disk(),
        ] {
            let s = spectrum(&m, 8).unwrap();
            let vol = m.volume().unwrap();
            let vals: Vec<Vec<f64>> = sample_points(&m, n, 77)
                .iter()
                .map(|x| s.evaluate_all(x).unwrap())
                .collect();
            for j in 0..8 {
                for k in 0..8 {
                    let prods: Vec<f64> = vals.iter().map(|v| vol * v[j] * v[k]).collect();
                    let mean = prods.iter().sum::<f64>() / n as f64;
                    let var = prods.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                    let se = (var / n as f64).sqrt().max(1e-12);
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((mean - want).abs() <= 3.0 * se + 1e-12 || (mean - want).abs() < 1e-10,
                        "{} ⟨{j},{k}⟩ = {mean} ± {se}", m.kind_name());
                }
            }
        }
    }
}
