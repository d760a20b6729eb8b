//! Real orthonormal spherical harmonics on the unit sphere.

use std::f64::consts::PI;

/// Index of `Y_{l,m}` in the flat layout: degree blocks of length `2l+1`,
/// ordered `m = 0, (1, cos), (1, sin), (2, cos), …`.
pub fn harmonic_index(l: usize, m: i64) -> usize {
    let base = l * l;
    match m {
        0 => base,
        m if m > 0 => base + 2 * m as usize - 1,
        m => base + 2 * (-m) as usize,
    }
}

/// Inverse of [`harmonic_index`].
pub fn harmonic_degree_order(k: usize) -> (usize, i64) {
    let l = (k as f64).sqrt() as usize;
    let l = if (l + 1) * (l + 1) <= k { l + 1 } else if l * l > k { l - 1 } else { l };
    let off = k - l * l;
    let m = if off == 0 {
        0
    } else if off % 2 == 1 {
        off.div_ceil(2) as i64
    } else {
        -((off / 2) as i64)
    };
    (l, m)
}

/// All `Y_{l,m}(v)` for `l ≤ lmax` at the unit vector `v`.
pub fn real_harmonics(lmax: usize, v: [f64; 3]) -> Vec<f64> {
    let mut out = vec![0.0; (lmax + 1) * (lmax + 1)];
    let ct = v[2].clamp(-1.0, 1.0);
    let st = v[0].hypot(v[1]);
    let phi = v[1].atan2(v[0]);
    let mut pmm = (0.25 / PI).sqrt();
    let (mut cm, mut sm) = (1.0, 0.0);
    let (c1, s1) = (phi.cos(), phi.sin());
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * st;
            let c = cm * c1 - sm * s1;
            sm = sm * c1 + cm * s1;
            cm = c;
        }
        let put = |out: &mut [f64], l: usize, p: f64| {
            if m == 0 {
                out[harmonic_index(l, 0)] = p;
            } else {
                out[harmonic_index(l, m as i64)] = std::f64::consts::SQRT_2 * p * cm;
                out[harmonic_index(l, -(m as i64))] = std::f64::consts::SQRT_2 * p * sm;
            }
        };
        put(&mut out, m, pmm);
        if m == lmax {
            break;
        }
        let mf = m as f64;
        let mut p_prev = pmm;
        let mut p_cur = (2.0 * mf + 3.0).sqrt() * ct * pmm;
        put(&mut out, m + 1, p_cur);
        let mut a_prev = ((4.0 * (mf + 1.0).powi(2) - 1.0) / ((mf + 1.0).powi(2) - mf * mf)).sqrt();
        for l in m + 2..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let p = a * (ct * p_cur - p_prev / a_prev);
            p_prev = p_cur;
            p_cur = p;
            a_prev = a;
            put(&mut out, l, p);
        }
    }
    out
}
