//! Integer-order Bessel functions of the first kind and their zeros.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::quadrature::ln_gamma;

const SERIES_LIMIT: f64 = 4.0;
const BIG: f64 = 1e250;

/// `J_n(x)` for integer `n ≥ 0`.
///
/// Ascending series for `|x| ≤ 4`, Miller's backward recurrence normalised by
/// `J₀ + 2ΣJ_{2k} = 1` beyond. Relative accuracy is about 1e−14 away from
/// zeros of `J_n`.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(n, -x);
        return if n % 2 == 0 { v } else { -v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        series(n, x)
    } else {
        miller(n, x)[n]
    }
}

/// `(J_n(x), J_{n+1}(x))` from a single recurrence.
pub fn bessel_j_pair(n: usize, x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT || x < 0.0 {
        return (bessel_j(n, x), bessel_j(n + 1, x));
    }
    let v = miller(n + 1, x);
    (v[n], v[n + 1])
}

fn series(n: usize, x: f64) -> f64 {
    let h = 0.5 * x;
    let lead = (n as f64 * h.ln() - ln_gamma(n as f64 + 1.0)).exp();
    let q = -h * h;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// `J_0(x), …, J_nmax(x)` by downward recurrence.
fn miller(nmax: usize, x: f64) -> Vec<f64> {
    let top = (nmax as f64).max(x);
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as usize;
    start += start % 2;
    let mut out = vec![0.0; nmax + 1];
    let (mut above, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        // J_{k−1} = (2k/x) J_k − J_{k+1}
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        let idx = k - 1;
        if idx <= nmax {
            out[idx] = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > BIG {
            cur /= BIG;
            above /= BIG;
            norm /= BIG;
            for v in out.iter_mut().skip(idx) {
                *v /= BIG;
            }
        }
    }
    norm += cur;
    for v in &mut out {
        *v /= norm;
    }
    out
}

fn refine(k: usize, mut lo: f64, mut hi: f64) -> f64 {
    let f = |x: f64| bessel_j_pair(k, x);
    let (mut flo, _) = f(lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let (jk, jk1) = f(x);
        if jk == 0.0 {
            return x;
        }
        if (jk < 0.0) == (flo < 0.0) {
            lo = x;
            flo = jk;
        } else {
            hi = x;
        }
        let d = k as f64 / x * jk - jk1;
        let newton = x - jk / d;
        let next = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= 1e-15 * x || hi - lo <= 4.0 * f64::EPSILON * x {
            break;
        }
    }
    x
}

fn order_zero(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|l| {
            let b = (l as f64 - 0.25) * PI;
            let g = b + 1.0 / (8.0 * b);
            refine(0, g - 0.5, g + 0.5)
        })
        .collect()
}

fn next_order(k: usize, prev: &[f64]) -> Vec<f64> {
    prev.windows(2).map(|w| refine(k, w[0], w[1])).collect()
}

/// First `count` positive zeros of `J_k`, bracketed by interlacing with the
/// zeros of `J_{k−1}` from a McMahon start at order zero.
pub fn bessel_zeros(k: usize, count: usize) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    let mut z = order_zero(count + k);
    for order in 1..=k {
        z = next_order(order, &z);
    }
    z.truncate(count);
    z
}

/// Zeros `j_{k,l}` of every order up to a common ceiling, grouped by order.
#[derive(Debug, Clone)]
pub struct ZeroTable {
    pub ceiling: f64,
    /// `by_order[k]` lists the zeros of `J_k` that are `≤ ceiling`.
    pub by_order: Vec<Vec<f64>>,
}

impl ZeroTable {
    pub fn build(ceiling: f64) -> Self {
        // each order consumes one extra zero of its predecessor
        let orders = ceiling.max(1.0) as usize + 2;
        let mut count = 0;
        while (count as f64 + 0.75) * PI < ceiling + 1.0 {
            count += 1;
        }
        let mut z = order_zero(count + orders + 1);
        let mut by_order = Vec::new();
        for k in 0.. {
            if k > 0 {
                z = next_order(k, &z);
            }
            let below: Vec<f64> = z.iter().copied().take_while(|&j| j <= ceiling).collect();
            if below.is_empty() {
                break;
            }
            by_order.push(below);
        }
        ZeroTable { ceiling, by_order }
    }

    /// Shared table covering `ceiling`, grown on demand.
    pub fn cached(ceiling: f64) -> Arc<ZeroTable> {
        static CACHE: OnceLock<Mutex<Option<Arc<ZeroTable>>>> = OnceLock::new();
        let cell = CACHE.get_or_init(|| Mutex::new(None));
        let mut guard = cell.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = guard.as_ref() {
            if t.ceiling >= ceiling {
                return Arc::clone(t);
            }
        }
        let grown = Arc::new(ZeroTable::build(ceiling.max(guard.as_ref().map_or(0.0, |t| 2.0 * t.ceiling))));
        *guard = Some(Arc::clone(&grown));
        grown
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integral_oracle(n: usize, x: f64) -> f64 {
        // (1/π)∫₀^π cos(nτ − x sin τ) dτ; the trapezoid rule is spectrally accurate
        let m = 4000;
        let h = PI / m as f64;
        let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(PI));
        for i in 1..m {
            s += f(i as f64 * h);
        }
        s * h / PI
    }

    #[test]
    fn reference_values() {
        let table = [
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 1.0, 0.440_050_585_744_933_5),
            (0, 10.0, -0.245_935_764_451_348_34),
            (5, 3.3, 0.063_716_909_319_528_49),
            (20, 7.5, 6.296_090_828_476_519_6e-8),
            (3, 25.0, 0.108_343_081_061_508_9),
            (50, 60.0, -0.137_982_731_485_352_12),
            (100, 30.0, 4.578_801_528_175_244_5e-42),
            (0, 100.0, 0.019_985_850_304_223_122),
        ];
        for (n, x, want) in table {
            let got = bessel_j(n, x);
            assert!(((got - want) / want).abs() < 1e-12, "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn agrees_with_integral_representation() {
        for n in [0, 1, 2, 7, 15] {
            for x in [0.3, 2.0, 3.99, 4.01, 9.0, 17.5, 40.0] {
                let got = bessel_j(n, x);
                let want = integral_oracle(n, x);
                assert!((got - want).abs() < 1e-13, "J_{n}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn parity_and_pair() {
        assert!((bessel_j(3, -2.5) + bessel_j(3, 2.5)).abs() < 1e-16);
        assert_eq!(bessel_j(2, -2.5), bessel_j(2, 2.5));
        let (a, b) = bessel_j_pair(4, 11.0);
        assert!((a - bessel_j(4, 11.0)).abs() < 1e-15 && (b - bessel_j(5, 11.0)).abs() < 1e-15);
    }

    #[test]
    fn known_zeros() {
        let cases: [(usize, [f64; 3]); 4] = [
            (0, [2.404_825_557_695_773, 5.520_078_110_286_311, 8.653_727_912_911_012]),
            (1, [3.831_705_970_207_512, 7.015_586_669_815_619, 10.173_468_135_062_722]),
            (5, [8.771_483_815_959_954, 12.338_604_197_466_944, 15.700_174_079_711_671]),
            (20, [25.417_140_814_072_524, 29.961_603_791_625_156, 33.988_702_785_235_19]),
        ];
        for (k, want) in cases {
            let got = bessel_zeros(k, 3);
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-11, "j_{k}: {g} vs {w}");
                assert!(bessel_j(k, *g).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bisection_oracle_for_first_zeros() {
        for (k, lo, hi) in [(0usize, 2.0, 3.0), (1, 3.5, 4.2)] {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if (integral_oracle(k, m) < 0.0) == (integral_oracle(k, a) < 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            assert!((bessel_zeros(k, 1)[0] - 0.5 * (a + b)).abs() < 1e-10);
        }
    }

    #[test]
    fn interlacing() {
        for k in 0..12 {
            let a = bessel_zeros(k, 8);
            let b = bessel_zeros(k + 1, 8);
            for l in 0..7 {
                assert!(a[l] < b[l] && b[l] < a[l + 1], "k={k} l={l}");
            }
        }
    }

    #[test]
    fn table_matches_direct_zeros() {
        let t = ZeroTable::build(40.0);
        for (k, zs) in t.by_order.iter().enumerate() {
            let direct = bessel_zeros(k, zs.len() + 1);
            for (a, b) in zs.iter().zip(&direct) {
                assert!((a - b).abs() < 1e-11);
            }
            assert!(direct[zs.len()] > 40.0);
        }
        assert!(bessel_zeros(t.by_order.len(), 1)[0] > 40.0);
    }
}
