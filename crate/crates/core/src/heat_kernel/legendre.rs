use crate::error::{domain, Result};

/// Legendre polynomial `P_k(u)` by the three-term recurrence.
pub fn legendre_p(k: usize, u: f64) -> Result<f64> {
    if !(u.abs() <= 1.0) {
        return domain(format!("Legendre argument must lie in [-1, 1], got {u}"));
    }
    Ok(LegendreSeq::new(u).nth(k).unwrap_or(0.0))
}

/// `P_0(u), P_1(u), …` generated lazily.
#[derive(Debug, Clone)]
pub struct LegendreSeq {
    u: f64,
    prev: f64,
    cur: f64,
    l: usize,
}

impl LegendreSeq {
    pub fn new(u: f64) -> Self {
        LegendreSeq {
            u,
            prev: 0.0,
            cur: 1.0,
            l: 0,
        }
    }
}

impl Iterator for LegendreSeq {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let l = self.l as f64;
        // (l+1) P_{l+1} = (2l+1) u P_l − l P_{l−1}
        let next = ((2.0 * l + 1.0) * self.u * self.cur - l * self.prev) / (l + 1.0);
        self.prev = self.cur;
        self.cur = next;
        self.l += 1;
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_values() {
        for u in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            assert_eq!(legendre_p(0, u).unwrap(), 1.0);
        }
        for k in 0..=10 {
            assert!((legendre_p(k, 1.0).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!((legendre_p(2, 0.5).unwrap() + 0.125).abs() < 1e-15);
        assert!(legendre_p(3, 1.01).is_err());
    }

    #[test]
    fn closed_forms_and_bound() {
        for u in [-0.9f64, -0.2, 0.35, 0.77] {
            let p3 = 0.5 * (5.0 * u * u * u - 3.0 * u);
            let p4 = (35.0 * u.powi(4) - 30.0 * u * u + 3.0) / 8.0;
            assert!((legendre_p(3, u).unwrap() - p3).abs() < 1e-15);
            assert!((legendre_p(4, u).unwrap() - p4).abs() < 1e-15);
            assert!(LegendreSeq::new(u).take(500).all(|p| p.abs() <= 1.0 + 1e-12));
        }
        for k in 0..20 {
            let want = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((legendre_p(k, -1.0).unwrap() - want).abs() < 1e-13);
        }
    }
}
