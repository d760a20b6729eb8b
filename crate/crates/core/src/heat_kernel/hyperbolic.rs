//! Heat kernel of the hyperbolic plane (curvature −1).

use std::f64::consts::{PI, SQRT_2};

use crate::error::Result;
use crate::quadrature::integrate;

/// `ln sinh a` for `a > 0` without overflow.
pub(crate) fn ln_sinh(a: f64) -> f64 {
    if a > 20.0 {
        a - std::f64::consts::LN_2 + (-(-2.0 * a).exp()).ln_1p()
    } else {
        a.sinh().ln()
    }
}

/// `√2 e^{−t/4} (4πt)^{−3/2} ∫_ρ^∞ s e^{−s²/4t} / √(cosh s − cosh ρ) ds`.
///
/// With `s = ρ + u²` the inverse square root is absorbed:
/// `cosh(ρ+u²) − cosh ρ = 2 sinh(ρ + u²/2) sinh(u²/2)`. The Gaussian factor
/// `e^{−ρ²/4t}` is pulled out and the rest is integrated in log form.
/// Returns `(value, quadrature error, intervals)`.
pub(crate) fn mckean(t: f64, rho: f64, rel_tol: f64) -> Result<(f64, f64, usize)> {
    let upper = ((rho * rho + 200.0 * t).sqrt() - rho).sqrt();
    let f = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let u2 = u * u;
        let s = rho + u2;
        let lg = s.ln() - (2.0 * rho * u2 + u2 * u2) / (4.0 * t) + (2.0 * u).ln()
            - 0.5 * (std::f64::consts::LN_2 + ln_sinh(rho + 0.5 * u2) + ln_sinh(0.5 * u2));
        lg.exp()
    };
    // the integrand varies on the scale min(√t, ...) near u = 0; split there
    let knee = (t.sqrt()).min(upper * 0.5);
    let a = integrate(f, 0.0, knee, 0.0, rel_tol, 400)?;
    let b = integrate(f, knee, upper, 0.0, rel_tol, 400)?;
    let pre = SQRT_2 * (-t / 4.0 - rho * rho / (4.0 * t)).exp() / (4.0 * PI * t).powf(1.5);
    Ok((pre * (a.value + b.value), pre * (a.error + b.error), a.intervals + b.intervals))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sinh_branches_agree() {
        for a in [1e-8, 0.3, 5.0, 19.99, 20.01, 40.0] {
            assert!((ln_sinh(a) - a.sinh().ln()).abs() < 1e-13 * a.sinh().ln().abs().max(1.0));
        }
        assert!(ln_sinh(800.0).is_finite());
    }

    #[test]
    fn small_time_matches_flat_gaussian_at_origin() {
        // H_t(x,x) = (4πt)^{-1}(1 + t/3 ·(−1)·… ) → ratio → 1 as t → 0
        let t = 1e-4;
        let (v, _, _) = mckean(t, 0.0, 1e-12).unwrap();
        let ratio = v * 4.0 * PI * t;
        assert!((ratio - 1.0).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn direct_substitution_free_form() {
        // compare against a plain quadrature in s after removing the singularity analytically:
        // ∫_ρ^∞ g(s)/√(cosh s − cosh ρ) ds with s = ρ + w², done on a wide finite grid
        let (t, rho) = (0.7, 1.3);
        let g = |s: f64| s * (-s * s / (4.0 * t)).exp();
        let inner = integrate(
            |w: f64| {
                let s = rho + w * w;
                if w == 0.0 {
                    return 0.0;
                }
                // cosh s − cosh ρ without cancellation
                let gap = 2.0 * (rho + 0.5 * w * w).sinh() * (0.5 * w * w).sinh();
                2.0 * w * g(s) / gap.sqrt()
            },
            0.0,
            12.0,
            0.0,
            1e-13,
            2000,
        )
        .unwrap();
        let want = SQRT_2 * (-t / 4.0).exp() / (4.0 * PI * t).powf(1.5) * inner.value;
        let (got, _, _) = mckean(t, rho, 1e-12).unwrap();
        assert!(((got - want) / want).abs() < 1e-9, "{got} vs {want}");
    }
}
