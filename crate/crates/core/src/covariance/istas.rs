//! Circle coefficients `d_k = √(−I_k) / (√(2π) |k|^{½+α})` with
//! `I_k = ∫₀^{|k|π} u^{2α} cos u du`, valid for `α ∈ (0, ½]`.

use std::f64::consts::PI;

use crate::error::{FieldError, Result};
use crate::quadrature::integrate;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(FieldError::Domain(format!("coefficients are defined for α in (0, 1/2], got {alpha}")))
    }
}

fn panel(alpha: f64, j: usize) -> Result<f64> {
    // u = jπ + v; ∫₀^π cos v = 0 lets the power be centred at c = (j+½)π,
    // leaving an integrand with small relative error
    let p = 2.0 * alpha;
    let c = (j as f64 + 0.5) * PI;
    let cp = c.powf(p);
    let g = |v: f64| cp * (p * ((v - 0.5 * PI) / c).ln_1p()).exp_m1() * v.cos();
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * integrate(g, 0.0, PI, 1e-300, 1e-14, 400)?.value)
}

fn coefficient(alpha: f64, k: usize, integral: f64, gross: f64) -> Result<f64> {
    let floor = 64.0 * f64::EPSILON * gross;
    let radicand = if -integral <= floor && -integral >= -floor { 0.0 } else { -integral };
    if radicand < 0.0 {
        return Err(FieldError::Domain(format!(
            "negative radicand {radicand:e} at k = {k}; α = {alpha} lies outside the valid range"
        )));
    }
    Ok(radicand.sqrt() / ((2.0 * PI).sqrt() * (k as f64).powf(0.5 + alpha)))
}

/// `d_k` for a single nonzero `k`; `d_{−k} = d_k`.
pub fn istas_coefficient(k: i64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if k == 0 {
        return Err(FieldError::Domain("k must be nonzero".into()));
    }
    let n = k.unsigned_abs() as usize;
    Ok(*istas_coefficients(alpha, n)?.last().expect("n ≥ 1"))
}

/// `d_1, …, d_K`, accumulating `I_k` panel by panel.
pub fn istas_coefficients(alpha: f64, kmax: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let mut out = Vec::with_capacity(kmax);
    let (mut acc, mut gross) = (0.0, 0.0);
    for k in 1..=kmax {
        let v = panel(alpha, k - 1)?;
        acc += v;
        // ∫|u^{2α} cos u| over the panel is at most 2 ((j+1)π)^{2α}
        gross += 2.0 * (k as f64 * PI).powf(2.0 * alpha);
        out.push(coefficient(alpha, k, acc, gross)?);
    }
    Ok(out)
}
