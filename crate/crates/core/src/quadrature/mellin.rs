use super::gamma;
use crate::error::{FieldError, Result};

/// `F_a(t) = 1[t ≥ a] − e^{−‖x‖²/4t} − e^{−‖y‖²/4t} + e^{−‖x−y‖²/4t}`.
pub fn mellin_integrand(a: f64, nx: f64, ny: f64, nxy: f64) -> impl Fn(f64) -> f64 + Copy {
    move |t: f64| {
        let x = |r: f64| -(r * r) / (4.0 * t);
        if t >= a {
            // 1 − e^{−A} − e^{−B} + e^{−C} without cancelling against the step
            -x(nx).exp_m1() - x(ny).exp_m1() + x(nxy).exp_m1()
        } else {
            -x(nx).exp() - x(ny).exp() + x(nxy).exp()
        }
    }
}

/// Closed form of `∫₀^∞ t^{s−1} F_a(t) dt` for `0 < s < 1`.
///
/// The value is continued analytically from `−1 < s < 0`, where the step
/// contributes `∫_a^∞ t^{s−1} dt = −a^s/s`. Hence the leading term is
/// `−a^s/s`; a plain `+a^s/s` does not match direct quadrature.
pub fn mellin_reference(s: f64, a: f64, nx: f64, ny: f64, nxy: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(FieldError::Domain(format!("Mellin exponent must lie in (0, 1), got {s}")));
    }
    if !(a > 0.0) || nx < 0.0 || ny < 0.0 || nxy < 0.0 {
        return Err(FieldError::Domain("need a > 0 and nonnegative distances".into()));
    }
    let p = |r: f64| if r == 0.0 { 0.0 } else { r.powf(2.0 * s) };
    Ok(-a.powf(s) / s + (-p(nx) - p(ny) + p(nxy)) * gamma(-s) / 4f64.powf(s))
}
