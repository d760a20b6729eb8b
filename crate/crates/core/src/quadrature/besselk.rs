//! `∫₀^∞ t^{ν−1} e^{−at − b/t} dt = 2 (b/a)^{ν/2} K_ν(2√(ab))` by the
//! trapezoid rule in `v = ln t`, which converges geometrically for this
//! doubly-exponentially decaying integrand.

use super::gamma;

/// `∫₀^∞ t^{ν−1} e^{−at − b/t} dt` for `a > 0, b ≥ 0`. Returns `+∞` when
/// `b = 0` and `ν ≤ 0`, and NaN outside the domain.
pub fn k_integral(nu: f64, a: f64, b: f64) -> f64 {
    if !(a > 0.0 && b >= 0.0 && nu.is_finite() && a.is_finite() && b.is_finite()) {
        return f64::NAN;
    }
    if b == 0.0 {
        return if nu > 0.0 { gamma(nu) * a.powf(-nu) } else { f64::INFINITY };
    }
    let z = 2.0 * (a * b).sqrt();
    // peak of νv − a e^v − b e^{−v}
    let root = (nu * nu + z * z).sqrt();
    let lead = if nu >= 0.0 { nu + root } else { z * z / (root - nu) };
    let peak = (lead / (2.0 * a)).ln();
    // strip half-width π/4: error ~ e^{−π²/2h} times e^{0.3(z + |ν|)} growth
    let h = (std::f64::consts::PI.powi(2) / (2.0 * (40.0 + 0.3 * (z + nu.abs())))).min(0.25);
    let phi = |v: f64| nu * v - a * v.exp() - b * (-v).exp();
    let top = phi(peak);
    let term = |v: f64| (phi(v) - top).exp();
    let mut acc = term(peak);
    for dir in [1.0, -1.0] {
        let mut k = 1.0;
        loop {
            let t = term(peak + dir * k * h);
            acc += t;
            if t < 1e-18 * acc || k > 1e6 {
                break;
            }
            k += 1.0;
        }
    }
    acc * h * top.exp()
}

/// Modified Bessel function of the second kind, `K_ν(z)` for `z > 0`.
pub fn bessel_k(nu: f64, z: f64) -> f64 {
    if !(z > 0.0) {
        return f64::NAN;
    }
    0.5 * k_integral(nu, 0.5 * z, 0.5 * z)
}
