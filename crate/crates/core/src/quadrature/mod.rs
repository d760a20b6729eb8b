//! Power-weighted improper integrals `∫₀^∞ t^{s−1} w(t) f(t) dt`.
//!
//! Both half-lines are handled in the log variable `t = e^v`, where the
//! integrand becomes `G(v) = e^{sv} w(e^v) f(e^v)`. Unit panels are marched
//! outward from `ln T₀`, each integrated by adaptive Gauss–Kronrod. A side stops
//! when its panel sums fall below the tolerance budget with a geometric tail
//! bound, or when the panel ratio has settled enough to sum the remaining
//! tail in closed form. Toward `t → ∞` a doubling probe flags integrands that
//! do not decay.

mod besselk;
mod gamma;
mod kronrod;
mod mellin;

use std::cell::Cell;

use serde::Serialize;

pub use besselk::{bessel_k, k_integral};
pub use gamma::{gamma, gamma_q, ln_gamma};
pub use kronrod::{integrate, Adaptive};
pub use mellin::{mellin_reference, mellin_integrand};

use crate::error::{FieldError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    None,
    /// `e^{−t}`
    ExpDecay,
}

/// Controls for the outward panel march.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPolicy {
    /// Panel width in `v = ln t`.
    pub panel_width: f64,
    /// The divergence probe is consulted only for `ln t` beyond this.
    pub probe_from: f64,
    /// Give up once `|ln t − ln T₀|` exceeds this.
    pub max_log_time: f64,
    /// Allow closed-form summation of a settled geometric tail.
    pub extrapolate: bool,
    pub max_panel_intervals: usize,
}

impl Default for TailPolicy {
    fn default() -> Self {
        TailPolicy {
            panel_width: 1.0,
            probe_from: 30.0,
            max_log_time: 200.0,
            extrapolate: true,
            max_panel_intervals: 200,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PowerWeightedIntegral<F> {
    pub s: f64,
    pub weight: Weight,
    pub f: F,
    pub split: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub tail: TailPolicy,
    /// Divide the result by `Γ(s)`.
    pub normalize: bool,
}

impl<F: Fn(f64) -> f64> PowerWeightedIntegral<F> {
    pub fn new(s: f64, f: F) -> Self {
        PowerWeightedIntegral {
            s,
            weight: Weight::None,
            f,
            split: 1.0,
            rel_tol: 1e-9,
            abs_tol: 0.0,
            tail: TailPolicy::default(),
            normalize: false,
        }
    }

    pub fn weight(mut self, w: Weight) -> Self {
        self.weight = w;
        self
    }

    pub fn split(mut self, t0: f64) -> Self {
        self.split = t0;
        self
    }

    pub fn tolerance(mut self, rel: f64) -> Self {
        self.rel_tol = rel;
        self
    }

    pub fn abs_tolerance(mut self, abs: f64) -> Self {
        self.abs_tol = abs;
        self
    }

    pub fn tail(mut self, tail: TailPolicy) -> Self {
        self.tail = tail;
        self
    }

    pub fn normalized(mut self) -> Self {
        self.normalize = true;
        self
    }

    pub fn integrate(&self) -> Result<IntegralResult> {
        integrate_power_weighted(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Converged { value: f64 },
    /// The tail failed to decay; `log_time` is where the probe fired.
    Divergent { log_time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub outcome: Outcome,
    pub error_estimate: f64,
    pub subintervals: usize,
    pub evaluations: usize,
}

impl IntegralResult {
    pub fn value(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Converged { value } => Some(value),
            Outcome::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.outcome, Outcome::Divergent { .. })
    }
}

#[derive(Default)]
struct Side {
    total: f64,
    abs_total: f64,
    error: f64,
    intervals: usize,
    panels: Vec<f64>,
    done: bool,
}

impl Side {
    fn push(&mut self, a: &Adaptive) {
        self.total += a.value;
        self.abs_total += a.value.abs();
        self.error += a.error;
        self.intervals += a.intervals;
        self.panels.push(a.value);
    }
}

pub fn integrate_power_weighted<F: Fn(f64) -> f64>(
    spec: &PowerWeightedIntegral<F>,
) -> Result<IntegralResult> {
    let s = spec.s;
    if !(s > 0.0 && s.is_finite()) {
        return Err(FieldError::Domain(format!("exponent must be positive, got {s}")));
    }
    if !(spec.rel_tol > 0.0) || spec.abs_tol < 0.0 {
        return Err(FieldError::Domain("tolerances must be positive".into()));
    }
    if !(spec.split > 0.0 && spec.split.is_finite()) {
        return Err(FieldError::Domain(format!("split point must be positive, got {}", spec.split)));
    }
    let pol = spec.tail;
    let evals = Cell::new(0usize);
    let g = |v: f64| -> f64 {
        evals.set(evals.get() + 1);
        let t = v.exp();
        let w = match spec.weight {
            Weight::None => 1.0,
            Weight::ExpDecay => (-t).exp(),
        };
        if w == 0.0 {
            return 0.0;
        }
        let x = (s * v).exp() * w * (spec.f)(t);
        if x.is_finite() {
            x
        } else {
            f64::NAN
        }
    };
    let v0 = spec.split.ln();
    let h = pol.panel_width;
    let rel = 0.1 * spec.rel_tol;
    let panel = |lo: f64, hi: f64, abs: f64| integrate(&g, lo, hi, abs, rel, pol.max_panel_intervals);

    let mut left = Side::default();
    let mut right = Side::default();
    left.push(&panel(v0 - h, v0, 0.1 * spec.abs_tol)?);
    right.push(&panel(v0, v0 + h, 0.1 * spec.abs_tol)?);

    let mut tail_err = 0.0;
    let mut k = 1usize;
    loop {
        let scale = scale_of(&left, &right);
        let budget = (0.1 * spec.rel_tol * scale).max(0.1 * spec.abs_tol);
        let abs = (0.02 * spec.rel_tol * scale).max(0.1 * spec.abs_tol);
        let reach = k as f64 * h;
        if !left.done {
            let hi = v0 - reach;
            left.push(&panel(hi - h, hi, abs)?);
            if let Some(t) = settle(&left.panels, budget, pol.extrapolate) {
                left.total += t.0;
                tail_err += t.1;
                left.done = true;
            }
        }
        if !right.done {
            let lo = v0 + reach;
            right.push(&panel(lo, lo + h, abs)?);
            if let Some(t) = settle(&right.panels, budget, pol.extrapolate) {
                right.total += t.0;
                tail_err += t.1;
                right.done = true;
            } else if lo + h >= pol.probe_from && diverging(&g, lo + h) {
                return Ok(IntegralResult {
                    outcome: Outcome::Divergent { log_time: lo + h },
                    error_estimate: f64::INFINITY,
                    subintervals: left.intervals + right.intervals,
                    evaluations: evals.get(),
                });
            }
        }
        if left.done && right.done {
            break;
        }
        if reach + h > pol.max_log_time {
            return Err(FieldError::Quadrature {
                message: format!("tail did not settle within |ln t − ln T₀| ≤ {}", pol.max_log_time),
                error_estimate: left.error + right.error,
            });
        }
        k += 1;
    }

    let mut value = left.total + right.total;
    let mut error = left.error + right.error + tail_err;
    let scale = scale_of(&left, &right);
    if error > (spec.rel_tol * scale).max(spec.abs_tol) {
        return Err(FieldError::Quadrature {
            message: format!("error estimate {error:e} above tolerance for value {value:e}"),
            error_estimate: error,
        });
    }
    if spec.normalize {
        let gs = gamma(s);
        value /= gs;
        error /= gs;
    }
    Ok(IntegralResult {
        outcome: Outcome::Converged { value },
        error_estimate: error,
        subintervals: left.intervals + right.intervals,
        evaluations: evals.get(),
    })
}

/// Reference magnitude for relative tolerances. Under heavy cancellation
/// between panels the total alone is not a meaningful yardstick.
fn scale_of(l: &Side, r: &Side) -> f64 {
    (l.total + r.total).abs().max(1e-3 * (l.abs_total + r.abs_total))
}

/// Decides whether a side can stop; returns `(tail added, tail error)`.
fn settle(p: &[f64], budget: f64, extrapolate: bool) -> Option<(f64, f64)> {
    let n = p.len();
    if n < 3 {
        return None;
    }
    let (c, b, a) = (p[n - 1], p[n - 2], p[n - 3]);
    if c == 0.0 && b == 0.0 && a == 0.0 {
        return Some((0.0, 0.0));
    }
    if b == 0.0 || a == 0.0 {
        return None;
    }
    let q = (c / b).abs();
    let q_prev = (b / a).abs();
    if q < 0.9 && q_prev < 1.0 {
        let bound = c.abs() * q / (1.0 - q);
        if c.abs() + bound <= budget {
            return Some((0.0, bound));
        }
    }
    if extrapolate {
        let (q1, q0) = (c / b, b / a);
        if q1 > 0.0 && q1 < 1.0 && q0 > 0.0 && q0 < 1.0 {
            let dq = (q1 - q0).abs();
            if dq <= 0.01 * (1.0 - q1) {
                let tail = c * q1 / (1.0 - q1);
                let err = c.abs() * 2.0 * dq / ((1.0 - q1) * (1.0 - q1));
                if err <= budget {
                    return Some((tail, err));
                }
            }
        }
    }
    None
}

/// Three consecutive doublings of `t` without the log-variable integrand
/// dropping by at least the factor `1 − 1/v`.
fn diverging<G: Fn(f64) -> f64>(g: &G, v: f64) -> bool {
    let step = std::f64::consts::LN_2;
    let mut prev = g(v).abs();
    if prev == 0.0 || !prev.is_finite() {
        return false;
    }
    for j in 1..=3 {
        let vj = v + j as f64 * step;
        let cur = g(vj).abs();
        if !(cur >= (1.0 - 1.0 / (vj - step)) * prev) {
            return false;
        }
        prev = cur;
    }
    true
}
