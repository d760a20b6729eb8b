//! Existence classification from declarative geometry data.
//!
//! Each rule reads only [`GeometryInfo`] and [`Compactness`]; rules are tried
//! in order and the first that applies decides. Citations are short tags
//! naming the result relied on.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::FieldKind;
use crate::manifold::{Compactness, GeometryInfo, KernelDecay, ManifoldSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExistenceStatus {
    Exists,
    NotExists,
    /// No rule covers the geometry.
    Unclassified,
}

impl fmt::Display for ExistenceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExistenceStatus::Exists => "exists",
            ExistenceStatus::NotExists => "does not exist",
            ExistenceStatus::Unclassified => "not covered",
        })
    }
}

pub mod citation {
    pub const BESSEL_UNIVERSAL: &str = "bessel-any-complete-manifold";
    pub const COMPACT: &str = "compact-manifold";
    pub const REGULAR_DOMAIN: &str = "regular-domain";
    pub const FINITE_VOLUME_GAP: &str = "finite-volume-spectral-gap";
    pub const NONNEGATIVE_RICCI: &str = "nonnegative-ricci-power-decay";
    pub const CYLINDER_OBSTRUCTION: &str = "cylinder-explicit-divergence";
    pub const EXPONENTIAL_DECAY: &str = "hyperbolic-kernel-decay";
    pub const NONE: &str = "none";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceVerdict {
    pub status: ExistenceStatus,
    /// Open interval of `α` on which the field exists under the rule used.
    pub alpha_range: Option<(f64, f64)>,
    pub citation: String,
    pub manifold: String,
    pub field: FieldKind,
    pub alpha: f64,
}

impl ExistenceVerdict {
    pub fn exists(&self) -> bool {
        self.status == ExistenceStatus::Exists
    }
}

impl fmt::Display for ExistenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} field of order {} {} on {}", self.field, self.alpha, self.status, self.manifold)?;
        if let Some((a, b)) = self.alpha_range {
            write!(f, " (exists for α in ({a}, {b}))")?;
        }
        write!(f, " [{}]", self.citation)
    }
}

/// Outcome of one rule: status, existence range, citation.
type RuleOutcome = (ExistenceStatus, Option<(f64, f64)>, &'static str);

/// `(kind, α, geometry, compactness) ↦ Some(outcome)` when the rule applies.
type Rule = fn(FieldKind, f64, &GeometryInfo, Compactness) -> Option<RuleOutcome>;

fn within(alpha: f64, hi: f64) -> ExistenceStatus {
    if alpha > 0.0 && alpha < hi {
        ExistenceStatus::Exists
    } else {
        ExistenceStatus::NotExists
    }
}

const FULL: Option<(f64, f64)> = Some((0.0, 1.0));

fn bessel(kind: FieldKind, _: f64, _: &GeometryInfo, _: Compactness) -> Option<RuleOutcome> {
    (kind == FieldKind::Bessel).then_some((ExistenceStatus::Exists, FULL, citation::BESSEL_UNIVERSAL))
}

fn compact(kind: FieldKind, _: f64, _: &GeometryInfo, c: Compactness) -> Option<RuleOutcome> {
    (c == Compactness::Compact).then(|| match kind {
        FieldKind::Riesz => (ExistenceStatus::Exists, FULL, citation::COMPACT),
        _ => (ExistenceStatus::NotExists, None, citation::COMPACT),
    })
}

fn regular_domain(_: FieldKind, _: f64, _: &GeometryInfo, c: Compactness) -> Option<RuleOutcome> {
    (c == Compactness::RegularDomain).then_some((ExistenceStatus::Exists, FULL, citation::REGULAR_DOMAIN))
}

fn finite_volume_gap(kind: FieldKind, _: f64, g: &GeometryInfo, c: Compactness) -> Option<RuleOutcome> {
    let applies = c == Compactness::NonCompact && g.finite_volume && g.spectral_floor.is_some_and(|l| l > 0.0);
    applies.then(|| match kind {
        FieldKind::Riesz => (ExistenceStatus::Exists, FULL, citation::FINITE_VOLUME_GAP),
        _ => (ExistenceStatus::NotExists, None, citation::FINITE_VOLUME_GAP),
    })
}

/// An explicit divergence computation overrides the sufficient conditions.
fn obstruction(kind: FieldKind, alpha: f64, g: &GeometryInfo, _: Compactness) -> Option<RuleOutcome> {
    let from = g.riesz_obstruction?;
    (kind == FieldKind::Riesz && alpha >= from)
        .then_some((ExistenceStatus::NotExists, Some((0.0, from)), citation::CYLINDER_OBSTRUCTION))
}

fn nonnegative_ricci(kind: FieldKind, alpha: f64, g: &GeometryInfo, c: Compactness) -> Option<RuleOutcome> {
    if c != Compactness::NonCompact || g.ricci_lower_bound < 0.0 {
        return None;
    }
    let KernelDecay::Power { shift } = g.decay else {
        return None;
    };
    if kind == FieldKind::StationaryRiesz {
        return Some((ExistenceStatus::NotExists, None, citation::NONNEGATIVE_RICCI));
    }
    // H_t = O(t^{-(d/2 - β)}) with β = −shift, and volume growth ≤ r^{d − 2β}
    let beta = -shift;
    if !(0.0..1.0).contains(&beta) {
        return None;
    }
    let growth_ok = g.volume_growth.is_some_and(|v| v <= g.dim - 2.0 * beta + 1e-12);
    growth_ok.then(|| (within(alpha, 1.0 - beta), Some((0.0, 1.0 - beta)), citation::NONNEGATIVE_RICCI))
}

fn exponential_decay(_: FieldKind, _: f64, g: &GeometryInfo, c: Compactness) -> Option<RuleOutcome> {
    // exponential decay beats t^{-(d/2+β)} for every β, so min(β, 1) = 1
    match g.decay {
        KernelDecay::Exponential { rate } if rate > 0.0 && c == Compactness::NonCompact => {
            Some((ExistenceStatus::Exists, FULL, citation::EXPONENTIAL_DECAY))
        }
        _ => None,
    }
}

const RULES: [Rule; 7] = [
    bessel,
    compact,
    regular_domain,
    finite_volume_gap,
    obstruction,
    nonnegative_ricci,
    exponential_decay,
];

/// Classifies whether the field `kind` of order `alpha` exists on `m`.
pub fn classify(m: &ManifoldSpec, kind: FieldKind, alpha: f64) -> ExistenceVerdict {
    let verdict = |status, alpha_range, cite: &str| ExistenceVerdict {
        status,
        alpha_range,
        citation: cite.to_string(),
        manifold: m.kind_name().to_string(),
        field: kind,
        alpha,
    };
    if !(alpha > 0.0 && alpha < 1.0) {
        return verdict(ExistenceStatus::NotExists, None, "order-outside-unit-interval");
    }
    let g = m.geometry();
    let c = m.compactness();
    for rule in RULES {
        if let Some((status, range, cite)) = rule(kind, alpha, &g, c) {
            return verdict(status, range, cite);
        }
    }
    verdict(ExistenceStatus::Unclassified, None, citation::NONE)
}
