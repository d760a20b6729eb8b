//! Pass/fail records for property checks.

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub pass: bool,
    /// Measured deviation, in the units of `threshold`.
    pub deviation: f64,
    pub threshold: f64,
    /// Tag of the result the property restates.
    pub citation: String,
    /// SHA-256 of the canonical input description.
    pub inputs_digest: String,
    /// Secondary measurements shown alongside the verdict.
    pub details: BTreeMap<String, f64>,
}

impl PropertyReport {
    pub fn new(name: &str, pass: bool, deviation: f64, threshold: f64, citation: &str, inputs_digest: String) -> Self {
        PropertyReport {
            name: name.to_string(),
            pass,
            deviation,
            threshold,
            citation: citation.to_string(),
            inputs_digest,
            details: BTreeMap::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }
}

/// Hex SHA-256 of the `Debug` rendering, which prints floats in shortest
/// round-trip form and is therefore stable across runs.
pub fn digest<T: Debug + ?Sized>(inputs: &T) -> String {
    Sha256::digest(format!("{inputs:?}").as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
