//! Validation reports shared by group, brace, quandle and biquandle checks.

use serde::Serialize;

use crate::element::Element;

/// How an axiom suite is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CheckMode {
    /// Every tuple of a finite carrier.
    Exhaustive,
    /// `count` seeded random tuples, equality within `tolerance`.
    Sampled {
        count: usize,
        tolerance: f64,
        seed: u64,
    },
}

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

impl CheckMode {
    pub fn sampled(count: usize, tolerance: f64) -> Self {
        CheckMode::Sampled {
            count,
            tolerance,
            seed: 0,
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            CheckMode::Exhaustive => 0.0,
            CheckMode::Sampled { tolerance, .. } => *tolerance,
        }
    }
}

impl Default for CheckMode {
    fn default() -> Self {
        CheckMode::sampled(DEFAULT_SAMPLES, DEFAULT_TOLERANCE)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: Vec<Element>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl Violation {
    pub fn finite(axiom: impl Into<String>, witness: &[usize]) -> Self {
        Violation {
            axiom: axiom.into(),
            witness: witness.iter().map(|&i| Element::Index(i)).collect(),
            residual: None,
        }
    }

    pub fn sampled(axiom: impl Into<String>, witness: Vec<Element>, residual: f64) -> Self {
        Violation {
            axiom: axiom.into(),
            witness,
            residual: Some(residual),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    /// Largest residual seen over all sampled checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport {
            valid: true,
            violations: Vec::new(),
            max_residual: None,
        }
    }

    pub fn push(&mut self, v: Violation) {
        self.valid = false;
        self.violations.push(v);
    }

    pub fn record_residual(&mut self, r: f64) {
        let cur = self.max_residual.unwrap_or(0.0);
        self.max_residual = Some(if r.is_nan() { f64::NAN } else { cur.max(r) });
    }

    /// Folds another report into this one, prefixing its axiom names.
    pub fn merge(&mut self, prefix: &str, other: ValidationReport) {
        for mut v in other.violations {
            if !prefix.is_empty() {
                v.axiom = format!("{prefix}{}", v.axiom);
            }
            self.push(v);
        }
        if let Some(r) = other.max_residual {
            self.record_residual(r);
        }
    }

    pub fn has(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub(crate) fn first_summary(&self) -> String {
        self.violations
            .first()
            .map(|v| format!("{} at {:?}", v.axiom, v.witness))
            .unwrap_or_else(|| "none".to_string())
    }
}

/// Tracks the worst sampled residual of one named property.
pub(crate) struct SampledCheck<'a> {
    axiom: &'a str,
    tolerance: f64,
    worst: Option<(f64, Vec<Element>)>,
    max: f64,
}

impl<'a> SampledCheck<'a> {
    pub fn new(axiom: &'a str, tolerance: f64) -> Self {
        SampledCheck {
            axiom,
            tolerance,
            worst: None,
            max: 0.0,
        }
    }

    pub fn observe(&mut self, residual: f64, witness: impl FnOnce() -> Vec<Element>) {
        let bad = !(residual <= self.tolerance);
        if residual > self.max || residual.is_nan() {
            self.max = residual;
        }
        // Keep the first failing sample so reports are reproducible.
        if bad && self.worst.is_none() {
            self.worst = Some((residual, witness()));
        }
    }

    pub fn finish(self, report: &mut ValidationReport) {
        report.record_residual(self.max);
        if let Some((r, w)) = self.worst {
            report.push(Violation::sampled(self.axiom, w, r));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut r = ValidationReport::new();
        r.push(Violation::finite("associativity", &[1, 1, 2]));
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["valid"], false);
        assert_eq!(js["violations"][0]["axiom"], "associativity");
        assert_eq!(js["violations"][0]["witness"], serde_json::json!([1, 1, 2]));
        assert!(js.get("max_residual").is_none());
    }

    #[test]
    fn nan_residual_is_a_violation() {
        let mut r = ValidationReport::new();
        let mut c = SampledCheck::new("ybe", 1e-9);
        c.observe(f64::NAN, Vec::new);
        c.finish(&mut r);
        assert!(!r.valid);
    }
}
