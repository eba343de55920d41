//! Machine-readable report types.

use serde::{Deserialize, Serialize};

/// One verified quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Exact values as `p/q`, numeric values in decimal.
    pub value: String,
    pub reference: String,
    /// 0 for exact comparisons.
    pub tolerance: f64,
    /// Absolute error of numeric checks.
    pub error: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn exact(name: impl Into<String>, value: impl ToString, reference: impl ToString) -> Self {
        let (value, reference) = (value.to_string(), reference.to_string());
        let passed = value == reference;
        Check { name: name.into(), value, reference, tolerance: 0.0, error: None, passed }
    }

    pub fn numeric(name: impl Into<String>, value: String, reference: String, error: f64, tolerance: f64) -> Self {
        let passed = error.is_finite() && error <= tolerance;
        Check { name: name.into(), value, reference, tolerance, error: Some(error), passed }
    }

    pub fn failed(name: impl Into<String>, reason: impl ToString) -> Self {
        Check {
            name: name.into(),
            value: reason.to_string(),
            reference: String::new(),
            tolerance: 0.0,
            error: None,
            passed: false,
        }
    }
}

/// Result of one verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: &str, checks: Vec<Check>) -> Self {
        SuiteReport { suite: suite.to_string(), passed: checks.iter().all(|c| c.passed), checks }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn plain(&self) -> String {
        let mut out = String::new();
        for c in self.failures() {
            out.push_str(&format!("FAIL {}: {} vs {}", c.name, c.value, c.reference));
            if let Some(e) = c.error {
                out.push_str(&format!(" (error {e:.3e}, tolerance {:.1e})", c.tolerance));
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "{} {}: {}/{} checks passed\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.checks.len() - failed,
            self.checks.len()
        ));
        out
    }
}
