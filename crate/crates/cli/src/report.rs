use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    pub residual: f64,
    /// Reported-only checks are printed but never fail the run.
    #[serde(skip)]
    pub reported_only: bool,
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub title: String,
    checks: Vec<(String, Check)>,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), checks: Vec::new() }
    }

    /// Asserted check: passes when `residual < tolerance`.
    pub fn assert_below(&mut self, name: &str, value: f64, residual: f64, tolerance: f64) {
        let pass = residual.is_finite() && residual < tolerance;
        self.push(name, Check { pass, value, tolerance, residual, reported_only: false });
    }

    pub fn assert_with(&mut self, name: &str, value: f64, residual: f64, tolerance: f64, pass: bool) {
        self.push(name, Check { pass, value, tolerance, residual, reported_only: false });
    }

    pub fn report(&mut self, name: &str, value: f64, residual: f64, tolerance: f64) {
        self.push(name, Check { pass: true, value, tolerance, residual, reported_only: true });
    }

    fn push(&mut self, name: &str, check: Check) {
        self.checks.push((name.to_string(), check));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, c)| c.reported_only || c.pass)
    }

    pub fn to_json(&self) -> String {
        let map: BTreeMap<&str, &Check> = self.checks.iter().map(|(n, c)| (n.as_str(), c)).collect();
        let mut s = serde_json::to_string_pretty(&map).unwrap_or_else(|_| "{}".into());
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.title);
        let width = self.checks.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        for (name, c) in &self.checks {
            let status = match (c.reported_only, c.pass) {
                (true, _) => "INFO",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            let _ = writeln!(
                s,
                "[{status}] {name:<width$}  value {:>+.9e}  residual {:.3e}  tol {:.1e}",
                c.value, c.residual, c.tolerance
            );
        }
        let _ = writeln!(s, "overall: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reported_items_never_fail() {
        let mut r = VerificationReport::new("t");
        r.assert_below("a", 1.0, 1e-9, 1e-6);
        r.report("b", 3.0, 5.0, 1e-6);
        assert!(r.passed());
        r.assert_below("c", 1.0, f64::NAN, 1e-6);
        assert!(!r.passed());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["b"]["pass"], true);
        assert_eq!(v["c"]["pass"], false);
        assert_eq!(v["a"]["tolerance"], 1e-6);
    }
}
