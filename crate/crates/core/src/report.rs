//! Run reports shared by the verification suites and the command line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::distance::Method;

/// One oracle-versus-tomographic comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub trial: usize,
    pub label: String,
    pub oracle: f64,
    pub tomographic: f64,
    /// `|oracle - tomographic|`
    pub gap: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
}

impl CaseResult {
    /// Case that passes when the gap is within `tol`.
    pub fn gap_check(trial: usize, label: &str, oracle: f64, tomographic: f64, tol: f64) -> Self {
        let gap = (oracle - tomographic).abs();
        Self {
            trial,
            label: label.to_owned(),
            oracle,
            tomographic,
            gap,
            tol,
            passed: gap <= tol,
            method: None,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = Some(method);
        self
    }

    pub fn with_diagnostic(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_owned(), value);
        self
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub cases: Vec<CaseResult>,
    /// Largest gap per case label.
    pub max_gaps: BTreeMap<String, f64>,
    /// Indices into `cases` that failed their tolerance.
    pub flagged: Vec<usize>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(seed: Option<u64>) -> Self {
        Self {
            seed,
            passed: true,
            ..Default::default()
        }
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_owned(), value);
    }

    pub fn push(&mut self, case: CaseResult) {
        let entry = self.max_gaps.entry(case.label.clone()).or_insert(0.0);
        *entry = entry.max(case.gap);
        if !case.passed {
            self.flagged.push(self.cases.len());
            self.passed = false;
        }
        self.cases.push(case);
    }

    pub fn max_gap(&self, label: &str) -> Option<f64> {
        self.max_gaps.get(label).copied()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// One row per case; numbers carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,label,oracle,tomographic,gap,tol,passed\n");
        for c in &self.cases {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.trial,
                c.label,
                csv_num(c.oracle),
                csv_num(c.tomographic),
                csv_num(c.gap),
                csv_num(c.tol),
                c.passed
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let _ = writeln!(
                out,
                "{:>4} {:<20} oracle {:>12.9} tomographic {:>12.9} gap {:.2e} {}",
                c.trial,
                c.label,
                c.oracle,
                c.tomographic,
                c.gap,
                if c.passed { "ok" } else { "FLAGGED" }
            );
        }
        for (label, gap) in &self.max_gaps {
            let _ = writeln!(out, "max gap {label}: {gap:.3e}");
        }
        let _ = writeln!(
            out,
            "{} ({} of {} cases flagged)",
            if self.passed { "PASS" } else { "FAIL" },
            self.flagged.len(),
            self.cases.len()
        );
        out
    }
}

/// Full round-trip precision for CSV output.
pub fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_and_max_gaps() {
        let mut r = RunReport::new(Some(3));
        r.push(CaseResult::gap_check(0, "hs", 0.5, 0.5, 1e-10));
        r.push(CaseResult::gap_check(1, "hs", 0.5, 0.5 + 1e-12, 1e-10));
        assert!(r.passed);
        r.push(CaseResult::gap_check(2, "trace", 0.5, 0.6, 1e-10));
        assert!(!r.passed);
        assert_eq!(r.flagged, vec![2]);
        assert!((r.max_gap("trace").unwrap() - 0.1).abs() < 1e-15);
        assert!(r.max_gap("hs").unwrap() <= 1e-12 + 1e-16);
    }

    #[test]
    fn csv_numbers_round_trip() {
        let x = 0.1 + 0.2;
        assert_eq!(csv_num(x).parse::<f64>().unwrap(), x);
        let mut r = RunReport::new(None);
        r.push(CaseResult::gap_check(0, "fidelity", x, x, 0.0));
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.lines().nth(1).unwrap().ends_with(",true"));
    }
}
