//! Structured verification reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::coeff::CoefficientFunction;
use crate::forms::{DifferentialForm, Matrix, Point};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Informational entry; never affects the verdict.
    Info,
    /// A hypothesis that cannot be checked on a single chart.
    Unchecked,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub anchor: String,
    pub mode: String,
    pub status: Status,
    pub residual_zero: bool,
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_point: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl CheckEntry {
    pub fn new(name: &str, mode: &str, status: Status, residual_zero: bool, residual: impl Into<String>) -> Self {
        CheckEntry {
            name: name.to_string(),
            anchor: catalog::anchor(name).to_string(),
            mode: mode.to_string(),
            status,
            residual_zero,
            residual: residual.into(),
            witness_point: None,
            detail: None,
        }
    }

    /// Entry for an identity that must hold: passes iff the residual is zero.
    pub fn identity(name: &str, mode: &str, zero: bool, residual: impl Into<String>) -> Self {
        Self::new(name, mode, if zero { Status::Pass } else { Status::Fail }, zero, residual)
    }

    pub fn info(name: &str, text: impl Into<String>) -> Self {
        Self::new(name, "info", Status::Info, true, text)
    }

    pub fn with_witness(mut self, pt: Option<&Point>) -> Self {
        self.witness_point = pt.map(|p| p.to_strings());
        self
    }

    pub fn with_anchor(mut self, anchor: &str) -> Self {
        self.anchor = catalog::anchor(anchor).to_string();
        self
    }

    pub fn with_detail(mut self, v: serde_json::Value) -> Self {
        self.detail = Some(v);
        self
    }

    pub fn passed(&self) -> bool {
        !matches!(self.status, Status::Fail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub title: String,
    pub verdict: String,
    pub entries: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        let mut r = VerificationReport { title: title.into(), ..Default::default() };
        r.refresh();
        r
    }

    fn refresh(&mut self) {
        self.verdict = if self.passed() { "pass".into() } else { "fail".into() };
    }

    pub fn push(&mut self, e: CheckEntry) {
        self.entries.push(e);
        self.refresh();
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
        self.refresh();
    }

    /// True iff every non-informational entry passed.
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed())
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn failures(&self) -> Vec<&CheckEntry> {
        self.entries.iter().filter(|e| !e.passed()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Text rendering with the same fields as the JSON form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "report: {}", self.title);
        let _ = writeln!(s, "verdict: {}", self.verdict);
        for e in &self.entries {
            let status = match e.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "INFO",
                Status::Unchecked => "UNCHECKED",
            };
            let _ = writeln!(s, "[{status}] {} ({})", e.name, e.mode);
            let _ = writeln!(s, "    anchor: {}", e.anchor);
            let _ = writeln!(s, "    residual_zero: {}", e.residual_zero);
            let _ = writeln!(s, "    residual: {}", e.residual);
            if let Some(w) = &e.witness_point {
                let _ = writeln!(s, "    witness_point: ({})", w.join(", "));
            }
            if let Some(d) = &e.detail {
                let _ = writeln!(s, "    detail: {}", serde_json::to_string(d).unwrap());
            }
        }
        if let Some(sum) = &self.summary {
            let _ = writeln!(s, "summary: {}", serde_json::to_string(sum).unwrap());
        }
        s
    }
}

const MAX_SUMMARY: usize = 240;

fn clip(s: String) -> String {
    if s.len() <= MAX_SUMMARY {
        s
    } else {
        let mut cut = MAX_SUMMARY;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        format!("{}...", &s[..cut])
    }
}

/// One-line description of a symbolic residual form.
pub fn summarize_form(f: &DifferentialForm<CoefficientFunction>, scalars: &[String]) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let comps = f.components();
    let (idx, c) = &comps[0];
    clip(format!("{} nonzero component(s); first {:?} = {}", comps.len(), idx, c.format_with(scalars)))
}

/// One-line description of a residual form of exact values.
pub fn summarize_values<C: Scalar + std::fmt::Debug>(f: &DifferentialForm<C>) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let comps = f.components();
    let (idx, c) = &comps[0];
    clip(format!("{} nonzero component(s); first {:?} = {:?}", comps.len(), idx, c))
}

pub fn summarize_matrix(m: &Matrix<CoefficientFunction>, scalars: &[String]) -> String {
    let mut count = 0;
    let mut first = None;
    for (i, r) in m.iter().enumerate() {
        for (j, c) in r.iter().enumerate() {
            if !c.is_zero() {
                count += 1;
                if first.is_none() {
                    first = Some(format!("[{i}][{j}] = {}", c.format_with(scalars)));
                }
            }
        }
    }
    match first {
        None => "0".into(),
        Some(f) => clip(format!("{count} nonzero entr(y/ies); first {f}")),
    }
}
