//! Check reports: structured pass/fail results with deterministic ordering,
//! printable as text and serializable as JSON.

use serde::{Deserialize, Serialize};
use std::fmt;

/// One named check with its verdict.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub ok: bool,
    /// Human-readable detail; empty when there is nothing to add.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn pass(label: impl Into<String>) -> Self {
        Check { label: label.into(), ok: true, detail: String::new() }
    }

    pub fn fail(label: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { label: label.into(), ok: false, detail: detail.into() }
    }

    pub fn of(label: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check { label: label.into(), ok, detail: detail.into() }
    }
}

/// A titled list of checks.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn require(&mut self, label: impl Into<String>, ok: bool, detail: impl Into<String>) {
        let d = if ok { String::new() } else { detail.into() };
        self.checks.push(Check { label: label.into(), ok, detail: d });
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }

    /// Appends all checks of `other`, prefixing their labels.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.label = format!("{prefix}: {}", c.label);
            self.checks.push(c);
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} — {}", self.title, if self.is_ok() { "ok" } else { "FAILED" })?;
        for c in &self.checks {
            let mark = if c.ok { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "  [{mark}] {}", c.label)?;
            } else {
                writeln!(f, "  [{mark}] {} — {}", c.label, c.detail)?;
            }
        }
        Ok(())
    }
}

/// One column of a long exact sequence: a cohomology group with the data of
/// the map leaving it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LesEntry {
    /// Position label, e.g. "H^1(source)".
    pub label: String,
    pub dim: usize,
    /// Rank of the outgoing map (absent for the final position).
    pub outgoing_rank: Option<usize>,
    /// Dimension of the incoming image (0 for the first position).
    pub incoming_rank: usize,
    /// Exactness at this position: ker(outgoing) = im(incoming).
    pub exact: bool,
}

/// An exact-sequence verification result.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactSequenceReport {
    pub title: String,
    pub entries: Vec<LesEntry>,
}

impl ExactSequenceReport {
    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.exact)
    }
}

impl fmt::Display for ExactSequenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} — {}",
            self.title,
            if self.is_exact() { "exact" } else { "NOT EXACT" }
        )?;
        for e in &self.entries {
            writeln!(
                f,
                "  {:<28} dim {:>3}  in {:>3}  out {}  {}",
                e.label,
                e.dim,
                e.incoming_rank,
                e.outgoing_rank.map_or("  -".to_string(), |r| format!("{r:>3}")),
                if e.exact { "exact" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}
