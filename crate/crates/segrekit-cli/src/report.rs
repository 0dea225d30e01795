//! JSON-serializable run reports.
//!
//! Every number that comes out of the engine is rendered as an exact
//! rational string (for example `3/2+1/4i`); no floats appear anywhere.
//! Invariants:
//!
//! * every failing record carries a detail naming the lowest offending
//!   monomial or the failing precondition,
//! * cases are sorted by name and records keep insertion order, so a report
//!   is byte-identical across runs with the same seed and settings,
//! * `all_pass` is true exactly when every record in every case passes.

use segrekit_core::hspm::VerifyReport;
use segrekit_core::model::AnalysisReport;
use serde::Serialize;

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    InsufficientCap,
}

#[derive(Serialize, Clone, Debug)]
pub struct CheckRecord {
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn pass(check: impl Into<String>) -> Self {
        CheckRecord {
            check: check.into(),
            status: Status::Pass,
            detail: None,
        }
    }

    pub fn pass_detail(check: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckRecord {
            check: check.into(),
            status: Status::Pass,
            detail: Some(detail.into()),
        }
    }

    pub fn fail(check: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckRecord {
            check: check.into(),
            status: Status::Fail,
            detail: Some(detail.into()),
        }
    }

    pub fn insufficient_cap(check: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckRecord {
            check: check.into(),
            status: Status::InsufficientCap,
            detail: Some(detail.into()),
        }
    }

    /// Pass/fail on a boolean with a mandatory failure detail.
    pub fn expect(check: impl Into<String>, ok: bool, detail_on_fail: impl Into<String>) -> Self {
        if ok {
            CheckRecord::pass(check)
        } else {
            CheckRecord::fail(check, detail_on_fail)
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct CaseReport {
    pub name: String,
    pub passed: bool,
    pub records: Vec<CheckRecord>,
}

impl CaseReport {
    pub fn new(name: impl Into<String>, records: Vec<CheckRecord>) -> Self {
        let passed = records.iter().all(|r| r.status == Status::Pass);
        CaseReport {
            name: name.into(),
            passed,
            records,
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub command: String,
    pub degree: u32,
    pub seed: u64,
    pub bracket_bound: u32,
    pub all_pass: bool,
    pub cases: Vec<CaseReport>,
}

impl Report {
    /// Assembles a report with its cases sorted by name.
    pub fn new(
        command: impl Into<String>,
        degree: u32,
        seed: u64,
        bracket_bound: u32,
        mut cases: Vec<CaseReport>,
    ) -> Self {
        cases.sort_by(|a, b| a.name.cmp(&b.name));
        let all_pass = cases.iter().all(|c| c.passed);
        Report {
            command: command.into(),
            degree,
            seed,
            bracket_bound,
            all_pass,
            cases,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Terminal-facing rendering: one line per record plus a summary.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for case in &self.cases {
            for record in &case.records {
                let tag = match record.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::InsufficientCap => "INSUFFICIENT-CAP",
                };
                out.push_str(&format!("[{}] {} :: {}", tag, case.name, record.check));
                if let Some(detail) = &record.detail {
                    out.push_str(&format!(" ({})", detail));
                }
                out.push('\n');
            }
        }
        out.push_str(&format!(
            "{}: {} at degree {}\n",
            self.command,
            if self.all_pass { "all checks passed" } else { "some checks failed" },
            self.degree
        ));
        out
    }
}

/// Renders a verification outcome as a record; failures carry the lowest
/// offending monomial and its exact coefficient.
pub fn verify_record(check: impl Into<String>, report: &VerifyReport) -> CheckRecord {
    match &report.offender {
        None => CheckRecord::pass_detail(
            check,
            format!("residual zero to degree {}", report.effective_cap),
        ),
        Some(off) => CheckRecord::fail(
            check,
            format!(
                "residual component {} has lowest monomial {} with coefficient {}",
                off.component + 1,
                off.rendered,
                off.coefficient
            ),
        ),
    }
}

fn render_bound(value: Option<u32>, none_text: &str, bound: u32) -> String {
    match value {
        Some(v) => v.to_string(),
        None => format!("{} {}", none_text, bound),
    }
}

/// Renders the invariants of a model as a stable one-line summary.
pub fn analysis_detail(report: &AnalysisReport) -> String {
    let mut parts = vec![
        format!(
            "finite type {}",
            render_bound(report.finite_type_order, "none up to bound", report.finite_type_bound)
        ),
        format!(
            "nondegeneracy order {}",
            render_bound(report.nondeg_order_k, "degenerate up to order", report.nondeg_bound)
        ),
    ];
    if let Some((p, n, z)) = report.levi_signature {
        parts.push(format!("Levi signature ({}, {}, {})", p, n, z));
    }
    parts.push(format!(
        "Segre rank {}",
        match report.segre_rank_r {
            Some(r) => r.to_string(),
            None => format!("none up to level {}", report.segre_rank_bound),
        }
    ));
    parts.join("; ")
}
