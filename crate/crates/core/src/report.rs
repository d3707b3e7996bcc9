//! Structured results of sweeps and certificate runs.
//!
//! A report is a list of named checks. Each check owns a set of cases; a case
//! carries the input that produced it, the computed value, and a signed
//! `slack` (how far inside the claimed inequality the value lies). A case
//! passes when `slack >= -tolerance`.

use serde::Serialize;
use serde_json::Value;

/// Version tag embedded in every serialized report.
pub const SCHEMA: &str = "lc-renyi/1";

/// Above this many cases, only failing cases and per-check worst cases are kept.
pub const CASE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub check: String,
    pub index: usize,
    pub input: Value,
    pub value: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub claim: String,
    pub tolerance: f64,
    pub cases: usize,
    pub failures: usize,
    pub worst: Option<Case>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub command: String,
    pub config: Value,
    pub checks: Vec<CheckSummary>,
    pub cases: Vec<Case>,
    pub cases_truncated: bool,
    pub worst: Option<Case>,
    pub pass: bool,
    pub duration_ms: u64,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Merges another report's checks into this one.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.cases.extend(other.cases);
        self.cases_truncated |= other.cases_truncated;
        self.pass &= other.pass;
        self.worst = pick_worst(self.worst.take(), other.worst);
        self.duration_ms += other.duration_ms;
    }
}

fn worse(a: &Case, b: &Case) -> bool {
    // failing beats passing, then smaller margin
    (!a.pass, -(a.slack + a.tolerance)) > (!b.pass, -(b.slack + b.tolerance))
}

fn pick_worst(a: Option<Case>, b: Option<Case>) -> Option<Case> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if worse(&b, &a) { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

struct CheckAcc {
    name: String,
    claim: String,
    tolerance: f64,
    cases: Vec<Case>,
}

/// Accumulates cases in a fixed order so reports are reproducible.
pub struct ReportBuilder {
    command: String,
    config: Value,
    checks: Vec<CheckAcc>,
}

/// Handle to a check registered on a [`ReportBuilder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckId(usize);

impl ReportBuilder {
    pub fn new(command: impl Into<String>, config: Value) -> Self {
        Self {
            command: command.into(),
            config,
            checks: Vec::new(),
        }
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        claim: impl Into<String>,
        tolerance: f64,
    ) -> CheckId {
        self.checks.push(CheckAcc {
            name: name.into(),
            claim: claim.into(),
            tolerance,
            cases: Vec::new(),
        });
        CheckId(self.checks.len() - 1)
    }

    /// Records a case; a NaN slack always fails.
    pub fn record(&mut self, id: CheckId, input: Value, value: f64, slack: f64) {
        let acc = &mut self.checks[id.0];
        let pass = slack >= -acc.tolerance;
        let index = acc.cases.len();
        acc.cases.push(Case {
            check: acc.name.clone(),
            index,
            input,
            value,
            slack,
            tolerance: acc.tolerance,
            pass,
        });
    }

    /// Records a pass/fail outcome that has no numeric margin.
    pub fn record_bool(&mut self, id: CheckId, input: Value, ok: bool) {
        let v = if ok { 1.0 } else { 0.0 };
        let slack = if ok { 0.0 } else { f64::NEG_INFINITY };
        self.record(id, input, v, slack);
    }

    pub fn finish(self, duration_ms: u64) -> VerificationReport {
        let total: usize = self.checks.iter().map(|c| c.cases.len()).sum();
        let truncated = total > CASE_LIMIT;
        let mut summaries = Vec::with_capacity(self.checks.len());
        let mut kept = Vec::new();
        let mut worst_all: Option<Case> = None;
        let mut pass_all = true;
        for acc in self.checks {
            let n = acc.cases.len();
            let failures = acc.cases.iter().filter(|c| !c.pass).count();
            let worst = acc
                .cases
                .iter()
                .cloned()
                .fold(None, |w, c| pick_worst(w, Some(c)));
            let pass = failures == 0;
            pass_all &= pass;
            worst_all = pick_worst(worst_all, worst.clone());
            if truncated {
                kept.extend(
                    acc.cases
                        .iter()
                        .filter(|c| !c.pass)
                        .take(CASE_LIMIT / 10)
                        .cloned(),
                );
                if let Some(w) = &worst {
                    if w.pass {
                        kept.push(w.clone());
                    }
                }
            } else {
                kept.extend(acc.cases);
            }
            summaries.push(CheckSummary {
                name: acc.name,
                claim: acc.claim,
                tolerance: acc.tolerance,
                cases: n,
                failures,
                worst,
                pass,
            });
        }
        VerificationReport {
            schema: SCHEMA,
            command: self.command,
            config: self.config,
            checks: summaries,
            cases: kept,
            cases_truncated: truncated,
            worst: worst_all,
            pass: pass_all,
            duration_ms,
        }
    }
}
