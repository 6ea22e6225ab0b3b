//! Check records and the report container. Reports are fully deterministic:
//! records are sorted by check name then input name, and nothing clock- or
//! thread-dependent is ever serialized, so identical runs produce identical
//! bytes.

use serde::Serialize;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

/// One check: what ran, on which named input, how it went, and enough
/// detail to reproduce a failure with a single targeted command.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub input: String,
    pub verdict: Verdict,
    pub details: Vec<String>,
}

impl CheckRecord {
    pub fn pass(check: &str, input: &str, details: Vec<String>) -> CheckRecord {
        CheckRecord { check: check.into(), input: input.into(), verdict: Verdict::Pass, details }
    }

    pub fn fail(check: &str, input: &str, details: Vec<String>) -> CheckRecord {
        CheckRecord { check: check.into(), input: input.into(), verdict: Verdict::Fail, details }
    }

    pub fn of(check: &str, input: &str, ok: bool, details: Vec<String>) -> CheckRecord {
        if ok {
            CheckRecord::pass(check, input, details)
        } else {
            CheckRecord::fail(check, input, details)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(seed: u64, mut checks: Vec<CheckRecord>) -> Report {
        // stable order regardless of completion order
        checks.sort_by(|a, b| (&a.check, &a.input).cmp(&(&b.check, &b.input)));
        Report { version: env!("CARGO_PKG_VERSION").to_string(), seed, checks }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "report version {} seed {}", self.version, self.seed);
        for c in &self.checks {
            let tag = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            };
            let _ = write!(out, "{tag} {} [{}]", c.check, c.input);
            if c.details.is_empty() {
                out.push('\n');
            } else {
                let _ = writeln!(out, ": {}", c.details.join("; "));
            }
        }
        let fails = self.failures().count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), fails);
        out
    }
}
