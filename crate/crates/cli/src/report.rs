//! Report model shared by every command, with human and machine renderings.
//!
//! The machine form is pretty-printed JSON of [`Report`]; the human form is
//! the same content laid out as text, plus wall time.

use std::fmt::Write;
use std::time::Duration;

use liesym_core::determining::VerificationReport;
use liesym_core::expr::Verdict;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub pass: bool,
    /// Settled by simplification alone.
    pub symbolic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_scaled: Option<f64>,
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Outcome {
    pub fn symbolic(pass: bool, seed: u64, tol: f64) -> Self {
        Outcome {
            pass,
            symbolic: true,
            max_scaled: None,
            points: 0,
            seed,
            tol,
        }
    }

    pub fn from_verdict(v: &Verdict) -> Self {
        Outcome {
            pass: v.equivalent,
            symbolic: false,
            max_scaled: Some(v.max_scaled),
            points: v.points,
            seed: v.seed,
            tol: v.tol,
        }
    }

    pub fn from_generator(r: &VerificationReport, seed: u64, tol: f64) -> Self {
        match (&r.verdict, r.symbolic_zero) {
            (_, true) => Outcome::symbolic(true, seed, tol),
            (Some(v), false) => Outcome {
                pass: r.pass,
                ..Outcome::from_verdict(v)
            },
            (None, false) => Outcome::symbolic(false, seed, tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub label: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Item {
    pub fn new(label: impl Into<String>, value: impl Into<String>) -> Self {
        Item {
            label: label.into(),
            value: value.into(),
            outcome: None,
            note: None,
        }
    }

    pub fn outcome(mut self, o: Outcome) -> Self {
        self.outcome = Some(o);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub items: Vec<Item>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, item: Item) {
        self.items.push(item);
    }
}

/// An internal consistency check. A failed check fails the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// A published claim the derivation does not reproduce. Reported, never fatal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub item: String,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub title: String,
    pub sections: Vec<Section>,
    pub checks: Vec<Check>,
    pub discrepancies: Vec<Discrepancy>,
    /// Fatal input or derivation errors.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl CaseReport {
    pub fn new(id: impl Into<String>, title: impl Into<String>) -> Self {
        CaseReport {
            id: id.into(),
            title: title.into(),
            sections: Vec::new(),
            checks: Vec::new(),
            discrepancies: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }

    pub fn discrepancy(&mut self, item: impl Into<String>, expected: impl Into<String>, found: impl Into<String>) {
        self.discrepancies.push(Discrepancy {
            item: item.into(),
            expected: expected.into(),
            found: found.into(),
        });
    }

    pub fn consistent(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.ok)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub tol: f64,
    pub cases: Vec<CaseReport>,
    pub consistent: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, tol: f64, cases: Vec<CaseReport>) -> Self {
        let consistent = cases.iter().all(CaseReport::consistent);
        Report {
            command: command.into(),
            seed,
            tol,
            cases,
            consistent,
        }
    }

    pub fn machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn human(&self, wall: Option<Duration>) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let _ = writeln!(out, "== {}: {} ==", c.id, c.title);
            for s in &c.sections {
                let _ = writeln!(out, "[{}]", s.title);
                for it in &s.items {
                    let _ = write!(out, "  {}: {}", it.label, it.value);
                    if let Some(o) = &it.outcome {
                        let _ = write!(out, "  {}", outcome_text(o));
                    }
                    out.push('\n');
                    if let Some(n) = &it.note {
                        let _ = writeln!(out, "      {}", n);
                    }
                }
            }
            let ok = c.checks.iter().filter(|k| k.ok).count();
            let _ = writeln!(out, "checks: {}/{} ok", ok, c.checks.len());
            for k in c.checks.iter().filter(|k| !k.ok) {
                let _ = writeln!(out, "  FAILED {}: {}", k.name, k.detail);
            }
            if !c.discrepancies.is_empty() {
                let _ = writeln!(out, "discrepancies with published results:");
                for d in &c.discrepancies {
                    let _ = writeln!(out, "  - {}: expected {}; found {}", d.item, d.expected, d.found);
                }
            }
            for e in &c.errors {
                let _ = writeln!(out, "error: {}", e);
            }
            out.push('\n');
        }
        let _ = write!(
            out,
            "seed {}, tol {:e}: {}",
            self.seed,
            self.tol,
            if self.consistent { "all checks passed" } else { "CHECKS FAILED" }
        );
        if let Some(w) = wall {
            let _ = write!(out, " ({:.2}s)", w.as_secs_f64());
        }
        out.push('\n');
        out
    }
}

fn outcome_text(o: &Outcome) -> String {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    match o.max_scaled {
        None => format!("{} (symbolic)", verdict),
        Some(m) => format!("{} (max scaled {:.2e} at {} points, seed {})", verdict, m, o.points, o.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency_follows_checks() {
        let mut c = CaseReport::new("X", "demo");
        c.check("one", true, "");
        c.discrepancy("claim", "a", "b");
        assert!(c.consistent());
        c.check("two", false, "broken");
        assert!(!c.consistent());
        let r = Report::new("catalog", 1, 1e-8, vec![c]);
        assert!(!r.consistent);
        assert!(r.human(None).contains("FAILED two: broken"));
        assert!(r.machine().contains("\"discrepancies\""));
    }
}
