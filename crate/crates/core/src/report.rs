//! Run reports shared by the command-line tool and the property suite.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Where a failure happened.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Locator {
    pub operation: String,
    pub instance: String,
    /// Offending element, square or witness path, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
    pub reason: String,
}

impl Locator {
    pub fn new(operation: &str, instance: &str, reason: impl Into<String>) -> Self {
        Locator { operation: operation.into(), instance: instance.into(), at: None, reason: reason.into() }
    }

    pub fn at(mut self, at: impl Into<String>) -> Self {
        self.at = Some(at.into());
        self
    }

    /// Takes the location from the error where it carries one.
    pub fn from_error(operation: &str, instance: &str, err: &Error) -> Self {
        let base = Locator::new(operation, instance, err.to_string());
        match err {
            Error::Verification { witness, reason } => Locator { reason: reason.clone(), ..base.at(witness.clone()) },
            Error::NotFunctorial { lower, upper } => base.at(format!("{lower} <= {upper}")),
            Error::LinkNotCertified(x) | Error::UnknownElement(x) => base.at(x.clone()),
            _ => base,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Converged { iterations: usize },
    BudgetExhausted { iterations: usize },
    Verified,
    Passed,
    /// A bounded search gave up without deciding.
    Inconclusive { reason: String },
    /// The instance falls outside the property.
    Skipped { reason: String },
    Failed { locator: Locator },
}

impl Outcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, Outcome::Failed { .. })
    }

    fn label(&self) -> String {
        match self {
            Outcome::Converged { iterations } => format!("converged after {iterations} iteration(s)"),
            Outcome::BudgetExhausted { iterations } => format!("budget exhausted after {iterations} iteration(s)"),
            Outcome::Verified => "verified".into(),
            Outcome::Passed => "passed".into(),
            Outcome::Inconclusive { reason } => format!("inconclusive: {reason}"),
            Outcome::Skipped { reason } => format!("skipped: {reason}"),
            Outcome::Failed { locator } => {
                let at = locator.at.as_deref().map(|a| format!(" at {a}")).unwrap_or_default();
                format!("FAILED in {}{at}: {}", locator.operation, locator.reason)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub id: String,
    #[serde(flatten)]
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

impl InstanceReport {
    pub fn new(id: impl Into<String>, outcome: Outcome) -> Self {
        InstanceReport { id: id.into(), outcome, certificate: None }
    }
}

/// Results of one property (or one command) over its instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    pub results: Vec<InstanceReport>,
}

impl Section {
    /// Sorts the results by instance id.
    pub fn new(name: impl Into<String>, mut results: Vec<InstanceReport>) -> Self {
        results.sort_by(|a, b| a.id.cmp(&b.id));
        let failures = results.iter().filter(|r| r.outcome.is_failure()).count();
        Section { name: name.into(), instances: results.len(), failures, results }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

/// Wall-clock timing is kept out of the serialized form so that reports are
/// byte-for-byte reproducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub sections: Vec<Section>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, seed: Option<u64>, sections: Vec<Section>) -> Self {
        RunReport { command: command.into(), seed, sections }
    }

    pub fn ok(&self) -> bool {
        self.sections.iter().all(Section::ok)
    }

    fn outcomes(&self) -> impl Iterator<Item = &Outcome> {
        self.sections.iter().flat_map(|s| s.results.iter().map(|r| &r.outcome))
    }

    /// 1 on any failure, 2 if some bounded run exhausted its budget or was
    /// inconclusive, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.outcomes().any(Outcome::is_failure) {
            1
        } else if self.outcomes().any(|o| matches!(o, Outcome::BudgetExhausted { .. } | Outcome::Inconclusive { .. })) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable form: one line per section, plus one per non-passing
    /// instance (all instances when `verbose`).
    pub fn render(&self, verbose: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed {seed}");
        }
        for s in &self.sections {
            let undecided = s.results.iter().any(|r| matches!(r.outcome, Outcome::BudgetExhausted { .. } | Outcome::Inconclusive { .. }));
            let status = if !s.ok() {
                "FAIL"
            } else if undecided {
                "warn"
            } else {
                "ok"
            };
            let _ = writeln!(out, "{status:4} {} ({} instances, {} failures)", s.name, s.instances, s.failures);
            for r in &s.results {
                let quiet = matches!(r.outcome, Outcome::Passed | Outcome::Verified | Outcome::Converged { .. } | Outcome::Skipped { .. });
                if verbose || !quiet {
                    let _ = write!(out, "     {}: {}", r.id, r.outcome.label());
                    if let Some(c) = &r.certificate {
                        let _ = write!(out, " [{c}]");
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let pass = Section::new("a", vec![InstanceReport::new("x", Outcome::Passed)]);
        assert_eq!(RunReport::new("t", None, vec![pass.clone()]).exit_code(), 0);
        let tired = Section::new("b", vec![InstanceReport::new("y", Outcome::BudgetExhausted { iterations: 0 })]);
        assert_eq!(RunReport::new("t", None, vec![pass.clone(), tired.clone()]).exit_code(), 2);
        let broken = Section::new(
            "c",
            vec![InstanceReport::new("z", Outcome::Failed { locator: Locator::new("verify", "z", "bad") })],
        );
        assert_eq!(RunReport::new("t", None, vec![tired, broken]).exit_code(), 1);
    }

    #[test]
    fn results_are_sorted_and_serialized_without_timing() {
        let s = Section::new(
            "p",
            vec![InstanceReport::new("b", Outcome::Passed), InstanceReport::new("a", Outcome::Verified)],
        );
        assert_eq!(s.results[0].id, "a");
        let json = RunReport::new("suite", Some(3), vec![s]).to_json();
        assert!(json.contains("\"outcome\": \"verified\""));
        assert!(!json.contains("time"));
    }

    #[test]
    fn verification_errors_keep_their_witness() {
        let err = Error::verification("fat/links/c1.1", "not a pushout");
        let loc = Locator::from_error("verify", "i", &err);
        assert_eq!(loc.at.as_deref(), Some("fat/links/c1.1"));
        assert_eq!(loc.reason, "not a pushout");
    }
}
