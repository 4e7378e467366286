//! Report rendering shared by the command-line front end.
//!
//! The JSON layout is documented in `docs/report-schema.md`. Exit statuses
//! are computed from the serialized report alone ([`exit_code`]), so a saved
//! report replays to the status its run produced.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value as Json;

use crate::dsl::{ParseError, SourceSpan};
use crate::refinement::{CheckConfig, CheckReport, Finding, Verdict};
use crate::system::{Comparison, ConstraintCheck, LintFinding, TraceDivergence};

/// Bumped on any incompatible change to the JSON layout.
pub const REPORT_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Check,
    Lint,
    Trace,
    Dump,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReportConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relax: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint_check: Option<ConstraintCheck>,
}

impl ReportConfig {
    pub fn from_check(c: &CheckConfig) -> Self {
        let mut relax = Vec::new();
        if c.relax_virtual_ops {
            relax.push("virtual-ops".to_string());
        }
        if c.relax_abstract_classes {
            relax.push("abstract-classes".to_string());
        }
        Self {
            mode: Some(c.mode.to_string()),
            relax: Some(relax),
            state_cap: Some(c.state_cap),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ReportFinding {
    Obligation {
        obligation: String,
        kind: String,
        citation: String,
        subclass: String,
        superclass: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        op: Option<String>,
        verdict: Verdict,
        advisory: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<Json>,
        note: String,
    },
    Lint {
        severity: String,
        class: String,
        constraint: usize,
        message: String,
    },
    Relation {
        file: String,
    },
}

impl ReportFinding {
    pub fn from_obligation(f: &Finding) -> Self {
        let ob = &f.obligation;
        ReportFinding::Obligation {
            obligation: ob.to_string(),
            kind: ob.kind.name(),
            citation: ob.kind.citation(),
            subclass: ob.subclass.clone(),
            superclass: ob.superclass.clone(),
            op: ob.op.clone(),
            verdict: f.verdict,
            advisory: f.advisory,
            witness: f
                .witness
                .as_ref()
                .map(|w| serde_json::to_value(w).expect("witness serializes")),
            note: f.note.clone(),
        }
    }

    pub fn from_lint(f: &LintFinding) -> Self {
        ReportFinding::Lint {
            severity: f.severity.to_string(),
            class: f.class.clone(),
            constraint: f.constraint,
            message: f.message.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Parse,
    Validation,
    Cap,
    Io,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportError {
    pub kind: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
}

impl ReportError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            span: None,
        }
    }

    pub fn from_parse(e: &ParseError) -> Self {
        let mut message = e.message.clone();
        if !e.expected.is_empty() && !message.contains("expected") {
            let _ = write!(message, " (expected {})", e.expected.join(", "));
        }
        Self {
            kind: ErrorKind::Parse,
            message,
            span: Some(e.span.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivergenceReport {
    #[serde(flatten)]
    pub divergence: TraceDivergence,
    pub transcript: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub version: u32,
    pub command: Command,
    pub config: ReportConfig,
    pub findings: Vec<ReportFinding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceReport>,
    /// Set on trace runs that completed; `"Conformant"`-style summary for
    /// check runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    pub errors: Vec<ReportError>,
}

impl Report {
    pub fn new(command: Command, config: ReportConfig) -> Self {
        Self {
            version: REPORT_VERSION,
            command,
            config,
            findings: Vec::new(),
            divergence: None,
            summary: None,
            errors: Vec::new(),
        }
    }

    pub fn with_check(mut self, r: &CheckReport) -> Self {
        self.findings = r.findings().map(ReportFinding::from_obligation).collect();
        self.summary = Some(format!("{:?}", r.overall));
        self
    }

    pub fn with_lint(mut self, findings: &[LintFinding]) -> Self {
        self.findings = findings.iter().map(ReportFinding::from_lint).collect();
        self.summary = Some(if findings.is_empty() {
            "Clean".into()
        } else {
            format!("{} finding(s)", findings.len())
        });
        self
    }

    pub fn with_comparison(mut self, c: &Comparison) -> Self {
        match c {
            Comparison::NoDivergence { depth, explored } => {
                self.summary = Some(format!("NoDivergence (depth {depth}, {explored} traces)"));
            }
            Comparison::Divergence(d) => {
                self.summary = Some(format!("{:?} at step {}", d.reason, d.step));
                self.divergence = Some(DivergenceReport {
                    divergence: d.clone(),
                    transcript: d.transcript().lines().map(String::from).collect(),
                });
            }
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(&serde_json::to_value(self).expect("report serializes"))
    }

    /// Diagnostics, one `error: ...` line each.
    pub fn errors_text(&self) -> String {
        let mut out = String::new();
        for e in &self.errors {
            match &e.span {
                Some(s) => {
                    let _ = writeln!(out, "error: {}:{}:{}: {}", s.file, s.start_line, s.start_col, e.message);
                }
                None => {
                    let _ = writeln!(out, "error: {}", e.message);
                }
            }
        }
        out
    }

    /// Human-readable rendering carrying the same findings as the JSON.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut edge: Option<(String, String)> = None;
        for f in &self.findings {
            match f {
                ReportFinding::Obligation {
                    obligation,
                    citation,
                    subclass,
                    superclass,
                    verdict,
                    advisory,
                    witness,
                    note,
                    ..
                } => {
                    let key = (subclass.clone(), superclass.clone());
                    if edge.as_ref() != Some(&key) {
                        let _ = writeln!(out, "{subclass} <: {superclass}");
                        edge = Some(key);
                    }
                    let tag = match verdict {
                        Verdict::Holds => "holds",
                        Verdict::Fails if *advisory => "fails*",
                        Verdict::Fails => "FAILS",
                        Verdict::Lifted => "lifted",
                        Verdict::AcceptedByRelaxation => "accepted",
                    };
                    let _ = writeln!(out, "  {tag:<8} {obligation}  [{citation}]");
                    if let Some(w) = witness {
                        let _ = writeln!(out, "           witness: {}", witness_text(w));
                    }
                    if *verdict != Verdict::Holds && !note.is_empty() {
                        let _ = writeln!(out, "           {note}");
                    }
                }
                ReportFinding::Lint {
                    severity,
                    class,
                    constraint,
                    message,
                } => {
                    let _ = writeln!(out, "{severity}: constraint #{constraint} on {class}: {message}");
                }
                ReportFinding::Relation { file } => {
                    let _ = writeln!(out, "wrote {file}");
                }
            }
        }
        if let Some(d) = &self.divergence {
            let _ = writeln!(out, "divergence: {}", d.divergence.detail);
            for line in &d.transcript {
                let _ = writeln!(out, "{line}");
            }
        }
        if let Some(s) = &self.summary {
            let _ = writeln!(out, "result: {s}");
        }
        out
    }
}

fn witness_text(w: &Json) -> String {
    let Json::Object(parts) = w else {
        return w.to_string();
    };
    parts
        .iter()
        .filter(|(_, binding)| binding.as_object().is_none_or(|m| !m.is_empty()))
        .map(|(label, binding)| {
            let inner = match binding {
                Json::Object(m) => m
                    .iter()
                    .map(|(k, v)| format!("{k}={}", v.as_str().unwrap_or_default()))
                    .collect::<Vec<_>>()
                    .join(", "),
                other => other.to_string(),
            };
            let label = if label == "post_state" {
                "state'"
            } else {
                label.as_str()
            };
            format!("{label} {{{inner}}}")
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Exit status of a serialized report.
///
/// Errors take precedence (resource caps 3, anything else 2); otherwise a
/// non-advisory failed obligation, an error-severity lint finding, or a
/// divergence gives 1.
pub fn exit_code(report: &Json) -> i32 {
    let errors = report["errors"].as_array().map(Vec::as_slice).unwrap_or_default();
    if !errors.is_empty() {
        return if errors.iter().all(|e| e["kind"] == "cap") {
            EXIT_CAP
        } else {
            EXIT_INVALID
        };
    }
    let findings = report["findings"].as_array().map(Vec::as_slice).unwrap_or_default();
    let failed = match report["command"].as_str() {
        Some("check") => findings
            .iter()
            .any(|f| f["type"] == "obligation" && f["verdict"] == "Fails" && f["advisory"] == false),
        Some("lint") => findings.iter().any(|f| f["severity"] == "error"),
        Some("trace") => !report["divergence"].is_null(),
        _ => false,
    };
    if failed {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn exit_codes() {
        let ok = json!({"command": "check", "findings": [], "errors": []});
        assert_eq!(exit_code(&ok), EXIT_OK);
        let advisory = json!({"command": "check", "errors": [],
            "findings": [{"type": "obligation", "verdict": "Fails", "advisory": true}]});
        assert_eq!(exit_code(&advisory), EXIT_OK);
        let fails = json!({"command": "check", "errors": [],
            "findings": [{"type": "obligation", "verdict": "Fails", "advisory": false}]});
        assert_eq!(exit_code(&fails), EXIT_FINDINGS);
        let lint = json!({"command": "lint", "errors": [], "findings": [{"type": "lint", "severity": "warning"}]});
        assert_eq!(exit_code(&lint), EXIT_OK);
        let diverged = json!({"command": "trace", "errors": [], "findings": [], "divergence": {"step": 1}});
        assert_eq!(exit_code(&diverged), EXIT_FINDINGS);
        let cap = json!({"command": "trace", "errors": [{"kind": "cap"}], "divergence": {"step": 1}});
        assert_eq!(exit_code(&cap), EXIT_CAP);
        let mixed = json!({"command": "check", "errors": [{"kind": "cap"}, {"kind": "parse"}]});
        assert_eq!(exit_code(&mixed), EXIT_INVALID);
    }

    #[test]
    fn method_agrees_with_serialized_form() {
        let mut r = Report::new(Command::Lint, ReportConfig::default());
        assert_eq!(r.exit_code(), EXIT_OK);
        r.errors.push(ReportError::new(ErrorKind::Io, "missing"));
        let json: Json = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["version"], REPORT_VERSION);
        assert_eq!(r.exit_code(), exit_code(&json));
        assert_eq!(r.exit_code(), EXIT_INVALID);
    }
}
