//! Behavioural-inheritance proof obligations, discharged by enumeration.
//!
//! For a subclass `C` of `A` with projection `f : C -> A` the checked rules
//! are the forward-simulation conditions specialised to a functional
//! retrieve relation:
//!
//! ```text
//! rule 1   Initialisation   forall C'         . CI => AI
//! rule 2   Applicability    forall C; i?      . pre AO => pre CO
//! rule 3   CorrectnessNB    forall C; C'; i?; o! . pre AO /\ CO => AO
//! rule 3a  CorrectnessB     forall C; C'; i?; o! . CO => AO
//! rule 4   Finalisation     forall C          . CF => AF
//! ```
//!
//! Subclass-extra operations are checked against `skip` (the abstract
//! state is left unchanged), or, with the virtual-operation relaxation,
//! accepted outright with the calculated abstract operation
//! `ao = f~ ; co ; f` reported as a diagnostic.
//!
//! Conformance is checked against the direct parent only; conformance to
//! further ancestors follows by transitivity of refinement along the chain,
//! since the projections compose.

mod rules;
mod witness;

use std::fmt;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::model::Value;
use crate::semantics::DEFAULT_STATE_CAP;

pub use rules::Checker;
pub use witness::confirm_witness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Contractual: outside its precondition an operation may do anything.
    Nonblocking,
    /// Behavioural: outside its precondition an operation is refused.
    Blocking,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Nonblocking => "nonblocking",
            Mode::Blocking => "blocking",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckConfig {
    pub mode: Mode,
    /// Accept subclass-extra operations, simulated by their calculated
    /// virtual superclass operation.
    pub relax_virtual_ops: bool,
    /// Lift applicability when the superclass is abstract.
    pub relax_abstract_classes: bool,
    pub state_cap: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Nonblocking,
            relax_virtual_ops: false,
            relax_abstract_classes: false,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl CheckConfig {
    pub fn relaxed(mode: Mode) -> Self {
        Self {
            mode,
            relax_virtual_ops: true,
            relax_abstract_classes: true,
            ..Self::default()
        }
    }
}

/// Which half of the virtual-operation refinement theorem a finding covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TheoremPart {
    Applicability,
    Correctness,
}

/// Declaration order is report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ObligationKind {
    Initialisation,
    Applicability,
    CorrectnessNB,
    CorrectnessB,
    Finalisation,
    SkipApplicability,
    SkipCorrectness,
    VirtualOpTheorem(TheoremPart),
}

impl ObligationKind {
    /// Rule number this obligation instantiates.
    pub fn rule(self) -> &'static str {
        match self {
            ObligationKind::Initialisation => "rule 1",
            ObligationKind::Applicability | ObligationKind::SkipApplicability => "rule 2",
            ObligationKind::CorrectnessNB | ObligationKind::SkipCorrectness => "rule 3",
            ObligationKind::CorrectnessB => "rule 3a",
            ObligationKind::Finalisation => "rule 4",
            ObligationKind::VirtualOpTheorem(TheoremPart::Applicability) => "rule 2 (virtual op)",
            ObligationKind::VirtualOpTheorem(TheoremPart::Correctness) => "rule 3a (virtual op)",
        }
    }

    pub fn name(self) -> String {
        match self {
            ObligationKind::VirtualOpTheorem(part) => format!("VirtualOpTheorem/{part:?}"),
            other => format!("{other:?}"),
        }
    }

    /// Citation shown in reports, e.g. `rule 2 / Applicability`.
    pub fn citation(self) -> String {
        format!("{} / {}", self.rule(), self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Obligation {
    pub kind: ObligationKind,
    pub subclass: String,
    pub superclass: String,
    pub op: Option<String>,
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.op {
            Some(op) => write!(f, "{}({}.{})", self.kind.name(), self.subclass, op),
            None => write!(f, "{}({} <: {})", self.kind.name(), self.subclass, self.superclass),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Holds,
    Fails,
    /// Not evaluated: a relaxation removed the obligation.
    Lifted,
    /// A subclass-extra operation accepted by the virtual-operation relaxation.
    AcceptedByRelaxation,
}

/// Field names paired with values, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Binding(pub Vec<(String, Value)>);

impl Binding {
    pub fn values(&self) -> Vec<Value> {
        self.0.iter().map(|(_, v)| v.clone()).collect()
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let values = self.values();
        f.write_str(&crate::model::format_binding(
            self.0.iter().map(|(n, _)| n.as_str()),
            &values,
        ))
    }
}

impl Serialize for Binding {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (name, value) in &self.0 {
            map.serialize_entry(name, &value.to_string())?;
        }
        map.end()
    }
}

/// A counterexample, in subclass terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<Binding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<Binding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub post_state: Option<Binding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Binding>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [
            ("state", &self.state),
            ("input", &self.input),
            ("state'", &self.post_state),
            ("output", &self.output),
        ]
        .into_iter()
        .filter_map(|(label, b)| b.as_ref().map(|b| format!("{label} {b}")))
        .collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Finding {
    pub obligation: Obligation,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub note: String,
    /// Diagnostic findings never affect the conformance verdict.
    pub advisory: bool,
}

impl Finding {
    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    /// A failure that makes the hierarchy non-conformant.
    pub fn is_violation(&self) -> bool {
        self.fails() && !self.advisory
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeReport {
    pub subclass: String,
    pub superclass: String,
    pub findings: Vec<Finding>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Overall {
    Conformant,
    NonConformant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub edges: Vec<EdgeReport>,
    pub overall: Overall,
}

impl CheckReport {
    pub fn from_edges(edges: Vec<EdgeReport>) -> Self {
        let overall = if edges.iter().flat_map(|e| &e.findings).any(Finding::is_violation) {
            Overall::NonConformant
        } else {
            Overall::Conformant
        };
        Self { edges, overall }
    }

    pub fn findings(&self) -> impl Iterator<Item = &Finding> {
        self.edges.iter().flat_map(|e| &e.findings)
    }

    pub fn violations(&self) -> Vec<&Finding> {
        self.findings().filter(|f| f.is_violation()).collect()
    }

    pub fn find(&self, kind: ObligationKind, subclass: &str, op: Option<&str>) -> Option<&Finding> {
        self.findings().find(|f| {
            f.obligation.kind == kind && f.obligation.subclass == subclass && f.obligation.op.as_deref() == op
        })
    }
}
