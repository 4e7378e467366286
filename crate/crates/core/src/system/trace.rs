use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use super::state::{successors, ObjectId, Outcome, SimConfig, SystemEvent, SystemState};
use super::SystemError;
use crate::model::Value;
use crate::semantics::Semantics;

/// An event with the object left implicit: the single object under test.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum EventTemplate {
    New,
    Call { op: String, input: Vec<String> },
}

impl EventTemplate {
    pub fn op(&self) -> Option<&str> {
        match self {
            EventTemplate::Call { op, .. } => Some(op),
            EventTemplate::New => None,
        }
    }
}

impl fmt::Display for EventTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventTemplate::New => f.write_str("new"),
            EventTemplate::Call { op, input } => write!(f, "{op}({})", input.join(", ")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DivergenceReason {
    EnablednessMismatch,
    OutputMismatch,
}

/// Outcomes of one event on one side; several when nondeterminism lets
/// branches disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideObservation {
    pub class: String,
    pub outcomes: Vec<Outcome>,
    pub outputs: Vec<String>,
}

impl SideObservation {
    fn outcome_text(&self) -> String {
        self.outcomes
            .iter()
            .map(Outcome::to_string)
            .collect::<Vec<_>>()
            .join("|")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceDivergence {
    /// Element 0 creates the object; calls follow.
    pub trace: Vec<EventTemplate>,
    /// Index into `trace` of the event on which the sides disagree.
    pub step: usize,
    pub reason: DivergenceReason,
    pub detail: String,
    /// Per-side observations along the trace, aligned with `trace`.
    pub a: Vec<SideObservation>,
    pub b: Vec<SideObservation>,
}

impl TraceDivergence {
    /// `step k: EVENT -> outcome` lines, one block per side.
    pub fn transcript(&self) -> String {
        let mut out = String::new();
        for side in [&self.a, &self.b] {
            if let Some(first) = side.first() {
                out.push_str(&format!("# {}\n", first.class));
            }
            for (k, (ev, obs)) in self.trace.iter().zip(side).enumerate() {
                let ev = match ev {
                    EventTemplate::New => format!("new {}", obs.class),
                    call => call.to_string(),
                };
                out.push_str(&format!("step {k}: {ev} -> {}", obs.outcome_text()));
                if !obs.outputs.is_empty() && obs.outputs.iter().any(|o| !o.is_empty()) {
                    out.push_str(&format!(" [{}]", obs.outputs.join("; ")));
                }
                out.push('\n');
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Comparison {
    NoDivergence { depth: usize, explored: usize },
    Divergence(TraceDivergence),
}

type StateSet = BTreeSet<SystemState>;

struct Side<'a, 's> {
    sem: &'a Semantics<'s>,
    class: &'a str,
}

const OBJ: ObjectId = ObjectId(0);

impl Side<'_, '_> {
    /// Applies an event to every state in the set.
    fn apply(
        &self,
        set: &StateSet,
        ev: &SystemEvent,
        config: &SimConfig,
    ) -> Result<(SideObservation, StateSet), SystemError> {
        let mut outcomes = BTreeSet::new();
        let mut outputs = BTreeSet::new();
        let mut next = StateSet::new();
        for sys in set {
            let succ = successors(self.sem, sys, ev, config)?;
            outcomes.insert(succ.outcome);
            for (s, o) in succ.next {
                outputs.insert(o);
                next.insert(s);
            }
        }
        let obs = SideObservation {
            class: self.class.to_string(),
            outcomes: outcomes.into_iter().collect(),
            outputs: outputs.iter().map(|o| render(o)).collect(),
        };
        Ok((obs, next))
    }
}

fn render(values: &[Value]) -> String {
    values.iter().map(Value::to_string).collect::<Vec<_>>().join(", ")
}

struct Node {
    trace: Vec<EventTemplate>,
    a: StateSet,
    b: StateSet,
    obs_a: Vec<SideObservation>,
    obs_b: Vec<SideObservation>,
}

/// Runs one fresh object of `class_a` and one of `class_b` through every
/// sequence of up to `depth` calls drawn from the operations both offer
/// (in `class_a`'s order) and reports the shortest, then lexicographically
/// first, trace on which they can be told apart.
///
/// Nondeterminism is tracked as sets of possible systems, so a reported
/// difference is observable on some resolution and NoDivergence covers
/// every resolution.
pub fn compare_substitutability(
    sem: &Semantics<'_>,
    class_a: &str,
    class_b: &str,
    depth: usize,
    config: &SimConfig,
) -> Result<Comparison, SystemError> {
    let h = sem.hierarchy();
    if depth > config.max_depth {
        return Err(SystemError::DepthTooLarge {
            depth,
            cap: config.max_depth,
        });
    }
    for class in [class_a, class_b] {
        let spec = h
            .class(class)
            .ok_or_else(|| SystemError::UnknownClass(class.to_string()))?;
        if spec.is_abstract {
            return Err(SystemError::AbstractClass(class.to_string()));
        }
    }

    let ops_b: Vec<String> = h
        .effective_operations(class_b)
        .iter()
        .map(|o| o.spec.name.clone())
        .collect();
    let mut alphabet = Vec::new();
    for op in h.effective_operations(class_a) {
        if !ops_b.contains(&op.spec.name) {
            continue;
        }
        let rel = sem.relation(class_a, &op.spec.name)?;
        for row in &rel.inputs.rows {
            alphabet.push((op.spec.name.clone(), row.clone()));
        }
    }

    let side_a = Side { sem, class: class_a };
    let side_b = Side { sem, class: class_b };
    let empty: StateSet = [SystemState::new()].into_iter().collect();
    let (oa, a0) = side_a.apply(
        &empty,
        &SystemEvent::New {
            class: class_a.into(),
            obj: OBJ,
        },
        config,
    )?;
    let (ob, b0) = side_b.apply(
        &empty,
        &SystemEvent::New {
            class: class_b.into(),
            obj: OBJ,
        },
        config,
    )?;
    let root = Node {
        trace: vec![EventTemplate::New],
        a: a0,
        b: b0,
        obs_a: vec![oa],
        obs_b: vec![ob],
    };
    if let Some(d) = judge(&root) {
        return Ok(Comparison::Divergence(d));
    }

    let mut visited: HashSet<(StateSet, StateSet)> = HashSet::new();
    visited.insert((root.a.clone(), root.b.clone()));
    let mut queue = VecDeque::from([root]);
    let mut explored = 1;
    while let Some(node) = queue.pop_front() {
        if node.trace.len() > depth {
            continue;
        }
        for (op, input) in &alphabet {
            let ev = SystemEvent::Call {
                obj: OBJ,
                op: op.clone(),
                input: input.clone(),
            };
            let (oa, na) = side_a.apply(&node.a, &ev, config)?;
            let (ob, nb) = side_b.apply(&node.b, &ev, config)?;
            let mut trace = node.trace.clone();
            trace.push(EventTemplate::Call {
                op: op.clone(),
                input: input.iter().map(Value::to_string).collect(),
            });
            let mut obs_a = node.obs_a.clone();
            obs_a.push(oa);
            let mut obs_b = node.obs_b.clone();
            obs_b.push(ob);
            let child = Node {
                trace,
                a: na,
                b: nb,
                obs_a,
                obs_b,
            };
            explored += 1;
            if let Some(d) = judge(&child) {
                return Ok(Comparison::Divergence(d));
            }
            if child.a.is_empty() && child.b.is_empty() {
                continue;
            }
            if visited.insert((child.a.clone(), child.b.clone())) {
                queue.push_back(child);
            }
        }
    }
    Ok(Comparison::NoDivergence { depth, explored })
}

fn judge(node: &Node) -> Option<TraceDivergence> {
    let step = node.trace.len() - 1;
    let (a, b) = (&node.obs_a[step], &node.obs_b[step]);
    let (reason, detail) = if a.outcomes != b.outcomes {
        (
            DivergenceReason::EnablednessMismatch,
            format!(
                "{} is {} on `{}` but {} is {}",
                a.class,
                a.outcome_text(),
                node.trace[step],
                b.class,
                b.outcome_text()
            ),
        )
    } else if a.outputs != b.outputs {
        (
            DivergenceReason::OutputMismatch,
            format!(
                "`{}` can output [{}] on {} but [{}] on {}",
                node.trace[step],
                a.outputs.join("; "),
                a.class,
                b.outputs.join("; "),
                b.class
            ),
        )
    } else {
        return None;
    };
    Some(TraceDivergence {
        trace: node.trace.clone(),
        step,
        reason,
        detail,
        a: node.obs_a.clone(),
        b: node.obs_b.clone(),
    })
}
