use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::SystemError;
use crate::model::{format_binding, Hierarchy, Value};
use crate::refinement::Mode;
use crate::semantics::{holds_checked, project, Env, Semantics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ObjectId(pub usize);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SystemEvent {
    New {
        class: String,
        obj: ObjectId,
    },
    Delete(ObjectId),
    /// Inputs are positional, in the operation's parameter order.
    Call {
        obj: ObjectId,
        op: String,
        input: Vec<Value>,
    },
}

impl fmt::Display for SystemEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemEvent::New { class, obj } => write!(f, "new {class} {obj}"),
            SystemEvent::Delete(obj) => write!(f, "delete {obj}"),
            SystemEvent::Call { obj, op, input } => {
                let args: Vec<String> = input.iter().map(Value::to_string).collect();
                write!(f, "{obj}.{op}({})", args.join(", "))
            }
        }
    }
}

/// When global constraints are enforced on a call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintCheck {
    /// As a guard: the call is refused unless the constraints hold in the
    /// state it starts from.
    #[default]
    BeforeCall,
    /// As an invariant: the call is refused unless they hold afterwards.
    AfterState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Enabled,
    Blocked,
    /// Nonblocking mode: the event falls outside a contract, so any
    /// behaviour is permitted and none is simulated.
    Violated,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Enabled => "enabled",
            Outcome::Blocked => "blocked",
            Outcome::Violated => "violated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub mode: Mode,
    pub constraint_check: ConstraintCheck,
    pub pool_size: usize,
    pub max_depth: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Nonblocking,
            constraint_check: ConstraintCheck::BeforeCall,
            pool_size: 4,
            max_depth: 6,
        }
    }
}

impl SimConfig {
    fn refused(&self) -> Outcome {
        match self.mode {
            Mode::Blocking => Outcome::Blocked,
            Mode::Nonblocking => Outcome::Violated,
        }
    }
}

/// A population of objects. Each object keeps only the state of its direct
/// class; its view as any superclass is the projection of that state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SystemState {
    existing: BTreeMap<String, BTreeSet<ObjectId>>,
    local: BTreeMap<ObjectId, Vec<Value>>,
}

impl SystemState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Objects whose direct class is `class`.
    pub fn direct(&self, class: &str) -> impl Iterator<Item = ObjectId> + '_ {
        self.existing.get(class).into_iter().flatten().copied()
    }

    /// Objects of `class` or any of its descendants.
    pub fn extension(&self, h: &Hierarchy, class: &str) -> BTreeSet<ObjectId> {
        h.descendants_or_self(class)
            .into_iter()
            .flat_map(|c| self.direct(&c.name))
            .collect()
    }

    pub fn class_of(&self, obj: ObjectId) -> Option<&str> {
        self.existing
            .iter()
            .find(|(_, objs)| objs.contains(&obj))
            .map(|(c, _)| c.as_str())
    }

    pub fn local_state(&self, obj: ObjectId) -> Option<&[Value]> {
        self.local.get(&obj).map(Vec::as_slice)
    }

    /// The object's state seen as an instance of `class`.
    pub fn view(&self, h: &Hierarchy, obj: ObjectId, class: &str) -> Result<Vec<Value>, SystemError> {
        let direct = self.class_of(obj).ok_or(SystemError::UnknownObject(obj))?;
        let state = &self.local[&obj];
        Ok(project(h, direct, class, state)?)
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.local.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.local.len()
    }

    pub fn is_empty(&self) -> bool {
        self.local.is_empty()
    }

    /// Smallest identifier not in use, if the pool has one left.
    pub fn fresh_id(&self, pool_size: usize) -> Option<ObjectId> {
        (0..pool_size).map(ObjectId).find(|o| !self.local.contains_key(o))
    }

    fn insert(&mut self, class: &str, obj: ObjectId, state: Vec<Value>) {
        self.existing.entry(class.to_string()).or_default().insert(obj);
        self.local.insert(obj, state);
    }

    fn remove(&mut self, obj: ObjectId) {
        for objs in self.existing.values_mut() {
            objs.remove(&obj);
        }
        self.existing.retain(|_, objs| !objs.is_empty());
        self.local.remove(&obj);
    }

    fn set_local(&mut self, obj: ObjectId, state: Vec<Value>) {
        self.local.insert(obj, state);
    }

    /// Checks the representation invariants: disjoint direct extensions,
    /// no direct objects of abstract classes, and local states inside their
    /// class's state space. Returns a description of the first breach.
    pub fn check_invariants(&self, sem: &Semantics<'_>) -> Result<(), String> {
        let h = sem.hierarchy();
        let mut seen = BTreeSet::new();
        for (class, objs) in &self.existing {
            let spec = h.class(class).ok_or_else(|| format!("unknown class `{class}`"))?;
            if spec.is_abstract && !objs.is_empty() {
                return Err(format!("abstract class `{class}` has direct objects"));
            }
            for o in objs {
                if !seen.insert(*o) {
                    return Err(format!("{o} is a direct object of two classes"));
                }
                let space = sem.state_space(class).map_err(|e| e.to_string())?;
                let state = self.local.get(o).ok_or_else(|| format!("{o} has no local state"))?;
                if space.index_of(state).is_none() {
                    return Err(format!("{o} is outside the `{class}` state space"));
                }
            }
        }
        if seen.len() != self.local.len() {
            return Err("local state for an object outside every extension".into());
        }
        Ok(())
    }

    /// Renders `{o0: BQueue {items=<a>}, ...}`.
    pub fn display(&self, sem: &Semantics<'_>) -> String {
        let parts: Vec<String> = self
            .local
            .iter()
            .map(|(o, s)| {
                let class = self.class_of(*o).unwrap_or("?");
                let names: Vec<String> = sem
                    .state_space(class)
                    .map(|sp| sp.field_names().into_iter().map(String::from).collect())
                    .unwrap_or_default();
                format!("{o}: {class} {}", format_binding(names.iter().map(String::as_str), s))
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Whether every global constraint covering `obj` holds in `sys`.
///
/// A constraint on `C` is universally quantified over the derived extension
/// of `C`, so it covers objects of every descendant.
pub fn constraints_hold(sem: &Semantics<'_>, sys: &SystemState, obj: ObjectId) -> Result<bool, SystemError> {
    let h = sem.hierarchy();
    let direct = sys.class_of(obj).ok_or(SystemError::UnknownObject(obj))?;
    for gc in h
        .constraints
        .iter()
        .filter(|gc| h.is_ancestor_or_self(&gc.class, direct))
    {
        let space = sem.state_space(&gc.class)?;
        let names = space.field_names();
        for o in sys.extension(h, &gc.class) {
            let view = sys.view(h, o, &gc.class)?;
            let mut env = Env::new(&names, &space.constants);
            env.pre = Some(&view);
            if !holds_checked(&gc.body, &env)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every possible result of an event: the outcome and, when enabled, each
/// successor system paired with the outputs produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Successors {
    pub outcome: Outcome,
    pub next: Vec<(SystemState, Vec<Value>)>,
}

impl Successors {
    fn refused(outcome: Outcome) -> Self {
        Self {
            outcome,
            next: Vec::new(),
        }
    }
}

pub fn successors(
    sem: &Semantics<'_>,
    sys: &SystemState,
    ev: &SystemEvent,
    config: &SimConfig,
) -> Result<Successors, SystemError> {
    let h = sem.hierarchy();
    match ev {
        SystemEvent::New { class, obj } => {
            let spec = h.class(class).ok_or_else(|| SystemError::UnknownClass(class.clone()))?;
            if spec.is_abstract {
                return Err(SystemError::AbstractClass(class.clone()));
            }
            if obj.0 >= config.pool_size {
                return Err(SystemError::PoolExhausted(config.pool_size));
            }
            if sys.local.contains_key(obj) {
                return Err(SystemError::ObjectInUse(*obj));
            }
            let space = sem.state_space(class)?;
            let mut next = Vec::new();
            let mut refused = false;
            for k in sem.init_states(class)? {
                let mut s = sys.clone();
                s.insert(class, *obj, space.state(k).to_vec());
                if constraints_hold(sem, &s, *obj)? {
                    next.push((s, Vec::new()));
                } else {
                    refused = true;
                }
            }
            Ok(match (next.is_empty(), refused) {
                (false, _) => Successors {
                    outcome: Outcome::Enabled,
                    next,
                },
                (true, true) => Successors::refused(config.refused()),
                (true, false) => Successors::refused(Outcome::Blocked),
            })
        }
        SystemEvent::Delete(obj) => {
            let class = sys.class_of(*obj).ok_or(SystemError::UnknownObject(*obj))?;
            let space = sem.state_space(class)?;
            let k = space
                .index_of(&sys.local[obj])
                .ok_or_else(|| SystemError::Corrupt(format!("{obj} outside its state space")))?;
            if !sem.final_holds(class, k)? {
                return Ok(Successors::refused(Outcome::Blocked));
            }
            let mut s = sys.clone();
            s.remove(*obj);
            Ok(Successors {
                outcome: Outcome::Enabled,
                next: vec![(s, Vec::new())],
            })
        }
        SystemEvent::Call { obj, op, input } => {
            let class = sys.class_of(*obj).ok_or(SystemError::UnknownObject(*obj))?;
            if h.effective_operation(class, op).is_none() {
                return Err(SystemError::UnknownOperation {
                    class: class.to_string(),
                    op: op.clone(),
                });
            }
            let rel = sem.relation(class, op)?;
            let space = sem.state_space(class)?;
            let i = rel
                .inputs
                .rows
                .iter()
                .position(|r| r == input)
                .ok_or_else(|| SystemError::BadInput {
                    op: op.clone(),
                    input: input.iter().map(Value::to_string).collect::<Vec<_>>().join(", "),
                })?;
            let pre = space
                .index_of(&sys.local[obj])
                .ok_or_else(|| SystemError::Corrupt(format!("{obj} outside its state space")))?;
            if config.constraint_check == ConstraintCheck::BeforeCall && !constraints_hold(sem, sys, *obj)? {
                return Ok(Successors::refused(config.refused()));
            }
            if !rel.enabled(pre, i) {
                return Ok(Successors::refused(config.refused()));
            }
            let mut next = Vec::new();
            for t in rel.successors(pre, i) {
                let mut s = sys.clone();
                s.set_local(*obj, space.state(t.post).to_vec());
                if config.constraint_check == ConstraintCheck::AfterState && !constraints_hold(sem, &s, *obj)? {
                    continue;
                }
                next.push((s, rel.outputs.rows[t.output].clone()));
            }
            if next.is_empty() {
                return Ok(Successors::refused(config.refused()));
            }
            Ok(Successors {
                outcome: Outcome::Enabled,
                next,
            })
        }
    }
}

/// Result of a single deterministic step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Enabled { state: SystemState, output: Vec<Value> },
    Blocked,
    ContractViolated,
}

/// Performs one event, resolving nondeterminism by taking the first
/// successor in canonical order.
pub fn step(
    sem: &Semantics<'_>,
    sys: &SystemState,
    ev: &SystemEvent,
    config: &SimConfig,
) -> Result<StepOutcome, SystemError> {
    let succ = successors(sem, sys, ev, config)?;
    Ok(match succ.outcome {
        Outcome::Enabled => {
            let (state, output) = succ.next.into_iter().next().expect("enabled events have a successor");
            StepOutcome::Enabled { state, output }
        }
        Outcome::Blocked => StepOutcome::Blocked,
        Outcome::Violated => StepOutcome::ContractViolated,
    })
}
