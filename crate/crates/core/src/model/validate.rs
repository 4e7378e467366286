use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use super::typing::{check_predicate, Allowed, Scope};
use super::{ClassSpec, Hierarchy, OpMode};
use crate::semantics::{self, Env};

/// A violated structural or typing rule of a [`Hierarchy`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Error)]
pub enum StructuralError {
    #[error("class `{class}` is declared more than once")]
    DuplicateClass { class: String },
    #[error("class `{class}` extends unknown class `{parent}`")]
    UnknownParent { class: String, parent: String },
    #[error("class `{class}` is part of an inheritance cycle")]
    CyclicParent { class: String },
    #[error("class `{class}`: field `{field}` is already declared in this class or an ancestor")]
    DuplicateField { class: String, field: String },
    #[error("class `{class}`: constant `{name}` clashes with another constant or field")]
    DuplicateConstant { class: String, name: String },
    #[error("class `{class}`: constant `{name}` has a value outside its domain")]
    ConstantOutOfDomain { class: String, name: String },
    #[error("class `{class}`: `{item}` has an invalid domain: {reason}")]
    InvalidDomain {
        class: String,
        item: String,
        reason: String,
    },
    #[error("class `{class}`: operation `{op}` is declared more than once")]
    DuplicateOperation { class: String, op: String },
    #[error("class `{class}`: operation `{op}` overrides nothing; no ancestor declares it")]
    OverrideWithoutAncestor { class: String, op: String },
    #[error("class `{class}`: operation `{op}` is already declared by an ancestor; use `override op`")]
    IntroducesExisting { class: String, op: String },
    #[error("class `{class}`: operation `{op}` does not match the inherited signature")]
    SignatureMismatch { class: String, op: String },
    #[error("class `{class}`: parameter `{param}` of operation `{op}` is declared twice")]
    DuplicateParameter { class: String, op: String, param: String },
    #[error("class `{class}`, {context}: {message}")]
    IllTyped {
        class: String,
        context: String,
        message: String,
    },
    #[error("class `{class}`: initialisation admits state {witness} that violates the invariant")]
    InitOutsideInvariant { class: String, witness: String },
    #[error("global constraint refers to unknown class `{class}`")]
    UnknownConstraintClass { class: String },
}

impl StructuralError {
    /// The class the error is reported against.
    pub fn class(&self) -> &str {
        use StructuralError::*;
        match self {
            DuplicateClass { class }
            | UnknownParent { class, .. }
            | CyclicParent { class }
            | DuplicateField { class, .. }
            | DuplicateConstant { class, .. }
            | ConstantOutOfDomain { class, .. }
            | InvalidDomain { class, .. }
            | DuplicateOperation { class, .. }
            | OverrideWithoutAncestor { class, .. }
            | IntroducesExisting { class, .. }
            | SignatureMismatch { class, .. }
            | DuplicateParameter { class, .. }
            | IllTyped { class, .. }
            | InitOutsideInvariant { class, .. }
            | UnknownConstraintClass { class } => class,
        }
    }
}

/// Enumeration budget for the init-entails-invariant check. Larger classes
/// are left to the checker, which reports the cap itself.
const INIT_CHECK_CAP: u128 = 1_000_000;

/// Scope for expressions of `class` with the given variable permissions.
pub fn class_scope(h: &Hierarchy, class: &str, allowed: Allowed) -> Scope {
    let constants = h
        .effective_constants(class)
        .into_iter()
        .map(|c| (c.name, c.domain))
        .collect();
    Scope::new(h.effective_fields(class), constants, allowed)
}

/// Returns every violated rule, sorted and deduplicated. Empty iff valid.
pub fn validate(h: &Hierarchy) -> Vec<StructuralError> {
    let mut errors = BTreeSet::new();

    let mut seen = HashSet::new();
    for c in &h.classes {
        if !seen.insert(c.name.as_str()) {
            errors.insert(StructuralError::DuplicateClass { class: c.name.clone() });
        }
    }

    let mut broken: HashSet<&str> = HashSet::new();
    for c in &h.classes {
        if let Some(p) = &c.parent {
            if h.class(p).is_none() {
                errors.insert(StructuralError::UnknownParent {
                    class: c.name.clone(),
                    parent: p.clone(),
                });
                broken.insert(&c.name);
            }
        }
        if in_cycle(h, &c.name) {
            errors.insert(StructuralError::CyclicParent { class: c.name.clone() });
            broken.insert(&c.name);
        }
    }

    for c in &h.classes {
        // Descendants of broken classes would only repeat the same error.
        if h.lineage(&c.name).iter().any(|a| broken.contains(a.name.as_str())) || broken.contains(c.name.as_str()) {
            continue;
        }
        check_class(h, c, &mut errors);
    }

    for gc in &h.constraints {
        if h.class(&gc.class).is_none() {
            errors.insert(StructuralError::UnknownConstraintClass {
                class: gc.class.clone(),
            });
            continue;
        }
        let scope = class_scope(h, &gc.class, Allowed::STATE);
        if let Err(message) = check_predicate(&gc.body, &scope) {
            errors.insert(StructuralError::IllTyped {
                class: gc.class.clone(),
                context: "global constraint".into(),
                message,
            });
        }
    }

    errors.into_iter().collect()
}

fn in_cycle(h: &Hierarchy, name: &str) -> bool {
    let mut cur = h.class(name);
    let mut steps = 0;
    while let Some(c) = cur {
        let Some(p) = c.parent.as_deref() else {
            return false;
        };
        if p == name {
            return true;
        }
        steps += 1;
        if steps > h.classes.len() {
            // A cycle above `name` that does not include it.
            return false;
        }
        cur = h.class(p);
    }
    false
}

fn check_class(h: &Hierarchy, c: &ClassSpec, errors: &mut BTreeSet<StructuralError>) {
    let class = c.name.clone();
    let inherited_fields: Vec<String> = h
        .ancestors(&c.name)
        .iter()
        .flat_map(|a| a.fields.iter().map(|f| f.name.clone()))
        .collect();
    let inherited_consts: Vec<String> = h
        .ancestors(&c.name)
        .iter()
        .flat_map(|a| a.constants.iter().map(|k| k.name.clone()))
        .collect();

    let mut names: Vec<String> = inherited_fields.clone();
    for f in &c.fields {
        if names.contains(&f.name) {
            errors.insert(StructuralError::DuplicateField {
                class: class.clone(),
                field: f.name.clone(),
            });
        }
        names.push(f.name.clone());
        if let Err(reason) = f.domain.check() {
            errors.insert(StructuralError::InvalidDomain {
                class: class.clone(),
                item: f.name.clone(),
                reason,
            });
        }
    }

    let all_fields: Vec<String> = h
        .descendants_or_self(&c.name)
        .iter()
        .flat_map(|d| h.effective_fields(&d.name))
        .map(|f| f.name)
        .collect();
    let mut const_names = inherited_consts;
    for k in &c.constants {
        if const_names.contains(&k.name) || all_fields.contains(&k.name) {
            errors.insert(StructuralError::DuplicateConstant {
                class: class.clone(),
                name: k.name.clone(),
            });
        }
        const_names.push(k.name.clone());
        match k.domain.check() {
            Err(reason) => {
                errors.insert(StructuralError::InvalidDomain {
                    class: class.clone(),
                    item: k.name.clone(),
                    reason,
                });
            }
            Ok(()) if !k.domain.contains(&k.value) => {
                errors.insert(StructuralError::ConstantOutOfDomain {
                    class: class.clone(),
                    name: k.name.clone(),
                });
            }
            Ok(()) => {}
        }
    }

    let mut typed = |e: &crate::model::Expr, allowed: Allowed, context: &str| {
        let scope = class_scope(h, &c.name, allowed);
        if let Err(message) = check_predicate(e, &scope) {
            errors.insert(StructuralError::IllTyped {
                class: class.clone(),
                context: context.to_string(),
                message,
            });
            false
        } else {
            true
        }
    };
    let mut well_typed = typed(&c.invariant, Allowed::STATE, "invariant");
    if let Some(init) = &c.init {
        well_typed &= typed(init, Allowed::PRIMED, "init");
    }
    if let Some(fin) = &c.finalisation {
        typed(fin, Allowed::STATE, "final");
    }

    let inherited_ops = |name: &str| h.ancestors(&c.name).into_iter().find_map(|a| a.operation(name));
    for (k, op) in c.operations.iter().enumerate() {
        if c.operations[..k].iter().any(|o| o.name == op.name) {
            errors.insert(StructuralError::DuplicateOperation {
                class: class.clone(),
                op: op.name.clone(),
            });
        }
        match (op.mode, inherited_ops(&op.name)) {
            (OpMode::Specializes, None) => {
                errors.insert(StructuralError::OverrideWithoutAncestor {
                    class: class.clone(),
                    op: op.name.clone(),
                });
            }
            (OpMode::Specializes, Some(parent_op)) if !op.same_signature(parent_op) => {
                errors.insert(StructuralError::SignatureMismatch {
                    class: class.clone(),
                    op: op.name.clone(),
                });
            }
            (OpMode::Introduces, Some(_)) => {
                errors.insert(StructuralError::IntroducesExisting {
                    class: class.clone(),
                    op: op.name.clone(),
                });
            }
            _ => {}
        }
        let params: Vec<_> = op.inputs.iter().chain(&op.outputs).collect();
        for (j, p) in params.iter().enumerate() {
            if params[..j].iter().any(|q| q.name == p.name) {
                errors.insert(StructuralError::DuplicateParameter {
                    class: class.clone(),
                    op: op.name.clone(),
                    param: p.name.clone(),
                });
            }
            if let Err(reason) = p.domain.check() {
                errors.insert(StructuralError::InvalidDomain {
                    class: class.clone(),
                    item: format!("{}.{}", op.name, p.name),
                    reason,
                });
            }
        }
        let scope = class_scope(h, &c.name, Allowed::OPERATION).with_signature(op.inputs.clone(), op.outputs.clone());
        if let Err(message) = check_predicate(&op.body, &scope) {
            errors.insert(StructuralError::IllTyped {
                class: class.clone(),
                context: format!("operation `{}`", op.name),
                message,
            });
        }
    }

    if well_typed && h.lineage(&c.name).iter().all(|a| typed_ok(h, a)) {
        if let Some(witness) = init_outside_invariant(h, &c.name) {
            errors.insert(StructuralError::InitOutsideInvariant { class, witness });
        }
    }
}

fn typed_ok(h: &Hierarchy, c: &ClassSpec) -> bool {
    check_predicate(&c.invariant, &class_scope(h, &c.name, Allowed::STATE)).is_ok()
        && c.init
            .as_ref()
            .is_none_or(|i| check_predicate(i, &class_scope(h, &c.name, Allowed::PRIMED)).is_ok())
}

/// First after-state (in enumeration order) admitted by the effective
/// initialisation but outside the effective invariant.
fn init_outside_invariant(h: &Hierarchy, class: &str) -> Option<String> {
    let init = h.effective_init(class)?;
    let fields = h.effective_fields(class);
    if fields.iter().any(|f| f.domain.check().is_err()) {
        return None;
    }
    if crate::model::domain::product_cardinality(fields.iter().map(|f| &f.domain)) > INIT_CHECK_CAP {
        return None;
    }
    let consts = h.effective_constants(class);
    let names: Vec<&str> = fields.iter().map(|f| f.name.as_str()).collect();
    let invariant = h.effective_invariant(class);
    for row in crate::model::domain::product_values(fields.iter().map(|f| &f.domain)) {
        let mut env = Env::new(&names, &consts);
        env.post = Some(&row);
        if !semantics::holds(init, &env) {
            continue;
        }
        let mut as_state = Env::new(&names, &consts);
        as_state.pre = Some(&row);
        if !invariant.iter().all(|inv| semantics::holds(inv, &as_state)) {
            return Some(crate::model::format_binding(names.iter().copied(), &row));
        }
    }
    None
}
