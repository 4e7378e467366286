//! Exhaustive finite-state semantics of class intensions.
//!
//! State spaces and operation relations are built by enumeration and cached
//! per [`Semantics`] instance. All results are in a deterministic order so
//! counterexamples and dumps are reproducible.

mod eval;
mod relation;
mod space;

use std::cell::RefCell;
use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::Path;
use std::rc::Rc;

use thiserror::Error;

pub use eval::{eval, holds, Env, EvalFailure};
pub use relation::{build_relation, lift_relation, precondition, OpRelation, Signature, Tuple};
pub use space::{enumerate_states, StateSpace};

use crate::model::{Expr, Hierarchy, Value};

/// Default bound on the number of candidate states per class.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("state space of `{class}` has {size} candidate states, above the cap of {cap}")]
    StateSpaceTooLarge { class: String, size: u128, cap: usize },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class `{class}` has no operation `{op}`")]
    UnknownOperation { class: String, op: String },
    #[error("`{sup}` is not an ancestor of `{sub}`")]
    NotAnAncestor { sub: String, sup: String },
    #[error("internal evaluation error: {0}")]
    Internal(String),
}

pub(crate) fn holds_checked(e: &Expr, env: &Env<'_>) -> Result<bool, SemanticsError> {
    match eval(e, env) {
        Ok(Value::Bool(b)) => Ok(b),
        Ok(v) => Err(SemanticsError::Internal(format!("predicate evaluated to {v}"))),
        Err(EvalFailure::Undefined) => Ok(false),
        Err(EvalFailure::IllTyped(msg)) => Err(SemanticsError::Internal(msg)),
    }
}

/// Restricts a subclass state to the superclass's fields.
///
/// Subclass fields extend the superclass's as a suffix, so the projection
/// is a prefix truncation.
pub fn project(h: &Hierarchy, sub: &str, sup: &str, state: &[Value]) -> Result<Vec<Value>, SemanticsError> {
    if h.class(sub).is_none() {
        return Err(SemanticsError::UnknownClass(sub.to_string()));
    }
    if !h.is_ancestor_or_self(sup, sub) {
        return Err(SemanticsError::NotAnAncestor {
            sub: sub.to_string(),
            sup: sup.to_string(),
        });
    }
    let width = h.effective_fields(sup).len();
    Ok(state[..width].to_vec())
}

/// The projection function tabulated over a subclass state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub sub: String,
    pub sup: String,
    map: Vec<usize>,
}

impl Projection {
    pub fn apply(&self, sub_state: usize) -> usize {
        self.map[sub_state]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// The projection image, sorted and deduplicated.
    pub fn image(&self) -> Vec<usize> {
        let mut img = self.map.clone();
        img.sort_unstable();
        img.dedup();
        img
    }
}

/// Lazily built, cached state spaces and relations for one hierarchy.
pub struct Semantics<'h> {
    h: &'h Hierarchy,
    cap: usize,
    spaces: RefCell<HashMap<String, Rc<StateSpace>>>,
    relations: RefCell<HashMap<(String, String), Rc<OpRelation>>>,
}

impl<'h> Semantics<'h> {
    pub fn new(h: &'h Hierarchy, cap: usize) -> Self {
        Self {
            h,
            cap,
            spaces: RefCell::new(HashMap::new()),
            relations: RefCell::new(HashMap::new()),
        }
    }

    pub fn hierarchy(&self) -> &'h Hierarchy {
        self.h
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn state_space(&self, class: &str) -> Result<Rc<StateSpace>, SemanticsError> {
        if let Some(s) = self.spaces.borrow().get(class) {
            return Ok(s.clone());
        }
        let space = Rc::new(enumerate_states(self.h, class, self.cap)?);
        self.spaces.borrow_mut().insert(class.to_string(), space.clone());
        Ok(space)
    }

    /// Relation of the operation `op` as available on `class`, whether
    /// declared there or inherited.
    pub fn relation(&self, class: &str, op: &str) -> Result<Rc<OpRelation>, SemanticsError> {
        let key = (class.to_string(), op.to_string());
        if let Some(r) = self.relations.borrow().get(&key) {
            return Ok(r.clone());
        }
        let spec = self
            .h
            .effective_operation(class, op)
            .ok_or_else(|| SemanticsError::UnknownOperation {
                class: class.to_string(),
                op: op.to_string(),
            })?
            .spec;
        let space = self.state_space(class)?;
        let rel = Rc::new(build_relation(&space, spec)?);
        self.relations.borrow_mut().insert(key, rel.clone());
        Ok(rel)
    }

    /// States satisfying the effective initialisation (all states when the
    /// lineage declares none).
    pub fn init_states(&self, class: &str) -> Result<Vec<usize>, SemanticsError> {
        let space = self.state_space(class)?;
        let Some(init) = self.h.effective_init(class) else {
            return Ok((0..space.len()).collect());
        };
        let names = space.field_names();
        let mut out = Vec::new();
        for k in 0..space.len() {
            let mut env = Env::new(&names, &space.constants);
            env.post = Some(space.state(k));
            if holds_checked(init, &env)? {
                out.push(k);
            }
        }
        Ok(out)
    }

    /// Whether the effective finalisation holds at a state.
    pub fn final_holds(&self, class: &str, state: usize) -> Result<bool, SemanticsError> {
        let space = self.state_space(class)?;
        let Some(fin) = self.h.effective_final(class) else {
            return Ok(true);
        };
        let names = space.field_names();
        let mut env = Env::new(&names, &space.constants);
        env.pre = Some(space.state(state));
        holds_checked(fin, &env)
    }

    /// Tabulates `project` over the subclass state space.
    pub fn projection(&self, sub: &str, sup: &str) -> Result<Projection, SemanticsError> {
        let sub_space = self.state_space(sub)?;
        let sup_space = self.state_space(sup)?;
        let mut map = Vec::with_capacity(sub_space.len());
        for s in sub_space.states() {
            let a = project(self.h, sub, sup, s)?;
            let idx = sup_space.index_of(&a).ok_or_else(|| {
                SemanticsError::Internal(format!("projection of a `{sub}` state leaves the `{sup}` state space"))
            })?;
            map.push(idx);
        }
        Ok(Projection {
            sub: sub.to_string(),
            sup: sup.to_string(),
            map,
        })
    }

    /// Writes one `<Class>.<op>.rel` file per class and available operation.
    pub fn dump_relations(&self, dir: &Path) -> Result<Vec<String>, DumpError> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for class in &self.h.classes {
            let space = self.state_space(&class.name)?;
            for op in self.h.effective_operations(&class.name) {
                let rel = self.relation(&class.name, &op.spec.name)?;
                let file = format!("{}.{}.rel", class.name, op.spec.name);
                fs::write(dir.join(&file), rel.dump(&space))?;
                written.push(file);
            }
        }
        Ok(written)
    }
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("writing relation dump: {0}")]
    Io(#[from] io::Error),
}
