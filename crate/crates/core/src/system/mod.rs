//! The promoted view: populations of objects, polymorphic dispatch, global
//! constraints over class extensions, and bounded substitutability
//! experiments.

mod lint;
mod state;
mod trace;

use thiserror::Error;

use crate::semantics::SemanticsError;

pub use lint::{lint_freeness, LintFinding, Severity};
pub use state::{
    constraints_hold, step, successors, ConstraintCheck, ObjectId, Outcome, SimConfig, StepOutcome, Successors,
    SystemEvent, SystemState,
};
pub use trace::{
    compare_substitutability, Comparison, DivergenceReason, EventTemplate, SideObservation, TraceDivergence,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("no live object {0}")]
    UnknownObject(ObjectId),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("`{0}` is abstract and has no direct objects")]
    AbstractClass(String),
    #[error("class `{class}` has no operation `{op}`")]
    UnknownOperation { class: String, op: String },
    #[error("input ({input}) does not fit the parameters of `{op}`")]
    BadInput { op: String, input: String },
    #[error("object pool of {0} identifiers exhausted")]
    PoolExhausted(usize),
    #[error("object {0} already exists")]
    ObjectInUse(ObjectId),
    #[error("trace depth {depth} exceeds the cap of {cap}")]
    DepthTooLarge { depth: usize, cap: usize },
    #[error("inconsistent system state: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

impl SystemError {
    /// Whether the error reports a resource limit rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            SystemError::DepthTooLarge { .. } | SystemError::Semantics(SemanticsError::StateSpaceTooLarge { .. })
        )
    }
}
