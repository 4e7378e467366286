//! Data model for class hierarchy specifications: domains, values,
//! expressions, classes, and structural validation.

mod class;
pub mod domain;
mod expr;
pub mod typing;
mod validate;
mod value;

pub use class::{ClassSpec, Constant, EffectiveOp, Field, GlobalConstraint, Hierarchy, OpMode, OperationSpec};
pub use domain::Domain;
pub use expr::{BinaryOp, Expr, UnaryOp, VarKind};
pub use validate::{class_scope, validate, StructuralError};
pub use value::{format_binding, Value};
