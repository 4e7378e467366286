//! Static typing of expressions against a class and operation signature.
//!
//! The same combination rules are used by the DSL front end, which types
//! expressions bottom-up while it still has source spans, and by
//! [`validate`](super::validate) on in-memory hierarchies.

use std::fmt;

use super::{BinaryOp, Domain, Expr, Field, UnaryOp, Value, VarKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type {
    Bool,
    Int,
    Enum(Vec<String>),
    Seq(Box<Type>),
    /// `<>` before its element type is known.
    EmptySeq,
}

impl Type {
    pub fn of_domain(d: &Domain) -> Type {
        match d {
            Domain::Bool => Type::Bool,
            Domain::IntRange { .. } => Type::Int,
            Domain::Enum { literals } => Type::Enum(literals.clone()),
            Domain::Seq { elem, .. } => Type::Seq(Box::new(Type::of_domain(elem))),
        }
    }

    fn is_seq(&self) -> bool {
        matches!(self, Type::Seq(_) | Type::EmptySeq)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bool => f.write_str("bool"),
            Type::Int => f.write_str("int"),
            Type::Enum(lits) => write!(f, "enum {{{}}}", lits.join(", ")),
            Type::Seq(t) => write!(f, "seq({t})"),
            Type::EmptySeq => f.write_str("seq(?)"),
        }
    }
}

/// Most specific common type, if the two are compatible.
pub fn unify(a: &Type, b: &Type) -> Option<Type> {
    match (a, b) {
        (Type::EmptySeq, t) | (t, Type::EmptySeq) if t.is_seq() => Some(t.clone()),
        (Type::Seq(x), Type::Seq(y)) => unify(x, y).map(|t| Type::Seq(Box::new(t))),
        (x, y) if x == y => Some(x.clone()),
        _ => None,
    }
}

/// Which variable kinds an expression may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Allowed {
    pub state: bool,
    pub primed: bool,
    pub io: bool,
}

impl Allowed {
    pub const STATE: Allowed = Allowed {
        state: true,
        primed: false,
        io: false,
    };
    pub const PRIMED: Allowed = Allowed {
        state: false,
        primed: true,
        io: false,
    };
    pub const OPERATION: Allowed = Allowed {
        state: true,
        primed: true,
        io: true,
    };
}

/// Names visible to an expression.
#[derive(Debug, Clone)]
pub struct Scope {
    pub fields: Vec<Field>,
    pub constants: Vec<(String, Domain)>,
    pub inputs: Vec<Field>,
    pub outputs: Vec<Field>,
    pub allowed: Allowed,
}

impl Scope {
    pub fn new(fields: Vec<Field>, constants: Vec<(String, Domain)>, allowed: Allowed) -> Self {
        Self {
            fields,
            constants,
            inputs: Vec::new(),
            outputs: Vec::new(),
            allowed,
        }
    }

    pub fn with_signature(mut self, inputs: Vec<Field>, outputs: Vec<Field>) -> Self {
        self.inputs = inputs;
        self.outputs = outputs;
        self
    }

    fn find<'a>(list: &'a [Field], name: &str) -> Option<&'a Domain> {
        list.iter().find(|f| f.name == name).map(|f| &f.domain)
    }

    /// Domain of a variable reference, or a message explaining why it does
    /// not resolve.
    pub fn lookup(&self, name: &str, kind: VarKind) -> Result<&Domain, String> {
        let (found, allowed, what) = match kind {
            VarKind::State => (Self::find(&self.fields, name), self.allowed.state, "state variable"),
            VarKind::Primed => (Self::find(&self.fields, name), self.allowed.primed, "primed variable"),
            VarKind::Input => (Self::find(&self.inputs, name), self.allowed.io, "input"),
            VarKind::Output => (Self::find(&self.outputs, name), self.allowed.io, "output"),
            VarKind::Const => (
                self.constants.iter().find(|(n, _)| n == name).map(|(_, d)| d),
                true,
                "constant",
            ),
        };
        let decorated = decorate(name, kind);
        match found {
            None => Err(format!("undeclared {what} `{decorated}`")),
            Some(_) if !allowed => Err(format!("{what} `{decorated}` is not allowed here")),
            Some(d) => Ok(d),
        }
    }

    fn domains(&self) -> impl Iterator<Item = &Domain> {
        self.fields
            .iter()
            .chain(&self.inputs)
            .chain(&self.outputs)
            .map(|f| &f.domain)
            .chain(self.constants.iter().map(|(_, d)| d))
    }

    /// The enumeration a bare literal name belongs to. Ambiguity between
    /// distinct enumerations in scope is an error.
    pub fn enum_of_literal(&self, name: &str) -> Result<Type, String> {
        let mut found: Option<Vec<String>> = None;
        for d in self.domains() {
            let lits = match d {
                Domain::Enum { literals } => literals,
                Domain::Seq { elem, .. } => match &**elem {
                    Domain::Enum { literals } => literals,
                    _ => continue,
                },
                _ => continue,
            };
            if lits.iter().any(|l| l == name) {
                match &found {
                    Some(prev) if prev != lits => {
                        return Err(format!("literal `{name}` belongs to more than one enumeration"));
                    }
                    _ => found = Some(lits.clone()),
                }
            }
        }
        found.map(Type::Enum).ok_or_else(|| format!("unknown name `{name}`"))
    }

    pub fn is_literal(&self, name: &str) -> bool {
        self.enum_of_literal(name).is_ok()
    }
}

pub fn decorate(name: &str, kind: VarKind) -> String {
    match kind {
        VarKind::Primed => format!("{name}'"),
        VarKind::Input => format!("{name}?"),
        VarKind::Output => format!("{name}!"),
        VarKind::State | VarKind::Const => name.to_string(),
    }
}

pub fn type_of_value(v: &Value, scope: &Scope) -> Result<Type, String> {
    match v {
        Value::Bool(_) => Ok(Type::Bool),
        Value::Int(_) => Ok(Type::Int),
        Value::Enum(name) => scope.enum_of_literal(name),
        Value::Seq(items) => {
            let mut t = Type::EmptySeq;
            for item in items {
                let it = Type::Seq(Box::new(type_of_value(item, scope)?));
                t = unify(&t, &it).ok_or("sequence literal mixes element types")?;
            }
            Ok(t)
        }
    }
}

pub fn unary_type(op: UnaryOp, t: &Type) -> Result<Type, String> {
    match (op, t) {
        (UnaryOp::Not, Type::Bool) => Ok(Type::Bool),
        (UnaryOp::Head, Type::Seq(e)) => Ok((**e).clone()),
        (UnaryOp::Tail, Type::Seq(_)) => Ok(t.clone()),
        (UnaryOp::Len, t) if t.is_seq() => Ok(Type::Int),
        (UnaryOp::IsEmpty, t) if t.is_seq() => Ok(Type::Bool),
        (UnaryOp::Head | UnaryOp::Tail, Type::EmptySeq) => {
            Err("head/tail of the empty sequence literal is always undefined".into())
        }
        (op, t) => Err(format!("operator {op:?} cannot be applied to {t}")),
    }
}

pub fn binary_type(op: BinaryOp, l: &Type, r: &Type) -> Result<Type, String> {
    use BinaryOp::*;
    let mismatch = || format!("operator `{}` cannot combine {l} and {r}", op.symbol());
    match op {
        Eq | Ne => unify(l, r).map(|_| Type::Bool).ok_or_else(mismatch),
        Lt | Le | Gt | Ge => match (l, r) {
            (Type::Int, Type::Int) => Ok(Type::Bool),
            _ => Err(mismatch()),
        },
        Add | Sub => match (l, r) {
            (Type::Int, Type::Int) => Ok(Type::Int),
            _ => Err(mismatch()),
        },
        And | Or | Implies => match (l, r) {
            (Type::Bool, Type::Bool) => Ok(Type::Bool),
            _ => Err(mismatch()),
        },
        Append => {
            if !l.is_seq() || r.is_seq() {
                return Err(mismatch());
            }
            unify(l, &Type::Seq(Box::new(r.clone()))).ok_or_else(mismatch)
        }
        Concat => {
            if !l.is_seq() || !r.is_seq() {
                return Err(mismatch());
            }
            unify(l, r).ok_or_else(mismatch)
        }
    }
}

/// Infers the type of `e`, checking every variable against `scope`.
pub fn type_of(e: &Expr, scope: &Scope) -> Result<Type, String> {
    match e {
        Expr::Var { name, kind } => scope.lookup(name, *kind).map(Type::of_domain),
        Expr::Lit(v) => type_of_value(v, scope),
        Expr::EmptySeq => Ok(Type::EmptySeq),
        Expr::Unary(op, inner) => unary_type(*op, &type_of(inner, scope)?),
        Expr::Binary(op, l, r) => binary_type(*op, &type_of(l, scope)?, &type_of(r, scope)?),
    }
}

/// Checks that `e` is a well-typed predicate.
pub fn check_predicate(e: &Expr, scope: &Scope) -> Result<(), String> {
    match type_of(e, scope)? {
        Type::Bool => Ok(()),
        t => Err(format!("expected a predicate, found an expression of type {t}")),
    }
}
