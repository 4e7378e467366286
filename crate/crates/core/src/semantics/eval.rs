use crate::model::{BinaryOp, Constant, Expr, UnaryOp, Value, VarKind};

/// Why an expression has no value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalFailure {
    /// `head`/`tail` of an empty sequence, or integer overflow.
    Undefined,
    /// The expression does not fit the environment. Indicates a bug
    /// upstream of evaluation, since inputs are type-checked.
    IllTyped(String),
}

/// Variable bindings for one evaluation. Slots left `None` or empty make
/// references to them ill-typed.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub fields: &'a [&'a str],
    pub constants: &'a [Constant],
    pub pre: Option<&'a [Value]>,
    pub post: Option<&'a [Value]>,
    pub input_names: &'a [&'a str],
    pub inputs: &'a [Value],
    pub output_names: &'a [&'a str],
    pub outputs: &'a [Value],
}

impl<'a> Env<'a> {
    pub fn new(fields: &'a [&'a str], constants: &'a [Constant]) -> Self {
        Self {
            fields,
            constants,
            pre: None,
            post: None,
            input_names: &[],
            inputs: &[],
            output_names: &[],
            outputs: &[],
        }
    }

    fn lookup(&self, name: &str, kind: VarKind) -> Result<&'a Value, EvalFailure> {
        let slot = |names: &[&str], values: Option<&'a [Value]>| {
            let idx = names.iter().position(|n| *n == name)?;
            values?.get(idx)
        };
        let found = match kind {
            VarKind::State => slot(self.fields, self.pre),
            VarKind::Primed => slot(self.fields, self.post),
            VarKind::Input => slot(self.input_names, Some(self.inputs)),
            VarKind::Output => slot(self.output_names, Some(self.outputs)),
            VarKind::Const => self.constants.iter().find(|c| c.name == name).map(|c| &c.value),
        };
        found.ok_or_else(|| EvalFailure::IllTyped(format!("unbound variable `{name}` ({kind:?})")))
    }
}

fn ill(what: &str) -> EvalFailure {
    EvalFailure::IllTyped(what.to_string())
}

/// Evaluates `e`. Undefinedness propagates strictly through every
/// operator, including the logical connectives.
pub fn eval(e: &Expr, env: &Env<'_>) -> Result<Value, EvalFailure> {
    match e {
        Expr::Var { name, kind } => env.lookup(name, *kind).cloned(),
        Expr::Lit(v) => Ok(v.clone()),
        Expr::EmptySeq => Ok(Value::Seq(Vec::new())),
        Expr::Unary(op, inner) => {
            let v = eval(inner, env)?;
            match op {
                UnaryOp::Not => v.as_bool().map(|b| Value::Bool(!b)).ok_or_else(|| ill("~ of non-bool")),
                UnaryOp::Head => {
                    let s = v.as_seq().ok_or_else(|| ill("head of non-sequence"))?;
                    s.first().cloned().ok_or(EvalFailure::Undefined)
                }
                UnaryOp::Tail => {
                    let s = v.as_seq().ok_or_else(|| ill("tail of non-sequence"))?;
                    if s.is_empty() {
                        Err(EvalFailure::Undefined)
                    } else {
                        Ok(Value::Seq(s[1..].to_vec()))
                    }
                }
                UnaryOp::Len => {
                    let s = v.as_seq().ok_or_else(|| ill("# of non-sequence"))?;
                    Ok(Value::Int(s.len() as i64))
                }
                UnaryOp::IsEmpty => {
                    let s = v.as_seq().ok_or_else(|| ill("isempty of non-sequence"))?;
                    Ok(Value::Bool(s.is_empty()))
                }
            }
        }
        Expr::Binary(op, l, r) => {
            let a = eval(l, env)?;
            let b = eval(r, env)?;
            binary(*op, a, b)
        }
    }
}

fn binary(op: BinaryOp, a: Value, b: Value) -> Result<Value, EvalFailure> {
    use BinaryOp::*;
    let ints = |a: &Value, b: &Value| match (a, b) {
        (Value::Int(x), Value::Int(y)) => Ok((*x, *y)),
        _ => Err(ill("arithmetic on non-integers")),
    };
    let bools = |a: &Value, b: &Value| match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => Ok((*x, *y)),
        _ => Err(ill("connective on non-booleans")),
    };
    Ok(match op {
        Eq => Value::Bool(a == b),
        Ne => Value::Bool(a != b),
        Lt => ints(&a, &b).map(|(x, y)| Value::Bool(x < y))?,
        Le => ints(&a, &b).map(|(x, y)| Value::Bool(x <= y))?,
        Gt => ints(&a, &b).map(|(x, y)| Value::Bool(x > y))?,
        Ge => ints(&a, &b).map(|(x, y)| Value::Bool(x >= y))?,
        Add => {
            let (x, y) = ints(&a, &b)?;
            Value::Int(x.checked_add(y).ok_or(EvalFailure::Undefined)?)
        }
        Sub => {
            let (x, y) = ints(&a, &b)?;
            Value::Int(x.checked_sub(y).ok_or(EvalFailure::Undefined)?)
        }
        And => bools(&a, &b).map(|(x, y)| Value::Bool(x && y))?,
        Or => bools(&a, &b).map(|(x, y)| Value::Bool(x || y))?,
        Implies => bools(&a, &b).map(|(x, y)| Value::Bool(!x || y))?,
        Append => match a {
            Value::Seq(mut s) => {
                s.push(b);
                Value::Seq(s)
            }
            _ => return Err(ill("append to non-sequence")),
        },
        Concat => match (a, b) {
            (Value::Seq(mut s), Value::Seq(t)) => {
                s.extend(t);
                Value::Seq(s)
            }
            _ => return Err(ill("concatenation of non-sequences")),
        },
    })
}

/// Predicate truth at the relation-building level: undefined counts as false.
///
/// # Panics
///
/// On an ill-typed evaluation, which cannot arise from validated input.
pub fn holds(e: &Expr, env: &Env<'_>) -> bool {
    match eval(e, env) {
        Ok(Value::Bool(b)) => b,
        Ok(other) => panic!("predicate evaluated to non-boolean {other}"),
        Err(EvalFailure::Undefined) => false,
        Err(EvalFailure::IllTyped(msg)) => panic!("ill-typed evaluation: {msg}"),
    }
}
