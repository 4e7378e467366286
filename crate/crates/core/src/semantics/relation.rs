use std::collections::BTreeSet;

use super::{eval, holds_checked, Env, EvalFailure, Projection, SemanticsError, StateSpace};
use crate::model::domain::product_values;
use crate::model::{format_binding, BinaryOp, Expr, Field, OperationSpec, Value, VarKind};

/// Enumerated values of an input or output parameter list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub params: Vec<Field>,
    pub rows: Vec<Vec<Value>>,
}

impl Signature {
    pub fn new(params: &[Field]) -> Self {
        Self {
            params: params.to_vec(),
            rows: product_values(params.iter().map(|p| &p.domain)),
        }
    }

    pub fn names(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn display(&self, idx: usize) -> String {
        format_binding(self.names(), &self.rows[idx])
    }

    pub fn named(&self, idx: usize) -> Vec<(String, Value)> {
        self.params
            .iter()
            .map(|p| p.name.clone())
            .zip(self.rows[idx].iter().cloned())
            .collect()
    }
}

/// One transition `(state, input) -> (state', output)`, by index into the
/// state space and signatures of its relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple {
    pub pre: usize,
    pub input: usize,
    pub post: usize,
    pub output: usize,
}

/// The fully enumerated transition relation of one operation on one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpRelation {
    pub class: String,
    pub op: String,
    pub inputs: Signature,
    pub outputs: Signature,
    /// Sorted and free of duplicates.
    pub tuples: Vec<Tuple>,
}

impl OpRelation {
    pub fn contains(&self, t: &Tuple) -> bool {
        self.tuples.binary_search(t).is_ok()
    }

    /// Whether `(pre, input)` is in the precondition.
    pub fn enabled(&self, pre: usize, input: usize) -> bool {
        let probe = Tuple {
            pre,
            input,
            post: 0,
            output: 0,
        };
        let at = self.tuples.partition_point(|t| t < &probe);
        self.tuples.get(at).is_some_and(|t| t.pre == pre && t.input == input)
    }

    /// Tuples leaving `(pre, input)`.
    pub fn successors(&self, pre: usize, input: usize) -> &[Tuple] {
        let lo = self.tuples.partition_point(|t| (t.pre, t.input) < (pre, input));
        let hi = self.tuples.partition_point(|t| (t.pre, t.input) <= (pre, input));
        &self.tuples[lo..hi]
    }

    /// `{(s, i) | exists s', o . (s, i, s', o) in r}`.
    pub fn precondition(&self) -> BTreeSet<(usize, usize)> {
        self.tuples.iter().map(|t| (t.pre, t.input)).collect()
    }

    /// Renders the relation one tuple per line as `s | i -> s' | o`.
    pub fn dump(&self, space: &StateSpace) -> String {
        let mut out = String::new();
        for t in &self.tuples {
            out.push_str(&format!(
                "{} | {} -> {} | {}\n",
                space.display(t.pre),
                self.inputs.display(t.input),
                space.display(t.post),
                self.outputs.display(t.output)
            ));
        }
        out
    }
}

/// Precondition of a relation as `(state, input)` index pairs.
pub fn precondition(r: &OpRelation) -> BTreeSet<(usize, usize)> {
    r.precondition()
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Post(usize),
    Output(usize),
}

/// Conjuncts of the form `x' = e` or `o! = e` whose right side reads only
/// the before-state, inputs, and constants. Each fixes one column of the
/// candidate after-state or output for a given `(state, input)`.
fn solved_columns<'e>(body: &'e Expr, fields: &[&str], outputs: &[&str]) -> Vec<(Target, &'e Expr)> {
    let target = |e: &Expr| match e {
        Expr::Var {
            name,
            kind: VarKind::Primed,
        } => fields.iter().position(|f| f == name).map(Target::Post),
        Expr::Var {
            name,
            kind: VarKind::Output,
        } => outputs.iter().position(|f| f == name).map(Target::Output),
        _ => None,
    };
    let closed = |e: &Expr| !e.mentions_kind(VarKind::Primed) && !e.mentions_kind(VarKind::Output);
    let mut out = Vec::new();
    for c in body.conjuncts() {
        if let Expr::Binary(BinaryOp::Eq, l, r) = c {
            if let (Some(t), true) = (target(l), closed(r)) {
                out.push((t, &**r));
            } else if let (Some(t), true) = (target(r), closed(l)) {
                out.push((t, &**l));
            }
        }
    }
    out
}

/// Builds the relation of `op` over `space`: every `(s, i, s', o)` with
/// both states in the space and the body true.
pub fn build_relation(space: &StateSpace, op: &OperationSpec) -> Result<OpRelation, SemanticsError> {
    let inputs = Signature::new(&op.inputs);
    let outputs = Signature::new(&op.outputs);
    let names = space.field_names();
    let input_names = inputs.names();
    let output_names = outputs.names();
    let solved = solved_columns(&op.body, &names, &output_names);

    let mut tuples = Vec::new();
    let mut fixed_post: Vec<Option<Value>> = vec![None; names.len()];
    let mut fixed_out: Vec<Option<Value>> = vec![None; output_names.len()];
    for (pre, s) in space.states().iter().enumerate() {
        for (input, i) in inputs.rows.iter().enumerate() {
            let mut env = Env::new(&names, &space.constants);
            env.pre = Some(s);
            env.input_names = &input_names;
            env.inputs = i;
            env.output_names = &output_names;

            fixed_post.iter_mut().for_each(|v| *v = None);
            fixed_out.iter_mut().for_each(|v| *v = None);
            let mut feasible = true;
            for (target, rhs) in &solved {
                let v = match eval(rhs, &env) {
                    Ok(v) => v,
                    // An undefined conjunct makes the whole body undefined.
                    Err(EvalFailure::Undefined) => {
                        feasible = false;
                        break;
                    }
                    Err(EvalFailure::IllTyped(msg)) => return Err(SemanticsError::Internal(msg)),
                };
                let slot = match target {
                    Target::Post(k) => &mut fixed_post[*k],
                    Target::Output(k) => &mut fixed_out[*k],
                };
                match slot {
                    Some(prev) if *prev != v => {
                        feasible = false;
                        break;
                    }
                    _ => *slot = Some(v),
                }
            }
            if !feasible {
                continue;
            }

            let posts: Vec<usize> = if fixed_post.iter().all(Option::is_some) {
                let b: Vec<Value> = fixed_post.iter().map(|v| v.clone().unwrap()).collect();
                space.index_of(&b).into_iter().collect()
            } else {
                (0..space.len())
                    .filter(|&k| matches_fixed(space.state(k), &fixed_post))
                    .collect()
            };
            let outs: Vec<usize> = (0..outputs.rows.len())
                .filter(|&k| matches_fixed(&outputs.rows[k], &fixed_out))
                .collect();

            for &post in &posts {
                env.post = Some(space.state(post));
                for &output in &outs {
                    env.outputs = &outputs.rows[output];
                    if holds_checked(&op.body, &env)? {
                        tuples.push(Tuple {
                            pre,
                            input,
                            post,
                            output,
                        });
                    }
                }
            }
        }
    }
    Ok(OpRelation {
        class: space.class.clone(),
        op: op.name.clone(),
        inputs,
        outputs,
        tuples,
    })
}

fn matches_fixed(row: &[Value], fixed: &[Option<Value>]) -> bool {
    row.iter().zip(fixed).all(|(v, f)| f.as_ref().is_none_or(|f| f == v))
}

/// Image of a subclass relation under the projection:
/// `{(f s, i, f s', o) | (s, i, s', o) in r}`, a relation over the
/// superclass state space.
pub fn lift_relation(r: &OpRelation, f: &Projection) -> OpRelation {
    let mut tuples: Vec<Tuple> = r
        .tuples
        .iter()
        .map(|t| Tuple {
            pre: f.apply(t.pre),
            input: t.input,
            post: f.apply(t.post),
            output: t.output,
        })
        .collect();
    tuples.sort_unstable();
    tuples.dedup();
    OpRelation {
        class: f.sup.clone(),
        op: r.op.clone(),
        inputs: r.inputs.clone(),
        outputs: r.outputs.clone(),
        tuples,
    }
}
