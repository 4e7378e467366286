//! Brute-force relation and precondition, written directly over domain
//! products without the state-space or relation machinery.

use std::collections::BTreeSet;

use bicheck::model::domain::{product_cardinality, product_values};
use bicheck::model::{Hierarchy, OperationSpec, Value};
use bicheck::semantics::{eval, precondition, Env, EvalFailure, Semantics, DEFAULT_STATE_CAP};

pub const ORACLE_BUDGET: u128 = 10_000;

type Row = Vec<Value>;

/// Strict truth: undefined subterms make a predicate false.
fn truth(e: &bicheck::model::Expr, env: &Env<'_>) -> bool {
    match eval(e, env) {
        Ok(Value::Bool(b)) => b,
        Err(EvalFailure::Undefined) => false,
        other => panic!("predicate evaluated to {other:?}"),
    }
}

struct Oracle {
    names: Vec<String>,
    consts: Vec<bicheck::model::Constant>,
    invariant: Vec<bicheck::model::Expr>,
    candidates: Vec<Row>,
}

impl Oracle {
    fn new(h: &Hierarchy, class: &str) -> Self {
        let fields = h.effective_fields(class);
        Self {
            names: fields.iter().map(|f| f.name.clone()).collect(),
            consts: h.effective_constants(class),
            invariant: h.effective_invariant(class).into_iter().cloned().collect(),
            candidates: product_values(fields.iter().map(|f| &f.domain)),
        }
    }

    fn states(&self) -> Vec<Row> {
        let names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        self.candidates
            .iter()
            .filter(|s| {
                let mut env = Env::new(&names, &self.consts);
                env.pre = Some(s);
                self.invariant.iter().all(|e| truth(e, &env))
            })
            .cloned()
            .collect()
    }

    /// Every (s, i, s', o) satisfying the body, by four nested loops.
    fn relation(&self, op: &OperationSpec) -> BTreeSet<(Row, Row, Row, Row)> {
        let names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        let in_names: Vec<&str> = op.inputs.iter().map(|f| f.name.as_str()).collect();
        let out_names: Vec<&str> = op.outputs.iter().map(|f| f.name.as_str()).collect();
        let states = self.states();
        let inputs = product_values(op.inputs.iter().map(|f| &f.domain));
        let outputs = product_values(op.outputs.iter().map(|f| &f.domain));
        let mut out = BTreeSet::new();
        for s in &states {
            for i in &inputs {
                for s2 in &states {
                    for o in &outputs {
                        let mut env = Env::new(&names, &self.consts);
                        env.pre = Some(s);
                        env.post = Some(s2);
                        env.input_names = &in_names;
                        env.inputs = i;
                        env.output_names = &out_names;
                        env.outputs = o;
                        if truth(&op.body, &env) {
                            out.insert((s.clone(), i.clone(), s2.clone(), o.clone()));
                        }
                    }
                }
            }
        }
        out
    }
}

fn candidate_tuples(h: &Hierarchy, class: &str, op: &OperationSpec) -> u128 {
    let fields = h.effective_fields(class);
    let s = product_cardinality(fields.iter().map(|f| &f.domain));
    let i = product_cardinality(op.inputs.iter().map(|f| &f.domain));
    let o = product_cardinality(op.outputs.iter().map(|f| &f.domain));
    s.saturating_mul(s).saturating_mul(i).saturating_mul(o)
}

/// Compares relation and precondition for every class and operation within
/// budget; returns how many pairs were compared.
pub fn compare_all(h: &Hierarchy) -> Result<usize, String> {
    let sem = Semantics::new(h, DEFAULT_STATE_CAP);
    let mut compared = 0;
    for class in &h.classes {
        let oracle = Oracle::new(h, &class.name);
        let space = sem.state_space(&class.name).map_err(|e| e.to_string())?;
        let expected_states = oracle.states();
        if space.states() != expected_states.as_slice() {
            return Err(format!("{}: state space differs", class.name));
        }
        for op in h.effective_operations(&class.name) {
            if candidate_tuples(h, &class.name, op.spec) > ORACLE_BUDGET {
                continue;
            }
            let rel = sem.relation(&class.name, &op.spec.name).map_err(|e| e.to_string())?;
            let got: BTreeSet<(Row, Row, Row, Row)> = rel
                .tuples
                .iter()
                .map(|t| {
                    (
                        space.state(t.pre).to_vec(),
                        rel.inputs.rows[t.input].clone(),
                        space.state(t.post).to_vec(),
                        rel.outputs.rows[t.output].clone(),
                    )
                })
                .collect();
            let want = oracle.relation(op.spec);
            if got != want {
                return Err(format!("{}.{}: relation differs", class.name, op.spec.name));
            }

            // pre = exists s', o . body, enumerated afresh.
            let want_pre: BTreeSet<(Row, Row)> = want.iter().map(|(s, i, _, _)| (s.clone(), i.clone())).collect();
            let got_pre: BTreeSet<(Row, Row)> = precondition(&rel)
                .into_iter()
                .map(|(s, i)| (space.state(s).to_vec(), rel.inputs.rows[i].clone()))
                .collect();
            if got_pre != want_pre {
                return Err(format!("{}.{}: precondition differs", class.name, op.spec.name));
            }
            compared += 1;
        }
    }
    Ok(compared)
}
