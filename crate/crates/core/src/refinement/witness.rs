//! Independent re-evaluation of counterexamples.
//!
//! Nothing here reads the cached relations of [`Semantics`]; witnesses are
//! replayed directly against operation bodies with [`eval`] over raw domain
//! products, so a report can vouch for itself.
//!
//! [`Semantics`]: crate::semantics::Semantics
//! [`eval`]: crate::semantics::eval

use std::cell::OnceCell;

use super::{Binding, Finding, ObligationKind, TheoremPart, Verdict};
use crate::model::domain::{product_cardinality, product_values};
use crate::model::{Expr, Field, Hierarchy, OperationSpec, Value};
use crate::semantics::{holds, project, Env, SemanticsError, DEFAULT_STATE_CAP};

struct ClassView<'h> {
    fields: Vec<Field>,
    names: Vec<&'h str>,
    constants: Vec<crate::model::Constant>,
    invariant: Vec<&'h Expr>,
    rows: OnceCell<Vec<Vec<Value>>>,
}

impl<'h> ClassView<'h> {
    fn new(h: &'h Hierarchy, class: &str) -> Self {
        let fields = h.effective_fields(class);
        let names = h
            .lineage(class)
            .into_iter()
            .flat_map(|c| c.fields.iter().map(|f| f.name.as_str()))
            .collect();
        Self {
            fields,
            names,
            constants: h.effective_constants(class),
            invariant: h.effective_invariant(class),
            rows: OnceCell::new(),
        }
    }

    fn env(&self) -> Env<'_> {
        Env::new(&self.names, &self.constants)
    }

    fn valid(&self, s: &[Value]) -> bool {
        let mut env = self.env();
        env.pre = Some(s);
        self.fields.iter().zip(s).all(|(f, v)| f.domain.contains(v)) && self.invariant.iter().all(|e| holds(e, &env))
    }

    fn rows(&self) -> Result<&[Vec<Value>], SemanticsError> {
        if let Some(rows) = self.rows.get() {
            return Ok(rows);
        }
        let size = product_cardinality(self.fields.iter().map(|f| &f.domain));
        if size > DEFAULT_STATE_CAP as u128 {
            return Err(SemanticsError::StateSpaceTooLarge {
                class: "witness replay".into(),
                size,
                cap: DEFAULT_STATE_CAP,
            });
        }
        let rows = product_values(self.fields.iter().map(|f| &f.domain))
            .into_iter()
            .filter(|s| self.valid(s))
            .collect();
        Ok(self.rows.get_or_init(|| rows))
    }
}

fn step_holds(
    view: &ClassView<'_>,
    op: &OperationSpec,
    pre: &[Value],
    input: &[Value],
    post: &[Value],
    output: &[Value],
) -> bool {
    if !view.valid(pre) || !view.valid(post) {
        return false;
    }
    let inputs: Vec<&str> = op.inputs.iter().map(|f| f.name.as_str()).collect();
    let outputs: Vec<&str> = op.outputs.iter().map(|f| f.name.as_str()).collect();
    let mut env = view.env();
    env.pre = Some(pre);
    env.post = Some(post);
    env.input_names = &inputs;
    env.inputs = input;
    env.output_names = &outputs;
    env.outputs = output;
    holds(&op.body, &env)
}

fn enabled(view: &ClassView<'_>, op: &OperationSpec, pre: &[Value], input: &[Value]) -> Result<bool, SemanticsError> {
    let outs = product_values(op.outputs.iter().map(|f| &f.domain));
    for post in view.rows()? {
        if outs.iter().any(|o| step_holds(view, op, pre, input, post, o)) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn values(b: &Option<Binding>) -> Vec<Value> {
    b.as_ref().map(Binding::values).unwrap_or_default()
}

fn predicate_at(view: &ClassView<'_>, e: Option<&Expr>, s: &[Value], primed: bool) -> bool {
    let Some(e) = e else {
        return true;
    };
    let mut env = view.env();
    if primed {
        env.post = Some(s);
    } else {
        env.pre = Some(s);
    }
    holds(e, &env)
}

/// Replays the witness of a failed finding and reports whether it really
/// violates the obligation. Findings without a failure return `true`.
pub fn confirm_witness(h: &Hierarchy, finding: &Finding) -> Result<bool, SemanticsError> {
    if finding.verdict != Verdict::Fails {
        return Ok(true);
    }
    let Some(w) = &finding.witness else {
        return Ok(false);
    };
    let ob = &finding.obligation;
    let (sub, sup) = (ob.subclass.as_str(), ob.superclass.as_str());
    let cv = ClassView::new(h, sub);
    let av = ClassView::new(h, sup);
    let s = values(&w.state);
    let i = values(&w.input);
    let s2 = values(&w.post_state);
    let o = values(&w.output);
    let op_of = |class: &str| {
        ob.op
            .as_deref()
            .and_then(|name| h.effective_operation(class, name))
            .map(|e| e.spec)
    };

    Ok(match ob.kind {
        ObligationKind::Initialisation => {
            let a = project(h, sub, sup, &s2)?;
            cv.valid(&s2)
                && predicate_at(&cv, h.effective_init(sub), &s2, true)
                && !predicate_at(&av, h.effective_init(sup), &a, true)
        }
        ObligationKind::Finalisation => {
            let a = project(h, sub, sup, &s)?;
            cv.valid(&s)
                && predicate_at(&cv, h.effective_final(sub), &s, false)
                && !predicate_at(&av, h.effective_final(sup), &a, false)
        }
        ObligationKind::Applicability => {
            let (Some(co), Some(ao)) = (op_of(sub), op_of(sup)) else {
                return Ok(false);
            };
            let a = project(h, sub, sup, &s)?;
            cv.valid(&s) && enabled(&av, ao, &a, &i)? && !enabled(&cv, co, &s, &i)?
        }
        ObligationKind::CorrectnessNB | ObligationKind::CorrectnessB => {
            let (Some(co), Some(ao)) = (op_of(sub), op_of(sup)) else {
                return Ok(false);
            };
            let (a, a2) = (project(h, sub, sup, &s)?, project(h, sub, sup, &s2)?);
            let in_pre = ob.kind == ObligationKind::CorrectnessB || enabled(&av, ao, &a, &i)?;
            step_holds(&cv, co, &s, &i, &s2, &o) && in_pre && !step_holds(&av, ao, &a, &i, &a2, &o)
        }
        ObligationKind::SkipApplicability => {
            let Some(co) = op_of(sub) else {
                return Ok(false);
            };
            cv.valid(&s) && !enabled(&cv, co, &s, &i)?
        }
        ObligationKind::SkipCorrectness => {
            let Some(co) = op_of(sub) else {
                return Ok(false);
            };
            step_holds(&cv, co, &s, &i, &s2, &o) && project(h, sub, sup, &s)? != project(h, sub, sup, &s2)?
        }
        ObligationKind::VirtualOpTheorem(TheoremPart::Applicability) => {
            let Some(co) = op_of(sub) else {
                return Ok(false);
            };
            let a = project(h, sub, sup, &s)?;
            let mut twin_enabled = false;
            for other in cv.rows()? {
                if project(h, sub, sup, other)? == a && enabled(&cv, co, other, &i)? {
                    twin_enabled = true;
                    break;
                }
            }
            cv.valid(&s) && twin_enabled && !enabled(&cv, co, &s, &i)?
        }
        // The abstract operation is the image of the concrete one, so the
        // witness step is always in it.
        ObligationKind::VirtualOpTheorem(TheoremPart::Correctness) => false,
    })
}
