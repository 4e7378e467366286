//! Name resolution and type checking of the surface tree.

use std::collections::HashMap;

use super::parser::{SClass, SExpr, SExprKind, SMember, SParam, SSpec};
use super::{ParseError, SourceSpan};
use crate::model::typing::{binary_type, type_of_value, unary_type, Allowed, Scope, Type};
use crate::model::{
    class_scope, validate, ClassSpec, Constant, Domain, Expr, Field, GlobalConstraint, Hierarchy, OpMode,
    OperationSpec, StructuralError, Value, VarKind,
};

/// Where to point diagnostics about a class and its members.
#[derive(Default)]
struct SpanTable {
    classes: HashMap<String, SourceSpan>,
    parents: HashMap<String, SourceSpan>,
    members: HashMap<(String, String), SourceSpan>,
    inits: HashMap<String, SourceSpan>,
    constraints: HashMap<String, SourceSpan>,
}

impl SpanTable {
    fn for_error(&self, e: &StructuralError, fallback: &SourceSpan) -> SourceSpan {
        use StructuralError::*;
        let class = e.class().to_string();
        let member = |m: &str| self.members.get(&(class.clone(), m.to_string()));
        let found = match e {
            UnknownParent { .. } | CyclicParent { .. } => self.parents.get(&class),
            DuplicateField { field, .. } => member(field),
            DuplicateConstant { name, .. } | ConstantOutOfDomain { name, .. } => member(name),
            InvalidDomain { item, .. } => member(item.split('.').next().unwrap_or(item)),
            DuplicateOperation { op, .. }
            | OverrideWithoutAncestor { op, .. }
            | IntroducesExisting { op, .. }
            | SignatureMismatch { op, .. }
            | DuplicateParameter { op, .. } => member(op),
            InitOutsideInvariant { .. } => self.inits.get(&class),
            UnknownConstraintClass { .. } => self.constraints.get(&class),
            DuplicateClass { .. } | IllTyped { .. } => None,
        };
        found
            .or_else(|| self.classes.get(&class))
            .cloned()
            .unwrap_or_else(|| fallback.clone())
    }
}

pub(super) fn resolve(spec: SSpec, eof: &SourceSpan) -> Result<Hierarchy, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut spans = SpanTable::default();
    let mut h = Hierarchy::default();

    for c in &spec.classes {
        spans.classes.entry(c.name.clone()).or_insert_with(|| c.span.clone());
        if let Some((_, ps)) = &c.parent {
            spans.parents.insert(c.name.clone(), ps.clone());
        }
        h.classes.push(skeleton(c, &mut spans, &mut errors));
    }
    for gc in &spec.constraints {
        spans.constraints.insert(gc.class.clone(), gc.class_span.clone());
        h.constraints.push(GlobalConstraint {
            class: gc.class.clone(),
            binder: gc.binder.clone(),
            body: Expr::truth(),
        });
    }

    // Structure first: scopes are meaningless over a broken hierarchy.
    let structural = validate(&h);
    if !structural.is_empty() || !errors.is_empty() {
        errors.extend(
            structural
                .iter()
                .map(|e| ParseError::new(spans.for_error(e, eof), e.to_string())),
        );
        return Err(errors);
    }

    for (k, c) in spec.classes.iter().enumerate() {
        let name = c.name.clone();
        let mut invariants = Vec::new();
        let mut inits = Vec::new();
        let mut finals = Vec::new();
        for m in &c.members {
            match m {
                SMember::Invariant(e) => invariants.push(e),
                SMember::Init(e) => inits.push(e),
                SMember::Final(e) => finals.push(e),
                _ => {}
            }
        }
        let mut lower_all = |parts: &[&SExpr], allowed: Allowed| -> Option<Expr> {
            let scope = class_scope(&h, &name, allowed);
            let mut out = Vec::new();
            for e in parts {
                match lower_predicate(e, &scope, None) {
                    Ok(x) => out.push(x),
                    Err(err) => errors.push(err),
                }
            }
            (out.len() == parts.len()).then(|| Expr::conjoin(out))
        };
        let invariant = lower_all(&invariants, Allowed::STATE);
        let init = lower_all(&inits, Allowed::PRIMED);
        let fin = lower_all(&finals, Allowed::STATE);

        let mut bodies = Vec::new();
        for m in &c.members {
            if let SMember::Op(op) = m {
                let spec_op = h.classes[k].operation(&op.name).expect("skeleton has every operation");
                let scope = class_scope(&h, &name, Allowed::OPERATION)
                    .with_signature(spec_op.inputs.clone(), spec_op.outputs.clone());
                match lower_predicate(&op.body, &scope, None) {
                    Ok(body) => bodies.push((op.name.clone(), body)),
                    Err(e) => errors.push(e),
                }
            }
        }

        let class = &mut h.classes[k];
        if let Some(inv) = invariant {
            class.invariant = inv;
        }
        if !inits.is_empty() {
            class.init = init;
        }
        if !finals.is_empty() {
            class.finalisation = fin;
        }
        for (op, body) in bodies {
            if let Some(slot) = class.operations.iter_mut().find(|o| o.name == op) {
                slot.body = body;
            }
        }
    }

    for (k, gc) in spec.constraints.iter().enumerate() {
        let scope = class_scope(&h, &gc.class, Allowed::STATE);
        match lower_predicate(&gc.body, &scope, Some(&gc.binder)) {
            Ok(body) => h.constraints[k].body = body,
            Err(e) => errors.push(e),
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let remaining = validate(&h);
    if !remaining.is_empty() {
        return Err(remaining
            .iter()
            .map(|e| ParseError::new(spans.for_error(e, eof), e.to_string()))
            .collect());
    }
    Ok(h)
}

fn skeleton(c: &SClass, spans: &mut SpanTable, errors: &mut Vec<ParseError>) -> ClassSpec {
    let mut class = ClassSpec::new(&c.name);
    class.is_abstract = c.is_abstract;
    class.parent = c.parent.as_ref().map(|(p, _)| p.clone());
    for m in &c.members {
        match m {
            SMember::Var { name, span, domain } => {
                spans
                    .members
                    .entry((c.name.clone(), name.clone()))
                    .or_insert_with(|| span.clone());
                class.fields.push(Field::new(name, domain.clone()));
            }
            SMember::Const {
                name,
                span,
                domain,
                value,
            } => {
                spans
                    .members
                    .entry((c.name.clone(), name.clone()))
                    .or_insert_with(|| span.clone());
                match literal_value(value, domain) {
                    Ok(v) => class.constants.push(Constant {
                        name: name.clone(),
                        domain: domain.clone(),
                        value: v,
                    }),
                    Err(e) => errors.push(e),
                }
            }
            SMember::Op(op) => {
                spans
                    .members
                    .entry((c.name.clone(), op.name.clone()))
                    .or_insert_with(|| op.span.clone());
                let inputs = params(&op.inputs, VarKind::Input, errors);
                let outputs = params(&op.outputs, VarKind::Output, errors);
                class.operations.push(OperationSpec {
                    name: op.name.clone(),
                    inputs,
                    outputs,
                    body: Expr::truth(),
                    mode: if op.is_override {
                        OpMode::Specializes
                    } else {
                        OpMode::Introduces
                    },
                });
            }
            SMember::Init(e) => {
                spans.inits.entry(c.name.clone()).or_insert_with(|| e.span.clone());
            }
            SMember::Invariant(_) | SMember::Final(_) => {}
        }
    }
    class
}

fn params(ps: &[SParam], kind: VarKind, errors: &mut Vec<ParseError>) -> Vec<Field> {
    ps.iter()
        .map(|p| {
            if p.deco.is_some_and(|d| d != kind) {
                let want = if kind == VarKind::Input { "`?`" } else { "`!`" };
                errors.push(ParseError::new(
                    p.span.clone(),
                    format!("parameter `{}` must be undecorated or decorated with {want}", p.name),
                ));
            }
            Field::new(&p.name, p.domain.clone())
        })
        .collect()
}

fn literal_value(e: &SExpr, domain: &Domain) -> Result<Value, ParseError> {
    let err = |msg: String| ParseError::new(e.span.clone(), msg);
    let v = match (&e.kind, domain) {
        (SExprKind::Int(n), _) => Value::Int(*n),
        (SExprKind::Bool(b), _) => Value::Bool(*b),
        (SExprKind::Name(n, None), _) => Value::Enum(n.clone()),
        (SExprKind::EmptySeq, _) => Value::Seq(Vec::new()),
        (SExprKind::Display(elems), Domain::Seq { elem, .. }) => {
            Value::Seq(elems.iter().map(|x| literal_value(x, elem)).collect::<Result<_, _>>()?)
        }
        _ => return Err(err(format!("expected a literal of domain {domain}"))),
    };
    if domain.contains(&v) {
        Ok(v)
    } else {
        Err(err(format!("value {v} is outside domain {domain}")))
    }
}

fn lower_predicate(e: &SExpr, scope: &Scope, binder: Option<&str>) -> Result<Expr, ParseError> {
    let (x, t) = lower(e, scope, binder)?;
    if t != Type::Bool {
        return Err(ParseError::new(
            e.span.clone(),
            format!("expected a predicate, found an expression of type {t}"),
        ));
    }
    Ok(x)
}

fn lower(e: &SExpr, scope: &Scope, binder: Option<&str>) -> Result<(Expr, Type), ParseError> {
    let err = |msg: String| ParseError::new(e.span.clone(), msg);
    match &e.kind {
        SExprKind::Int(n) => Ok((Expr::int(*n), Type::Int)),
        SExprKind::Bool(b) => Ok((Expr::Lit(Value::Bool(*b)), Type::Bool)),
        SExprKind::EmptySeq => Ok((Expr::EmptySeq, Type::EmptySeq)),
        SExprKind::Name(name, Some(kind)) => {
            let d = scope.lookup(name, *kind).map_err(err)?;
            Ok((Expr::var(name, *kind), Type::of_domain(d)))
        }
        SExprKind::Name(name, None) => {
            if let Some(b) = binder {
                if name == b {
                    return Err(err(format!(
                        "`{b}` stands for an object; refer to its fields as `{b}.field`"
                    )));
                }
            }
            if scope.fields.iter().any(|f| &f.name == name) {
                if let Some(b) = binder {
                    return Err(err(format!(
                        "refer to field `{name}` of the constrained object as `{b}.{name}`"
                    )));
                }
                let d = scope.lookup(name, VarKind::State).map_err(err)?;
                return Ok((Expr::state(name), Type::of_domain(d)));
            }
            if let Ok(d) = scope.lookup(name, VarKind::Const) {
                return Ok((Expr::constant(name), Type::of_domain(d)));
            }
            let t = scope.enum_of_literal(name).map_err(err)?;
            Ok((Expr::Lit(Value::Enum(name.clone())), t))
        }
        SExprKind::Member(obj, field) => {
            if binder != Some(obj.as_str()) {
                return Err(err(format!(
                    "`{obj}.{field}`: field access is only allowed on a constraint's bound object"
                )));
            }
            let d = scope.lookup(field, VarKind::State).map_err(err)?;
            Ok((Expr::state(field), Type::of_domain(d)))
        }
        SExprKind::Display(elems) => {
            let mut values = Vec::new();
            for x in elems {
                match lower(x, scope, binder)? {
                    (Expr::Lit(v), _) => values.push(v),
                    _ => {
                        return Err(ParseError::new(
                            x.span.clone(),
                            "sequence display elements must be literals (use `s ++ <x>` to append)",
                        ))
                    }
                }
            }
            let v = Value::Seq(values);
            let t = type_of_value(&v, scope).map_err(err)?;
            Ok((Expr::Lit(v), t))
        }
        SExprKind::Unary(op, inner) => {
            let (x, t) = lower(inner, scope, binder)?;
            let t = unary_type(*op, &t).map_err(err)?;
            Ok((Expr::unary(*op, x), t))
        }
        SExprKind::Binary(op, l, r) => {
            let (lx, lt) = lower(l, scope, binder)?;
            let (rx, rt) = lower(r, scope, binder)?;
            let t = binary_type(*op, &lt, &rt).map_err(err)?;
            Ok((Expr::binary(*op, lx, rx), t))
        }
    }
}
