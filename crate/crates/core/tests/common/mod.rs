//! Random small hierarchies for property tests.
//!
//! A hierarchy is decoded from a vector of choices, so proptest shrinks
//! towards the all-zero vector: one class, one field, a trivial operation.
#![allow(dead_code)]

use bicheck::model::{
    validate, BinaryOp, ClassSpec, Constant, Domain, Expr, Field, GlobalConstraint, Hierarchy, OpMode, OperationSpec,
    UnaryOp, Value,
};
use proptest::prelude::*;

pub mod oracle;
pub mod props;

pub fn fixture(name: &str) -> Hierarchy {
    bicheck::dsl::parse_named(&fixture_source(name), name).unwrap()
}

/// The core crate's `examples/`, found from either crate of the workspace.
pub fn examples_dir() -> std::path::PathBuf {
    let here = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let own = here.join("examples");
    if own.join("queues.bi").exists() {
        own
    } else {
        here.join("../core/examples")
    }
}

pub fn fixture_source(name: &str) -> String {
    std::fs::read_to_string(examples_dir().join(name)).unwrap()
}

pub const FIXTURES: [&str; 4] = [
    "queues.bi",
    "queues_global_rbq.bi",
    "queues_global_bq.bi",
    "counters.bi",
];

pub struct Choices {
    data: Vec<u32>,
    pos: usize,
}

impl Choices {
    pub fn new(data: Vec<u32>) -> Self {
        Self { data, pos: 0 }
    }

    fn pick(&mut self, n: usize) -> usize {
        let v = self.data.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        v as usize % n.max(1)
    }

    fn chance(&mut self, percent: usize) -> bool {
        self.pick(100) < percent
    }

    fn one<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.pick(xs.len())]
    }
}

fn item() -> Domain {
    Domain::enumeration(&["a", "b"])
}

fn a() -> Expr {
    Expr::Lit(Value::Enum("a".into()))
}

fn b() -> Expr {
    Expr::Lit(Value::Enum("b".into()))
}

fn bin(op: BinaryOp, l: Expr, r: Expr) -> Expr {
    Expr::binary(op, l, r)
}

fn lit_of(d: &Domain, k: usize) -> Expr {
    let vals = d.values();
    match &vals[k % vals.len()] {
        Value::Seq(v) if v.is_empty() => Expr::EmptySeq,
        v => Expr::Lit(v.clone()),
    }
}

/// A guard over one field.
fn guard(ch: &mut Choices, f: &Field) -> Expr {
    let x = Expr::state(&f.name);
    match &f.domain {
        Domain::IntRange { lo, hi } => match ch.pick(4) {
            0 => bin(BinaryOp::Lt, x, Expr::int(*hi)),
            1 => bin(BinaryOp::Gt, x, Expr::int(*lo)),
            2 => bin(BinaryOp::Ne, x, Expr::int(*lo + ch.pick((hi - lo + 1) as usize) as i64)),
            _ => bin(BinaryOp::Le, bin(BinaryOp::Add, x, Expr::int(1)), Expr::int(*hi)),
        },
        Domain::Bool => match ch.pick(3) {
            0 => x,
            1 => Expr::unary(UnaryOp::Not, x),
            _ => bin(BinaryOp::Implies, x, Expr::Lit(Value::Bool(false))),
        },
        Domain::Enum { .. } => bin(BinaryOp::Eq, x, if ch.chance(50) { a() } else { b() }),
        Domain::Seq { .. } => match ch.pick(3) {
            0 => bin(BinaryOp::Ne, x, Expr::EmptySeq),
            1 => bin(BinaryOp::Lt, Expr::unary(UnaryOp::Len, x), Expr::int(2)),
            _ => Expr::unary(UnaryOp::Not, Expr::unary(UnaryOp::IsEmpty, x)),
        },
    }
}

/// An update of one field, possibly reading the operation's input.
fn update(ch: &mut Choices, f: &Field, input: Option<&Field>) -> Expr {
    let x = Expr::state(&f.name);
    let x2 = Expr::primed(&f.name);
    let rhs = match &f.domain {
        Domain::IntRange { .. } => match ch.pick(5) {
            0 => bin(BinaryOp::Add, x, Expr::int(1)),
            1 => bin(BinaryOp::Sub, x, Expr::int(1)),
            2 => lit_of(&f.domain, ch.pick(4)),
            3 => match input {
                Some(i) if matches!(i.domain, Domain::IntRange { .. }) => bin(BinaryOp::Add, x, Expr::input(&i.name)),
                _ => x,
            },
            _ => x,
        },
        Domain::Bool => match ch.pick(3) {
            0 => return bin(BinaryOp::Ne, x2, x),
            1 => Expr::Lit(Value::Bool(ch.chance(50))),
            _ => x,
        },
        Domain::Enum { .. } => match (ch.pick(3), input) {
            (0, Some(i)) if matches!(i.domain, Domain::Enum { .. }) => Expr::input(&i.name),
            (1, _) => b(),
            _ => x,
        },
        Domain::Seq { .. } => match ch.pick(6) {
            0 => match input {
                Some(i) if matches!(i.domain, Domain::Enum { .. }) => bin(BinaryOp::Append, x, Expr::input(&i.name)),
                _ => bin(BinaryOp::Append, x, a()),
            },
            1 => Expr::unary(UnaryOp::Tail, x),
            2 => Expr::EmptySeq,
            3 => bin(
                BinaryOp::Concat,
                x,
                Expr::Lit(Value::Seq(vec![Value::Enum("b".into())])),
            ),
            _ => x,
        },
    };
    Expr::eq(x2, rhs)
}

fn body(ch: &mut Choices, fields: &[Field], sig: &OperationSpec) -> Expr {
    let input = sig.inputs.first();
    let branch = |ch: &mut Choices| {
        let mut parts = Vec::new();
        if ch.chance(60) {
            let f = ch_field(ch, fields);
            parts.push(guard(ch, f));
        }
        for f in fields {
            if ch.chance(75) {
                parts.push(update(ch, f, input));
            }
        }
        if let Some(o) = sig.outputs.first() {
            let same: Vec<&Field> = fields.iter().filter(|f| f.domain == o.domain).collect();
            let rhs = if same.is_empty() || ch.chance(30) {
                lit_of(&o.domain, ch.pick(3))
            } else {
                Expr::state(&ch.one(&same).name)
            };
            parts.push(Expr::eq(Expr::output(&o.name), rhs));
        }
        Expr::conjoin(parts)
    };
    let first = branch(ch);
    match ch.pick(6) {
        0 => bin(BinaryOp::Or, first, branch(ch)),
        1 => {
            let f = ch_field(ch, fields);
            let g = guard(ch, f);
            bin(BinaryOp::Implies, g, first)
        }
        _ => first,
    }
}

fn ch_field<'f>(ch: &mut Choices, fields: &'f [Field]) -> &'f Field {
    &fields[ch.pick(fields.len())]
}

fn signature(ch: &mut Choices, name: &str, fields: &[Field]) -> OperationSpec {
    let mut inputs = Vec::new();
    match ch.pick(3) {
        0 => inputs.push(Field::new("i", item())),
        1 => inputs.push(Field::new("n", Domain::int(0, 1))),
        _ => {}
    }
    let mut outputs = Vec::new();
    if ch.chance(30) {
        outputs.push(Field::new("r", ch_field(ch, fields).domain.clone()));
    }
    OperationSpec {
        name: name.to_string(),
        inputs,
        outputs,
        body: Expr::truth(),
        mode: OpMode::Introduces,
    }
}

/// Decodes one hierarchy. The result may fail validation (for instance an
/// initialisation outside the invariant); callers skip those.
pub fn build(ch: &mut Choices) -> Hierarchy {
    let n_classes = 1 + ch.pick(4);
    let mut h = Hierarchy::default();
    let mut op_counter = 0;
    for ci in 0..n_classes {
        let mut c = ClassSpec::new(&format!("C{ci}"));
        let parent = if ci == 0 { None } else { Some(ch.pick(ci)) };
        c.parent = parent.map(|p| format!("C{p}"));
        c.is_abstract = ch.chance(if ci == 0 { 30 } else { 10 });
        let mut own = Vec::new();
        if ci == 0 {
            let pool = [
                Domain::int(0, 1 + ch.pick(3) as i64),
                Domain::Bool,
                item(),
                Domain::seq(item(), 2),
            ];
            own.push(Field::new("x0", pool[ch.pick(4)].clone()));
            if ch.chance(50) {
                own.push(Field::new("y0", pool[ch.pick(4)].clone()));
            }
            if ch.chance(30) {
                c.constants.push(Constant {
                    name: "k".into(),
                    domain: Domain::int(0, 3),
                    value: Value::Int(1 + ch.pick(3) as i64),
                });
            }
        } else if ch.chance(60) {
            let d = if ch.chance(50) { Domain::Bool } else { Domain::int(0, 1) };
            own.push(Field::new(&format!("f{ci}"), d));
        }
        c.fields = own.clone();
        h.classes.push(c);
        let name = format!("C{ci}");
        let eff = h.effective_fields(&name);
        let consts = h.effective_constants(&name);

        let mut spec = h.classes.pop().unwrap();
        let ints: Vec<&Field> = eff
            .iter()
            .filter(|f| matches!(f.domain, Domain::IntRange { .. }))
            .collect();
        if !ints.is_empty() && ch.chance(30) {
            let f = ch.one(&ints);
            let bound = if !consts.is_empty() && ch.chance(50) {
                Expr::constant("k")
            } else {
                Expr::int(1 + ch.pick(2) as i64)
            };
            spec.invariant = bin(BinaryOp::Le, Expr::state(&f.name), bound);
        }
        if ci == 0 || ch.chance(40) {
            let parts: Vec<Expr> = eff
                .iter()
                .filter(|_| ch.chance(70))
                .map(|f| Expr::eq(Expr::primed(&f.name), lit_of(&f.domain, 0)))
                .collect();
            if !parts.is_empty() {
                spec.init = Some(Expr::conjoin(parts));
            }
        }
        if ch.chance(20) {
            let f = ch_field(ch, &eff);
            spec.finalisation = Some(guard(ch, f));
        }
        // Operations: override some inherited ones, introduce new ones.
        let inherited: Vec<OperationSpec> = h
            .classes
            .iter()
            .find(|p| Some(&p.name) == spec.parent.as_ref())
            .map(|p| {
                h.effective_operations(&p.name)
                    .into_iter()
                    .map(|o| o.spec.clone())
                    .collect()
            })
            .unwrap_or_default();
        for op in &inherited {
            if ch.chance(45) {
                let mut o = op.clone();
                o.mode = OpMode::Specializes;
                o.body = body(ch, &eff, &o);
                spec.operations.push(o);
            }
        }
        let fresh = if ci == 0 { 1 + ch.pick(2) } else { ch.pick(2) };
        for _ in 0..fresh {
            let name = format!("op{op_counter}");
            op_counter += 1;
            let mut o = signature(ch, &name, &eff);
            // Extra operations that touch only new fields refine skip.
            let scope: Vec<Field> = if ci > 0 && !own.is_empty() && ch.chance(50) {
                own.clone()
            } else {
                eff.clone()
            };
            o.body = body(ch, &scope, &o);
            spec.operations.push(o);
        }
        h.classes.push(spec);
    }
    if ch.chance(20) {
        let ci = ch.pick(n_classes);
        let class = format!("C{ci}");
        let eff = h.effective_fields(&class);
        let f = ch_field(ch, &eff).clone();
        h.constraints.push(GlobalConstraint {
            class,
            binder: "o".into(),
            body: guard(ch, &f),
        });
    }
    h
}

pub fn choices() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(any::<u32>(), 160)
}

/// Generated hierarchies that pass validation.
pub fn hierarchy() -> impl Strategy<Value = Hierarchy> {
    choices()
        .prop_map(|c| build(&mut Choices::new(c)))
        .prop_filter("invalid hierarchy", |h| validate(h).is_empty())
}
