use std::fmt::Write;

use crate::model::typing::decorate;
use crate::model::{BinaryOp, ClassSpec, Expr, Field, Hierarchy, OpMode, UnaryOp, Value, VarKind};

// Binding strength, loosest first.
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const CMP: u8 = 5;
const ADD: u8 = 6;
const PREFIX: u8 = 7;
const ATOM: u8 = 8;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Var { .. } | Expr::EmptySeq => ATOM,
        Expr::Lit(Value::Int(i)) if *i < 0 => PREFIX,
        Expr::Lit(_) => ATOM,
        Expr::Unary(UnaryOp::Not, _) => NOT,
        Expr::Unary(..) => PREFIX,
        Expr::Binary(op, ..) => binary_prec(*op),
    }
}

fn binary_prec(op: BinaryOp) -> u8 {
    use BinaryOp::*;
    match op {
        Implies => IMPLIES,
        Or => OR,
        And => AND,
        Eq | Ne | Lt | Le | Gt | Ge => CMP,
        Add | Sub | Append | Concat => ADD,
    }
}

/// Renders `e` in concrete syntax. Inside global constraints state
/// variables are qualified with `binder`.
pub fn print_expr(e: &Expr, binder: Option<&str>) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, binder);
    out
}

fn write_wrapped(out: &mut String, e: &Expr, binder: Option<&str>, parens: bool) {
    if parens {
        out.push('(');
    }
    write_expr(out, e, binder);
    if parens {
        out.push(')');
    }
}

fn write_expr(out: &mut String, e: &Expr, binder: Option<&str>) {
    match e {
        Expr::Var { name, kind } => match (kind, binder) {
            (VarKind::State, Some(b)) => {
                let _ = write!(out, "{b}.{name}");
            }
            _ => out.push_str(&decorate(name, *kind)),
        },
        Expr::Lit(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::EmptySeq => out.push_str("<>"),
        Expr::Unary(op, inner) => {
            let (kw, level) = match op {
                UnaryOp::Not => ("~", NOT),
                UnaryOp::Head => ("head ", PREFIX),
                UnaryOp::Tail => ("tail ", PREFIX),
                UnaryOp::Len => ("#", PREFIX),
                UnaryOp::IsEmpty => ("isempty ", PREFIX),
            };
            out.push_str(kw);
            write_wrapped(out, inner, binder, prec(inner) < level);
        }
        Expr::Binary(op, l, r) => {
            let p = binary_prec(*op);
            let (left_parens, right_parens) = match op {
                BinaryOp::Implies => (prec(l) <= p, prec(r) < p),
                BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                    (prec(l) <= p, prec(r) <= p)
                }
                _ => (prec(l) < p, prec(r) <= p),
            };
            write_wrapped(out, l, binder, left_parens);
            match op {
                BinaryOp::Append => {
                    out.push_str(" ++ <");
                    write_wrapped(out, r, binder, prec(r) < ADD);
                    out.push('>');
                }
                BinaryOp::Concat => {
                    out.push_str(" ++ ");
                    // A bare display on the right would read back as an append.
                    let display = matches!(&**r, Expr::Lit(Value::Seq(items)) if !items.is_empty());
                    write_wrapped(out, r, binder, right_parens || display);
                }
                _ => {
                    let _ = write!(out, " {} ", op.symbol());
                    write_wrapped(out, r, binder, right_parens);
                }
            }
        }
    }
}

fn params(fields: &[Field], deco: char) -> String {
    fields
        .iter()
        .map(|f| format!("{}{deco} : {}", f.name, f.domain))
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_class(out: &mut String, c: &ClassSpec) {
    let _ = write!(out, "class {}", c.name);
    if let Some(p) = &c.parent {
        let _ = write!(out, " extends {p}");
    }
    if c.is_abstract {
        out.push_str(" abstract");
    }
    out.push_str(" {\n");
    for k in &c.constants {
        let _ = writeln!(out, "  const {} : {} = {};", k.name, k.domain, k.value);
    }
    for f in &c.fields {
        let _ = writeln!(out, "  var {} : {};", f.name, f.domain);
    }
    if !c.invariant.is_truth() {
        let _ = writeln!(out, "  invariant {};", print_expr(&c.invariant, None));
    }
    if let Some(init) = &c.init {
        let _ = writeln!(out, "  init {};", print_expr(init, None));
    }
    if let Some(fin) = &c.finalisation {
        let _ = writeln!(out, "  final {};", print_expr(fin, None));
    }
    for op in &c.operations {
        let kw = match op.mode {
            OpMode::Specializes => "override op",
            OpMode::Introduces => "op",
        };
        let _ = write!(out, "  {kw} {}({})", op.name, params(&op.inputs, '?'));
        if !op.outputs.is_empty() {
            let _ = write!(out, " -> {}", params(&op.outputs, '!'));
        }
        let _ = writeln!(out, " {{\n    {}\n  }}", print_expr(&op.body, None));
    }
    out.push_str("}\n");
}

/// Canonical concrete syntax for a valid hierarchy.
pub fn print(h: &Hierarchy) -> String {
    let mut out = String::new();
    for (k, c) in h.classes.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        write_class(&mut out, c);
    }
    if !h.constraints.is_empty() {
        out.push_str("\nsystem {\n");
        for gc in &h.constraints {
            let _ = writeln!(
                out,
                "  constraint on {} : forall {} : ext . {};",
                gc.class,
                gc.binder,
                print_expr(&gc.body, Some(&gc.binder))
            );
        }
        out.push_str("}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn round(body: &str) -> String {
        let src =
            format!("class A {{ var x : int 0..3; var p : bool; var s : seq(enum {{a, b}}, 2); op f() {{ {body} }} }}");
        let h = parse(&src).unwrap_or_else(|e| panic!("{body}: {e:?}"));
        print_expr(&h.classes[0].operations[0].body, None)
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(round("x' = x + 1 /\\ p' = p"), "x' = x + 1 /\\ p' = p");
        assert_eq!(round("(p \\/ p') /\\ x < 2"), "(p \\/ p') /\\ x < 2");
        assert_eq!(round("p => p' => x = 0"), "p => p' => x = 0");
        assert_eq!(round("(p => p') => x = 0"), "(p => p') => x = 0");
        assert_eq!(round("x - (1 - x) = 0"), "x - (1 - x) = 0");
        assert_eq!(round("~(x = 0) /\\ ~p"), "~x = 0 /\\ ~p");
        assert_eq!(round("p' = (~p)"), "p' = (~p)");
        assert_eq!(round("x' = -1 + 2"), "x' = -1 + 2");
    }

    #[test]
    fn sequences() {
        assert_eq!(round("s' = s ++ <a>"), "s' = s ++ <a>");
        assert_eq!(round("s' = s ++ (<a>)"), "s' = s ++ (<a>)");
        assert_eq!(round("s' = s ++ <a, b> /\\ #s = 0"), "s' = s ++ (<a, b>) /\\ #s = 0");
        assert_eq!(round("s' = tail s /\\ head s = a"), "s' = tail s /\\ head s = a");
        assert_eq!(round("isempty s' /\\ s /= <>"), "isempty s' /\\ s /= <>");
    }
}
