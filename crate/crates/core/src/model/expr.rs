use super::Value;

/// Which binding a variable reference reads from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// Before-state field `x`.
    State,
    /// After-state field `x'`.
    Primed,
    /// Operation input `x?`.
    Input,
    /// Operation output `x!`.
    Output,
    /// Class constant.
    Const,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Head,
    Tail,
    Len,
    IsEmpty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    And,
    Or,
    Implies,
    /// `s ++ <x>`: append a single element.
    Append,
    /// `s ++ t`.
    Concat,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "/=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::And => "/\\",
            BinaryOp::Or => "\\/",
            BinaryOp::Implies => "=>",
            BinaryOp::Append | BinaryOp::Concat => "++",
        }
    }
}

/// Predicate and term syntax over state, primed state, inputs, outputs and
/// constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var { name: String, kind: VarKind },
    Lit(Value),
    EmptySeq,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn truth() -> Self {
        Expr::Lit(Value::Bool(true))
    }

    pub fn is_truth(&self) -> bool {
        matches!(self, Expr::Lit(Value::Bool(true)))
    }

    pub fn var(name: &str, kind: VarKind) -> Self {
        Expr::Var {
            name: name.to_string(),
            kind,
        }
    }

    pub fn state(name: &str) -> Self {
        Self::var(name, VarKind::State)
    }

    pub fn primed(name: &str) -> Self {
        Self::var(name, VarKind::Primed)
    }

    pub fn input(name: &str) -> Self {
        Self::var(name, VarKind::Input)
    }

    pub fn output(name: &str) -> Self {
        Self::var(name, VarKind::Output)
    }

    pub fn constant(name: &str) -> Self {
        Self::var(name, VarKind::Const)
    }

    pub fn int(i: i64) -> Self {
        Expr::Lit(Value::Int(i))
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Self {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn eq(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::Eq, l, r)
    }

    pub fn and(l: Expr, r: Expr) -> Self {
        Self::binary(BinaryOp::And, l, r)
    }

    /// Conjunction of `parts`, `true` when empty.
    pub fn conjoin(parts: impl IntoIterator<Item = Expr>) -> Self {
        parts.into_iter().reduce(Expr::and).unwrap_or_else(Expr::truth)
    }

    /// Top-level conjuncts, left to right.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
            match e {
                Expr::Binary(BinaryOp::And, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Visits every variable reference.
    pub fn for_each_var(&self, f: &mut impl FnMut(&str, VarKind)) {
        match self {
            Expr::Var { name, kind } => f(name, *kind),
            Expr::Lit(_) | Expr::EmptySeq => {}
            Expr::Unary(_, e) => e.for_each_var(f),
            Expr::Binary(_, l, r) => {
                l.for_each_var(f);
                r.for_each_var(f);
            }
        }
    }

    pub fn mentions_kind(&self, kind: VarKind) -> bool {
        let mut found = false;
        self.for_each_var(&mut |_, k| found |= k == kind);
        found
    }
}
