//! Recursive-descent parser producing a spanned surface tree.

use super::lexer::{Tok, Token, KEYWORDS};
use super::{ParseError, SourceSpan};
use crate::model::{BinaryOp, Domain, UnaryOp, VarKind};

#[derive(Debug, Clone)]
pub(super) struct SExpr {
    pub kind: SExprKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub(super) enum SExprKind {
    Name(String, Option<VarKind>),
    /// `binder.field`, only meaningful inside global constraints.
    Member(String, String),
    Int(i64),
    Bool(bool),
    EmptySeq,
    Display(Vec<SExpr>),
    Unary(UnaryOp, Box<SExpr>),
    Binary(BinaryOp, Box<SExpr>, Box<SExpr>),
}

#[derive(Debug, Clone)]
pub(super) struct SParam {
    pub name: String,
    pub deco: Option<VarKind>,
    pub domain: Domain,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub(super) struct SOp {
    pub name: String,
    pub span: SourceSpan,
    pub is_override: bool,
    pub inputs: Vec<SParam>,
    pub outputs: Vec<SParam>,
    pub body: SExpr,
}

#[derive(Debug, Clone)]
pub(super) enum SMember {
    Const {
        name: String,
        span: SourceSpan,
        domain: Domain,
        value: SExpr,
    },
    Var {
        name: String,
        span: SourceSpan,
        domain: Domain,
    },
    Invariant(SExpr),
    Init(SExpr),
    Final(SExpr),
    Op(SOp),
}

#[derive(Debug, Clone)]
pub(super) struct SClass {
    pub name: String,
    pub span: SourceSpan,
    pub parent: Option<(String, SourceSpan)>,
    pub is_abstract: bool,
    pub members: Vec<SMember>,
}

#[derive(Debug, Clone)]
pub(super) struct SConstraint {
    pub class: String,
    pub class_span: SourceSpan,
    pub binder: String,
    pub body: SExpr,
}

#[derive(Debug, Clone, Default)]
pub(super) struct SSpec {
    pub classes: Vec<SClass>,
    pub constraints: Vec<SConstraint>,
}

type PResult<T> = Result<T, ParseError>;

pub(super) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(name, None) => format!("`{name}`"),
        Tok::Ident(name, Some(k)) => format!("`{}`", crate::model::typing::decorate(name, *k)),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self { tokens, pos: 0 }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x, None) if x == kw)
    }

    fn error_here(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        let list: Vec<String> = expected.iter().map(|e| format!("'{e}'")).collect();
        let message = match list.len() {
            0 => format!("unexpected {}", describe(&t.tok)),
            1 => format!("expected {}, found {}", list[0], describe(&t.tok)),
            _ => format!("expected one of {}, found {}", list.join(", "), describe(&t.tok)),
        };
        ParseError {
            span: t.span.clone(),
            message,
            expected: expected.iter().map(|e| e.to_string()).collect(),
        }
    }

    fn expect_sym(&mut self, s: &'static str) -> PResult<SourceSpan> {
        if self.is_sym(s) {
            Ok(self.advance().span)
        } else {
            Err(self.error_here(&[s]))
        }
    }

    fn expect_kw(&mut self, kw: &'static str) -> PResult<SourceSpan> {
        if self.is_kw(kw) {
            Ok(self.advance().span)
        } else {
            Err(self.error_here(&[kw]))
        }
    }

    /// A plain (undecorated, non-keyword) identifier.
    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Ident(name, None) if !KEYWORDS.contains(&name.as_str()) => {
                let t = self.advance();
                Ok((name_of(&t.tok), t.span))
            }
            _ => Err(self.error_here(&["identifier"])),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let negative = self.is_sym("-");
        if negative {
            self.advance();
        }
        match self.peek().tok {
            Tok::Int(n) => {
                self.advance();
                Ok(if negative { -n } else { n })
            }
            _ => Err(self.error_here(&["integer"])),
        }
    }

    /// Parses a whole file, recovering at the next `class` or `system`
    /// after a syntax error.
    pub fn spec(&mut self) -> (SSpec, Vec<ParseError>) {
        let mut spec = SSpec::default();
        let mut errors = Vec::new();
        if matches!(self.peek().tok, Tok::Eof) {
            errors.push(self.error_here(&["class"]));
            return (spec, errors);
        }
        while !matches!(self.peek().tok, Tok::Eof) {
            let result = if self.is_kw("class") {
                self.class().map(|c| spec.classes.push(c))
            } else if self.is_kw("system") {
                self.system().map(|cs| spec.constraints.extend(cs))
            } else if spec.classes.is_empty() {
                Err(self.error_here(&["class"]))
            } else {
                Err(self.error_here(&["class", "system"]))
            };
            if let Err(e) = result {
                errors.push(e);
                self.advance();
                while !matches!(self.peek().tok, Tok::Eof) && !self.is_kw("class") && !self.is_kw("system") {
                    self.advance();
                }
            }
        }
        (spec, errors)
    }

    fn class(&mut self) -> PResult<SClass> {
        let start = self.expect_kw("class")?;
        let (name, _) = self.ident()?;
        let parent = if self.is_kw("extends") {
            self.advance();
            Some(self.ident()?)
        } else {
            None
        };
        let is_abstract = self.is_kw("abstract");
        if is_abstract {
            self.advance();
        }
        self.expect_sym("{")?;
        let mut members = Vec::new();
        while !self.is_sym("}") {
            members.push(self.member()?);
        }
        let end = self.expect_sym("}")?;
        Ok(SClass {
            name,
            span: start.to(&end),
            parent,
            is_abstract,
            members,
        })
    }

    fn member(&mut self) -> PResult<SMember> {
        if self.is_kw("const") {
            let start = self.advance().span;
            let (name, _) = self.ident()?;
            self.expect_sym(":")?;
            let domain = self.domain()?;
            self.expect_sym("=")?;
            let value = self.literal()?;
            let end = self.expect_sym(";")?;
            return Ok(SMember::Const {
                name,
                span: start.to(&end),
                domain,
                value,
            });
        }
        if self.is_kw("var") {
            let start = self.advance().span;
            let (name, _) = self.ident()?;
            self.expect_sym(":")?;
            let domain = self.domain()?;
            let end = self.expect_sym(";")?;
            return Ok(SMember::Var {
                name,
                span: start.to(&end),
                domain,
            });
        }
        for kw in ["invariant", "init", "final"] {
            if self.is_kw(kw) {
                self.advance();
                let e = self.expr()?;
                self.expect_sym(";")?;
                return Ok(match kw {
                    "invariant" => SMember::Invariant(e),
                    "init" => SMember::Init(e),
                    _ => SMember::Final(e),
                });
            }
        }
        if self.is_kw("op") || self.is_kw("override") {
            return self.op().map(SMember::Op);
        }
        Err(self.error_here(&["const", "var", "invariant", "init", "final", "op", "override", "}"]))
    }

    fn op(&mut self) -> PResult<SOp> {
        let start = self.peek().span.clone();
        let is_override = self.is_kw("override");
        if is_override {
            self.advance();
        }
        self.expect_kw("op")?;
        let (name, _) = self.ident()?;
        self.expect_sym("(")?;
        let inputs = if self.is_sym(")") { Vec::new() } else { self.params()? };
        self.expect_sym(")")?;
        let outputs = if self.is_sym("->") {
            self.advance();
            self.params()?
        } else {
            Vec::new()
        };
        self.expect_sym("{")?;
        let body = self.expr()?;
        let end = self.expect_sym("}")?;
        Ok(SOp {
            name,
            span: start.to(&end),
            is_override,
            inputs,
            outputs,
            body,
        })
    }

    fn params(&mut self) -> PResult<Vec<SParam>> {
        let mut out = vec![self.param()?];
        while self.is_sym(",") {
            self.advance();
            out.push(self.param()?);
        }
        Ok(out)
    }

    fn param(&mut self) -> PResult<SParam> {
        let (name, deco, span) = match &self.peek().tok {
            Tok::Ident(name, deco) if !KEYWORDS.contains(&name.as_str()) => {
                let (name, deco) = (name.clone(), *deco);
                (name, deco, self.advance().span)
            }
            _ => return Err(self.error_here(&["parameter name"])),
        };
        self.expect_sym(":")?;
        let domain = self.domain()?;
        Ok(SParam {
            name,
            deco,
            domain,
            span,
        })
    }

    fn domain(&mut self) -> PResult<Domain> {
        if self.is_kw("bool") {
            self.advance();
            return Ok(Domain::Bool);
        }
        if self.is_kw("int") {
            self.advance();
            let lo = self.int()?;
            self.expect_sym("..")?;
            let hi = self.int()?;
            return Ok(Domain::IntRange { lo, hi });
        }
        if self.is_kw("enum") {
            self.advance();
            self.expect_sym("{")?;
            let mut literals = vec![self.ident()?.0];
            while self.is_sym(",") {
                self.advance();
                literals.push(self.ident()?.0);
            }
            self.expect_sym("}")?;
            return Ok(Domain::Enum { literals });
        }
        if self.is_kw("seq") {
            self.advance();
            self.expect_sym("(")?;
            let elem = self.domain()?;
            self.expect_sym(",")?;
            let n = self.int()?;
            if n < 0 {
                return Err(ParseError::new(
                    self.peek().span.clone(),
                    "sequence bound must be non-negative",
                ));
            }
            self.expect_sym(")")?;
            return Ok(Domain::seq(elem, n as usize));
        }
        Err(self.error_here(&["bool", "int", "enum", "seq"]))
    }

    /// A constant value: integer, boolean, literal name, or sequence display.
    fn literal(&mut self) -> PResult<SExpr> {
        let start = self.peek().span.clone();
        match &self.peek().tok {
            Tok::Int(_) | Tok::Sym("-") => {
                let n = self.int()?;
                Ok(SExpr {
                    kind: SExprKind::Int(n),
                    span: start.to(&self.prev_span()),
                })
            }
            Tok::Ident(..) | Tok::Sym("<>") | Tok::Sym("<") => self.atom(),
            _ => Err(self.error_here(&["literal"])),
        }
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1)].span.clone()
    }

    fn system(&mut self) -> PResult<Vec<SConstraint>> {
        self.expect_kw("system")?;
        self.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.is_sym("}") {
            self.expect_kw("constraint")?;
            self.expect_kw("on")?;
            let (class, class_span) = self.ident()?;
            self.expect_sym(":")?;
            self.expect_kw("forall")?;
            let (binder, _) = self.ident()?;
            self.expect_sym(":")?;
            self.expect_kw("ext")?;
            self.expect_sym(".")?;
            let body = self.expr()?;
            self.expect_sym(";")?;
            out.push(SConstraint {
                class,
                class_span,
                binder,
                body,
            });
        }
        self.expect_sym("}")?;
        Ok(out)
    }

    pub fn expr(&mut self) -> PResult<SExpr> {
        let lhs = self.or_expr()?;
        if self.is_sym("=>") {
            self.advance();
            let rhs = self.expr()?;
            return Ok(bin(BinaryOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<SExpr> {
        let mut lhs = self.and_expr()?;
        while self.is_sym("\\/") {
            self.advance();
            let rhs = self.and_expr()?;
            lhs = bin(BinaryOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<SExpr> {
        let mut lhs = self.not_expr()?;
        while self.is_sym("/\\") {
            self.advance();
            let rhs = self.not_expr()?;
            lhs = bin(BinaryOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<SExpr> {
        if self.is_sym("~") {
            let start = self.advance().span;
            let inner = self.not_expr()?;
            let span = start.to(&inner.span);
            return Ok(SExpr {
                kind: SExprKind::Unary(UnaryOp::Not, Box::new(inner)),
                span,
            });
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> PResult<SExpr> {
        let lhs = self.add_expr()?;
        let op = match &self.peek().tok {
            Tok::Sym("=") => BinaryOp::Eq,
            Tok::Sym("/=") => BinaryOp::Ne,
            Tok::Sym("<") => BinaryOp::Lt,
            Tok::Sym("<=") => BinaryOp::Le,
            Tok::Sym(">") => BinaryOp::Gt,
            Tok::Sym(">=") => BinaryOp::Ge,
            _ => return Ok(lhs),
        };
        self.advance();
        let rhs = self.add_expr()?;
        Ok(bin(op, lhs, rhs))
    }

    fn add_expr(&mut self) -> PResult<SExpr> {
        let mut lhs = self.prefix_expr()?;
        loop {
            let op = match &self.peek().tok {
                Tok::Sym("+") => BinaryOp::Add,
                Tok::Sym("-") => BinaryOp::Sub,
                Tok::Sym("++") => BinaryOp::Concat,
                _ => return Ok(lhs),
            };
            self.advance();
            if op == BinaryOp::Concat && self.is_sym("<") {
                let display = self.display()?;
                lhs = match display.kind {
                    SExprKind::Display(mut elems) if elems.len() == 1 => {
                        let elem = elems.pop().unwrap();
                        let mut e = bin(BinaryOp::Append, lhs, elem);
                        e.span = e.span.to(&display.span);
                        e
                    }
                    _ => bin(op, lhs, display),
                };
                continue;
            }
            let rhs = self.prefix_expr()?;
            lhs = bin(op, lhs, rhs);
        }
    }

    fn prefix_expr(&mut self) -> PResult<SExpr> {
        let op = match &self.peek().tok {
            Tok::Sym("#") => Some(UnaryOp::Len),
            Tok::Ident(k, None) if k == "head" => Some(UnaryOp::Head),
            Tok::Ident(k, None) if k == "tail" => Some(UnaryOp::Tail),
            Tok::Ident(k, None) if k == "isempty" => Some(UnaryOp::IsEmpty),
            _ => None,
        };
        if let Some(op) = op {
            let start = self.advance().span;
            let inner = self.prefix_expr()?;
            let span = start.to(&inner.span);
            return Ok(SExpr {
                kind: SExprKind::Unary(op, Box::new(inner)),
                span,
            });
        }
        self.atom()
    }

    fn display(&mut self) -> PResult<SExpr> {
        let start = self.expect_sym("<")?;
        let mut elems = vec![self.add_expr()?];
        while self.is_sym(",") {
            self.advance();
            elems.push(self.add_expr()?);
        }
        let end = self.expect_sym(">")?;
        Ok(SExpr {
            kind: SExprKind::Display(elems),
            span: start.to(&end),
        })
    }

    fn atom(&mut self) -> PResult<SExpr> {
        let t = self.peek().clone();
        let leaf = |kind| {
            Ok(SExpr {
                kind,
                span: t.span.clone(),
            })
        };
        match &t.tok {
            Tok::Int(n) => {
                self.advance();
                leaf(SExprKind::Int(*n))
            }
            Tok::Sym("-") if matches!(self.peek_at(1), Tok::Int(_)) => {
                let n = self.int()?;
                Ok(SExpr {
                    kind: SExprKind::Int(n),
                    span: t.span.to(&self.prev_span()),
                })
            }
            Tok::Sym("<>") => {
                self.advance();
                leaf(SExprKind::EmptySeq)
            }
            Tok::Sym("<") => self.display(),
            Tok::Sym("(") => {
                self.advance();
                let mut e = self.expr()?;
                let end = self.expect_sym(")")?;
                e.span = t.span.to(&end);
                Ok(e)
            }
            Tok::Ident(name, None) if name == "true" || name == "false" => {
                self.advance();
                leaf(SExprKind::Bool(name == "true"))
            }
            Tok::Ident(name, deco) if !KEYWORDS.contains(&name.as_str()) => {
                self.advance();
                if deco.is_none() && self.is_sym(".") {
                    self.advance();
                    let (field, end) = self.ident()?;
                    return Ok(SExpr {
                        kind: SExprKind::Member(name.clone(), field),
                        span: t.span.to(&end),
                    });
                }
                leaf(SExprKind::Name(name.clone(), *deco))
            }
            _ => Err(self.error_here(&["expression"])),
        }
    }
}

fn name_of(tok: &Tok) -> String {
    match tok {
        Tok::Ident(n, _) => n.clone(),
        _ => String::new(),
    }
}

fn bin(op: BinaryOp, l: SExpr, r: SExpr) -> SExpr {
    let span = l.span.to(&r.span);
    SExpr {
        kind: SExprKind::Binary(op, Box::new(l), Box::new(r)),
        span,
    }
}
