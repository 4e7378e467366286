use super::{ParseError, SourceSpan};
use crate::model::VarKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifier or keyword, with an optional `'`, `?` or `!` decoration.
    Ident(String, Option<VarKind>),
    Int(i64),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

const SYMBOLS: &[&str] = &[
    "..", "->", "=>", "/=", "/\\", "\\/", "<=", ">=", "<>", "++", "{", "}", "(", ")", ",", ";", ":", "=", "<", ">",
    "+", "-", "~", "#", ".",
];

pub const KEYWORDS: &[&str] = &[
    "class",
    "extends",
    "abstract",
    "const",
    "var",
    "invariant",
    "init",
    "final",
    "op",
    "override",
    "bool",
    "int",
    "enum",
    "seq",
    "system",
    "constraint",
    "on",
    "forall",
    "ext",
    "true",
    "false",
    "head",
    "tail",
    "isempty",
];

struct Cursor<'s> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    file: &'s str,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(k, c)| self.peek_at(k) == Some(c))
    }

    fn span_from(&self, line: usize, col: usize) -> SourceSpan {
        SourceSpan {
            file: self.file.to_string(),
            start_line: line,
            start_col: col,
            end_line: self.line,
            end_col: self.col,
        }
    }
}

/// Splits `source` into tokens. Unknown characters are reported and
/// skipped so lexing always reaches the end of input.
pub fn lex(source: &str, file: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut cur = Cursor {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        file,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    loop {
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if cur.starts_with("//") {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let (line, col) = (cur.line, cur.col);
        let Some(c) = cur.peek() else {
            tokens.push(Token {
                tok: Tok::Eof,
                span: cur.span_from(line, col),
            });
            break;
        };
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(c) = cur.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                name.push(c);
                cur.bump();
            }
            let deco = match cur.peek() {
                Some('\'') => Some(VarKind::Primed),
                Some('?') => Some(VarKind::Input),
                Some('!') => Some(VarKind::Output),
                _ => None,
            };
            if deco.is_some() {
                cur.bump();
            }
            tokens.push(Token {
                tok: Tok::Ident(name, deco),
                span: cur.span_from(line, col),
            });
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
                digits.push(d);
                cur.bump();
            }
            let span = cur.span_from(line, col);
            match digits.parse::<i64>() {
                Ok(n) => tokens.push(Token { tok: Tok::Int(n), span }),
                Err(_) => errors.push(ParseError::new(
                    span,
                    format!("integer literal `{digits}` is too large"),
                )),
            }
        } else if let Some(sym) = SYMBOLS.iter().find(|s| cur.starts_with(s)) {
            for _ in 0..sym.len() {
                cur.bump();
            }
            tokens.push(Token {
                tok: Tok::Sym(sym),
                span: cur.span_from(line, col),
            });
        } else {
            cur.bump();
            errors.push(ParseError::new(
                cur.span_from(line, col),
                format!("unexpected character `{c}`"),
            ));
        }
    }
    (tokens, errors)
}
