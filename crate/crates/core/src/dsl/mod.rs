//! The `.bi` specification language: parsing with spanned diagnostics and
//! canonical printing.
//!
//! ```text
//! class Counter {
//!   var n : int 0..3;
//!   init n' = 0;
//!   op inc() { n' = n + 1 }
//! }
//! ```

mod lexer;
mod parser;
mod printer;
mod resolve;

use std::fmt;

use serde::Serialize;

use crate::model::Hierarchy;

pub use lexer::KEYWORDS;
pub use printer::{print, print_expr};

/// A 1-based source region; `end` is one past the last character.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl SourceSpan {
    /// Smallest span covering `self` and `other`.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan {
            file: self.file.clone(),
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    /// Token descriptions that would have been accepted, when known.
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}",
            self.span.file, self.span.start_line, self.span.start_col, self.message
        )
    }
}

impl std::error::Error for ParseError {}

/// Parses a specification, attributing diagnostics to `<input>`.
pub fn parse(source: &str) -> Result<Hierarchy, Vec<ParseError>> {
    parse_named(source, "<input>")
}

/// Parses a specification read from `file`.
///
/// On success every name is resolved, every expression is type-checked, and
/// the hierarchy passes [`validate`](crate::model::validate).
pub fn parse_named(source: &str, file: &str) -> Result<Hierarchy, Vec<ParseError>> {
    let (tokens, mut errors) = lexer::lex(source, file);
    let eof = tokens.last().expect("lexer always emits end of input").span.clone();
    let (spec, syntax) = parser::Parser::new(tokens).spec();
    errors.extend(syntax);
    if !errors.is_empty() {
        return Err(errors);
    }
    resolve::resolve(spec, &eof)
}
