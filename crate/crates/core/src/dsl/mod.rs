//! Text format for identities (`.idn` files).
//!
//! ```text
//! identity knuth(n: nat) : sum(k=0..n) (-1)^k * C(n,k) * 2^(-k) * C(2*k,k)
//!     == cases { even(n) => 2^(-n)*C(n,n/2); odd(n) => 0 }
//! ```

mod format;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use format::{format_expr, format_identity, format_predicate};
pub use parser::{parse_expr, parse_file, parse_identity};

/// Byte range plus 1-based line and column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub(crate) fn new(text: &str, start: usize, end: usize) -> Self {
        let before = &text[..start];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(start, |i| start - i - 1) + 1;
        Self { start, end, line, column }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: expected {expected}, found {found}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("{span}: {message} `{name}`")]
    Bind { name: String, span: SourceSpan, message: String },
}

impl DslError {
    pub fn span(&self) -> SourceSpan {
        match self {
            DslError::Parse(p) => p.span,
            DslError::Bind { span, .. } => *span,
        }
    }
}
