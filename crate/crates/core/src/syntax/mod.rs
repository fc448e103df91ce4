//! Lexing, parsing, validation and printing of the FOL surface syntax.
//!
//! The notation follows the NLTK logic module: `all x.`, `exists x.`, `-`,
//! `&`, `|`, `->`, `<->`. Equality and arithmetic are not part of the
//! language and are rejected by the lexer.

mod ast;
mod diagnostic;
mod lexer;
mod parser;
mod signature;

pub use ast::{is_variable_name, Formula, Term};
pub use diagnostic::{DiagnosticKind, Span, SyntaxDiagnostic};
pub use lexer::{tokenize, tokenize_with, Dialect, Token, TokenKind};
pub use parser::{parse, parse_closed, parse_with, ParseOptions};
pub use signature::{check_signature, Signature};

/// Canonical text of `f`; binary connectives are fully parenthesized.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

pub fn free_vars(f: &Formula) -> std::collections::BTreeSet<String> {
    f.free_vars()
}

pub fn close_universally(f: &Formula) -> Formula {
    f.close_universally()
}
