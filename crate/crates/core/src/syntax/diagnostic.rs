use std::fmt;

use serde::{Deserialize, Serialize};

/// Byte offsets `[start, end)` into the text a diagnostic refers to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    LexError,
    ParseError,
    MultipleArity,
    MixedRole,
    FreeVariable,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::LexError => "lex-error",
            DiagnosticKind::ParseError => "parse-error",
            DiagnosticKind::MultipleArity => "multiple-arity",
            DiagnosticKind::MixedRole => "mixed-role",
            DiagnosticKind::FreeVariable => "free-variable",
        })
    }
}

/// A rejection of FOL text or of a set of formulas.
///
/// Signature diagnostics are produced from already-parsed formulas and so
/// have no byte location of their own; they carry the index of the first
/// offending formula in `formula` and an empty span at offset 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntaxDiagnostic {
    pub kind: DiagnosticKind,
    pub symbol: Option<String>,
    pub arities: Option<Vec<usize>>,
    pub location: Span,
    pub formula: Option<usize>,
    pub message: String,
}

impl SyntaxDiagnostic {
    pub(crate) fn at(kind: DiagnosticKind, location: Span, message: impl Into<String>) -> Self {
        SyntaxDiagnostic {
            kind,
            symbol: None,
            arities: None,
            location,
            formula: None,
            message: message.into(),
        }
    }

    /// `Name/2, Name/0` rendering of a multiple-arity or mixed-role finding.
    pub fn symbol_list(&self) -> Option<String> {
        let sym = self.symbol.as_ref()?;
        let arities = self.arities.as_ref()?;
        Some(
            arities
                .iter()
                .map(|a| format!("{sym}/{a}"))
                .collect::<Vec<_>>()
                .join(", "),
        )
    }
}

impl fmt::Display for SyntaxDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.formula {
            Some(i) => write!(f, "{} in formula {}: {}", self.kind, i + 1, self.message),
            None => write!(
                f,
                "{} at {}..{}: {}",
                self.kind, self.location.start, self.location.end, self.message
            ),
        }
    }
}

impl std::error::Error for SyntaxDiagnostic {}
