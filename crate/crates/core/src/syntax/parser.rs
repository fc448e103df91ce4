//! Recursive-descent parser for the FOL surface syntax.
//!
//! Binding strength, tightest first: `-`, `&`, `|`, `->`, `<->`. `&` and `|`
//! associate to the left, `->` and `<->` to the right. A quantifier's scope
//! extends as far right as possible, so `all x. P(x) -> Q(x)` reads as
//! `all x. (P(x) -> Q(x))`.

use super::ast::{is_variable_name, Formula, Term};
use super::diagnostic::{DiagnosticKind, Span, SyntaxDiagnostic};
use super::lexer::{tokenize_with, Dialect, Token, TokenKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub dialect: Dialect,
}

/// Parses `input` in the standard notation.
pub fn parse(input: &str) -> Result<Formula, SyntaxDiagnostic> {
    parse_with(input, ParseOptions::default())
}

pub fn parse_with(input: &str, options: ParseOptions) -> Result<Formula, SyntaxDiagnostic> {
    let tokens = tokenize_with(input, options.dialect)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        input_len: input.len(),
        dialect: options.dialect,
        bound: Vec::new(),
        open_parens: Vec::new(),
    };
    if tokens.is_empty() {
        return Err(SyntaxDiagnostic::at(
            DiagnosticKind::ParseError,
            Span::new(0, input.len()),
            "empty formula",
        ));
    }
    let formula = parser.formula()?;
    if let Some(tok) = parser.peek() {
        let message = if tok.kind == TokenKind::RParen {
            "unbalanced parenthesis: unexpected `)`".to_owned()
        } else {
            format!("unexpected {} after complete formula", tok.kind.describe())
        };
        return Err(SyntaxDiagnostic::at(DiagnosticKind::ParseError, tok.span, message));
    }
    Ok(formula)
}

/// Parses a sentence and enforces closedness.
///
/// In strict mode a free variable is a `free-variable` diagnostic located at
/// its first occurrence; in lenient mode the formula is closed universally.
pub fn parse_closed(input: &str, options: ParseOptions, lenient: bool) -> Result<Formula, SyntaxDiagnostic> {
    let formula = parse_with(input, options)?;
    let free = formula.free_vars_ordered();
    match free.first() {
        None => Ok(formula),
        Some(_) if lenient => Ok(formula.close_universally()),
        Some(first) => {
            let span = tokenize_with(input, options.dialect)?
                .into_iter()
                .find(|t| matches!(&t.kind, TokenKind::Ident(n) if n == first))
                .map(|t| t.span)
                .unwrap_or_else(|| Span::new(0, input.len()));
            let mut diag = SyntaxDiagnostic::at(
                DiagnosticKind::FreeVariable,
                span,
                format!("variable `{first}` is not bound by any quantifier"),
            );
            diag.symbol = Some(first.clone());
            Err(diag)
        }
    }
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    input_len: usize,
    dialect: Dialect,
    bound: Vec<String>,
    open_parens: Vec<Span>,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn advance(&mut self) -> Option<&'t Token> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: &str) -> SyntaxDiagnostic {
        match self.peek() {
            Some(tok) => SyntaxDiagnostic::at(
                DiagnosticKind::ParseError,
                tok.span,
                format!("expected {expected}, found {}", tok.kind.describe()),
            ),
            None => match self.open_parens.last() {
                Some(open) => SyntaxDiagnostic::at(
                    DiagnosticKind::ParseError,
                    Span::new(open.start, self.input_len),
                    format!(
                        "unbalanced parenthesis: `(` at offset {} is never closed",
                        open.start
                    ),
                ),
                None => SyntaxDiagnostic::at(
                    DiagnosticKind::ParseError,
                    Span::new(self.input_len, self.input_len),
                    format!("expected {expected}, found end of input"),
                ),
            },
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxDiagnostic> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, SyntaxDiagnostic> {
        let lhs = self.implies()?;
        if self.eat(&TokenKind::Iff) {
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, SyntaxDiagnostic> {
        let lhs = self.xor()?;
        if self.eat(&TokenKind::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    // Only reachable in the Folio dialect; the standard lexer never emits Xor.
    fn xor(&mut self) -> Result<Formula, SyntaxDiagnostic> {
        let mut lhs = self.or()?;
        while self.eat(&TokenKind::Xor) {
            let rhs = self.or()?;
            lhs = Formula::or(
                Formula::and(lhs.clone(), Formula::not(rhs.clone())),
                Formula::and(Formula::not(lhs), rhs),
            );
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SyntaxDiagnostic> {
        let mut lhs = self.and()?;
        while self.eat(&TokenKind::Or) {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, SyntaxDiagnostic> {
        let mut lhs = self.unary()?;
        while self.eat(&TokenKind::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxDiagnostic> {
        match self.peek_kind() {
            Some(TokenKind::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(TokenKind::All) | Some(TokenKind::Exists) => self.quantified(),
            _ => self.primary(),
        }
    }

    fn quantified(&mut self) -> Result<Formula, SyntaxDiagnostic> {
        let universal = matches!(self.advance().map(|t| &t.kind), Some(TokenKind::All));
        let mut vars = vec![self.bound_variable()?];
        if self.dialect == Dialect::Standard {
            // `all x y. F` abbreviates `all x. all y. F`.
            while matches!(self.peek_kind(), Some(TokenKind::Ident(n)) if is_variable_name(n)) {
                vars.push(self.bound_variable()?);
            }
            if !self.eat(&TokenKind::Dot) {
                return Err(self.error_here("`.` after quantified variable"));
            }
        } else {
            self.eat(&TokenKind::Dot);
        }
        let depth = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        let body = self.formula();
        self.bound.truncate(depth);
        let body = body?;
        Ok(vars.into_iter().rev().fold(body, |acc, v| {
            if universal {
                Formula::forall(v, acc)
            } else {
                Formula::exists(v, acc)
            }
        }))
    }

    fn bound_variable(&mut self) -> Result<String, SyntaxDiagnostic> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(name), span }) => {
                if !is_variable_name(name) {
                    return Err(SyntaxDiagnostic::at(
                        DiagnosticKind::ParseError,
                        *span,
                        format!("quantified variable `{name}` must start with a lowercase letter"),
                    ));
                }
                self.pos += 1;
                Ok(name.clone())
            }
            _ => Err(self.error_here("a variable after quantifier")),
        }
    }

    fn primary(&mut self) -> Result<Formula, SyntaxDiagnostic> {
        let Some(tok) = self.peek() else {
            return Err(self.error_here("a formula"));
        };
        match &tok.kind {
            TokenKind::LParen => {
                self.pos += 1;
                self.open_parens.push(tok.span);
                let inner = self.formula()?;
                if !self.eat(&TokenKind::RParen) {
                    return Err(self.error_here("`)`"));
                }
                self.open_parens.pop();
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                let args = if self.peek_kind() == Some(&TokenKind::LParen) {
                    self.arguments()?
                } else {
                    Vec::new()
                };
                Ok(Formula::Atom(name.clone(), args))
            }
            other => Err(SyntaxDiagnostic::at(
                DiagnosticKind::ParseError,
                tok.span,
                format!("expected a formula, found {}", other.describe()),
            )),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>, SyntaxDiagnostic> {
        let open = self.advance().expect("caller checked for `(`").span;
        self.open_parens.push(open);
        if self.peek_kind() == Some(&TokenKind::RParen) {
            return Err(SyntaxDiagnostic::at(
                DiagnosticKind::ParseError,
                Span::new(open.start, open.end + 1),
                "empty argument list; write a zero-argument symbol without parentheses",
            ));
        }
        let mut args = vec![self.term()?];
        while self.eat(&TokenKind::Comma) {
            args.push(self.term()?);
        }
        if !self.eat(&TokenKind::RParen) {
            return Err(self.error_here("`,` or `)` in argument list"));
        }
        self.open_parens.pop();
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, SyntaxDiagnostic> {
        let Some(tok) = self.peek() else {
            return Err(self.error_here("a term"));
        };
        match &tok.kind {
            TokenKind::Ident(name) => {
                self.pos += 1;
                if self.peek_kind() == Some(&TokenKind::LParen) {
                    return Ok(Term::Application(name.clone(), self.arguments()?));
                }
                Ok(self.name_term(name))
            }
            TokenKind::Number(n) | TokenKind::Quoted(n) => {
                self.pos += 1;
                Ok(Term::Constant(n.clone()))
            }
            other => Err(SyntaxDiagnostic::at(
                DiagnosticKind::ParseError,
                tok.span,
                format!("expected a term, found {}", other.describe()),
            )),
        }
    }

    fn name_term(&self, name: &str) -> Term {
        if !is_variable_name(name) {
            return Term::Constant(name.to_owned());
        }
        // Gold annotations write some constants in lowercase (`summer`);
        // unbound multi-letter lowercase names are read as constants there.
        if self.dialect == Dialect::Folio && name.len() > 1 && !self.bound.iter().any(|b| b == name) {
            let mut s = name.to_owned();
            s[..1].make_ascii_uppercase();
            return Term::Constant(s);
        }
        Term::Variable(name.to_owned())
    }
}
