use super::diagnostic::{DiagnosticKind, Span, SyntaxDiagnostic};

/// Surface notation accepted by the lexer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Dialect {
    /// ASCII notation: `all x.`, `exists x.`, `-`, `&`, `|`, `->`, `<->`.
    #[default]
    Standard,
    /// Additionally accepts the Unicode notation used by published gold
    /// annotations: `∀x`, `∃x`, `¬`, `∧`, `∨`, `→`, `↔`, `⊕`.
    Folio,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Number(String),
    Quoted(String),
    All,
    Exists,
    Dot,
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Number(s) => format!("number `{s}`"),
            TokenKind::Quoted(s) => format!("quoted literal `{s}`"),
            TokenKind::All => "`all`".into(),
            TokenKind::Exists => "`exists`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Not => "`-`".into(),
            TokenKind::And => "`&`".into(),
            TokenKind::Or => "`|`".into(),
            TokenKind::Xor => "`⊕`".into(),
            TokenKind::Implies => "`->`".into(),
            TokenKind::Iff => "`<->`".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `input` into tokens of the standard notation.
pub fn tokenize(input: &str) -> Result<Vec<Token>, SyntaxDiagnostic> {
    tokenize_with(input, Dialect::Standard)
}

pub fn tokenize_with(input: &str, dialect: Dialect) -> Result<Vec<Token>, SyntaxDiagnostic> {
    let mut tokens = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let single = |kind| Some((kind, start + c.len_utf8()));
        let simple = match c {
            '(' => single(TokenKind::LParen),
            ')' => single(TokenKind::RParen),
            ',' => single(TokenKind::Comma),
            '.' => single(TokenKind::Dot),
            '&' => single(TokenKind::And),
            '|' => single(TokenKind::Or),
            '∀' if dialect == Dialect::Folio => single(TokenKind::All),
            '∃' if dialect == Dialect::Folio => single(TokenKind::Exists),
            '¬' if dialect == Dialect::Folio => single(TokenKind::Not),
            '∧' if dialect == Dialect::Folio => single(TokenKind::And),
            '∨' if dialect == Dialect::Folio => single(TokenKind::Or),
            '⊕' if dialect == Dialect::Folio => single(TokenKind::Xor),
            '→' if dialect == Dialect::Folio => single(TokenKind::Implies),
            '↔' | '⟷' if dialect == Dialect::Folio => single(TokenKind::Iff),
            _ => None,
        };
        if let Some((kind, end)) = simple {
            chars.next();
            tokens.push(Token { kind, span: Span::new(start, end) });
            continue;
        }
        match c {
            '-' => {
                chars.next();
                if input[start + 1..].starts_with('>') {
                    chars.next();
                    tokens.push(Token { kind: TokenKind::Implies, span: Span::new(start, start + 2) });
                } else {
                    tokens.push(Token { kind: TokenKind::Not, span: Span::new(start, start + 1) });
                }
            }
            '<' => {
                if input[start..].starts_with("<->") {
                    for _ in 0..3 {
                        chars.next();
                    }
                    tokens.push(Token { kind: TokenKind::Iff, span: Span::new(start, start + 3) });
                } else {
                    return Err(lex_error(start, c));
                }
            }
            '"' => {
                chars.next();
                let mut end = None;
                for (i, ch) in chars.by_ref() {
                    if ch == '"' {
                        end = Some(i);
                        break;
                    }
                }
                let Some(end) = end else {
                    return Err(SyntaxDiagnostic::at(
                        DiagnosticKind::LexError,
                        Span::new(start, input.len()),
                        "unterminated quoted literal",
                    ));
                };
                let name = normalize_quoted(&input[start + 1..end]);
                if name.is_empty() {
                    return Err(SyntaxDiagnostic::at(
                        DiagnosticKind::LexError,
                        Span::new(start, end + 1),
                        "quoted literal has no identifier characters",
                    ));
                }
                tokens.push(Token { kind: TokenKind::Quoted(name), span: Span::new(start, end + 1) });
            }
            c if c.is_ascii_alphabetic() || c.is_ascii_digit() => {
                let mut end = start;
                while let Some(&(i, ch)) = chars.peek() {
                    if is_ident_continue(ch) {
                        end = i + ch.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let text = &input[start..end];
                let kind = if c.is_ascii_digit() {
                    TokenKind::Number(text.to_owned())
                } else {
                    match text {
                        "all" => TokenKind::All,
                        "exists" => TokenKind::Exists,
                        _ => TokenKind::Ident(text.to_owned()),
                    }
                };
                tokens.push(Token { kind, span: Span::new(start, end) });
            }
            _ => return Err(lex_error(start, c)),
        }
    }
    Ok(tokens)
}

fn lex_error(at: usize, c: char) -> SyntaxDiagnostic {
    let detail = match c {
        '=' | '>' | '<' => " (equality and comparison operators are not supported)",
        c if !c.is_ascii() => " (only ASCII identifiers are supported)",
        _ => "",
    };
    SyntaxDiagnostic::at(
        DiagnosticKind::LexError,
        Span::new(at, at + c.len_utf8()),
        format!("unexpected character `{c}`{detail}"),
    )
}

/// `"Walden"` becomes `Walden`; characters outside `[A-Za-z0-9_]` are
/// dropped and a lowercase initial is capitalized so the result still reads
/// back as a constant.
fn normalize_quoted(raw: &str) -> String {
    let mut s: String = raw
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
        .collect();
    if let Some(first) = s.get(0..1) {
        if first.as_bytes()[0].is_ascii_lowercase() {
            let upper = first.to_ascii_uppercase();
            s.replace_range(0..1, &upper);
        }
    }
    s
}
