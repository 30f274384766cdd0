use std::ops::Range;

use serde::Serialize;

use crate::diagnostic::Diagnostic;
use crate::source::Position;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    Number,
    String,
    Symbol,
    Comment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: Position,
    /// Exclusive.
    pub end: Position,
}

impl Span {
    pub fn new(start: Position, end: Position) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start, other.end)
    }

    /// Inclusive at both ends so that a cursor resting just after a closing
    /// brace still counts as inside.
    pub fn contains(&self, pos: Position) -> bool {
        self.start <= pos && pos <= self.end
    }

    pub fn encloses(&self, inner: &Span) -> bool {
        self.start <= inner.start && inner.end <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
    /// Byte range in the source the token was lexed from.
    #[serde(skip)]
    pub bytes: Range<usize>,
}

impl Token {
    pub fn is_symbol(&self, s: &str) -> bool {
        self.kind == TokenKind::Symbol && self.text == s
    }

    pub fn is_keyword(&self, s: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == s
    }
}

pub const KEYWORDS: &[&str] = &[
    "function", "let", "const", "var", "if", "else", "for", "while", "return", "true", "false",
];

/// Punctuators, longest first so that a linear scan implements maximal munch.
pub const SYMBOLS: &[&str] = &[
    "===", "!==", "==", "!=", "=>", "++", "--", "<<", ">>", "&&", "||", "<=", ">=", "+=", "-=",
    "*=", "/=", "%=", "*/", "{", "}", "(", ")", "[", "]", ";", ",", ".", "+", "-", "*", "/", "%",
    "<", ">", "=", "!", "|", "&", "~", "`", "?", ":", "^",
];

struct Cursor<'a> {
    src: &'a str,
    byte: usize,
    pos: Position,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.byte..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.byte += c.len_utf8();
        if c == '\n' {
            self.pos = Position::new(self.pos.line + 1, 0);
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn bump_str(&mut self, s: &str) {
        for _ in s.chars() {
            self.bump();
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

/// Strict tokenization: unterminated strings and block comments are errors
/// reported at their opening position.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    lex(source, false)
}

/// Never fails: unterminated strings run to the end of their line and
/// unterminated block comments to the end of input.
pub fn tokenize_lenient(source: &str) -> Vec<Token> {
    lex(source, true).unwrap_or_default()
}

fn lex(source: &str, lenient: bool) -> Result<Vec<Token>, Diagnostic> {
    let mut cur = Cursor {
        src: source,
        byte: 0,
        pos: Position::new(1, 0),
    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let start = cur.pos;
        let start_byte = cur.byte;
        let rest = cur.rest();

        let kind = if rest.starts_with("//") {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            TokenKind::Comment
        } else if rest.starts_with("/*") {
            cur.bump_str("/*");
            loop {
                if cur.rest().starts_with("*/") {
                    cur.bump_str("*/");
                    break;
                }
                if cur.bump().is_none() {
                    if lenient {
                        break;
                    }
                    return Err(Diagnostic::syntax(
                        "Unterminated comment",
                        start.line,
                        start.col,
                    ));
                }
            }
            TokenKind::Comment
        } else if c == '"' || c == '\'' {
            cur.bump();
            loop {
                match cur.peek() {
                    Some(q) if q == c => {
                        cur.bump();
                        break;
                    }
                    Some('\\') => {
                        cur.bump();
                        if cur.peek().is_some_and(|c| c != '\n') {
                            cur.bump();
                        }
                    }
                    Some('\n') | None => {
                        if lenient {
                            break;
                        }
                        return Err(Diagnostic::syntax(
                            "Invalid or unexpected token: unterminated string",
                            start.line,
                            start.col,
                        ));
                    }
                    Some(_) => {
                        cur.bump();
                    }
                }
            }
            TokenKind::String
        } else if c.is_ascii_digit() {
            lex_number(&mut cur);
            TokenKind::Number
        } else if is_ident_start(c) {
            while cur.peek().is_some_and(is_ident_continue) {
                cur.bump();
            }
            if KEYWORDS.contains(&&source[start_byte..cur.byte]) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            cur.bump_str(sym);
            TokenKind::Symbol
        } else {
            // unknown glyph, left for the parser to reject
            cur.bump();
            TokenKind::Symbol
        };

        tokens.push(Token {
            kind,
            text: source[start_byte..cur.byte].to_string(),
            span: Span::new(start, cur.pos),
            bytes: start_byte..cur.byte,
        });
    }
    Ok(tokens)
}

fn lex_number(cur: &mut Cursor<'_>) {
    let digits = |cur: &mut Cursor<'_>| {
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        }
    };
    digits(cur);
    let mut chars = cur.rest().chars();
    if chars.next() == Some('.') && chars.next().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
        digits(cur);
    }
    let mut chars = cur.rest().chars();
    if matches!(chars.next(), Some('e' | 'E')) {
        let next = chars.next();
        let signed = matches!(next, Some('+' | '-'));
        let digit = if signed { chars.next() } else { next };
        if digit.is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
            if signed {
                cur.bump();
            }
            digits(cur);
        }
    }
}
