//! Speech strings for symbols, lines, line windows, function context and
//! typing echo.
//!
//! All phrases are lower case; the synthesizer is left to handle numerals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::source::DocumentBuffer;
use crate::syntax::{tokenize_lenient, FunctionContext, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Characters,
    Words,
}

impl Granularity {
    pub fn toggled(self) -> Self {
        match self {
            Granularity::Characters => Granularity::Words,
            Granularity::Words => Granularity::Characters,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeechSettings {
    pub typing_echo: bool,
    pub granularity: Granularity,
}

impl Default for SpeechSettings {
    fn default() -> Self {
        SpeechSettings {
            typing_echo: true,
            granularity: Granularity::Words,
        }
    }
}

/// Symbol read-out table, in its published order.
pub const SPEECH_MAP: [(&str, &str); 27] = [
    ("{", "open brace"),
    ("}", "close brace"),
    ("(", "open parenthesis"),
    (")", "close parenthesis"),
    ("[", "open bracket"),
    ("]", "close bracket"),
    ("=", "equals"),
    ("==", "double equals"),
    ("===", "triple equals"),
    ("<", "less than"),
    (">", "greater than"),
    ("!", "exclamation mark"),
    ("!=", "not equals"),
    ("&&", "and"),
    ("||", "or"),
    ("/*", "start block comment"),
    ("*/", "end block comment"),
    ("//", "double slash comment"),
    ("|", "pipe"),
    ("~", "tilde"),
    ("`", "backtick"),
    ("=>", "arrow function"),
    ("++", "increment"),
    ("--", "decrement"),
    ("<<", "left shift"),
    (">>", "right shift"),
    ("!==", "strict not equals"),
];

pub const BLANK_LINE: &str = "blank line";
pub const TOP_OF_FILE: &str = "top of file";
pub const LINE_BREAK: &str = "line break";
pub const NOT_IN_FUNCTION: &str = "You are not inside a function";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpeechError {
    #[error("line {0} is outside the document")]
    LineOutOfBounds(usize),
    #[error("line window must be between 1 and 9, got {0}")]
    WindowSize(usize),
}

pub fn verbalize_symbol(sym: &str) -> Option<&'static str> {
    SPEECH_MAP
        .iter()
        .find(|(s, _)| *s == sym)
        .map(|(_, phrase)| *phrase)
}

/// Name for a glyph with no table entry: the Unicode character name for
/// ASCII punctuation, `U+XXXX` otherwise.
pub fn glyph_name(c: char) -> String {
    let name = match c {
        ' ' => "space",
        '\t' => "tab",
        '\n' => "new line",
        '!' => "exclamation mark",
        '"' => "quotation mark",
        '#' => "number sign",
        '$' => "dollar sign",
        '%' => "percent sign",
        '&' => "ampersand",
        '\'' => "apostrophe",
        '*' => "asterisk",
        '+' => "plus sign",
        ',' => "comma",
        '-' => "hyphen-minus",
        '.' => "full stop",
        '/' => "solidus",
        ':' => "colon",
        ';' => "semicolon",
        '?' => "question mark",
        '@' => "commercial at",
        '\\' => "reverse solidus",
        '^' => "circumflex accent",
        '_' => "low line",
        _ => return format!("U+{:04X}", u32::from(c)),
    };
    name.to_string()
}

fn speak_char(c: char) -> String {
    if c.is_alphanumeric() {
        return c.to_string();
    }
    let mut buf = [0u8; 4];
    match verbalize_symbol(c.encode_utf8(&mut buf)) {
        Some(phrase) => phrase.to_string(),
        None => glyph_name(c),
    }
}

/// Speaks a punctuator: an exact table entry when there is one, otherwise a
/// longest-first split into table entries and named glyphs.
fn speak_symbol(sym: &str) -> String {
    if let Some(phrase) = verbalize_symbol(sym) {
        return phrase.to_string();
    }
    let mut parts = Vec::new();
    let mut rest = sym;
    while let Some(c) = rest.chars().next() {
        let longest = SPEECH_MAP
            .iter()
            .filter(|(s, _)| rest.starts_with(*s))
            .max_by_key(|(s, _)| s.len());
        match longest {
            Some((s, phrase)) => {
                parts.push(phrase.to_string());
                rest = &rest[s.len()..];
            }
            None => {
                parts.push(speak_char(c));
                rest = &rest[c.len_utf8()..];
            }
        }
    }
    parts.join(" ")
}

fn speak_words(text: &str, out: &mut Vec<String>) {
    out.extend(text.split_whitespace().map(str::to_string));
}

fn render_words(text: &str) -> String {
    let mut units = Vec::new();
    for token in tokenize_lenient(text) {
        let t = token.text.as_str();
        match token.kind {
            TokenKind::Identifier | TokenKind::Keyword | TokenKind::Number => {
                units.push(t.to_string())
            }
            TokenKind::Symbol => units.push(speak_symbol(t)),
            TokenKind::String => {
                let mut chars = t.chars();
                let open = chars.next().unwrap_or('"');
                let body = chars.as_str();
                let (inner, closed) = match body.strip_suffix(open) {
                    Some(inner) => (inner, true),
                    None => (body, false),
                };
                units.push(glyph_name(open));
                if !inner.is_empty() {
                    units.push(inner.to_string());
                }
                if closed {
                    units.push(glyph_name(open));
                }
            }
            TokenKind::Comment if t.starts_with("//") => {
                units.push(speak_symbol("//"));
                speak_words(&t[2..], &mut units);
            }
            TokenKind::Comment => {
                units.push(speak_symbol("/*"));
                let body = &t[2..];
                match body.strip_suffix("*/") {
                    Some(inner) => {
                        speak_words(inner, &mut units);
                        units.push(speak_symbol("*/"));
                    }
                    None => speak_words(body, &mut units),
                }
            }
        }
    }
    units.join(" ")
}

fn render_characters(text: &str) -> String {
    text.chars().map(speak_char).collect::<Vec<_>>().join(" ")
}

/// Speech for one line of text. Leading indentation is never voiced.
pub fn render_text(text: &str, granularity: Granularity) -> String {
    let body = text.trim_start_matches([' ', '\t']);
    if body.trim().is_empty() {
        return BLANK_LINE.to_string();
    }
    match granularity {
        Granularity::Words => render_words(body),
        Granularity::Characters => render_characters(body.trim_end()),
    }
}

pub fn render_line(
    doc: &DocumentBuffer,
    line: usize,
    settings: &SpeechSettings,
) -> Result<String, SpeechError> {
    let text = doc.line(line).ok_or(SpeechError::LineOutOfBounds(line))?;
    Ok(render_text(text, settings.granularity))
}

/// Reads the `count` lines strictly above `ending_before`, top to bottom.
pub fn render_lines(
    doc: &DocumentBuffer,
    ending_before: usize,
    count: usize,
    settings: &SpeechSettings,
) -> Result<String, SpeechError> {
    if !(1..=9).contains(&count) {
        return Err(SpeechError::WindowSize(count));
    }
    if ending_before == 0 || ending_before > doc.line_count() {
        return Err(SpeechError::LineOutOfBounds(ending_before));
    }
    let first = ending_before.saturating_sub(count).max(1);
    if first >= ending_before {
        return Ok(TOP_OF_FILE.to_string());
    }
    let parts = (first..ending_before)
        .map(|l| render_line(doc, l, settings))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(parts.join(&format!(" {LINE_BREAK} ")))
}

pub fn render_function_context(ctx: Option<&FunctionContext>) -> String {
    match ctx {
        None => NOT_IN_FUNCTION.to_string(),
        Some(ctx) if ctx.params.is_empty() => format!("You are in the function {}", ctx.name),
        Some(ctx) => format!(
            "You are in the function {}, taking {}",
            ctx.name,
            ctx.params.join(" and ")
        ),
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// Read-out while typing. In word mode characters accumulate until a
/// delimiter arrives; the word is spoken, then the delimiter.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypingEcho {
    pending: String,
}

impl TypingEcho {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pending(&self) -> &str {
        &self.pending
    }

    pub fn feed(&mut self, inserted: &str, settings: &SpeechSettings) -> Vec<String> {
        if !settings.typing_echo {
            self.pending.clear();
            return Vec::new();
        }
        let mut out = Vec::new();
        for c in inserted.chars() {
            match settings.granularity {
                Granularity::Characters => out.push(speak_char(c)),
                Granularity::Words if is_word_char(c) => self.pending.push(c),
                Granularity::Words => {
                    if !self.pending.is_empty() {
                        out.push(std::mem::take(&mut self.pending));
                    }
                    out.push(speak_char(c));
                }
            }
        }
        out
    }

    pub fn reset(&mut self) {
        self.pending.clear();
    }
}
