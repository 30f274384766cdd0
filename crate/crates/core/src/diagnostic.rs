use std::fmt;

use serde::{Deserialize, Serialize};

/// Origin of a diagnostic. Syntax diagnostics only come from the lexer and
/// parser, runtime diagnostics only from execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Syntax,
    Runtime,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::Runtime => "runtime",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    /// 1-based line.
    pub line: usize,
    /// 0-based column in code points.
    pub col: usize,
}

impl Diagnostic {
    pub fn syntax(message: impl Into<String>, line: usize, col: usize) -> Self {
        Diagnostic {
            kind: DiagnosticKind::Syntax,
            message: message.into(),
            line,
            col,
        }
    }

    pub fn runtime(message: impl Into<String>, line: usize, col: usize) -> Self {
        Diagnostic {
            kind: DiagnosticKind::Runtime,
            message: message.into(),
            line,
            col,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} error on line {}, column {}: {}",
            self.kind.as_str(),
            self.line,
            self.col,
            self.message
        )
    }
}

impl std::error::Error for Diagnostic {}
