//! Lexing, parsing and per-line structure facts.

pub mod ast;
pub mod facts;
pub mod lexer;
pub mod parser;

use serde::Serialize;
use thiserror::Error;

pub use ast::{FunctionDecl, Program};
pub use facts::{line_facts, ControlKind, LineFacts, StructureFacts};
pub use lexer::{tokenize, tokenize_lenient, Span, Token, TokenKind};
pub use parser::parse;

use crate::diagnostic::Diagnostic;
use crate::source::{DocumentBuffer, Position};
use ast::{Node, StmtKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionContext {
    pub name: String,
    pub params: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("analysis of version {analyzed} is stale (document is at {current})")]
    Stale { analyzed: u64, current: u64 },
    #[error("no syntax tree: {0}")]
    NoSyntaxTree(Diagnostic),
}

/// Parse results and structure facts for one document version.
#[derive(Debug, Clone)]
pub struct Analysis {
    version: u64,
    program: Result<Program, Diagnostic>,
    facts: StructureFacts,
}

impl Analysis {
    pub fn of(doc: &DocumentBuffer) -> Self {
        let source = doc.text();
        let (tokens, program) = match tokenize(&source) {
            Ok(tokens) => {
                let program = parse(&tokens);
                (tokens, program)
            }
            Err(diag) => (tokenize_lenient(&source), Err(diag)),
        };
        let facts = line_facts(doc.lines(), &tokens, program.as_ref().ok());
        Analysis {
            version: doc.version(),
            program,
            facts,
        }
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn program(&self) -> Result<&Program, &Diagnostic> {
        self.program.as_ref()
    }

    pub fn facts(&self) -> &StructureFacts {
        &self.facts
    }

    /// Function context at `pos`, refusing to answer from a stale snapshot.
    pub fn enclosing_function(
        &self,
        current_version: u64,
        pos: Position,
    ) -> Result<Option<FunctionContext>, AnalysisError> {
        if current_version != self.version {
            return Err(AnalysisError::Stale {
                analyzed: self.version,
                current: current_version,
            });
        }
        let program = self
            .program
            .as_ref()
            .map_err(|d| AnalysisError::NoSyntaxTree(d.clone()))?;
        Ok(enclosing_function(program, pos))
    }
}

/// Innermost function declaration whose span contains `pos`.
pub fn enclosing_function(program: &Program, pos: Position) -> Option<FunctionContext> {
    let mut found: Option<&FunctionDecl> = None;
    Node::Program(program).walk(&mut |node| {
        let decl = match node {
            Node::Function(f) => Some(f),
            Node::Stmt(s) => match &s.kind {
                StmtKind::Function(f) => Some(f),
                _ => None,
            },
            _ => None,
        };
        // pre-order: later matches are nested inside earlier ones
        if let Some(f) = decl.filter(|f| f.span.contains(pos)) {
            found = Some(f);
        }
    });
    found.map(|f| FunctionContext {
        name: f.name.clone(),
        params: f.params.clone(),
        span: f.span,
    })
}
