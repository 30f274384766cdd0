use serde::Serialize;

use super::ast::{Program, Stmt, StmtKind};
use super::lexer::{Token, TokenKind};

/// Columns contributed by one tab when measuring indentation.
pub const TAB_WIDTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    If,
    Loop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketSide {
    Open,
    Close,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bracket {
    pub col: usize,
    pub ch: char,
    pub side: BracketSide,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LineFacts {
    pub indent_units: usize,
    /// Empty or whitespace-only.
    pub blank: bool,
    pub control_opens: Vec<ControlKind>,
    pub control_closes: Vec<ControlKind>,
    pub brackets: Vec<Bracket>,
}

/// Per-line facts, indexed by 0-based line (`facts.line(n)` takes 1-based).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StructureFacts {
    pub lines: Vec<LineFacts>,
}

impl StructureFacts {
    pub fn line(&self, line: usize) -> Option<&LineFacts> {
        line.checked_sub(1).and_then(|i| self.lines.get(i))
    }

    /// Indentation used for cue decisions: blank lines inherit the indent of
    /// the nearest non-blank line above them (0 at the top of the file).
    pub fn effective_indent(&self, line: usize) -> usize {
        (1..=line.min(self.lines.len()))
            .rev()
            .filter_map(|l| self.line(l))
            .find(|f| !f.blank)
            .map_or(0, |f| f.indent_units)
    }

    /// Nearest non-blank line strictly above `line`.
    pub fn previous_non_blank(&self, line: usize) -> Option<usize> {
        (1..line).rev().find(|&l| self.line(l).is_some_and(|f| !f.blank))
    }

    pub fn count(&self, kind: ControlKind) -> (usize, usize) {
        self.lines.iter().fold((0, 0), |(o, c), f| {
            (
                o + f.control_opens.iter().filter(|k| **k == kind).count(),
                c + f.control_closes.iter().filter(|k| **k == kind).count(),
            )
        })
    }
}

pub fn indent_units(line: &str) -> usize {
    line.chars()
        .take_while(|c| *c == ' ' || *c == '\t')
        .map(|c| if c == '\t' { TAB_WIDTH } else { 1 })
        .sum()
}

/// Builds the facts table. Indentation and brackets come from the raw text
/// and tokens; control facts need a parsed program.
pub fn line_facts(lines: &[String], tokens: &[Token], program: Option<&Program>) -> StructureFacts {
    let mut facts: Vec<LineFacts> = lines
        .iter()
        .map(|l| LineFacts {
            indent_units: indent_units(l),
            blank: l.trim().is_empty(),
            ..LineFacts::default()
        })
        .collect();

    for t in tokens.iter().filter(|t| t.kind == TokenKind::Symbol) {
        let (ch, side) = match t.text.as_str() {
            "[" => ('[', BracketSide::Open),
            "{" => ('{', BracketSide::Open),
            "]" => (']', BracketSide::Close),
            "}" => ('}', BracketSide::Close),
            _ => continue,
        };
        if let Some(f) = facts.get_mut(t.span.start.line - 1) {
            f.brackets.push(Bracket {
                col: t.span.start.col,
                ch,
                side,
            });
        }
    }

    if let Some(program) = program {
        for stmt in &program.body {
            collect_control(stmt, false, &mut facts);
        }
    }

    StructureFacts { lines: facts }
}

fn mark(facts: &mut [LineFacts], line: usize, kind: ControlKind, open: bool) {
    if let Some(f) = facts.get_mut(line - 1) {
        if open {
            f.control_opens.push(kind);
        } else {
            f.control_closes.push(kind);
        }
    }
}

/// Opens on the keyword line, closes on the last line of the statement's
/// final attached body. An `else if` continues its chain and neither opens
/// nor closes on its own.
fn collect_control(stmt: &Stmt, chained: bool, facts: &mut [LineFacts]) {
    match &stmt.kind {
        StmtKind::If {
            then, otherwise, ..
        } => {
            if !chained {
                mark(facts, stmt.span.start.line, ControlKind::If, true);
                mark(facts, stmt.span.end.line, ControlKind::If, false);
            }
            collect_control(then, false, facts);
            if let Some(other) = otherwise {
                let continues = matches!(other.kind, StmtKind::If { .. });
                collect_control(other, continues, facts);
            }
        }
        StmtKind::For { init, body, .. } => {
            mark(facts, stmt.span.start.line, ControlKind::Loop, true);
            mark(facts, body.span.end.line, ControlKind::Loop, false);
            if let Some(init) = init {
                collect_control(init, false, facts);
            }
            collect_control(body, false, facts);
        }
        StmtKind::While { body, .. } => {
            mark(facts, stmt.span.start.line, ControlKind::Loop, true);
            mark(facts, body.span.end.line, ControlKind::Loop, false);
            collect_control(body, false, facts);
        }
        StmtKind::Function(f) => f.body.body.iter().for_each(|s| collect_control(s, false, facts)),
        StmtKind::Block(b) => b.body.iter().for_each(|s| collect_control(s, false, facts)),
        StmtKind::VarDecl { .. } | StmtKind::Return(_) | StmtKind::Expr(_) | StmtKind::Empty => {}
    }
}
