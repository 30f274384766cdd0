//! Document buffer, cursor, markers and panel focus.
//!
//! All columns are code-point counts. Tabs are stored verbatim; measuring
//! indentation is left to [`crate::syntax::facts`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A cursor location: 1-based line, 0-based column in code points.
///
/// Ordering is document order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl Position {
    pub const fn new(line: usize, col: usize) -> Self {
        Position { line, col }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelId {
    Code,
    Errors,
    Console,
}

impl PanelId {
    pub fn as_str(self) -> &'static str {
        match self {
            PanelId::Code => "code",
            PanelId::Errors => "errors",
            PanelId::Console => "console",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MarkerSlot {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl MarkerSlot {
    pub fn number(self) -> u8 {
        match self {
            MarkerSlot::One => 1,
            MarkerSlot::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(MarkerSlot::One),
            2 => Some(MarkerSlot::Two),
            _ => None,
        }
    }

    fn index(self) -> usize {
        usize::from(self.number() - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Motion {
    Up,
    Down,
    Left,
    Right,
    LineStart,
    LineEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    Start,
    Middle,
    End,
}

/// A cursor transition. `from == to` when a motion was clamped in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavigationEvent {
    pub from: Position,
    pub to: Position,
}

impl NavigationEvent {
    pub fn changed_line(&self) -> bool {
        self.from.line != self.to.line
    }
}

/// Describes one splice: the text between `start` and `old_end` was replaced
/// by text ending at `new_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditDelta {
    pub start: Position,
    pub old_end: Position,
    pub new_end: Position,
}

impl EditDelta {
    pub fn lines_added(&self) -> isize {
        self.new_end.line as isize - self.old_end.line as isize
    }

    /// Column shift applied to positions that sat on `old_end`'s line.
    pub fn cols_shifted(&self) -> isize {
        self.new_end.col as isize - self.old_end.col as isize
    }

    /// Maps a position from before the edit to after it. Positions inside a
    /// removed span collapse to `start`.
    pub fn apply(&self, p: Position) -> Position {
        if p < self.start {
            p
        } else if p < self.old_end {
            self.start
        } else if p.line == self.old_end.line {
            Position::new(self.new_end.line, self.new_end.col + (p.col - self.old_end.col))
        } else {
            Position::new(
                (p.line as isize + self.lines_added()) as usize,
                p.col,
            )
        }
    }
}

pub type MarkerState = [Option<Position>; 2];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error("position {0} is outside the document")]
    OutOfBounds(Position),
    #[error("range {0}..{1} is inverted")]
    InvertedRange(Position, Position),
    #[error("Marker {} not set", .0.number())]
    MarkerUnset(MarkerSlot),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentBuffer {
    lines: Vec<String>,
    cursor: Position,
    markers: MarkerState,
    focus: PanelId,
    goal_col: Option<usize>,
    version: u64,
}

impl Default for DocumentBuffer {
    fn default() -> Self {
        DocumentBuffer {
            lines: vec![String::new()],
            cursor: Position::new(1, 0),
            markers: [None, None],
            focus: PanelId::Code,
            goal_col: None,
            version: 0,
        }
    }
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

fn byte_index(s: &str, col: usize) -> usize {
    s.char_indices().nth(col).map_or(s.len(), |(i, _)| i)
}

impl DocumentBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Splits on `\n`; a trailing `\r` on each line is dropped.
    pub fn from_text(text: &str) -> Self {
        let lines = text
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
            .collect();
        DocumentBuffer {
            lines,
            ..Self::default()
        }
    }

    pub fn text(&self) -> String {
        self.lines.join("\n")
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn line(&self, line: usize) -> Option<&str> {
        line.checked_sub(1)
            .and_then(|i| self.lines.get(i))
            .map(String::as_str)
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn line_len(&self, line: usize) -> usize {
        self.line(line).map_or(0, char_len)
    }

    pub fn cursor(&self) -> Position {
        self.cursor
    }

    pub fn markers(&self) -> MarkerState {
        self.markers
    }

    pub fn marker(&self, slot: MarkerSlot) -> Option<Position> {
        self.markers[slot.index()]
    }

    pub fn focus(&self) -> PanelId {
        self.focus
    }

    /// Bumped on every successful edit; analysis results are keyed by it.
    pub fn version(&self) -> u64 {
        self.version
    }

    /// Character the cursor sits on, if any.
    pub fn char_at(&self, pos: Position) -> Option<char> {
        self.line(pos.line).and_then(|l| l.chars().nth(pos.col))
    }

    pub fn in_bounds(&self, pos: Position) -> bool {
        pos.line >= 1 && pos.line <= self.line_count() && pos.col <= self.line_len(pos.line)
    }

    fn check(&self, pos: Position) -> Result<(), SourceError> {
        if self.in_bounds(pos) {
            Ok(())
        } else {
            Err(SourceError::OutOfBounds(pos))
        }
    }

    fn end_of_document(&self) -> Position {
        let last = self.line_count();
        Position::new(last, self.line_len(last))
    }

    fn finish_edit(&mut self, delta: EditDelta) {
        for marker in self.markers.iter_mut().flatten() {
            *marker = delta.apply(*marker);
        }
        self.goal_col = None;
        self.version += 1;
    }

    pub fn insert_text(&mut self, pos: Position, text: &str) -> Result<EditDelta, SourceError> {
        self.check(pos)?;
        let idx = pos.line - 1;
        let at = byte_index(&self.lines[idx], pos.col);
        let tail = self.lines[idx].split_off(at);

        let mut pieces = text.split('\n');
        // split always yields at least one piece
        let first = pieces.next().unwrap_or_default();
        self.lines[idx].push_str(first);
        let mut inserted: Vec<String> = pieces.map(str::to_string).collect();

        let added = inserted.len();
        let new_end = if let Some(last) = inserted.last_mut() {
            let end = Position::new(pos.line + added, char_len(last));
            last.push_str(&tail);
            end
        } else {
            let end = Position::new(pos.line, pos.col + char_len(first));
            self.lines[idx].push_str(&tail);
            end
        };
        self.lines.splice(idx + 1..idx + 1, inserted);

        let delta = EditDelta {
            start: pos,
            old_end: pos,
            new_end,
        };
        self.finish_edit(delta);
        self.cursor = new_end;
        Ok(delta)
    }

    pub fn delete_range(&mut self, from: Position, to: Position) -> Result<EditDelta, SourceError> {
        self.check(from)?;
        self.check(to)?;
        if to < from {
            return Err(SourceError::InvertedRange(from, to));
        }
        let tail = {
            let last = &self.lines[to.line - 1];
            last[byte_index(last, to.col)..].to_string()
        };
        let first = &mut self.lines[from.line - 1];
        first.truncate(byte_index(first, from.col));
        first.push_str(&tail);
        self.lines.drain(from.line..to.line);

        let delta = EditDelta {
            start: from,
            old_end: to,
            new_end: from,
        };
        self.finish_edit(delta);
        self.cursor = from;
        Ok(delta)
    }

    fn navigate(&mut self, to: Position) -> NavigationEvent {
        let from = self.cursor;
        self.cursor = to;
        NavigationEvent { from, to }
    }

    pub fn move_cursor(&mut self, motion: Motion) -> NavigationEvent {
        let Position { line, col } = self.cursor;
        let vertical = |doc: &mut Self, target: usize| {
            let goal = *doc.goal_col.get_or_insert(col);
            Position::new(target, goal.min(doc.line_len(target)))
        };
        let to = match motion {
            Motion::Up if line > 1 => vertical(self, line - 1),
            Motion::Down if line < self.line_count() => vertical(self, line + 1),
            Motion::Up | Motion::Down => self.cursor,
            Motion::Left => {
                self.goal_col = None;
                if col > 0 {
                    Position::new(line, col - 1)
                } else if line > 1 {
                    Position::new(line - 1, self.line_len(line - 1))
                } else {
                    self.cursor
                }
            }
            Motion::Right => {
                self.goal_col = None;
                if col < self.line_len(line) {
                    Position::new(line, col + 1)
                } else if line < self.line_count() {
                    Position::new(line + 1, 0)
                } else {
                    self.cursor
                }
            }
            Motion::LineStart => {
                self.goal_col = None;
                Position::new(line, 0)
            }
            Motion::LineEnd => {
                self.goal_col = None;
                Position::new(line, self.line_len(line))
            }
        };
        self.navigate(to)
    }

    /// Places the cursor at an arbitrary in-bounds position (pointer click).
    pub fn set_cursor(&mut self, pos: Position) -> Result<NavigationEvent, SourceError> {
        self.check(pos)?;
        self.goal_col = None;
        Ok(self.navigate(pos))
    }

    pub fn drop_marker(&mut self, slot: MarkerSlot) -> MarkerState {
        self.markers[slot.index()] = Some(self.cursor);
        self.markers
    }

    pub fn jump_to_marker(&mut self, slot: MarkerSlot) -> Result<NavigationEvent, SourceError> {
        let target = self.marker(slot).ok_or(SourceError::MarkerUnset(slot))?;
        self.goal_col = None;
        Ok(self.navigate(target))
    }

    pub fn jump_absolute(&mut self, anchor: Anchor) -> NavigationEvent {
        let n = self.line_count();
        let line = match anchor {
            Anchor::Start => 1,
            Anchor::Middle => n.div_ceil(2),
            Anchor::End => n,
        };
        self.goal_col = None;
        self.navigate(Position::new(line, 0))
    }

    pub fn set_focus(&mut self, panel: PanelId) -> PanelId {
        self.focus = panel;
        panel
    }

    /// Replaces the whole text, keeping cursor and markers clamped in bounds.
    pub fn replace_all(&mut self, text: &str) {
        let end = self.end_of_document();
        // whole-document range is always valid
        let _ = self.delete_range(Position::new(1, 0), end);
        let _ = self.insert_text(Position::new(1, 0), text);
        self.cursor = Position::new(1, 0);
    }
}
