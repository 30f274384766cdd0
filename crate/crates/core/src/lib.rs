//! Feedback engine for non-visual programming.
//!
//! Editing, navigation, execution and debugging events on a small
//! JavaScript subset are turned into ordered speech, sound-cue and haptic
//! streams. The modules mirror the runtime pipeline:
//!
//! * [`source`] - document buffer, cursor, markers and panel focus.
//! * [`syntax`] - lexer, parser and per-line structure facts.
//! * [`interp`] - sandboxed tree-walking interpreter.
//! * [`speech`] - symbol verbalization and line read-outs.
//! * [`cues`] - sound and haptic cues for navigation and errors.
//! * [`dispatch`] - keymaps, chord resolution and command application.
//! * [`device`] - glove wire protocol, pacing and the simulated glove.
//! * [`session`] - message handling, metrics and replay.

pub mod diagnostic;
pub mod cues;
pub mod device;
pub mod dispatch;
pub mod interp;
pub mod session;
pub mod source;
pub mod speech;
pub mod syntax;

pub use diagnostic::{Diagnostic, DiagnosticKind};
pub use source::{DocumentBuffer, PanelId, Position};
