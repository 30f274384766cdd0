//! Sound and haptic cues for navigation, brackets and error direction.
//!
//! Cue computation is pure. Sequence numbers are stamped afterwards by
//! [`EventStream`], which is what makes a list of payloads into an ordered
//! feedback stream.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostic::{Diagnostic, DiagnosticKind};
use crate::source::{DocumentBuffer, NavigationEvent};
use crate::speech::verbalize_symbol;
use crate::syntax::{ControlKind, StructureFacts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum HapticMotorId {
    Thumb = 0,
    Index = 1,
    Middle = 2,
    Ring = 3,
    Pinky = 4,
    PalmCenter = 5,
}

impl HapticMotorId {
    pub const ALL: [HapticMotorId; 6] = [
        HapticMotorId::Thumb,
        HapticMotorId::Index,
        HapticMotorId::Middle,
        HapticMotorId::Ring,
        HapticMotorId::Pinky,
        HapticMotorId::PalmCenter,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.get(usize::from(id)).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum HapticPattern {
    SingleBuzz = 1,
    /// Two pulses of the command's duration separated by [`DOUBLE_TAP_GAP_MS`].
    DoubleTap = 2,
}

pub const DOUBLE_TAP_GAP_MS: u16 = 100;
pub const MIN_PULSE_MS: u16 = 20;
pub const MAX_PULSE_MS: u16 = 2000;

impl HapticPattern {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(HapticPattern::SingleBuzz),
            2 => Some(HapticPattern::DoubleTap),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HapticCommand {
    pub motor: HapticMotorId,
    pub pattern: HapticPattern,
    pub intensity: u8,
    /// Per-pulse duration.
    pub duration_ms: u16,
}

impl HapticCommand {
    /// Wall time the motor is busy for.
    pub fn total_ms(&self) -> u32 {
        match self.pattern {
            HapticPattern::SingleBuzz => u32::from(self.duration_ms),
            HapticPattern::DoubleTap => 2 * u32::from(self.duration_ms) + u32::from(DOUBLE_TAP_GAP_MS),
        }
    }
}

/// Pulse shapes and strength, adjustable per session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CueConfig {
    pub intensity: u8,
    pub single_buzz_ms: u16,
    pub double_tap_ms: u16,
}

impl Default for CueConfig {
    fn default() -> Self {
        CueConfig {
            intensity: 200,
            single_buzz_ms: 200,
            double_tap_ms: 100,
        }
    }
}

impl CueConfig {
    pub fn single(&self, motor: HapticMotorId) -> HapticCommand {
        HapticCommand {
            motor,
            pattern: HapticPattern::SingleBuzz,
            intensity: self.intensity,
            duration_ms: self.single_buzz_ms,
        }
    }

    pub fn double(&self, motor: HapticMotorId) -> HapticCommand {
        HapticCommand {
            motor,
            pattern: HapticPattern::DoubleTap,
            intensity: self.intensity,
            duration_ms: self.double_tap_ms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SoundCueId {
    IfOpen,
    IfClose,
    LoopOpen,
    LoopClose,
    SyntaxErrorVoice,
    RuntimeErrorFeet,
}

impl SoundCueId {
    pub const ALL: [SoundCueId; 6] = [
        SoundCueId::IfOpen,
        SoundCueId::IfClose,
        SoundCueId::LoopOpen,
        SoundCueId::LoopClose,
        SoundCueId::SyntaxErrorVoice,
        SoundCueId::RuntimeErrorFeet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SoundCueId::IfOpen => "if_open",
            SoundCueId::IfClose => "if_close",
            SoundCueId::LoopOpen => "loop_open",
            SoundCueId::LoopClose => "loop_close",
            SoundCueId::SyntaxErrorVoice => "syntax_error_voice",
            SoundCueId::RuntimeErrorFeet => "runtime_error_feet",
        }
    }

    fn open(kind: ControlKind) -> Self {
        match kind {
            ControlKind::If => SoundCueId::IfOpen,
            ControlKind::Loop => SoundCueId::LoopOpen,
        }
    }

    fn close(kind: ControlKind) -> Self {
        match kind {
            ControlKind::If => SoundCueId::IfClose,
            ControlKind::Loop => SoundCueId::LoopClose,
        }
    }
}

impl fmt::Display for SoundCueId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SoundCueId {
    type Err = ManifestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| ManifestError::UnknownCue(s.to_string()))
    }
}

/// The shipped cue manifest.
pub const DEFAULT_MANIFEST: &str = include_str!("../assets/cues.manifest");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("line {0}: expected `id=filename`")]
    Syntax(usize),
    #[error("unknown cue id `{0}`")]
    UnknownCue(String),
    #[error("cue `{0}` listed twice")]
    Duplicate(SoundCueId),
    #[error("cue `{0}` has no asset")]
    Missing(SoundCueId),
}

/// Parses a cue manifest: one `id=filename` per line, `#` comments allowed.
/// Every cue id must appear exactly once.
pub fn parse_manifest(text: &str) -> Result<HashMap<SoundCueId, String>, ManifestError> {
    let mut assets = HashMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, file) = line.split_once('=').ok_or(ManifestError::Syntax(n + 1))?;
        let (id, file) = (id.trim(), file.trim());
        if file.is_empty() {
            return Err(ManifestError::Syntax(n + 1));
        }
        let cue: SoundCueId = id.parse()?;
        if assets.insert(cue, file.to_string()).is_some() {
            return Err(ManifestError::Duplicate(cue));
        }
    }
    if let Some(missing) = SoundCueId::ALL.into_iter().find(|c| !assets.contains_key(c)) {
        return Err(ManifestError::Missing(missing));
    }
    Ok(assets)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Feedback {
    Speech { text: String },
    Sound { cue: SoundCueId },
    Haptic { cmd: HapticCommand },
}

impl Feedback {
    pub fn speech(text: impl Into<String>) -> Self {
        Feedback::Speech { text: text.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackEvent {
    pub seq: u64,
    /// Identifies the inbound message or command that caused the event.
    pub trigger: u64,
    #[serde(flatten)]
    pub payload: Feedback,
}

/// Stamps strictly increasing sequence numbers onto feedback payloads.
#[derive(Debug, Clone, Default)]
pub struct EventStream {
    next_seq: u64,
}

impl EventStream {
    pub fn new() -> Self {
        EventStream { next_seq: 1 }
    }

    pub fn emit(&mut self, trigger: u64, payloads: Vec<Feedback>) -> Vec<FeedbackEvent> {
        payloads
            .into_iter()
            .map(|payload| {
                let seq = self.next_seq.max(1);
                self.next_seq = seq + 1;
                FeedbackEvent {
                    seq,
                    trigger,
                    payload,
                }
            })
            .collect()
    }
}

/// Line-arrival cues, in fixed order: indent haptic, control sounds
/// (opens before closes), then the error-type sound.
pub fn cues_for_navigation(
    nav: &NavigationEvent,
    facts: &StructureFacts,
    diags: &[Diagnostic],
    config: &CueConfig,
) -> Vec<Feedback> {
    if !nav.changed_line() {
        return Vec::new();
    }
    let line = nav.to.line;
    let Some(dest) = facts.line(line) else {
        return Vec::new();
    };
    let mut out = Vec::new();

    if !dest.blank {
        if let Some(prev) = facts.previous_non_blank(line).and_then(|l| facts.line(l)) {
            use std::cmp::Ordering::*;
            match dest.indent_units.cmp(&prev.indent_units) {
                Greater => out.push(Feedback::Haptic {
                    cmd: config.single(HapticMotorId::Ring),
                }),
                Less => out.push(Feedback::Haptic {
                    cmd: config.single(HapticMotorId::Index),
                }),
                Equal => {}
            }
        }
    }

    out.extend(dest.control_opens.iter().map(|k| Feedback::Sound {
        cue: SoundCueId::open(*k),
    }));
    out.extend(dest.control_closes.iter().map(|k| Feedback::Sound {
        cue: SoundCueId::close(*k),
    }));

    let on_line = |kind| diags.iter().any(|d| d.kind == kind && d.line == line);
    if on_line(DiagnosticKind::Syntax) {
        out.push(Feedback::Sound {
            cue: SoundCueId::SyntaxErrorVoice,
        });
    }
    if on_line(DiagnosticKind::Runtime) {
        out.push(Feedback::Sound {
            cue: SoundCueId::RuntimeErrorFeet,
        });
    }
    out
}

/// Speech plus thumb (opening) or pinky (closing) buzz when the cursor
/// lands on a bracket or brace.
pub fn cue_for_character(
    nav: &NavigationEvent,
    doc: &DocumentBuffer,
    config: &CueConfig,
) -> Vec<Feedback> {
    if nav.from == nav.to {
        return Vec::new();
    }
    let (symbol, motor) = match doc.char_at(nav.to) {
        Some('[') => ("[", HapticMotorId::Thumb),
        Some('{') => ("{", HapticMotorId::Thumb),
        Some(']') => ("]", HapticMotorId::Pinky),
        Some('}') => ("}", HapticMotorId::Pinky),
        _ => return Vec::new(),
    };
    let phrase = verbalize_symbol(symbol).expect("brackets are in the speech map");
    vec![
        Feedback::speech(phrase),
        Feedback::Haptic {
            cmd: config.single(motor),
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no errors")]
pub struct NoErrors;

/// Direction of the first cached diagnostic relative to the cursor line:
/// middle finger above, palm below, palm double tap on the same line.
pub fn error_direction(
    cursor_line: usize,
    diags: &[Diagnostic],
    config: &CueConfig,
) -> Result<HapticCommand, NoErrors> {
    let first = diags.first().ok_or(NoErrors)?;
    use std::cmp::Ordering::*;
    Ok(match first.line.cmp(&cursor_line) {
        Less => config.single(HapticMotorId::Middle),
        Greater => config.single(HapticMotorId::PalmCenter),
        Equal => config.double(HapticMotorId::PalmCenter),
    })
}
