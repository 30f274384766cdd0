use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::source::{Anchor, MarkerSlot, PanelId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modifier {
    Ctrl,
    Shift,
    /// Option on macOS keyboards.
    Alt,
    /// Command on macOS keyboards.
    Cmd,
}

impl Modifier {
    pub fn as_str(self) -> &'static str {
        match self {
            Modifier::Ctrl => "ctrl",
            Modifier::Shift => "shift",
            Modifier::Alt => "alt",
            Modifier::Cmd => "cmd",
        }
    }
}

impl FromStr for Modifier {
    type Err = KeymapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ctrl" | "control" => Ok(Modifier::Ctrl),
            "shift" => Ok(Modifier::Shift),
            "alt" | "option" | "opt" => Ok(Modifier::Alt),
            "cmd" | "command" | "meta" | "super" => Ok(Modifier::Cmd),
            _ => Err(KeymapError::Modifier(s.to_string())),
        }
    }
}

/// A key press with its held modifiers. Keys are stored lowercase, with
/// `return` folded into `enter`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chord {
    pub modifiers: BTreeSet<Modifier>,
    pub key: String,
}

pub fn normalize_key(key: &str) -> String {
    match key.to_lowercase().as_str() {
        "return" => "enter".to_string(),
        "comma" => ",".to_string(),
        "period" => ".".to_string(),
        " " => "space".to_string(),
        other => other.to_string(),
    }
}

impl Chord {
    pub fn new(modifiers: impl IntoIterator<Item = Modifier>, key: &str) -> Self {
        Chord {
            modifiers: modifiers.into_iter().collect(),
            key: normalize_key(key),
        }
    }

    pub fn from_parts<S: AsRef<str>>(modifiers: &[S], key: &str) -> Result<Self, KeymapError> {
        let mods = modifiers
            .iter()
            .map(|m| m.as_ref().parse())
            .collect::<Result<BTreeSet<_>, _>>()?;
        if key.is_empty() {
            return Err(KeymapError::Chord(String::new()));
        }
        Ok(Chord {
            modifiers: mods,
            key: normalize_key(key),
        })
    }

    /// Text typed by an unbound chord: a single character pressed with
    /// nothing or only Shift held. `raw_key` is the key as the client sent
    /// it, before case folding.
    pub fn typed_text(&self, raw_key: &str) -> Option<String> {
        if !self.modifiers.iter().all(|m| *m == Modifier::Shift) {
            return None;
        }
        match self.key.as_str() {
            "space" => return Some(" ".to_string()),
            "enter" => return Some("\n".to_string()),
            "tab" => return Some("\t".to_string()),
            _ => {}
        }
        let mut chars = raw_key.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if !c.is_control() => Some(c.to_string()),
            _ => None,
        }
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.modifiers {
            write!(f, "{}+", m.as_str())?;
        }
        f.write_str(&self.key)
    }
}

impl FromStr for Chord {
    type Err = KeymapError;

    /// `ctrl+shift+s`, `option+,`, `cmd+enter`. A literal plus key is
    /// written `ctrl++`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (mods, key) = if let Some(rest) = s.strip_suffix("++") {
            (rest, "+")
        } else {
            match s.rsplit_once('+') {
                Some((mods, key)) => (mods, key),
                None => ("", s),
            }
        };
        let mods: Vec<&str> = mods.split('+').filter(|m| !m.is_empty()).collect();
        Chord::from_parts(&mods, key).map_err(|e| match e {
            KeymapError::Chord(_) => KeymapError::Chord(s.to_string()),
            other => other,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "command", content = "arg", rename_all = "snake_case")]
pub enum Command {
    ToggleEcho,
    ToggleGranularity,
    DropMarker(MarkerSlot),
    JumpMarker(MarkerSlot),
    JumpAbsolute(Anchor),
    Execute,
    FocusPanel(PanelId),
    ReadCurrentLine,
    ReadPrevLines(u8),
    ReadFunctionContext,
    ErrorDirection,
    ReadFocusedError,
}

impl Command {
    /// Name used for feature-use metrics.
    pub fn feature(&self) -> &'static str {
        match self {
            Command::ToggleEcho => "toggle-echo",
            Command::ToggleGranularity => "toggle-granularity",
            Command::DropMarker(_) => "drop-marker",
            Command::JumpMarker(_) => "jump-marker",
            Command::JumpAbsolute(_) => "jump",
            Command::Execute => "execute",
            Command::FocusPanel(_) => "focus",
            Command::ReadCurrentLine => "read-line",
            Command::ReadPrevLines(_) => "read-lines",
            Command::ReadFunctionContext => "read-function",
            Command::ErrorDirection => "error-direction",
            Command::ReadFocusedError => "read-error",
        }
    }
}

fn anchor_name(a: Anchor) -> &'static str {
    match a {
        Anchor::Start => "start",
        Anchor::Middle => "middle",
        Anchor::End => "end",
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.feature();
        match self {
            Command::DropMarker(s) | Command::JumpMarker(s) => write!(f, "{name}:{}", s.number()),
            Command::JumpAbsolute(a) => write!(f, "{name}:{}", anchor_name(*a)),
            Command::FocusPanel(p) => write!(f, "{name}:{}", p.as_str()),
            Command::ReadPrevLines(n) => write!(f, "{name}:{n}"),
            _ => f.write_str(name),
        }
    }
}

impl FromStr for Command {
    type Err = KeymapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || KeymapError::Command(s.to_string());
        let (name, arg) = match s.trim().split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.trim(), None),
        };
        let slot = |a: Option<&str>| {
            a.and_then(|a| a.parse().ok())
                .and_then(MarkerSlot::from_number)
                .ok_or_else(bad)
        };
        let cmd = match (name, arg) {
            ("toggle-echo", None) => Command::ToggleEcho,
            ("toggle-granularity", None) => Command::ToggleGranularity,
            ("drop-marker", a) => Command::DropMarker(slot(a)?),
            ("jump-marker", a) => Command::JumpMarker(slot(a)?),
            ("jump", Some("start")) => Command::JumpAbsolute(Anchor::Start),
            ("jump", Some("middle")) => Command::JumpAbsolute(Anchor::Middle),
            ("jump", Some("end")) => Command::JumpAbsolute(Anchor::End),
            ("execute", None) => Command::Execute,
            ("focus", Some("errors")) => Command::FocusPanel(PanelId::Errors),
            ("focus", Some("code")) => Command::FocusPanel(PanelId::Code),
            ("focus", Some("console")) => Command::FocusPanel(PanelId::Console),
            ("read-line", None) => Command::ReadCurrentLine,
            ("read-lines", Some(n)) => match n.parse::<u8>() {
                Ok(n @ 1..=9) => Command::ReadPrevLines(n),
                _ => return Err(bad()),
            },
            ("read-function", None) => Command::ReadFunctionContext,
            ("error-direction", None) => Command::ErrorDirection,
            ("read-error", None) => Command::ReadFocusedError,
            _ => return Err(bad()),
        };
        Ok(cmd)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeymapError {
    #[error("unknown modifier `{0}`")]
    Modifier(String),
    #[error("malformed chord `{0}`")]
    Chord(String),
    #[error("unknown command `{0}`")]
    Command(String),
    #[error("unknown panel `{0}`")]
    Panel(String),
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<KeymapError>,
    },
    #[error("line {line}: `{chord}` is already bound")]
    Duplicate { line: usize, chord: String },
    #[error("unknown keymap profile `{0}`")]
    Profile(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub chord: Chord,
    /// When set, the binding only applies while this panel has focus and
    /// takes precedence over an unrestricted binding of the same chord.
    pub context: Option<PanelId>,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keymap {
    bindings: Vec<Binding>,
}

pub const MACOS_PROFILE: &str = include_str!("../../keymaps/macos.keymap");
pub const PORTABLE_PROFILE: &str = include_str!("../../keymaps/portable.keymap");

fn parse_panel(s: &str) -> Result<PanelId, KeymapError> {
    match s {
        "errors" => Ok(PanelId::Errors),
        "code" => Ok(PanelId::Code),
        "console" => Ok(PanelId::Console),
        _ => Err(KeymapError::Panel(s.to_string())),
    }
}

impl Keymap {
    /// Parses `chord[@panel]=command` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, KeymapError> {
        let mut bindings: Vec<Binding> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let wrap = |e: KeymapError| KeymapError::Line {
                line,
                source: Box::new(e),
            };
            let entry = raw.trim();
            if entry.is_empty() || entry.starts_with('#') {
                continue;
            }
            // the command side never contains '=', so split from the right
            let (lhs, rhs) = entry
                .rsplit_once('=')
                .ok_or_else(|| wrap(KeymapError::Chord(entry.to_string())))?;
            let (chord, context) = match lhs.rsplit_once('@') {
                Some((c, p)) => (c, Some(parse_panel(p.trim()).map_err(wrap)?)),
                None => (lhs, None),
            };
            let chord: Chord = chord.parse().map_err(wrap)?;
            let command: Command = rhs.parse().map_err(wrap)?;
            if bindings
                .iter()
                .any(|b| b.chord == chord && b.context == context)
            {
                return Err(KeymapError::Duplicate {
                    line,
                    chord: lhs.trim().to_string(),
                });
            }
            bindings.push(Binding {
                chord,
                context,
                command,
            });
        }
        Ok(Keymap { bindings })
    }

    pub fn macos() -> Self {
        Self::parse(MACOS_PROFILE).expect("shipped macOS keymap parses")
    }

    pub fn portable() -> Self {
        Self::parse(PORTABLE_PROFILE).expect("shipped portable keymap parses")
    }

    /// A shipped profile by name, or a keymap file path.
    pub fn load(profile: &str) -> Result<Self, Box<dyn std::error::Error + Send + Sync>> {
        match profile {
            "macos" => Ok(Self::macos()),
            "portable" => Ok(Self::portable()),
            path => Ok(Self::parse(&std::fs::read_to_string(path)?)?),
        }
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }

    pub fn resolve(&self, chord: &Chord, focus: PanelId) -> Option<Command> {
        let matching = || self.bindings.iter().filter(|b| &b.chord == chord);
        matching()
            .find(|b| b.context == Some(focus))
            .or_else(|| matching().find(|b| b.context.is_none()))
            .map(|b| b.command)
    }
}

impl Default for Keymap {
    fn default() -> Self {
        Self::macos()
    }
}
