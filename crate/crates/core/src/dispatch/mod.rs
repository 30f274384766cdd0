//! Chord resolution and command application.
//!
//! [`Editor`] owns everything a command can touch: the document, speech
//! settings, the typing-echo buffer and the diagnostics and console output
//! of the last run. It produces feedback payloads; stamping them with
//! sequence numbers is the session's job.

mod keymap;

pub use keymap::{
    normalize_key, Binding, Chord, Command, Keymap, KeymapError, Modifier, MACOS_PROFILE,
    PORTABLE_PROFILE,
};

use serde::{Deserialize, Serialize};

use crate::cues::{cue_for_character, cues_for_navigation, error_direction, CueConfig, Feedback};
use crate::diagnostic::Diagnostic;
use crate::interp::{execute, ExecConfig};
use crate::source::{
    DocumentBuffer, EditDelta, MarkerSlot, Motion, NavigationEvent, PanelId, Position, SourceError,
};
use crate::speech::{
    render_function_context, render_line, render_lines, render_text, Granularity, SpeechSettings,
    TypingEcho,
};
use crate::syntax::{Analysis, AnalysisError};

pub const NO_ERRORS: &str = "no errors";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelContent {
    pub panel: PanelId,
    pub lines: Vec<String>,
}

/// What applying a command produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Applied {
    pub feedback: Vec<Feedback>,
    pub panels: Vec<PanelContent>,
    /// Diagnostics raised by an Execute.
    pub errors_raised: usize,
}

impl Applied {
    fn speech(text: impl Into<String>) -> Self {
        Applied {
            feedback: vec![Feedback::speech(text)],
            ..Default::default()
        }
    }

    fn from_feedback(feedback: Vec<Feedback>) -> Self {
        Applied {
            feedback,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Editor {
    doc: DocumentBuffer,
    settings: SpeechSettings,
    echo: TypingEcho,
    diagnostics: Vec<Diagnostic>,
    console: Vec<String>,
    analysis: Analysis,
    cues: CueConfig,
    exec: ExecConfig,
}

impl Default for Editor {
    fn default() -> Self {
        Editor::new(DocumentBuffer::new(), ExecConfig::default(), CueConfig::default())
    }
}

impl Editor {
    pub fn new(doc: DocumentBuffer, exec: ExecConfig, cues: CueConfig) -> Self {
        let analysis = Analysis::of(&doc);
        Editor {
            doc,
            settings: SpeechSettings::default(),
            echo: TypingEcho::new(),
            diagnostics: Vec::new(),
            console: Vec::new(),
            analysis,
            cues,
            exec,
        }
    }

    pub fn doc(&self) -> &DocumentBuffer {
        &self.doc
    }

    pub fn settings(&self) -> SpeechSettings {
        self.settings
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn console(&self) -> &[String] {
        &self.console
    }

    pub fn cue_config(&self) -> &CueConfig {
        &self.cues
    }

    /// Structure analysis for the current document version.
    pub fn analysis(&mut self) -> &Analysis {
        if self.analysis.version() != self.doc.version() {
            self.analysis = Analysis::of(&self.doc);
        }
        &self.analysis
    }

    pub fn insert(&mut self, pos: Position, text: &str) -> Result<Vec<Feedback>, SourceError> {
        self.doc.insert_text(pos, text)?;
        Ok(self
            .echo
            .feed(text, &self.settings)
            .into_iter()
            .map(Feedback::speech)
            .collect())
    }

    pub fn delete(&mut self, from: Position, to: Position) -> Result<EditDelta, SourceError> {
        let delta = self.doc.delete_range(from, to)?;
        self.echo.reset();
        Ok(delta)
    }

    pub fn replace_all(&mut self, text: &str) {
        self.doc.replace_all(text);
        self.echo.reset();
    }

    pub fn move_cursor(&mut self, motion: Motion) -> Vec<Feedback> {
        let nav = self.doc.move_cursor(motion);
        self.arrive(nav)
    }

    pub fn set_cursor(&mut self, pos: Position) -> Result<Vec<Feedback>, SourceError> {
        let nav = self.doc.set_cursor(pos)?;
        Ok(self.arrive(nav))
    }

    /// Line cues followed by the character cue for a cursor transition.
    pub fn arrive(&mut self, nav: NavigationEvent) -> Vec<Feedback> {
        if nav.from == nav.to {
            return Vec::new();
        }
        self.echo.reset();
        self.analysis();
        let mut out = cues_for_navigation(&nav, self.analysis.facts(), &self.diagnostics, &self.cues);
        out.extend(cue_for_character(&nav, &self.doc, &self.cues));
        out
    }

    fn read_line(&self, line: usize) -> String {
        // the cursor line always exists
        render_line(&self.doc, line, &self.settings)
            .unwrap_or_else(|_| render_text("", self.settings.granularity))
    }

    fn jump(&mut self, nav: NavigationEvent) -> Applied {
        let mut feedback = self.arrive(nav);
        feedback.push(Feedback::speech(self.read_line(nav.to.line)));
        Applied::from_feedback(feedback)
    }

    pub fn apply(&mut self, cmd: Command) -> Applied {
        match cmd {
            Command::ToggleEcho => {
                self.settings.typing_echo = !self.settings.typing_echo;
                self.echo.reset();
                Applied::speech(if self.settings.typing_echo {
                    "typing read-out on"
                } else {
                    "typing read-out off"
                })
            }
            Command::ToggleGranularity => {
                self.settings.granularity = self.settings.granularity.toggled();
                self.echo.reset();
                Applied::speech(match self.settings.granularity {
                    Granularity::Characters => "read-out by characters",
                    Granularity::Words => "read-out by words",
                })
            }
            Command::DropMarker(slot) => {
                self.doc.drop_marker(slot);
                Applied::speech(format!("marker {} dropped", slot.number()))
            }
            Command::JumpMarker(slot) => match self.doc.jump_to_marker(slot) {
                Ok(nav) => self.jump(nav),
                Err(e) => Applied::speech(e.to_string()),
            },
            Command::JumpAbsolute(anchor) => {
                let nav = self.doc.jump_absolute(anchor);
                self.jump(nav)
            }
            Command::Execute => self.execute(),
            Command::FocusPanel(panel) => {
                self.doc.set_focus(panel);
                Applied::speech(format!("{} panel", panel.as_str()))
            }
            Command::ReadCurrentLine => Applied::speech(self.read_line(self.doc.cursor().line)),
            Command::ReadPrevLines(n) => {
                let text = render_lines(&self.doc, self.doc.cursor().line, usize::from(n), &self.settings)
                    .unwrap_or_else(|e| e.to_string());
                Applied::speech(text)
            }
            Command::ReadFunctionContext => {
                let (version, cursor) = (self.doc.version(), self.doc.cursor());
                let text = match self.analysis().enclosing_function(version, cursor) {
                    Ok(ctx) => render_function_context(ctx.as_ref()),
                    Err(AnalysisError::NoSyntaxTree(d)) => {
                        format!("function context unavailable, {d}")
                    }
                    Err(e) => e.to_string(),
                };
                Applied::speech(text)
            }
            Command::ErrorDirection => {
                match error_direction(self.doc.cursor().line, &self.diagnostics, &self.cues) {
                    Ok(cmd) => Applied::from_feedback(vec![Feedback::Haptic { cmd }]),
                    Err(_) => Applied::speech(NO_ERRORS),
                }
            }
            Command::ReadFocusedError => match self.diagnostics.first() {
                Some(d) => Applied::speech(d.to_string()),
                None => Applied::speech(NO_ERRORS),
            },
        }
    }

    fn execute(&mut self) -> Applied {
        self.analysis();
        let result = match self.analysis.program() {
            Ok(program) => execute(program, &self.exec),
            Err(diag) => crate::interp::ExecutionResult {
                console_lines: Vec::new(),
                diagnostics: vec![diag.clone()],
                halted: crate::interp::Halt::Error,
            },
        };
        self.console = result.console_lines;
        self.diagnostics = result.diagnostics;

        let summary = match self.diagnostics.first() {
            None => "run complete".to_string(),
            Some(d) => format!("{} error on line {}", d.kind.as_str(), d.line),
        };
        Applied {
            feedback: vec![Feedback::speech(summary)],
            panels: vec![
                PanelContent {
                    panel: PanelId::Errors,
                    lines: self.diagnostics.iter().map(ToString::to_string).collect(),
                },
                PanelContent {
                    panel: PanelId::Console,
                    lines: self.console.clone(),
                },
            ],
            errors_raised: self.diagnostics.len(),
        }
    }

    pub fn marker(&self, slot: MarkerSlot) -> Option<Position> {
        self.doc.marker(slot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cues::{HapticMotorId, SoundCueId};
    use crate::source::Anchor;

    const FUNCTION_B: &str = "function functionB(x, y) {\n    let result = x - y;\n    return result;\n}\nconsole.log(functionB(10, 5));";

    fn editor(text: &str) -> Editor {
        Editor::new(
            DocumentBuffer::from_text(text),
            ExecConfig::default(),
            CueConfig::default(),
        )
    }

    fn spoken(a: &Applied) -> Vec<&str> {
        a.feedback
            .iter()
            .filter_map(|f| match f {
                Feedback::Speech { text } => Some(text.as_str()),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn execute_fills_panels() {
        let mut ed = editor(FUNCTION_B);
        let a = ed.apply(Command::Execute);
        assert_eq!(a.errors_raised, 0);
        assert_eq!(a.panels[1].lines, ["5"]);
        assert!(a.panels[0].lines.is_empty());
    }

    #[test]
    fn syntax_error_on_execute() {
        let mut ed = editor("let x = ;\nconsole.log(1);");
        let a = ed.apply(Command::Execute);
        assert_eq!(a.errors_raised, 1);
        assert!(a.panels[1].lines.is_empty());
        assert_eq!(spoken(&a), ["syntax error on line 1"]);
    }

    #[test]
    fn function_context() {
        let mut ed = editor(FUNCTION_B);
        ed.set_cursor(Position::new(2, 8)).unwrap();
        assert_eq!(
            spoken(&ed.apply(Command::ReadFunctionContext)),
            ["You are in the function functionB, taking x and y"]
        );
        ed.set_cursor(Position::new(5, 0)).unwrap();
        assert_eq!(
            spoken(&ed.apply(Command::ReadFunctionContext)),
            ["You are not inside a function"]
        );
    }

    #[test]
    fn granularity_involution() {
        let mut ed = editor("");
        let before = ed.settings();
        ed.apply(Command::ToggleGranularity);
        assert_ne!(ed.settings(), before);
        ed.apply(Command::ToggleGranularity);
        assert_eq!(ed.settings(), before);
    }

    #[test]
    fn unset_marker_is_spoken() {
        let mut ed = editor("a;");
        assert_eq!(spoken(&ed.apply(Command::JumpMarker(MarkerSlot::Two))), ["Marker 2 not set"]);
    }

    #[test]
    fn error_direction_needs_a_run() {
        let mut ed = editor("let a = 1;\nconsole.log(b);\n");
        assert_eq!(spoken(&ed.apply(Command::ErrorDirection)), [NO_ERRORS]);
        ed.apply(Command::Execute);
        let a = ed.apply(Command::ErrorDirection);
        assert_eq!(
            a.feedback,
            [Feedback::Haptic {
                cmd: CueConfig::default().single(HapticMotorId::PalmCenter)
            }]
        );
        assert_eq!(
            spoken(&ed.apply(Command::ReadFocusedError)),
            ["runtime error on line 2, column 12: b is not defined"]
        );
    }

    #[test]
    fn jump_end_reads_line_and_cues() {
        let mut ed = editor("for (let i = 0; i < 2; i++) {\n  x;\n}");
        let a = ed.apply(Command::JumpAbsolute(Anchor::End));
        assert_eq!(
            a.feedback,
            [
                Feedback::Haptic {
                    cmd: CueConfig::default().single(HapticMotorId::Index)
                },
                Feedback::Sound {
                    cue: SoundCueId::LoopClose
                },
                Feedback::speech("close brace"),
                Feedback::Haptic {
                    cmd: CueConfig::default().single(HapticMotorId::Pinky)
                },
                Feedback::speech("close brace"),
            ]
        );
    }

    #[test]
    fn typing_echo_characters() {
        let mut ed = editor("");
        ed.apply(Command::ToggleGranularity);
        let fb = ed.insert(Position::new(1, 0), "{").unwrap();
        assert_eq!(fb, [Feedback::speech("open brace")]);
    }
}
