//! One editing session: inbound messages in, ordered updates out.
//!
//! Messages are handled strictly one at a time. Every handled message ends
//! with a `document_ack` carrying the client's sequence number; feedback
//! events get session-wide sequence numbers and name the message that
//! caused them as their trigger.

mod metrics;
mod protocol;

pub use metrics::{summarize, MetricKind, MetricRecord, MetricsLog, MetricsSnapshot, TaskTime};
pub use protocol::{CursorTarget, EditOp, Envelope, SessionMessage, SessionUpdate};

use std::io::{self, BufRead, Write};
use std::time::Instant;

use crate::cues::{EventStream, Feedback};
use crate::device::SharedLink;
use crate::dispatch::{Chord, Command, Editor, Keymap, PanelContent};
use crate::source::PanelId;

/// Minimum gap between auto-repeated error-direction cues.
pub const ERROR_DIRECTION_REPEAT_MS: u64 = 1000;

#[derive(Debug, Clone, Copy)]
pub enum Clock {
    /// Time comes from the `t_ms` of each inbound message.
    Virtual { now_ms: u64 },
    Wall(Instant),
}

impl Clock {
    pub fn virtual_clock() -> Self {
        Clock::Virtual { now_ms: 0 }
    }

    pub fn wall() -> Self {
        Clock::Wall(Instant::now())
    }

    /// Current session time. A virtual clock moves to `stamp` but never
    /// backwards.
    fn advance(&mut self, stamp: Option<u64>) -> u64 {
        match self {
            Clock::Virtual { now_ms } => {
                if let Some(t) = stamp {
                    *now_ms = (*now_ms).max(t);
                }
                *now_ms
            }
            Clock::Wall(epoch) => epoch.elapsed().as_millis() as u64,
        }
    }
}

pub struct Session {
    editor: Editor,
    keymap: Keymap,
    clock: Clock,
    events: EventStream,
    metrics: MetricsLog,
    device: Option<SharedLink>,
    recorder: Option<Box<dyn Write + Send>>,
    last_seq: Option<u64>,
    last_error_direction_ms: Option<u64>,
}

impl Session {
    pub fn new(editor: Editor, keymap: Keymap, clock: Clock) -> Self {
        Session {
            editor,
            keymap,
            clock,
            events: EventStream::new(),
            metrics: MetricsLog::default(),
            device: None,
            recorder: None,
            last_seq: None,
            last_error_direction_ms: None,
        }
    }

    /// Haptic events are forwarded to this link as they are emitted.
    pub fn with_device(mut self, link: SharedLink) -> Self {
        self.device = Some(link);
        self
    }

    pub fn with_event_log(mut self, sink: Box<dyn Write + Send>) -> Self {
        self.metrics = MetricsLog::new(Some(sink));
        self
    }

    /// Inbound messages are written here, stamped with `t_ms`, so that the
    /// session can be replayed later.
    pub fn with_recorder(mut self, sink: Box<dyn Write + Send>) -> Self {
        self.recorder = Some(sink);
        self
    }

    pub fn editor(&self) -> &Editor {
        &self.editor
    }

    pub fn metrics(&self) -> &MetricsLog {
        &self.metrics
    }

    fn record(&mut self, line: &str) {
        if let Some(rec) = self.recorder.as_mut() {
            if let Err(e) = writeln!(rec, "{line}").and_then(|_| rec.flush()) {
                eprintln!("warning: session recording failed, recording disabled: {e}");
                self.recorder = None;
            }
        }
    }

    /// Parses and handles one protocol line.
    pub fn handle_line(&mut self, line: &str) -> Vec<SessionUpdate> {
        let line = line.trim();
        if line.is_empty() {
            return Vec::new();
        }
        match serde_json::from_str::<Envelope>(line) {
            Ok(env) => self.handle_message(env),
            Err(e) => {
                self.record(line);
                let seq = serde_json::from_str::<serde_json::Value>(line)
                    .ok()
                    .and_then(|v| v.get("seq").and_then(|s| s.as_u64()));
                vec![SessionUpdate::ProtocolError {
                    seq,
                    message: format!("malformed message: {e}"),
                }]
            }
        }
    }

    pub fn handle_message(&mut self, mut env: Envelope) -> Vec<SessionUpdate> {
        let now = self.clock.advance(env.t_ms);
        env.t_ms = Some(env.t_ms.unwrap_or(now));
        if self.recorder.is_some() {
            let line = serde_json::to_string(&env).expect("envelopes serialize");
            self.record(&line);
        }

        let seq = env.seq;
        if let Some(last) = self.last_seq.filter(|last| seq <= *last) {
            return vec![SessionUpdate::ProtocolError {
                seq: Some(seq),
                message: format!("message seq {seq} is not after {last}"),
            }];
        }
        self.last_seq = Some(seq);
        self.pump_device(now);

        let mut turn = Turn::default();
        match env.message {
            SessionMessage::Hello { task, .. } => {
                if let Some(task) = task {
                    self.metrics.append(now, MetricKind::TaskMarker, task);
                }
                turn.panels.push(PanelContent {
                    panel: PanelId::Code,
                    lines: self.editor.doc().lines().to_vec(),
                });
            }
            SessionMessage::Edit { op } => {
                let result = match op {
                    EditOp::Insert { pos, text } => {
                        self.metrics.append(now, MetricKind::Command, "insert");
                        self.editor.insert(pos, &text)
                    }
                    EditOp::Delete { from, to } => {
                        self.metrics.append(now, MetricKind::Command, "delete");
                        self.editor.delete(from, to).map(|_| Vec::new())
                    }
                };
                match result {
                    Ok(fb) => turn.feedback.extend(fb),
                    Err(e) => turn.error = Some(e.to_string()),
                }
            }
            SessionMessage::CursorMove { target } => {
                self.metrics.append(now, MetricKind::Command, "cursor-move");
                match target {
                    CursorTarget::Motion { motion } => {
                        turn.feedback.extend(self.editor.move_cursor(motion))
                    }
                    CursorTarget::To { to } => match self.editor.set_cursor(to) {
                        Ok(fb) => turn.feedback.extend(fb),
                        Err(e) => turn.error = Some(e.to_string()),
                    },
                }
            }
            SessionMessage::KeyChord {
                modifiers,
                key,
                repeat,
            } => match Chord::from_parts(&modifiers, &key) {
                Ok(chord) => self.key_chord(&chord, &key, repeat, now, &mut turn),
                Err(e) => turn.error = Some(e.to_string()),
            },
            SessionMessage::Load { text } => {
                self.metrics.append(now, MetricKind::Command, "load");
                self.editor.replace_all(&text);
                turn.panels.push(PanelContent {
                    panel: PanelId::Code,
                    lines: self.editor.doc().lines().to_vec(),
                });
            }
            SessionMessage::Save { path } => {
                self.metrics.append(now, MetricKind::Command, "save");
                let text = match std::fs::write(&path, self.editor.doc().text()) {
                    Ok(()) => "saved".to_string(),
                    Err(e) => format!("save failed: {e}"),
                };
                turn.feedback.push(Feedback::speech(text));
            }
            SessionMessage::Metrics => turn.snapshot = Some(self.metrics.snapshot()),
        }

        self.finish(seq, now, turn)
    }

    fn key_chord(&mut self, chord: &Chord, raw_key: &str, repeat: bool, now: u64, turn: &mut Turn) {
        let Some(cmd) = self.keymap.resolve(chord, self.editor.doc().focus()) else {
            if let Some(text) = chord.typed_text(raw_key) {
                let pos = self.editor.doc().cursor();
                self.metrics.append(now, MetricKind::Command, "insert");
                match self.editor.insert(pos, &text) {
                    Ok(fb) => turn.feedback.extend(fb),
                    Err(e) => turn.error = Some(e.to_string()),
                }
            }
            return;
        };

        if repeat {
            // Held keys only re-trigger the error-direction cue, at most
            // once per second.
            let due = self
                .last_error_direction_ms
                .is_none_or(|last| now >= last + ERROR_DIRECTION_REPEAT_MS);
            if cmd == Command::ErrorDirection && due {
                self.last_error_direction_ms = Some(now);
                turn.feedback.extend(self.editor.apply(cmd).feedback);
            }
            return;
        }

        self.metrics.append(now, MetricKind::Command, cmd.to_string());
        self.metrics.append(now, MetricKind::FeatureUse, cmd.feature());
        if cmd == Command::ErrorDirection {
            self.last_error_direction_ms = Some(now);
        }
        let applied = self.editor.apply(cmd);
        for d in &self.editor.diagnostics()[..applied.errors_raised] {
            self.metrics.append(now, MetricKind::ErrorRaised, d.to_string());
        }
        turn.feedback.extend(applied.feedback);
        turn.panels.extend(applied.panels);
    }

    fn finish(&mut self, seq: u64, now: u64, turn: Turn) -> Vec<SessionUpdate> {
        let mut out = Vec::new();
        if let Some(message) = turn.error {
            out.push(SessionUpdate::ProtocolError {
                seq: Some(seq),
                message,
            });
        }
        for event in self.events.emit(seq, turn.feedback) {
            if let Feedback::Haptic { cmd } = &event.payload {
                self.send_haptic(*cmd, now);
            }
            out.push(SessionUpdate::Feedback { event });
        }
        out.extend(turn.panels.into_iter().map(SessionUpdate::Panel));
        if let Some(snapshot) = turn.snapshot {
            out.push(SessionUpdate::MetricsSnapshot(snapshot));
        }
        let doc = self.editor.doc();
        out.push(SessionUpdate::DocumentAck {
            seq,
            version: doc.version(),
            cursor: doc.cursor(),
        });
        out
    }

    fn pump_device(&mut self, now: u64) {
        if let Some(link) = &self.device {
            let mut link = link.lock().expect("device lock");
            if !link.is_closed() {
                if let Err(e) = link.pump(now) {
                    eprintln!("warning: haptic device: {e}");
                }
            }
        }
    }

    fn send_haptic(&mut self, cmd: crate::cues::HapticCommand, now: u64) {
        let Some(link) = &self.device else { return };
        let mut link = link.lock().expect("device lock");
        let dropped = link.dropped().len();
        if let Err(e) = link.send(cmd, now) {
            eprintln!("warning: haptic device: {e}");
        }
        if let Some(d) = link.dropped().get(dropped) {
            eprintln!("warning: haptic queue full, dropped {:?} at {} ms", d.cmd.motor, d.t_ms);
        }
    }
}

#[derive(Default)]
struct Turn {
    feedback: Vec<Feedback>,
    panels: Vec<PanelContent>,
    snapshot: Option<MetricsSnapshot>,
    error: Option<String>,
}

/// Feeds a recorded inbound log to a fresh session on a virtual clock and
/// returns the outbound log, one JSON object per line.
pub fn replay<R: BufRead>(input: R, mut session: Session) -> io::Result<Vec<String>> {
    let mut out = Vec::new();
    for line in input.lines() {
        for update in session.handle_line(&line?) {
            out.push(update.to_line());
        }
    }
    Ok(out)
}
