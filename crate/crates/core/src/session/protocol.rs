//! Newline-delimited JSON messages exchanged with the editor client.

use serde::{Deserialize, Serialize};

use crate::cues::FeedbackEvent;
use crate::dispatch::PanelContent;
use crate::source::{Motion, Position};

use super::metrics::MetricsSnapshot;

/// One inbound line: client sequence number, optional timestamp and the
/// message itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub seq: u64,
    /// Milliseconds since session start. Stamped by the server when
    /// recording and used as the virtual clock on replay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_ms: Option<u64>,
    #[serde(flatten)]
    pub message: SessionMessage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SessionMessage {
    Hello {
        client_version: String,
        /// Starts a task; written to the metrics log as a task marker.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        task: Option<String>,
    },
    Edit {
        #[serde(flatten)]
        op: EditOp,
    },
    CursorMove {
        #[serde(flatten)]
        target: CursorTarget,
    },
    KeyChord {
        #[serde(default)]
        modifiers: Vec<String>,
        key: String,
        /// Set for auto-repeat events while a key is held.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        repeat: bool,
    },
    /// Replaces the whole document.
    Load { text: String },
    Save { path: String },
    Metrics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    Insert { pos: Position, text: String },
    Delete { from: Position, to: Position },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CursorTarget {
    Motion { motion: Motion },
    To { to: Position },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SessionUpdate {
    Feedback {
        #[serde(flatten)]
        event: FeedbackEvent,
    },
    Panel(PanelContent),
    DocumentAck {
        seq: u64,
        version: u64,
        cursor: Position,
    },
    MetricsSnapshot(MetricsSnapshot),
    ProtocolError {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seq: Option<u64>,
        message: String,
    },
}

impl SessionUpdate {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("updates always serialize")
    }
}
