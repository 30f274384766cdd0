//! Append-only interaction log and the summaries derived from it.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Command,
    ErrorRaised,
    FeatureUse,
    TaskMarker,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub t_ms: u64,
    pub kind: MetricKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskTime {
    pub task: String,
    pub start_ms: u64,
    pub end_ms: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    pub tasks: Vec<TaskTime>,
    pub errors_raised: u64,
    pub feature_use: BTreeMap<String, u64>,
}

/// Summarizes a record list. A task runs from its marker to the next one;
/// the last marker opens a task that has not finished yet.
pub fn summarize(records: &[MetricRecord]) -> MetricsSnapshot {
    let mut snap = MetricsSnapshot::default();
    let markers: Vec<&MetricRecord> = records
        .iter()
        .filter(|r| r.kind == MetricKind::TaskMarker)
        .collect();
    snap.tasks = markers
        .windows(2)
        .map(|w| TaskTime {
            task: w[0].detail.clone(),
            start_ms: w[0].t_ms,
            end_ms: w[1].t_ms,
            elapsed_ms: w[1].t_ms - w[0].t_ms,
        })
        .collect();
    for r in records {
        match r.kind {
            MetricKind::ErrorRaised => snap.errors_raised += 1,
            MetricKind::FeatureUse => *snap.feature_use.entry(r.detail.clone()).or_default() += 1,
            _ => {}
        }
    }
    snap
}

/// In-memory record list mirrored to an optional line-per-record writer.
/// A failing writer is reported once on stderr and then dropped.
#[derive(Default)]
pub struct MetricsLog {
    records: Vec<MetricRecord>,
    sink: Option<Box<dyn Write + Send>>,
}

impl MetricsLog {
    pub fn new(sink: Option<Box<dyn Write + Send>>) -> Self {
        MetricsLog {
            records: Vec::new(),
            sink,
        }
    }

    pub fn append(&mut self, t_ms: u64, kind: MetricKind, detail: impl Into<String>) {
        let t_ms = self.records.last().map_or(t_ms, |r| r.t_ms.max(t_ms));
        let record = MetricRecord {
            t_ms,
            kind,
            detail: detail.into(),
        };
        if let Some(sink) = self.sink.as_mut() {
            let line = serde_json::to_string(&record).expect("records serialize");
            if let Err(e) = writeln!(sink, "{line}").and_then(|_| sink.flush()) {
                eprintln!("warning: event log write failed, logging disabled: {e}");
                self.sink = None;
            }
        }
        self.records.push(record);
    }

    pub fn records(&self) -> &[MetricRecord] {
        &self.records
    }

    pub fn snapshot(&self) -> MetricsSnapshot {
        summarize(&self.records)
    }
}
