//! Glove wire protocol and paced delivery.
//!
//! A frame is seven bytes:
//!
//! ```text
//! 0xA5 | motor | pattern | intensity | duration lo | duration hi | xor(bytes 0..6)
//! ```
//!
//! [`DeviceLink`] queues commands and releases them at least
//! [`MIN_SPACING_MS`] apart. Time is passed in explicitly so the same code
//! runs against a virtual clock during replay and a wall clock when live.

use std::collections::VecDeque;
use std::io::{self, Write};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::cues::{HapticCommand, HapticMotorId, HapticPattern, MAX_PULSE_MS, MIN_PULSE_MS};

pub const SYNC_BYTE: u8 = 0xA5;
pub const FRAME_LEN: usize = 7;
pub const MIN_SPACING_MS: u64 = 150;
pub const QUEUE_CAPACITY: usize = 64;

pub type Frame = [u8; FRAME_LEN];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("frame sync byte is {0:#04x}, expected 0xa5")]
    Sync(u8),
    #[error("frame checksum is {found:#04x}, expected {expected:#04x}")]
    Checksum { found: u8, expected: u8 },
    #[error("invalid frame field: {0}")]
    Field(String),
}

fn checksum(bytes: &[u8]) -> u8 {
    bytes.iter().fold(0, |acc, b| acc ^ b)
}

fn check_duration(duration_ms: u16) -> Result<(), FrameError> {
    if (MIN_PULSE_MS..=MAX_PULSE_MS).contains(&duration_ms) {
        Ok(())
    } else {
        Err(FrameError::Field(format!(
            "duration {duration_ms} ms outside {MIN_PULSE_MS}..={MAX_PULSE_MS}"
        )))
    }
}

/// Encodes raw field values, validating each one.
pub fn encode_raw(motor: u8, pattern: u8, intensity: u8, duration_ms: u16) -> Result<Frame, FrameError> {
    if HapticMotorId::from_id(motor).is_none() {
        return Err(FrameError::Field(format!("motor id {motor}")));
    }
    if HapticPattern::from_code(pattern).is_none() {
        return Err(FrameError::Field(format!("pattern code {pattern}")));
    }
    check_duration(duration_ms)?;
    let [lo, hi] = duration_ms.to_le_bytes();
    let mut frame = [SYNC_BYTE, motor, pattern, intensity, lo, hi, 0];
    frame[6] = checksum(&frame[..6]);
    Ok(frame)
}

pub fn encode_frame(cmd: &HapticCommand) -> Result<Frame, FrameError> {
    encode_raw(cmd.motor.id(), cmd.pattern.code(), cmd.intensity, cmd.duration_ms)
}

pub fn decode_frame(bytes: &[u8]) -> Result<HapticCommand, FrameError> {
    if bytes.len() != FRAME_LEN {
        return Err(FrameError::Field(format!("length {}", bytes.len())));
    }
    if bytes[0] != SYNC_BYTE {
        return Err(FrameError::Sync(bytes[0]));
    }
    let expected = checksum(&bytes[..6]);
    if bytes[6] != expected {
        return Err(FrameError::Checksum {
            found: bytes[6],
            expected,
        });
    }
    let motor = HapticMotorId::from_id(bytes[1])
        .ok_or_else(|| FrameError::Field(format!("motor id {}", bytes[1])))?;
    let pattern = HapticPattern::from_code(bytes[2])
        .ok_or_else(|| FrameError::Field(format!("pattern code {}", bytes[2])))?;
    let duration_ms = u16::from_le_bytes([bytes[4], bytes[5]]);
    check_duration(duration_ms)?;
    Ok(HapticCommand {
        motor,
        pattern,
        intensity: bytes[3],
        duration_ms,
    })
}

/// Where encoded frames go once their slot arrives.
pub trait FrameSink: Send {
    fn deliver(&mut self, t_ms: u64, frame: &Frame) -> io::Result<()>;
}

impl<S: FrameSink + ?Sized> FrameSink for Box<S> {
    fn deliver(&mut self, t_ms: u64, frame: &Frame) -> io::Result<()> {
        (**self).deliver(t_ms, frame)
    }
}

/// Writes frames to any byte stream, e.g. an opened serial port.
pub struct WriterSink<W>(pub W);

impl<W: Write + Send> FrameSink for WriterSink<W> {
    fn deliver(&mut self, _t_ms: u64, frame: &Frame) -> io::Result<()> {
        self.0.write_all(frame)?;
        self.0.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimelineRecord {
    pub t_ms: u64,
    pub cmd: HapticCommand,
}

/// Shared view of what a [`SimulatedGlove`] has received.
#[derive(Debug, Clone, Default)]
pub struct GloveTimeline(Arc<Mutex<Vec<TimelineRecord>>>);

impl GloveTimeline {
    pub fn snapshot(&self) -> Vec<TimelineRecord> {
        self.0.lock().expect("timeline lock").clone()
    }
}

/// Decodes every frame it receives and records it with its delivery time.
#[derive(Debug, Default)]
pub struct SimulatedGlove {
    timeline: GloveTimeline,
}

impl SimulatedGlove {
    pub fn new() -> (Self, GloveTimeline) {
        let glove = SimulatedGlove::default();
        let view = glove.timeline.clone();
        (glove, view)
    }
}

impl FrameSink for SimulatedGlove {
    fn deliver(&mut self, t_ms: u64, frame: &Frame) -> io::Result<()> {
        let cmd = decode_frame(frame).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        self.timeline
            .0
            .lock()
            .expect("timeline lock")
            .push(TimelineRecord { t_ms, cmd });
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedCue {
    pub t_ms: u64,
    pub cmd: HapticCommand,
}

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("device link is closed")]
    LinkClosed,
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("device write failed: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    enqueued_ms: u64,
    frame: Frame,
    cmd: HapticCommand,
}

pub struct DeviceLink<S> {
    sink: S,
    queue: VecDeque<Pending>,
    last_dispatch_ms: Option<u64>,
    dropped: Vec<DroppedCue>,
    closed: bool,
}

impl<S: FrameSink> DeviceLink<S> {
    pub fn new(sink: S) -> Self {
        DeviceLink {
            sink,
            queue: VecDeque::new(),
            last_dispatch_ms: None,
            dropped: Vec::new(),
            closed: false,
        }
    }

    /// Queues a command. When the queue is full the oldest pending command
    /// is dropped and recorded.
    pub fn send(&mut self, cmd: HapticCommand, now_ms: u64) -> Result<(), LinkError> {
        if self.closed {
            return Err(LinkError::LinkClosed);
        }
        let frame = encode_frame(&cmd)?;
        if self.queue.len() >= QUEUE_CAPACITY {
            if let Some(old) = self.queue.pop_front() {
                self.dropped.push(DroppedCue {
                    t_ms: now_ms,
                    cmd: old.cmd,
                });
            }
        }
        self.queue.push_back(Pending {
            enqueued_ms: now_ms,
            frame,
            cmd,
        });
        Ok(())
    }

    fn next_slot(&self, p: &Pending) -> u64 {
        match self.last_dispatch_ms {
            Some(last) => p.enqueued_ms.max(last + MIN_SPACING_MS),
            None => p.enqueued_ms,
        }
    }

    fn dispatch_until(&mut self, limit: Option<u64>) -> Result<usize, LinkError> {
        let mut sent = 0;
        while let Some(front) = self.queue.front().copied() {
            let slot = self.next_slot(&front);
            if limit.is_some_and(|now| slot > now) {
                break;
            }
            self.queue.pop_front();
            self.last_dispatch_ms = Some(slot);
            if let Err(e) = self.sink.deliver(slot, &front.frame) {
                self.closed = true;
                return Err(e.into());
            }
            sent += 1;
        }
        Ok(sent)
    }

    /// Delivers every queued command whose slot is at or before `now_ms`.
    pub fn pump(&mut self, now_ms: u64) -> Result<usize, LinkError> {
        if self.closed {
            return Err(LinkError::LinkClosed);
        }
        self.dispatch_until(Some(now_ms))
    }

    /// Delivers everything still queued at its paced slot.
    pub fn flush(&mut self) -> Result<usize, LinkError> {
        if self.closed {
            return Err(LinkError::LinkClosed);
        }
        self.dispatch_until(None)
    }

    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn dropped(&self) -> &[DroppedCue] {
        &self.dropped
    }

    pub fn sink(&self) -> &S {
        &self.sink
    }
}

pub type SharedLink = Arc<Mutex<DeviceLink<Box<dyn FrameSink>>>>;

pub fn shared(sink: Box<dyn FrameSink>) -> SharedLink {
    Arc::new(Mutex::new(DeviceLink::new(sink)))
}

/// Pumps a shared link against the wall clock until it closes.
pub fn spawn_pacer(link: SharedLink, epoch: Instant) -> std::thread::JoinHandle<()> {
    std::thread::spawn(move || loop {
        std::thread::sleep(std::time::Duration::from_millis(10));
        let now = epoch.elapsed().as_millis() as u64;
        let mut guard = match link.lock() {
            Ok(g) => g,
            Err(_) => return,
        };
        if guard.is_closed() {
            return;
        }
        if let Err(e) = guard.pump(now) {
            eprintln!("haptic device: {e}");
            return;
        }
    })
}
