//! Socket front end for haci sessions.
//!
//! Each TCP connection gets its own [`Session`]. A connection that opens
//! with `GET ` is upgraded to a websocket and carries one protocol line per
//! text message; anything else is spoken to as plain newline-delimited JSON.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use haci_core::cues::CueConfig;
use haci_core::device::{self, SharedLink, SimulatedGlove, WriterSink};
use haci_core::dispatch::{Editor, Keymap};
use haci_core::interp::ExecConfig;
use haci_core::session::{replay, Clock, Session, SessionUpdate};
use haci_core::DocumentBuffer;
use tungstenite::Message;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeviceTarget {
    Sim,
    Serial(PathBuf),
}

impl std::str::FromStr for DeviceTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sim" => Ok(DeviceTarget::Sim),
            _ => match s.strip_prefix("serial:") {
                Some(path) if !path.is_empty() => Ok(DeviceTarget::Serial(path.into())),
                _ => Err(format!("expected `sim` or `serial:<path>`, got `{s}`")),
            },
        }
    }
}

pub const SERIAL_BAUD: u32 = 115_200;

/// Opens the serial port 8N1 at [`SERIAL_BAUD`].
pub fn open_serial(path: &Path) -> io::Result<SharedLink> {
    let port = serialport::new(path.to_string_lossy(), SERIAL_BAUD)
        .data_bits(serialport::DataBits::Eight)
        .parity(serialport::Parity::None)
        .stop_bits(serialport::StopBits::One)
        .flow_control(serialport::FlowControl::None)
        .timeout(Duration::from_millis(500))
        .open()
        .map_err(io::Error::other)?;
    Ok(device::shared(Box::new(WriterSink(port))))
}

/// Everything needed to start a session.
#[derive(Clone)]
pub struct SessionFactory {
    pub exec: ExecConfig,
    pub cues: CueConfig,
    pub keymap: Keymap,
    pub initial_text: String,
    pub event_log: Option<PathBuf>,
    pub record: Option<PathBuf>,
    pub device: DeviceTarget,
    /// A serial port can only be opened once, so it is shared by all
    /// sessions. Simulated gloves are per session.
    pub serial_link: Option<SharedLink>,
}

fn append(path: &Path) -> io::Result<File> {
    OpenOptions::new().create(true).append(true).open(path)
}

impl SessionFactory {
    fn editor(&self) -> Editor {
        Editor::new(DocumentBuffer::from_text(&self.initial_text), self.exec, self.cues)
    }

    /// A session on the virtual clock without device or logs, as used for
    /// replay.
    pub fn replay_session(&self) -> Session {
        Session::new(self.editor(), self.keymap.clone(), Clock::virtual_clock())
    }

    /// A live session on the wall clock, with its device link pacer.
    pub fn live_session(&self) -> Session {
        let epoch = Instant::now();
        let mut session = Session::new(self.editor(), self.keymap.clone(), Clock::Wall(epoch));
        let link = match (&self.device, &self.serial_link) {
            (DeviceTarget::Serial(_), Some(link)) => Some(link.clone()),
            (DeviceTarget::Serial(_), None) => None,
            (DeviceTarget::Sim, _) => {
                let (glove, _) = SimulatedGlove::new();
                Some(device::shared(Box::new(glove)))
            }
        };
        if let Some(link) = link {
            device::spawn_pacer(Arc::clone(&link), epoch);
            session = session.with_device(link);
        }
        if let Some(path) = &self.event_log {
            match append(path) {
                Ok(f) => session = session.with_event_log(Box::new(f)),
                Err(e) => eprintln!("warning: cannot open event log {}: {e}", path.display()),
            }
        }
        if let Some(path) = &self.record {
            match append(path) {
                Ok(f) => session = session.with_recorder(Box::new(f)),
                Err(e) => eprintln!("warning: cannot open recording {}: {e}", path.display()),
            }
        }
        session
    }
}

/// Replays an inbound log and writes the outbound log to `out`.
pub fn run_replay(factory: &SessionFactory, input: &Path, out: &mut dyn Write) -> io::Result<()> {
    let reader = BufReader::new(File::open(input)?);
    for line in replay(reader, factory.replay_session())? {
        writeln!(out, "{line}")?;
    }
    out.flush()
}

fn is_websocket(stream: &TcpStream) -> io::Result<bool> {
    let mut head = [0u8; 4];
    let mut filled = 0;
    // peek until four bytes are buffered or the client stops sending
    for _ in 0..50 {
        filled = stream.peek(&mut head)?;
        if filled == head.len() || filled == 0 {
            break;
        }
        std::thread::sleep(Duration::from_millis(2));
    }
    Ok(filled == head.len() && &head == b"GET ")
}

fn serve_lines(stream: TcpStream, mut session: Session) -> io::Result<()> {
    let mut writer = stream.try_clone()?;
    for line in BufReader::new(stream).lines() {
        for update in session.handle_line(&line?) {
            writeln!(writer, "{}", update.to_line())?;
        }
        writer.flush()?;
    }
    Ok(())
}

fn serve_websocket(stream: TcpStream, mut session: Session) -> io::Result<()> {
    let mut ws = tungstenite::accept(stream).map_err(io::Error::other)?;
    loop {
        let text = match ws.read() {
            Ok(Message::Text(t)) => t.to_string(),
            Ok(Message::Binary(b)) => String::from_utf8_lossy(&b).into_owned(),
            Ok(Message::Close(_)) => return Ok(()),
            Ok(_) => continue,
            Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => {
                return Ok(())
            }
            Err(e) => return Err(io::Error::other(e)),
        };
        let updates: Vec<SessionUpdate> = text.lines().flat_map(|l| session.handle_line(l)).collect();
        for update in updates {
            ws.send(Message::text(update.to_line()))
                .map_err(io::Error::other)?;
        }
    }
}

pub fn handle_connection(stream: TcpStream, factory: &SessionFactory) -> io::Result<()> {
    let session = factory.live_session();
    if is_websocket(&stream)? {
        serve_websocket(stream, session)
    } else {
        serve_lines(stream, session)
    }
}

/// Accepts connections forever, one thread per connection.
pub fn serve(listener: TcpListener, factory: SessionFactory) -> io::Result<()> {
    let factory = Arc::new(factory);
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("warning: accept failed: {e}");
                continue;
            }
        };
        let factory = Arc::clone(&factory);
        std::thread::spawn(move || {
            let peer = stream.peer_addr().ok();
            if let Err(e) = handle_connection(stream, &factory) {
                eprintln!("connection {peer:?}: {e}");
            }
        });
    }
    Ok(())
}
