use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use haci::{open_serial, run_replay, serve, DeviceTarget, SessionFactory};
use haci_core::cues::CueConfig;
use haci_core::dispatch::Keymap;
use haci_core::interp::ExecConfig;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Feedback engine session server.
#[derive(Debug, Parser)]
#[command(name = "haci", version)]
struct Args {
    /// Address for editor clients (plain NDJSON or websocket).
    #[arg(long, default_value = "127.0.0.1:7117")]
    listen: String,

    /// Haptic glove: `sim` or `serial:<path>`.
    #[arg(long, default_value = "sim")]
    device: DeviceTarget,

    /// Append metric records to this file, one JSON object per line.
    #[arg(long, value_name = "PATH")]
    log_events: Option<PathBuf>,

    /// Replay a recorded inbound log on a virtual clock, print the
    /// outbound log to stdout and exit.
    #[arg(long, value_name = "PATH")]
    replay: Option<PathBuf>,

    /// Raise out-of-range array reads as runtime errors.
    #[arg(long, value_enum, default_value = "on")]
    strict_indexing: Switch,

    /// `macos`, `portable` or a path to a keymap file.
    #[arg(long, default_value = "macos")]
    keymap: String,

    /// Load this file as the initial document.
    #[arg(long, value_name = "PATH")]
    open: Option<PathBuf>,

    /// Record inbound messages, time-stamped, for later `--replay`.
    #[arg(long, value_name = "PATH")]
    record: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let keymap = Keymap::load(&args.keymap)?;
    let initial_text = match &args.open {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    let exec = ExecConfig {
        strict_indexing: matches!(args.strict_indexing, Switch::On),
        ..ExecConfig::default()
    };
    let mut factory = SessionFactory {
        exec,
        cues: CueConfig::default(),
        keymap,
        initial_text,
        event_log: args.log_events,
        record: args.record,
        device: args.device.clone(),
        serial_link: None,
    };

    if let Some(path) = &args.replay {
        let stdout = std::io::stdout();
        run_replay(&factory, path, &mut stdout.lock())?;
        return Ok(());
    }

    if let DeviceTarget::Serial(path) = &args.device {
        factory.serial_link = Some(open_serial(path)?);
    }
    let listener = TcpListener::bind(&args.listen)?;
    eprintln!("haci listening on {}", listener.local_addr()?);
    serve(listener, factory)?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("haci: {e}");
            ExitCode::FAILURE
        }
    }
}
