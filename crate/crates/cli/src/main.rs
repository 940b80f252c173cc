//! `hbcast`: build, verify and compare harmonic-family broadcast schedules.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonic_broadcast::client_sim::PlaybackPolicy;
use harmonic_broadcast::schemes::QhbLayout;
use harmonic_broadcast::{Ratio, Scheme};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "hbcast",
    version,
    about = "Harmonic-family broadcast schedules: build, verify, compare"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build one schedule and export it.
    Schedule(Common),
    /// Sweep every arrival phase and check playback continuity.
    Verify(Common),
    /// Emit comparison data.
    Report {
        which: ReportKind,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Fig6,
    Fig7,
    Table1,
    ClientTrace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutChoice {
    /// Continuous last-sub-slot cycle; stall-free.
    Adopted,
    /// Literal 1-based slot and sub-slot indexing.
    Documented,
}

impl LayoutChoice {
    pub fn layout(self) -> QhbLayout {
        match self {
            LayoutChoice::Adopted => QhbLayout::ADOPTED,
            LayoutChoice::Documented => QhbLayout::DOCUMENTED,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// hb, chb, qhb, ahb or aqhb.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Segment count N, or an inclusive range `a..b`.
    #[arg(long, value_parser = parse_segments)]
    segments: Option<Segments>,
    /// Sub-slots per slot.
    #[arg(long, default_value_t = 4)]
    m: u32,
    /// Video length T in display time units.
    #[arg(long, default_value = "120")]
    length: Ratio,
    /// Playback rate b in display data units per time unit.
    #[arg(long, default_value = "1")]
    rate: Ratio,
    /// Client arrival in display time units, rounded up to a sub-slot.
    #[arg(long, default_value = "0")]
    arrival: Ratio,
    /// next-slot, join-plus-slot, earliest or fixed:<num/den> (display units).
    #[arg(long)]
    policy: Option<PlaybackPolicy>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate arrival sweeps on one thread.
    #[arg(long)]
    no_parallel: bool,
    /// QHB sub-slot layout.
    #[arg(long, value_enum, default_value_t = LayoutChoice::Adopted)]
    qhb_layout: LayoutChoice,
    /// Read the schedule from a JSON export instead of building it.
    #[arg(long, conflicts_with_all = ["scheme", "segments"])]
    from: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segments(Vec<u32>);

fn parse_segments(s: &str) -> Result<Segments, String> {
    let bad = || format!("expected an integer or a range a..b, got {s:?}");
    let values = match s.split_once("..") {
        Some((a, b)) => {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            if a > b {
                return Err(format!("empty range {s:?}"));
            }
            (a..=b).collect()
        }
        None => vec![s.trim().parse().map_err(|_| bad())?],
    };
    Ok(Segments(values))
}

/// A failure that maps to a process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or parameters.
    Config(String),
    /// Verification found stalls.
    Stalls,
    Io(std::io::Error),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Schedule(c) => commands::schedule(&c),
        Command::Verify(c) => commands::verify(&c),
        Command::Report { which, common } => commands::report(which, &common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Stalls) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
