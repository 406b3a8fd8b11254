//! Command-line runner for tfkit: invariant suites with baseline drift checks, exponent-range
//! queries, norm-ratio scans, stopping-time decompositions, Leibniz scans and signal file
//! conversion.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod decompose;
pub mod leibniz_cmd;
pub mod range;
pub mod scan;
pub mod signal_io;
pub mod suites;

/// Exit codes of the binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IDENTITY: i32 = 1;
    pub const DRIFT: i32 = 2;
    pub const USAGE: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Master seed; trial `t` uses a seed derived from `(seed, t)`.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Grid size (side length for two-axis grids).
    #[arg(long = "n", visible_alias = "N", global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Decay exponent `M` of the weights `χ̃_I^M`.
    #[arg(long = "chi-exp", global = true, default_value_t = tfkit::wavepacket::DEFAULT_CHI_EXP)]
    pub chi_exp: i32,
    #[arg(long, global = true, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Worker threads; 0 uses the rayon default.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Parser)]
#[command(name = "tfkit", version, about = "Time-frequency analysis experiment runner")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every invariant suite and compare empirical constants with a baseline.
    Verify(suites::VerifyArgs),
    /// Decide membership of an exponent point: `bht 1/p 1/q`, `tr 1/r 1/p 1/q`,
    /// `d 1/r1 1/r2 1/p 1/q`, `iter 1/p 1/q a,b [a,b ...]`.
    Range(range::RangeArgs),
    /// Empirical norm ratios over a doubling ladder of grid sizes.
    ScanNorm(scan::ScanArgs),
    /// Stopping-time decomposition of a tile set, as JSON.
    Decompose(decompose::DecomposeArgs),
    /// Fractional Leibniz ratio scan per exponent cell.
    Leibniz(leibniz_cmd::LeibnizArgs),
    /// Convert signal files between CSV and binary (chosen by extension).
    SignalIo(signal_io::SignalIoArgs),
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(m: impl Into<String>) -> Self {
        Self { code: exit::USAGE, message: m.into() }
    }

    pub fn io(m: impl Into<String>) -> Self {
        Self { code: exit::IO, message: m.into() }
    }
}

impl From<tfkit::Error> for Failure {
    fn from(e: tfkit::Error) -> Self {
        match e {
            tfkit::Error::Io(_) | tfkit::Error::Json(_) => Failure::io(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

/// Writes `text` to `--out` or standard output.
pub fn emit(common: &Common, text: &str) -> CmdResult<()> {
    match &common.out {
        Some(p) => write_file(p, text),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| Failure::io(e.to_string()))
        }
    }
}

pub fn write_file(p: &Path, text: &str) -> CmdResult<()> {
    fs::write(p, text).map_err(|e| Failure::io(format!("{}: {e}", p.display())))
}

fn dispatch(cli: Cli) -> CmdResult<i32> {
    let common = cli.common;
    match cli.command {
        Command::Verify(a) => suites::cmd_verify(&common, &a),
        Command::Range(a) => range::cmd_range(&common, &a),
        Command::ScanNorm(a) => scan::cmd_scan_norm(&common, &a),
        Command::Decompose(a) => decompose::cmd_decompose(&common, &a),
        Command::Leibniz(a) => leibniz_cmd::cmd_leibniz(&common, &a),
        Command::SignalIo(a) => signal_io::cmd_signal_io(&a),
    }
}

/// Runs `f` on a pool of `threads` workers (`0` = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> CmdResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.common.threads;
    match with_threads(threads, || dispatch(cli)).and_then(|r| r) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
