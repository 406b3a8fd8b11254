use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use tfkit::io::{read_binary, read_csv, write_binary, write_csv, AnySignal};

use crate::{CmdResult, Failure};

#[derive(Debug, Args)]
pub struct SignalIoArgs {
    /// `.csv` or `.bin` input.
    pub input: PathBuf,
    /// `.csv` or `.bin` output.
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Csv,
    Binary,
}

fn kind(p: &Path) -> CmdResult<Kind> {
    match p.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Kind::Csv),
        Some("bin") => Ok(Kind::Binary),
        _ => Err(Failure::usage(format!("{}: extension must be .csv or .bin", p.display()))),
    }
}

fn io_err(p: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::io(format!("{}: {e}", p.display()))
}

pub fn load(p: &Path) -> CmdResult<AnySignal> {
    let k = kind(p)?;
    let r = BufReader::new(File::open(p).map_err(|e| io_err(p, e))?);
    match k {
        Kind::Csv => read_csv(r),
        Kind::Binary => read_binary(r),
    }
    .map_err(|e| io_err(p, e))
}

pub fn store(p: &Path, sig: &AnySignal) -> CmdResult<()> {
    let k = kind(p)?;
    let mut w = BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?);
    match k {
        Kind::Csv => write_csv(sig, &mut w),
        Kind::Binary => write_binary(sig, &mut w),
    }
    .map_err(|e| io_err(p, e))?;
    w.flush().map_err(|e| io_err(p, e))
}

pub fn cmd_signal_io(args: &SignalIoArgs) -> CmdResult<i32> {
    let (ki, ko) = (kind(&args.input)?, kind(&args.output)?);
    if ki == ko {
        return Err(Failure::usage("input and output already share a format"));
    }
    let sig = load(&args.input)?;
    store(&args.output, &sig)?;
    Ok(crate::exit::OK)
}
