//! Signal files.
//!
//! CSV: first line `# N=<int> axes=<1|2>`, then header `re,im`, then one row per sample
//! (row-major for two axes). Binary: 16-byte header `HTF1`, `u32` N, `u32` axes, 4 zero
//! bytes, followed by little-endian `f64` pairs.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Signal1D, Signal2D, C64};

const MAGIC: &[u8; 4] = b"HTF1";

#[derive(Clone, Debug, PartialEq)]
pub enum AnySignal {
    One(Signal1D),
    Two(Signal2D),
}

impl AnySignal {
    pub fn grid(&self) -> GridSpec {
        match self {
            AnySignal::One(s) => s.grid(),
            AnySignal::Two(s) => s.grid(),
        }
    }

    pub fn samples(&self) -> &[C64] {
        match self {
            AnySignal::One(s) => s.samples(),
            AnySignal::Two(s) => s.samples(),
        }
    }

    fn build(grid: GridSpec, samples: Vec<C64>) -> Result<Self> {
        Ok(match grid.axes() {
            1 => AnySignal::One(Signal1D::new(grid, samples)?),
            _ => AnySignal::Two(Signal2D::new(grid, samples)?),
        })
    }
}

pub fn write_csv(sig: &AnySignal, mut w: impl Write) -> Result<()> {
    let g = sig.grid();
    writeln!(w, "# N={} axes={}", g.size(), g.axes())?;
    writeln!(w, "re,im")?;
    for z in sig.samples() {
        // `{:?}` on f64 round-trips exactly
        writeln!(w, "{:?},{:?}", z.re, z.im)?;
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad {what}: {s:?}")))
}

pub fn read_csv(r: impl BufRead) -> Result<AnySignal> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| Error::Parse("empty file".into()))??;
    let rest = first
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing `# N=.. axes=..` line".into()))?;
    let (mut n, mut axes) = (None, None);
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("N=") {
            n = Some(parse_field::<usize>(v, "N")?);
        } else if let Some(v) = tok.strip_prefix("axes=") {
            axes = Some(parse_field::<u8>(v, "axes")?);
        }
    }
    let (n, axes) = match (n, axes) {
        (Some(n), Some(a)) => (n, a),
        _ => return Err(Error::Parse("header must declare N and axes".into())),
    };
    let grid = GridSpec::from_size(n, axes)?;
    let header = lines.next().ok_or_else(|| Error::Parse("missing re,im header".into()))??;
    if header.trim() != "re,im" {
        return Err(Error::Parse(format!("expected `re,im`, got {header:?}")));
    }
    let mut samples = Vec::with_capacity(grid.total_len());
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad row {line:?}")))?;
        samples.push(C64::new(parse_field(a, "re")?, parse_field(b, "im")?));
    }
    AnySignal::build(grid, samples)
}

pub fn write_binary(sig: &AnySignal, mut w: impl Write) -> Result<()> {
    let g = sig.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.size() as u32).to_le_bytes())?;
    w.write_all(&(g.axes() as u32).to_le_bytes())?;
    w.write_all(&[0u8; 4])?;
    for z in sig.samples() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<AnySignal> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(Error::Parse("bad magic, expected HTF1".into()));
    }
    let n = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes")) as usize;
    let axes = u32::from_le_bytes(head[8..12].try_into().expect("4 bytes"));
    let grid = GridSpec::from_size(n, u8::try_from(axes).map_err(|_| Error::Parse("axes".into()))?)?;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != grid.total_len() * 16 {
        return Err(Error::Parse(format!(
            "expected {} payload bytes, found {}",
            grid.total_len() * 16,
            body.len()
        )));
    }
    let samples = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect();
    AnySignal::build(grid, samples)
}
