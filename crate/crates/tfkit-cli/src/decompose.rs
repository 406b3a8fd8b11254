use std::path::PathBuf;

use clap::Args;
use rand::seq::index::sample;
use serde_json::{json, Value};
use tfkit::dyadic::{canonical_family, canonical_scales, TileSet};
use tfkit::helicoid::{stopping_time_select, Decomposition};
use tfkit::io::AnySignal;
use tfkit::rng::{interval_set, trial_rng};
use tfkit::GridSpec;

use crate::{emit, CmdResult, Common, Failure};

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Random subset of the canonical family of this size; 0 keeps the whole family.
    #[arg(long, default_value_t = 60)]
    pub tiles: usize,
    /// 0/1 weight signal file (`.csv` or `.bin`); a random union of intervals when absent.
    #[arg(long)]
    pub weight: Option<PathBuf>,
    /// Distance class `d` setting the anchor level.
    #[arg(long, default_value_t = 0)]
    pub d: u32,
}

pub const DEFAULT_N: usize = 128;

/// Canonical family (or a seeded subset of it) and the weight.
pub fn inputs(common: &Common, args: &DecomposeArgs) -> CmdResult<(TileSet, Vec<f64>)> {
    let weight = match &args.weight {
        Some(p) => match crate::signal_io::load(p)? {
            AnySignal::One(s) => s.samples().iter().map(|z| z.re).collect::<Vec<f64>>(),
            AnySignal::Two(_) => return Err(Failure::usage("weight must be a one-axis signal")),
        },
        None => {
            let g = GridSpec::line(common.n.unwrap_or(DEFAULT_N))?;
            interval_set(g, 4, 0.1, &mut trial_rng(common.seed, 0))
        }
    };
    let grid = GridSpec::from_size(weight.len(), 1)?;
    if let Some(n) = common.n {
        if n != weight.len() {
            return Err(Failure::usage(format!("--n {n} disagrees with the weight length {}", weight.len())));
        }
    }
    let full = canonical_family(grid, &canonical_scales(grid))?;
    let set = if args.tiles == 0 || args.tiles >= full.len() {
        full
    } else {
        let mut idx = sample(&mut trial_rng(common.seed, 1), full.len(), args.tiles).into_vec();
        idx.sort_unstable();
        full.subset(&idx)
    };
    Ok((set, weight))
}

pub fn report(dec: &Decomposition, set: &TileSet, mexp: i32, d: u32) -> CmdResult<Value> {
    let levels: Vec<Value> = dec
        .levels
        .iter()
        .map(|(&n, sels)| {
            let (lo, hi) = dec.window(n);
            json!({
                "level": n,
                "window": [lo, if hi.is_finite() { json!(hi) } else { Value::Null }],
                "selections": sels.iter().map(|s| json!({
                    "interval": { "j": s.interval.j, "m": s.interval.m },
                    "tiles": s.tiles,
                    "average": s.average,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let tiles: Value = serde_json::from_str(&set.to_json()?).map_err(|e| Failure::usage(e.to_string()))?;
    Ok(json!({
        "chi_exp": mexp,
        "d": d,
        "anchor": dec.anchor,
        "levels": levels,
        "leftover": dec.leftover,
        "tiles": tiles,
    }))
}

pub fn cmd_decompose(common: &Common, args: &DecomposeArgs) -> CmdResult<i32> {
    let (set, weight) = inputs(common, args)?;
    let dec = stopping_time_select(&set, &weight, common.chi_exp, args.d)?;
    let v = report(&dec, &set, common.chi_exp, args.d)?;
    let text = serde_json::to_string_pretty(&v).map_err(|e| Failure::usage(e.to_string()))?;
    emit(common, &(text + "\n"))?;
    Ok(crate::exit::OK)
}
