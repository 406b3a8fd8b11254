use clap::{Args, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use tfkit::dyadic::{canonical_family, canonical_scales, TileSet};
use tfkit::grid::lp_mean;
use tfkit::operators::{bht_direct, bht_model, biparam_paraproduct, paraproduct, ParaproductKind, ParaproductSpec};
use tfkit::rng::{band_limited, band_limited_2d, dominated_by, interval_set, trial_rng};
use tfkit::vector_valued::{parse_rational, ratio_f64, t_r, IntervalFamily};
use tfkit::wavepacket::{PacketCache, PACKET_WINDOW};
use tfkit::{GridSpec, Signal1D, Signal2D};

use crate::{emit, CmdResult, Common, Failure, Format};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    /// `(f, g) ↦ f·g`, the Hölder control row.
    Product,
    BhtDirect,
    /// Canonical tri-tile family.
    BhtModel,
    ParaI,
    ParaII,
    ParaIII,
    /// Bi-parameter paraproduct, kind I along x and kind II along y.
    PiPi,
    /// Lacunary-family `T_r`; one row per `--r`.
    Tr,
}

impl Operator {
    pub const ALL: [Operator; 8] = [
        Operator::Product,
        Operator::BhtDirect,
        Operator::BhtModel,
        Operator::ParaI,
        Operator::ParaII,
        Operator::ParaIII,
        Operator::PiPi,
        Operator::Tr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::Product => "product",
            Operator::BhtDirect => "bht-direct",
            Operator::BhtModel => "bht-model",
            Operator::ParaI => "para-i",
            Operator::ParaII => "para-ii",
            Operator::ParaIII => "para-iii",
            Operator::PiPi => "pi-pi",
            Operator::Tr => "tr",
        }
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Operators to scan; all when absent.
    #[arg(long = "op", value_enum)]
    pub ops: Vec<Operator>,
    /// Exponent triples `p,q,s` separated by `;`.
    #[arg(long, default_value = "2,2,1;4,4,2")]
    pub exponents: String,
    /// Values of `r` for `tr`, separated by `,`.
    #[arg(long, default_value = "1,3/2,2")]
    pub r: String,
    /// Number of doublings of `--n` (default start 256).
    #[arg(long, default_value_t = 4)]
    pub levels: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub operator: String,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub ratio: f64,
}

/// Side of the two-axis grid scanned at ladder size `n`.
pub fn side_for(n: usize) -> usize {
    (n / 8).max(16)
}

/// Restricted-type input `|f| = 1_F` for even trials, band-limited to `|k| < N/4` for odd ones.
fn input_1d(g: GridSpec, t: u64, r: &mut impl Rng) -> Signal1D {
    if t.is_multiple_of(2) {
        let mask = interval_set(g, 3, 0.25, r);
        Signal1D::new(g, dominated_by(&mask, r)).expect("sized")
    } else {
        band_limited(g, g.size() as i64 / 4 - 1, r)
    }
}

fn input_2d(g: GridSpec, t: u64, r: &mut impl Rng) -> Signal2D {
    let n = g.size();
    if t.is_multiple_of(2) {
        let line = g.with_axes(1).expect("line");
        let (mx, my) = (interval_set(line, 3, 0.25, r), interval_set(line, 3, 0.25, r));
        let mask: Vec<f64> = (0..n * n).map(|i| mx[i / n] * my[i % n]).collect();
        Signal2D::new(g, dominated_by(&mask, r)).expect("sized")
    } else {
        band_limited_2d(g, n as i64 / 4 - 1, r)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

struct Ctx {
    family: Option<TileSet>,
    cache: PacketCache,
}

fn trial_ratio(op: Operator, r_exp: f64, pqs: [f64; 3], n: usize, seed: u64, t: u64, ctx: &Ctx) -> tfkit::Result<f64> {
    let [p, q, s] = pqs;
    let mut rng = trial_rng(seed, t);
    if op == Operator::PiPi {
        let g = GridSpec::plane(side_for(n))?;
        let (f, h) = (input_2d(g, t, &mut rng), input_2d(g, t, &mut rng));
        let line = g.with_axes(1)?;
        let specs = (ParaproductSpec::full(ParaproductKind::I, line), ParaproductSpec::full(ParaproductKind::II, line));
        let out = biparam_paraproduct(&f, &h, (&specs.0, &specs.1))?;
        return Ok(ratio(out.lp_norm(s)?, f.lp_norm(p)? * h.lp_norm(q)?));
    }
    let g = GridSpec::line(n)?;
    let (f, h) = if op == Operator::Product {
        // same modulus in both slots: the Hölder equality case
        let mask = interval_set(g, 3, 0.25, &mut rng);
        let a = Signal1D::new(g, dominated_by(&mask, &mut rng))?;
        let b = Signal1D::new(g, dominated_by(&mask, &mut rng))?;
        (a, b)
    } else {
        (input_1d(g, t, &mut rng), input_1d(g, t, &mut rng))
    };
    let den = f.lp_norm(p)? * h.lp_norm(q)?;
    let num = match op {
        Operator::Product => f.mul(&h)?.lp_norm(s)?,
        Operator::BhtDirect => bht_direct(&f, &h)?.lp_norm(s)?,
        Operator::BhtModel => {
            let set = ctx.family.as_ref().expect("family built for bht-model");
            bht_model(&f, &h, set, &PACKET_WINDOW, &ctx.cache)?.lp_norm(s)?
        }
        Operator::ParaI | Operator::ParaII | Operator::ParaIII => {
            let kind = match op {
                Operator::ParaI => ParaproductKind::I,
                Operator::ParaII => ParaproductKind::II,
                _ => ParaproductKind::III,
            };
            paraproduct(&f, &h, &ParaproductSpec::full(kind, g))?.lp_norm(s)?
        }
        Operator::Tr => lp_mean(&t_r(&f, &h, &IntervalFamily::lacunary(g), r_exp)?, s)?,
        Operator::PiPi => unreachable!("handled above"),
    };
    Ok(ratio(num, den))
}

/// Largest ratio `‖T(f,g)‖_s / (‖f‖_p ‖g‖_q)` over `trials` seeded inputs at size `n`.
pub fn max_ratio(op: Operator, r_exp: f64, pqs: [f64; 3], n: usize, trials: u64, seed: u64) -> tfkit::Result<f64> {
    let family = if op == Operator::BhtModel {
        let g = GridSpec::line(n)?;
        Some(canonical_family(g, &canonical_scales(g))?)
    } else {
        None
    };
    let ctx = Ctx { family, cache: PacketCache::new() };
    let v: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| trial_ratio(op, r_exp, pqs, n, seed, t, &ctx))
        .collect::<tfkit::Result<_>>()?;
    Ok(v.into_iter().fold(0.0, f64::max))
}

pub fn label(op: Operator, r_exp: f64) -> String {
    if op == Operator::Tr {
        format!("tr(r={r_exp})")
    } else {
        op.name().to_string()
    }
}

/// Rows for one operator across the ladder.
pub fn scan(op: Operator, r_exp: f64, pqs: [f64; 3], ladder: &[usize], trials: u64, seed: u64) -> tfkit::Result<Vec<ScanRow>> {
    ladder
        .iter()
        .map(|&n| {
            Ok(ScanRow {
                n: if op == Operator::PiPi { side_for(n) } else { n },
                operator: label(op, r_exp),
                p: pqs[0],
                q: pqs[1],
                s: pqs[2],
                ratio: max_ratio(op, r_exp, pqs, n, trials, seed)?,
            })
        })
        .collect()
}

/// Least-squares slope of `ln ratio` against `ln n`.
pub fn loglog_slope(rows: &[ScanRow]) -> f64 {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.ratio > 0.0).map(|r| ((r.n as f64).ln(), r.ratio.ln())).collect();
    let k = pts.len() as f64;
    if k < 2.0 {
        return 0.0;
    }
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn parse_f(s: &str) -> CmdResult<f64> {
    let s = s.trim();
    if s == "inf" {
        return Ok(f64::INFINITY);
    }
    parse_rational(s).map(ratio_f64).map_err(|e| Failure::usage(e.to_string()))
}

pub fn parse_triples(s: &str) -> CmdResult<Vec<[f64; 3]>> {
    s.split(';')
        .filter(|c| !c.trim().is_empty())
        .map(|c| {
            let v: Vec<f64> = c.split(',').map(parse_f).collect::<CmdResult<_>>()?;
            match v.as_slice() {
                [p, q, s] if *p >= 1.0 && *q >= 1.0 && *s > 0.0 => Ok([*p, *q, *s]),
                _ => Err(Failure::usage(format!("exponent triple {c:?} must be p,q,s with p, q ≥ 1"))),
            }
        })
        .collect()
}

pub fn cmd_scan_norm(common: &Common, args: &ScanArgs) -> CmdResult<i32> {
    let start = common.n.unwrap_or(256);
    let ladder: Vec<usize> = (0..args.levels).map(|i| start << i).collect();
    let trials = common.trials.unwrap_or(8);
    let ops = if args.ops.is_empty() { Operator::ALL.to_vec() } else { args.ops.clone() };
    let rs: Vec<f64> = args.r.split(',').map(parse_f).collect::<CmdResult<_>>()?;
    let mut rows = Vec::new();
    for pqs in parse_triples(&args.exponents)? {
        for &op in &ops {
            let r_list = if op == Operator::Tr { rs.clone() } else { vec![0.0] };
            for r_exp in r_list {
                rows.extend(scan(op, r_exp, pqs, &ladder, trials, common.seed)?);
            }
        }
    }
    let text = match common.format {
        Format::Csv => {
            let mut s = String::from("N,operator,p,q,s,ratio\n");
            for r in &rows {
                s += &format!("{},{},{},{},{},{:.9e}\n", r.n, r.operator, r.p, r.q, r.s, r.ratio);
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&rows).map_err(|e| Failure::usage(e.to_string()))? + "\n",
    };
    emit(common, &text)?;
    Ok(crate::exit::OK)
}
