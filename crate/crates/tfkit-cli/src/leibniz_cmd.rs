use clap::Args;
use num_rational::Rational64 as Q;
use rayon::prelude::*;
use tfkit::leibniz::{
    leibniz_ratio_1d, leibniz_ratio_2d, leibniz_ratio_mixed, HolderTerm, LeibnizInstance, MixedExponents,
    ScalarExponents,
};
use tfkit::rng::{band_limited, band_limited_2d, trial_rng};
use tfkit::vector_valued::parse_rational;
use tfkit::GridSpec;

use crate::{emit, CmdResult, Common, Failure, Format};

#[derive(Debug, Args)]
pub struct LeibnizArgs {
    /// Order along x (rational).
    #[arg(long)]
    pub alpha: String,
    /// Order along y; selects the two-parameter rule.
    #[arg(long)]
    pub beta: Option<String>,
    /// Mixed-norm rule `L^{s1}_x L^{s2}_y` (needs --beta).
    #[arg(long)]
    pub mixed: bool,
    /// Cells separated by `;`, reciprocals by `,`. One parameter: `1/s,1/p` or
    /// `1/s,1/p1,1/q1,1/p2,1/q2`. Two parameters: `1/s,1/p` or nine values. Mixed:
    /// `1/s1,1/s2,1/px,1/py`.
    #[arg(long)]
    pub exponents: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    One,
    Two,
    Mixed,
}

#[derive(Clone, Debug)]
pub enum Cell {
    Scalar(ScalarExponents),
    Mixed(MixedExponents),
}

fn rat(s: &str) -> CmdResult<Q> {
    parse_rational(s).map_err(|e| Failure::usage(e.to_string()))
}

/// Parses one cell for `rule`.
pub fn parse_cell(rule: Rule, s: &str) -> CmdResult<Cell> {
    let v: Vec<Q> = s.split(',').map(rat).collect::<CmdResult<_>>()?;
    let terms = if rule == Rule::One { 2 } else { 4 };
    match (rule, v.len()) {
        (Rule::Mixed, 4) => Ok(Cell::Mixed(MixedExponents::uniform([v[0], v[1]], [v[2], v[3]]))),
        (Rule::Mixed, _) => Err(Failure::usage(format!("mixed cell {s:?} needs 1/s1,1/s2,1/px,1/py"))),
        (_, 2) => Ok(Cell::Scalar(ScalarExponents::uniform(v[0], v[1], terms))),
        (_, k) if k == 1 + 2 * terms => Ok(Cell::Scalar(ScalarExponents {
            inv_s: v[0],
            terms: v[1..].chunks(2).map(|c| HolderTerm::new(c[0], c[1])).collect(),
        })),
        _ => Err(Failure::usage(format!("cell {s:?} needs 2 or {} reciprocals", 1 + 2 * terms))),
    }
}

pub fn default_cells(rule: Rule) -> &'static str {
    match rule {
        Rule::Mixed => "1,1/2,1/2,1/4;1/2,1/2,1/4,1/4",
        _ => "1,1/2;1/2,1/4",
    }
}

pub fn default_n(rule: Rule) -> usize {
    if rule == Rule::One {
        256
    } else {
        32
    }
}

/// Largest ratio over `trials` seeded band-limited pairs (band `N/8`).
pub fn max_ratio(rule: Rule, alpha: Q, beta: Q, cell: &Cell, n: usize, trials: u64, seed: u64) -> CmdResult<f64> {
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> CmdResult<f64> {
            let mut r = trial_rng(seed, t);
            let band = (n / 8) as i64;
            Ok(match (rule, cell) {
                (Rule::One, Cell::Scalar(e)) => {
                    let g = GridSpec::line(n)?;
                    let (f, h) = (band_limited(g, band, &mut r), band_limited(g, band, &mut r));
                    leibniz_ratio_1d(&LeibnizInstance { f, g: h, alpha, beta, exponents: e.clone() })?
                }
                (Rule::Two, Cell::Scalar(e)) => {
                    let g = GridSpec::plane(n)?;
                    let (f, h) = (band_limited_2d(g, band, &mut r), band_limited_2d(g, band, &mut r));
                    leibniz_ratio_2d(&LeibnizInstance { f, g: h, alpha, beta, exponents: e.clone() })?
                }
                (Rule::Mixed, Cell::Mixed(e)) => {
                    let g = GridSpec::plane(n)?;
                    let (f, h) = (band_limited_2d(g, band, &mut r), band_limited_2d(g, band, &mut r));
                    leibniz_ratio_mixed(&LeibnizInstance { f, g: h, alpha, beta, exponents: e.clone() })?
                }
                _ => return Err(Failure::usage("cell does not match the rule")),
            })
        })
        .collect::<CmdResult<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

pub fn cmd_leibniz(common: &Common, args: &LeibnizArgs) -> CmdResult<i32> {
    let rule = match (&args.beta, args.mixed) {
        (None, false) => Rule::One,
        (Some(_), false) => Rule::Two,
        (Some(_), true) => Rule::Mixed,
        (None, true) => return Err(Failure::usage("--mixed needs --beta")),
    };
    let alpha = rat(&args.alpha)?;
    let beta = args.beta.as_deref().map(rat).transpose()?.unwrap_or_else(|| Q::from_integer(0));
    let n = common.n.unwrap_or(default_n(rule));
    let trials = common.trials.unwrap_or(20);
    let spec = args.exponents.clone().unwrap_or_else(|| default_cells(rule).to_string());
    let mut rows = Vec::new();
    for label in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let cell = parse_cell(rule, label)?;
        rows.push((label.to_string(), max_ratio(rule, alpha, beta, &cell, n, trials, common.seed)?));
    }
    let text = match common.format {
        Format::Csv => {
            let mut s = String::from("cell,max_ratio,trials,N\n");
            for (label, r) in &rows {
                s += &format!("\"{label}\",{r:.9e},{trials},{n}\n");
            }
            s
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(label, r)| serde_json::json!({ "cell": label, "max_ratio": r, "trials": trials, "N": n }))
                .collect();
            serde_json::to_string_pretty(&v).map_err(|e| Failure::usage(e.to_string()))? + "\n"
        }
    };
    emit(common, &text)?;
    Ok(crate::exit::OK)
}
