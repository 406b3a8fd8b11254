use clap::Args;
use num_rational::Rational64 as Q;
use tfkit::vector_valued::{
    parse_rational, range_bht, range_d_answer, range_d_iterated, range_tr, RangeAnswer, RangePoint, TupleR,
};

use crate::{emit, CmdResult, Common, Failure, Format};

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Operator family followed by reciprocal exponents.
    #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
    pub items: Vec<String>,
}

pub fn answer_str(a: RangeAnswer) -> &'static str {
    match a {
        RangeAnswer::In => "in",
        RangeAnswer::Out => "out",
        RangeAnswer::OutsideCoverage => "outside-coverage",
    }
}

fn rat(s: &str) -> CmdResult<Q> {
    parse_rational(s).map_err(|e| Failure::usage(e.to_string()))
}

fn arity(items: &[&str], want: usize, usage: &str) -> CmdResult<()> {
    if items.len() != want {
        return Err(Failure::usage(format!("expected `{usage}`")));
    }
    Ok(())
}

fn from_bool(b: bool) -> RangeAnswer {
    if b {
        RangeAnswer::In
    } else {
        RangeAnswer::Out
    }
}

/// `None` when two of `1/r₁, 1/r₂, 1/r′ = 1 − 1/r₁ − 1/r₂` exceed `1/2`; no tuple of that
/// shape is covered.
fn tuple(a: Q, b: Q) -> CmdResult<Option<TupleR>> {
    let half = Q::new(1, 2);
    let c = Q::from_integer(1) - a - b;
    if [a, b, c].iter().filter(|v| **v > half).count() >= 2 {
        return Ok(None);
    }
    TupleR::new(a, b, c).map(Some).map_err(|e| Failure::usage(e.to_string()))
}

fn pair(s: &str) -> CmdResult<(Q, Q)> {
    let (a, b) = s.split_once(',').ok_or_else(|| Failure::usage(format!("tuple {s:?} must be `1/r1,1/r2`")))?;
    Ok((rat(a)?, rat(b)?))
}

/// Decides one query, e.g. `["tr", "1", "1/2", "1/2"]`.
pub fn decide(items: &[&str]) -> CmdResult<RangeAnswer> {
    let (kind, rest) = items.split_first().ok_or_else(|| Failure::usage("missing operator family"))?;
    match *kind {
        "bht" => {
            arity(rest, 2, "bht 1/p 1/q")?;
            Ok(from_bool(range_bht(&RangePoint::from_pq(rat(rest[0])?, rat(rest[1])?))))
        }
        "tr" => {
            arity(rest, 3, "tr 1/r 1/p 1/q")?;
            let pt = RangePoint::from_pq(rat(rest[1])?, rat(rest[2])?);
            range_tr(rat(rest[0])?, &pt).map(from_bool).map_err(|e| Failure::usage(e.to_string()))
        }
        "d" => {
            arity(rest, 4, "d 1/r1 1/r2 1/p 1/q")?;
            let pt = RangePoint::from_pq(rat(rest[2])?, rat(rest[3])?);
            Ok(match tuple(rat(rest[0])?, rat(rest[1])?)? {
                None => RangeAnswer::OutsideCoverage,
                Some(t) => range_d_answer(&t, &pt),
            })
        }
        "iter" => {
            if rest.len() < 3 {
                return Err(Failure::usage("expected `iter 1/p 1/q a,b [a,b ...]` (outermost tuple first)"));
            }
            let pt = RangePoint::from_pq(rat(rest[0])?, rat(rest[1])?);
            let mut chain = Vec::new();
            for s in &rest[2..] {
                let (a, b) = pair(s)?;
                match tuple(a, b)? {
                    None => return Ok(RangeAnswer::OutsideCoverage),
                    Some(t) => chain.push(t),
                }
            }
            // a broken chain is a space no theorem covers
            match range_d_iterated(&chain) {
                Ok(r) => Ok(range_d_answer(&r.outer, &pt)),
                Err(_) => Ok(RangeAnswer::OutsideCoverage),
            }
        }
        other => Err(Failure::usage(format!("unknown operator family {other:?}; use bht, tr, d or iter"))),
    }
}

pub fn cmd_range(common: &Common, args: &RangeArgs) -> CmdResult<i32> {
    let items: Vec<&str> = args.items.iter().map(String::as_str).collect();
    let a = decide(&items)?;
    let text = match common.format {
        Format::Csv => format!("{}\n", answer_str(a)),
        Format::Json => format!("{}\n", serde_json::json!({ "query": items, "answer": answer_str(a) })),
    };
    emit(common, &text)?;
    Ok(crate::exit::OK)
}

/// Hand-derived membership table: query, expected answer.
pub const GOLDEN: &[(&str, &str)] = &[
    // 0 ≤ 1/p, 1/q < 1 and 0 < 1/p + 1/q < 3/2
    ("bht 1/2 1/2", "in"),
    ("bht 0 0", "out"),
    ("bht 1 0", "out"),
    ("bht 0 1/2", "in"),
    ("bht 3/4 3/4", "out"),
    ("bht 3/4 2/3", "in"),
    ("bht 9/10 1/2", "in"),
    ("bht 9/10 3/5", "out"),
    ("bht -1/10 1/2", "out"),
    ("bht 1/3 1/3", "in"),
    ("bht 99/100 1/2", "in"),
    ("bht 1/2 0", "in"),
    // all reciprocals at most 1/2: same as bht
    ("d 1/2 1/4 1/2 1/2", "in"),
    ("d 1/2 1/4 3/4 3/4", "out"),
    ("d 1/3 1/3 0 0", "out"),
    ("d 1/3 1/3 9/10 1/2", "in"),
    ("d 1/4 1/4 1 0", "out"),
    // 1/r1 > 1/2: also 1/q < 3/2 - 1/r1
    ("d 2/3 1/6 1/2 1/2", "in"),
    ("d 2/3 1/6 1/2 5/6", "out"),
    ("d 2/3 1/6 1/2 4/5", "in"),
    ("d 2/3 1/6 9/10 3/5", "out"),
    ("d 3/4 0 1/2 3/4", "out"),
    ("d 3/4 0 1/2 2/3", "in"),
    ("d 3/4 0 9/10 1/10", "in"),
    // 1/r2 > 1/2: also 1/p < 3/2 - 1/r2
    ("d 1/6 2/3 1/2 1/2", "in"),
    ("d 1/6 2/3 5/6 1/2", "out"),
    ("d 1/6 2/3 4/5 1/2", "in"),
    ("d 0 3/4 3/4 1/4", "out"),
    ("d 0 3/4 7/10 1/4", "in"),
    ("d 1/6 2/3 0 9/10", "in"),
    // 1/r' > 1/2: 1/p, 1/q < 1/2 + 1/r and -1/r < 1/s' < 1
    ("d 1/4 1/8 1/2 1/2", "in"),
    ("d 1/4 1/8 7/8 1/4", "out"),
    ("d 1/4 1/8 3/4 1/4", "in"),
    ("d 1/4 1/8 3/4 5/8", "out"),
    ("d 1/4 1/8 3/4 1/2", "in"),
    ("d 1/4 1/8 0 0", "out"),
    ("d 1/8 1/8 1/2 1/4", "in"),
    ("d 1/8 1/8 3/4 1/4", "out"),
    ("d 1/8 1/8 5/8 5/8", "out"),
    // two reciprocals above 1/2
    ("d 2/3 2/3 1/2 1/2", "outside-coverage"),
    ("d 3/5 3/5 1/4 1/4", "outside-coverage"),
    // r ≥ 2: same as bht
    ("tr 1/2 1/2 1/2", "in"),
    ("tr 1/2 3/4 3/4", "out"),
    ("tr 1/3 9/10 1/2", "in"),
    ("tr 1/4 1 0", "out"),
    // 1 ≤ r < 2: 1/p, 1/q < 1/2 + 1/r and -1/r' < 1/s' < 1
    ("tr 1 1/2 1/2", "out"),
    ("tr 1 1/4 1/4", "in"),
    ("tr 1 1/2 1/4", "in"),
    ("tr 2/3 1/2 1/2", "in"),
    ("tr 2/3 3/4 1/2", "in"),
    ("tr 2/3 3/4 2/3", "out"),
    ("tr 2/3 0 0", "out"),
    ("tr 3/4 1 1/4", "out"),
    ("tr 3/4 1 1/8", "in"),
    // chains, outermost first: each tuple must lie in the range of the next one
    ("iter 1/2 1/2 1/2,1/4 1/3,1/3", "in"),
    ("iter 3/4 3/4 1/2,1/4 1/3,1/3", "out"),
    ("iter 1/2 4/5 2/3,1/6 1/4,1/4", "in"),
    ("iter 1/2 5/6 2/3,1/6 1/4,1/4", "out"),
    ("iter 9/10 1/2 1/2,1/4 2/3,1/6", "in"),
    ("iter 1/2 1/2 3/4,0 0,3/4", "outside-coverage"),
];

/// Mismatching golden rows as `(query, expected, got)`.
pub fn golden_mismatches() -> Vec<(String, String, String)> {
    GOLDEN
        .iter()
        .filter_map(|(q, want)| {
            let items: Vec<&str> = q.split_whitespace().collect();
            let got = match decide(&items) {
                Ok(a) => answer_str(a).to_string(),
                Err(f) => format!("error: {}", f.message),
            };
            (got != *want).then(|| (q.to_string(), want.to_string(), got))
        })
        .collect()
}
