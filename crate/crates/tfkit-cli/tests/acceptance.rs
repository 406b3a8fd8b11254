//! One PASS/FAIL line per acceptance criterion; exits nonzero when any fails.

use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use num_rational::Rational64 as Q;
use tfkit_cli::leibniz_cmd::{max_ratio as leibniz_max, parse_cell, Rule};
use tfkit_cli::range::{golden_mismatches, GOLDEN};
use tfkit_cli::scan::{loglog_slope, scan, Operator};
use tfkit_cli::suites::{
    all_suites, baseline_of, run_suites, tail_rate_spread, Baseline, Ctx, Outcome, Status, DEFAULT_N, DEFAULT_TRIALS,
};

const SEED: u64 = 7;
const SLOPE_CAP: f64 = 0.05;
const SCAN_LADDER: [usize; 4] = [256, 512, 1024, 2048];
const SCAN_TRIALS: u64 = 32;
const SCAN_BUDGET_SECS: f64 = 600.0;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, detail: impl AsRef<str>) {
        println!("{} {id}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
        self.failed += usize::from(!pass);
    }
}

fn ctx(trials: u64) -> Ctx {
    Ctx { seed: SEED, n: DEFAULT_N, trials, chi_exp: 20, epsilon: 0.05, fault: None }
}

fn suite(name: &str, c: &Ctx) -> Outcome {
    let s = all_suites().into_iter().find(|s| s.name == name).unwrap_or_else(|| panic!("no suite {name}"));
    match (s.run)(c) {
        Ok(o) => o,
        Err(e) => {
            println!("  {name}: {e}");
            Outcome { value: f64::NAN, limit: None, pass: false }
        }
    }
}

fn identity(r: &mut Report, id: &str, name: &str, trials: u64, tol: f64) {
    let o = suite(name, &ctx(trials));
    r.line(id, o.value <= tol, format!("{name} max error {:.3e} (tol {tol:.0e}, {trials} instances)", o.value));
}

fn tfkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfkit")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn criterion_1(r: &mut Report) {
    identity(r, "1a", "m_split", 20, 1e-9);
    identity(r, "1b", "t_r_nested_oracle", 10, 1e-9);
    identity(r, "1c", "tensor_two_paths", 4, 1e-8);
    identity(r, "1d", "trilinear_duality", 50, 1e-10);
    identity(r, "1e", "dft_roundtrip", 20, 1e-12);
    identity(r, "1e", "lp_reconstruction", 20, 1e-10);
}

fn criterion_2(r: &mut Report) {
    let c = ctx(200);
    let mut total = 0.0;
    let mut parts = Vec::new();
    for name in [
        "stopping_time_structure",
        "tree_partition",
        "rank_one_canonical",
        "energy_chain_disjoint",
        "triple_stopping_partition",
        "distance_partition_geometry",
    ] {
        let o = suite(name, &c);
        total += if o.value.is_nan() { 1.0 } else { o.value };
        parts.push(format!("{name}={}", o.value));
    }
    r.line("2", total == 0.0, format!("200 seeded runs, violations: {}", parts.join(" ")));
}

fn criterion_3(r: &mut Report) {
    let base: Baseline =
        serde_json::from_str(include_str!("../baseline.json")).expect("embedded baseline parses");
    let rows = run_suites(&ctx(DEFAULT_TRIALS), Some(&base));
    for row in rows.iter().filter(|row| row.kind == tfkit_cli::suites::Kind::Empirical) {
        let pass = row.status == Status::Pass;
        r.line(
            "3",
            pass,
            format!(
                "{} = {:.4e} baseline {:.4e} drift {:.3} cap {}",
                row.suite,
                row.value,
                row.baseline.unwrap_or(f64::NAN),
                row.drift.unwrap_or(f64::NAN),
                row.limit.map_or("-".into(), |l| format!("{l:.3e}"))
            ),
        );
    }
}

fn criterion_4(r: &mut Report) {
    let bad = golden_mismatches();
    for (q, want, got) in &bad {
        println!("  mismatch {q}: expected {want}, got {got}");
    }
    r.line("4", GOLDEN.len() == 60 && bad.is_empty(), format!("{} golden points, {} mismatches", GOLDEN.len(), bad.len()));
}

fn criterion_5(r: &mut Report) {
    let start = Instant::now();
    let mut worst = (f64::NEG_INFINITY, String::new());
    let mut product_dev: f64 = 0.0;
    let mut ok = true;
    for pqs in [[2.0, 2.0, 1.0], [4.0, 4.0, 2.0]] {
        for op in Operator::ALL {
            let rs: &[f64] = if op == Operator::Tr { &[1.0, 1.5, 2.0] } else { &[0.0] };
            for &rexp in rs {
                let rows = match scan(op, rexp, pqs, &SCAN_LADDER, SCAN_TRIALS, SEED) {
                    Ok(v) => v,
                    Err(e) => {
                        println!("  {} failed: {e}", op.name());
                        ok = false;
                        continue;
                    }
                };
                let slope = loglog_slope(&rows);
                let label = format!("{} {:?}", rows[0].operator, pqs);
                println!("  slope {label}: {slope:+.4}");
                if op == Operator::Product {
                    product_dev = rows.iter().fold(product_dev, |m, row| m.max((row.ratio - 1.0).abs()));
                } else {
                    ok &= slope <= SLOPE_CAP;
                }
                if slope > worst.0 {
                    worst = (slope, label);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    r.line("5", ok, format!("largest slope {:+.4} ({}), cap {SLOPE_CAP}", worst.0, worst.1));
    // equality in Hoelder's inequality, up to rounding in the norms
    r.line("5", product_dev <= 1e-12, format!("product control row |ratio - 1| = {product_dev:.1e} at Hoelder exponents"));
    r.line("5", secs <= SCAN_BUDGET_SECS, format!("scan runtime {secs:.1} s (budget {SCAN_BUDGET_SECS} s)"));
}

fn criterion_6(r: &mut Report) {
    identity(r, "6", "leibniz_exponential_pair", 1, 1e-10);
    let spread = tail_rate_spread(&ctx(DEFAULT_TRIALS)).unwrap_or(f64::NAN);
    r.line("6", spread <= 4.0, format!("residual / tail-rate spread over n_max 8..64 = {spread:.3} (within 4)"));
    for cell in ["1,1/2,1/2,1/4", "1/2,1/2,1/4,1/4"] {
        let c = parse_cell(Rule::Mixed, cell).map_err(|f| f.message).expect("cell parses");
        let rows: Vec<tfkit_cli::scan::ScanRow> = [32usize, 64, 128, 256]
            .iter()
            .map(|&n| tfkit_cli::scan::ScanRow {
                n,
                operator: cell.into(),
                p: 0.0,
                q: 0.0,
                s: 0.0,
                ratio: leibniz_max(Rule::Mixed, Q::from_integer(1), Q::from_integer(1), &c, n, 20, SEED).unwrap_or(f64::NAN),
            })
            .collect();
        let slope = loglog_slope(&rows);
        r.line("6", slope <= SLOPE_CAP, format!("mixed-norm cell {cell}: slope {slope:+.4} over sides 32..256"));
    }
}

fn criterion_7(r: &mut Report) {
    let a = tfkit(&["--threads", "1", "verify"]);
    let b = tfkit(&["--threads", "8", "verify"]);
    r.line(
        "7",
        code(&a) == 0 && a.stdout == b.stdout && !a.stdout.is_empty(),
        format!("verify with 1 and 8 threads: {} and {} bytes, identical = {}", a.stdout.len(), b.stdout.len(), a.stdout == b.stdout),
    );
}

fn cli_contract(r: &mut Report, dir: &Path) {
    let o = tfkit(&["range", "bht", "1/2", "1/2"]);
    r.line("cli", String::from_utf8_lossy(&o.stdout).trim() == "in", "range bht 1/2 1/2 -> in");
    let o = tfkit(&["range", "d", "3/4", "3/4", "1/2", "1/2"]);
    r.line("cli", String::from_utf8_lossy(&o.stdout).trim() == "outside-coverage", "two reciprocals above 1/2 -> outside-coverage");

    let csv = dir.join("s.csv");
    std::fs::write(&csv, "# N=8 axes=1\nre,im\n1.0,0.0\n0.0,1.0\n-1.0,0.0\n0.25,-0.5\n0.1,0.2\n-3.5,1e-7\n0.0,0.0\n2.0,-2.0\n").expect("write csv");
    let (bin, back) = (dir.join("s.bin"), dir.join("t.csv"));
    let a = tfkit(&["signal-io", csv.to_str().unwrap(), bin.to_str().unwrap()]);
    let b = tfkit(&["signal-io", bin.to_str().unwrap(), back.to_str().unwrap()]);
    let same = std::fs::read(&csv).ok() == std::fs::read(&back).ok();
    r.line("cli", code(&a) == 0 && code(&b) == 0 && same, "signal-io csv -> bin -> csv round trip");

    r.line("cli", code(&tfkit(&["range", "bht", "x", "1/2"])) == 3, "malformed query exits 3");
    r.line("cli", code(&tfkit(&["no-such-command"])) == 3, "unknown subcommand exits 3");
    let missing = dir.join("missing.csv");
    r.line("cli", code(&tfkit(&["signal-io", missing.to_str().unwrap(), bin.to_str().unwrap()])) == 4, "missing input exits 4");
    r.line("cli", code(&tfkit(&["verify", "--fault", "dft"])) == 1, "injected dft fault exits 1");

    // a baseline whose constants are all doubled drifts
    let c = ctx(DEFAULT_TRIALS);
    let rows = run_suites(&c, None);
    let mut base = baseline_of(&c, &rows);
    base.constants.values_mut().for_each(|v| *v *= 2.0);
    let path = dir.join("drifted.json");
    std::fs::write(&path, serde_json::to_string(&base).expect("json")).expect("write baseline");
    r.line("cli", code(&tfkit(&["verify", "--baseline", path.to_str().unwrap()])) == 2, "drifted baseline exits 2");
    r.line("cli", code(&tfkit(&["verify"])) == 0, "built-in baseline exits 0");
}

fn main() {
    let mut r = Report { failed: 0 };
    let dir = tempfile::tempdir().expect("temp dir");
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    cli_contract(&mut r, dir.path());
    println!("{} criteria failed", r.failed);
    if r.failed > 0 {
        std::process::exit(1);
    }
}
