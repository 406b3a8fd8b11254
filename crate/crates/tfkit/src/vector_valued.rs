//! Exponent-range predicates, vector-valued application of bilinear operators, Rubio de
//! Francia operators, `T_r`, and the iterated Fourier integrals `M`, `M₁`, `M₂` split along
//! the filtration generated by `g`.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{cis, freq_rep, lr_combine, GridSpec, Signal1D, SignalFamily, C64};
use crate::operators::bht_direct;
use crate::wavepacket::{fourier_project, FreqInterval};

pub type Q = Rational64;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Exact rational from `"a/b"`, an integer, or a finite decimal such as `"-0.6"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.contains('/') {
        return s.parse::<Q>().map_err(|_| bad());
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 17 {
        return Err(bad());
    }
    let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let digits = format!("{int}{frac}");
    let num: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let v = Q::new(num, den);
    Ok(if neg { -v } else { v })
}

/// `(1/p, 1/q, 1/s′)` on the Hölder plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangePoint {
    pub inv_p: Q,
    pub inv_q: Q,
    pub inv_sprime: Q,
}

impl RangePoint {
    pub fn new(inv_p: Q, inv_q: Q, inv_sprime: Q) -> Result<Self> {
        if inv_p + inv_q + inv_sprime != Q::one() {
            return Err(Error::Domain(format!("({inv_p}, {inv_q}, {inv_sprime}) is off the plane Σ = 1")));
        }
        Ok(Self { inv_p, inv_q, inv_sprime })
    }

    /// Point with `1/s′ = 1 − 1/p − 1/q`.
    pub fn from_pq(inv_p: Q, inv_q: Q) -> Self {
        Self { inv_p, inv_q, inv_sprime: Q::one() - inv_p - inv_q }
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [ratio_f64(self.inv_p), ratio_f64(self.inv_q), ratio_f64(self.inv_sprime)]
    }
}

impl fmt::Display for RangePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.inv_p, self.inv_q, self.inv_sprime)
    }
}

pub fn ratio_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `(1/r₁, 1/r₂, 1/r′)` with `1/r₁ + 1/r₂ = 1/r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleR {
    pub inv_r1: Q,
    pub inv_r2: Q,
    pub inv_rprime: Q,
}

impl TupleR {
    pub fn new(inv_r1: Q, inv_r2: Q, inv_rprime: Q) -> Result<Self> {
        let unit = Q::zero()..Q::one();
        let ok = inv_r1 + inv_r2 + inv_rprime == Q::one()
            && unit.contains(&inv_r1)
            && unit.contains(&inv_r2)
            && inv_rprime >= Q::zero()
            && inv_rprime <= Q::one();
        if !ok {
            return Err(Error::Domain(format!("({inv_r1}, {inv_r2}, {inv_rprime}) is not an admissible exponent tuple")));
        }
        Ok(Self { inv_r1, inv_r2, inv_rprime })
    }

    /// From `(r₁, r₂)` given as reciprocals; `r` follows from Hölder.
    pub fn from_r1_r2(inv_r1: Q, inv_r2: Q) -> Result<Self> {
        Self::new(inv_r1, inv_r2, Q::one() - inv_r1 - inv_r2)
    }

    pub fn inv_r(&self) -> Q {
        self.inv_r1 + self.inv_r2
    }

    /// The tuple read as a point `(1/r₁, 1/r₂, 1/r′)` of the Hölder plane.
    pub fn as_point(&self) -> RangePoint {
        RangePoint { inv_p: self.inv_r1, inv_q: self.inv_r2, inv_sprime: self.inv_rprime }
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [ratio_f64(self.inv_r1), ratio_f64(self.inv_r2), ratio_f64(self.inv_rprime)]
    }
}

impl fmt::Display for TupleR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.inv_r1, self.inv_r2, self.inv_rprime)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeAnswer {
    In,
    Out,
    /// No theorem decides the point.
    OutsideCoverage,
}

impl RangeAnswer {
    fn from_bool(b: bool) -> Self {
        if b {
            RangeAnswer::In
        } else {
            RangeAnswer::Out
        }
    }
}

/// `0 ≤ 1/p < 1`, `0 ≤ 1/q < 1`, `0 < 1/p + 1/q < 3/2`.
pub fn range_bht(pt: &RangePoint) -> bool {
    let (a, b) = (pt.inv_p, pt.inv_q);
    let (zero, one) = (Q::zero(), Q::one());
    a >= zero && a < one && b >= zero && b < one && a + b > zero && a + b < q(3, 2)
}

/// Which reciprocal of the tuple exceeds `1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeCase {
    /// local `L²`: all three at most `1/2`
    I,
    /// `1/r₁ > 1/2`
    II,
    /// `1/r₂ > 1/2`
    III,
    /// `1/r′ > 1/2`
    IV,
}

pub fn range_case(r: &TupleR) -> Option<RangeCase> {
    let half = q(1, 2);
    let big = [r.inv_r1 > half, r.inv_r2 > half, r.inv_rprime > half];
    match big {
        [false, false, false] => Some(RangeCase::I),
        [true, false, false] => Some(RangeCase::II),
        [false, true, false] => Some(RangeCase::III),
        [false, false, true] => Some(RangeCase::IV),
        _ => None,
    }
}

/// Three-valued membership in `𝒟_{r₁,r₂,r}`.
pub fn range_d_answer(r: &TupleR, pt: &RangePoint) -> RangeAnswer {
    let zero = Q::zero();
    let Some(case) = range_case(r) else {
        return RangeAnswer::OutsideCoverage;
    };
    let bht = range_bht(pt);
    RangeAnswer::from_bool(match case {
        RangeCase::I => bht,
        RangeCase::II => bht && pt.inv_q >= zero && pt.inv_q < q(3, 2) - r.inv_r1,
        RangeCase::III => bht && pt.inv_p >= zero && pt.inv_p < q(3, 2) - r.inv_r2,
        RangeCase::IV => {
            let cap = q(1, 2) + r.inv_r();
            bht && pt.inv_p >= zero
                && pt.inv_q >= zero
                && pt.inv_p < cap
                && pt.inv_q < cap
                && -r.inv_r() < pt.inv_sprime
                && pt.inv_sprime < Q::one()
        }
    })
}

/// Membership in `𝒟_{r₁,r₂,r}`; points of tuples with two reciprocals above `1/2` are refused.
pub fn range_d(r: &TupleR, pt: &RangePoint) -> Result<bool> {
    match range_d_answer(r, pt) {
        RangeAnswer::In => Ok(true),
        RangeAnswer::Out => Ok(false),
        RangeAnswer::OutsideCoverage => Err(Error::Refused(format!("tuple {r} is outside theorem coverage"))),
    }
}

/// Range of the iterated space `L^{R}`: equal to `𝒟` of its outermost tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IteratedRange {
    pub outer: TupleR,
}

impl IteratedRange {
    pub fn contains(&self, pt: &RangePoint) -> Result<bool> {
        range_d(&self.outer, pt)
    }
}

/// Chain check for `L^p(L^{R[0]}(L^{R[1]}(…)))`: each `R[j]`, read as a point, must lie in
/// `𝒟_{R[j+1]}`. The error names the first failing `j`.
pub fn range_d_iterated(rs: &[TupleR]) -> Result<IteratedRange> {
    let outer = *rs.first().ok_or_else(|| Error::Domain("empty tuple chain".into()))?;
    for (j, w) in rs.windows(2).enumerate() {
        match range_d_answer(&w[1], &w[0].as_point()) {
            RangeAnswer::In => {}
            RangeAnswer::Out => {
                return Err(Error::Precondition(format!("chain link {j}: {} is not in the range of {}", w[0], w[1])))
            }
            RangeAnswer::OutsideCoverage => {
                return Err(Error::Refused(format!("chain link {j}: tuple {} is outside theorem coverage", w[1])))
            }
        }
    }
    Ok(IteratedRange { outer })
}

/// Boundedness range of `T_r`; `r` is given as `1/r ∈ (0, 1]`.
pub fn range_tr(inv_r: Q, pt: &RangePoint) -> Result<bool> {
    if inv_r <= Q::zero() || inv_r > Q::one() {
        return Err(Error::Domain(format!("need 1 ≤ r < ∞, got 1/r = {inv_r}")));
    }
    if inv_r <= q(1, 2) {
        return Ok(range_bht(pt));
    }
    let cap = q(1, 2) + inv_r;
    let inv_rprime = Q::one() - inv_r;
    let zero = Q::zero();
    Ok(pt.inv_p >= zero
        && pt.inv_q >= zero
        && pt.inv_p < cap
        && pt.inv_q < cap
        && -inv_rprime < pt.inv_sprime
        && pt.inv_sprime < Q::one())
}

/// Points `(a/d, b/d, 1 − (a+b)/d)` with `−d ≤ a, b ≤ 2d`.
pub fn rational_lattice(d: i64) -> Vec<RangePoint> {
    let mut out = Vec::new();
    for a in -d..=2 * d {
        for b in -d..=2 * d {
            out.push(RangePoint::from_pq(q(a, d), q(b, d)));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Vector-valued application

fn map_pair(
    op: &(dyn Fn(&Signal1D, &Signal1D) -> Result<Signal1D> + Sync),
    f: &SignalFamily,
    g: &SignalFamily,
) -> Result<SignalFamily> {
    match (f, g) {
        (SignalFamily::Flat(a), SignalFamily::Flat(b)) if a.len() == b.len() => {
            let out = a.par_iter().zip(b.par_iter()).map(|(x, y)| op(x, y)).collect::<Result<Vec<_>>>()?;
            SignalFamily::flat(out)
        }
        (SignalFamily::Nested(a), SignalFamily::Nested(b)) if a.len() == b.len() => {
            let out = a.iter().zip(b).map(|(x, y)| map_pair(op, x, y)).collect::<Result<Vec<_>>>()?;
            SignalFamily::nested(out)
        }
        _ => Err(Error::Domain("families differ in length or nesting".into())),
    }
}

/// `(Σ_k |op(f_k, g_k)|^r)^{1/r}` pointwise, iterated for nested families (`rs[0]` innermost).
pub fn vv_apply(
    op: &(dyn Fn(&Signal1D, &Signal1D) -> Result<Signal1D> + Sync),
    f: &SignalFamily,
    g: &SignalFamily,
    rs: &[f64],
) -> Result<Vec<f64>> {
    map_pair(op, f, g)?.lr_pointwise(rs)
}

// ---------------------------------------------------------------------------
// Rubio de Francia and T_r

/// Pairwise disjoint closed frequency intervals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalFamily {
    intervals: Vec<FreqInterval>,
}

impl IntervalFamily {
    pub fn new(intervals: Vec<FreqInterval>) -> Result<Self> {
        for (i, a) in intervals.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Domain(format!("empty interval [{}, {}]", a.lo, a.hi)));
            }
            if let Some(b) = intervals[i + 1..].iter().find(|b| a.overlaps(b)) {
                return Err(Error::Domain(format!("intervals [{}, {}] and [{}, {}] overlap", a.lo, a.hi, b.lo, b.hi)));
            }
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[FreqInterval] {
        &self.intervals
    }

    /// The whole band `(−N/2, N/2]`.
    pub fn full_band(grid: GridSpec) -> Self {
        let n = grid.size() as i64;
        Self { intervals: vec![FreqInterval::new(-n / 2 + 1, n / 2)] }
    }

    /// `[2^k, 2^{k+1} − 1]` and its mirror for `k = 0..L−1`, plus `{0}`.
    pub fn lacunary(grid: GridSpec) -> Self {
        let n = grid.size() as i64;
        let mut v = vec![FreqInterval::new(0, 0)];
        let mut a = 1;
        while a < n / 2 {
            v.push(FreqInterval::new(a, (2 * a - 1).min(n / 2)));
            v.push(FreqInterval::new(-(2 * a - 1).min(n / 2 - 1), -a));
            a *= 2;
        }
        v.push(FreqInterval::new(n / 2, n / 2));
        Self { intervals: v }
    }
}

/// `(Σ_k |P_{I_k} f|^ν)^{1/ν}` with sharp projections.
pub fn rf_operator(f: &Signal1D, ks: &IntervalFamily, nu: f64) -> Result<Vec<f64>> {
    let rows: Vec<Vec<f64>> = ks.intervals.par_iter().map(|iv| fourier_project(f, iv, true).abs()).collect();
    lr_combine(&rows, nu)
}

/// `(Σ_k |BHT(P_{I_k}f, P_{I_k}g)|^r)^{1/r}`.
pub fn t_r(f: &Signal1D, g: &Signal1D, ks: &IntervalFamily, r: f64) -> Result<Vec<f64>> {
    f.same_grid(g)?;
    let rows = ks
        .intervals
        .par_iter()
        .map(|iv| Ok(bht_direct(&fourier_project(f, iv, true), &fourier_project(g, iv, true))?.abs()))
        .collect::<Result<Vec<_>>>()?;
    lr_combine(&rows, r)
}

/// Largest grid for the nested-region double sum.
pub const T_R_ORACLE_MAX: usize = 64;

/// `T_r` from the nested double sums over `a_k ≤ ξ₁ < ξ₂ ≤ b_k`.
pub fn t_r_oracle(f: &Signal1D, g: &Signal1D, ks: &IntervalFamily, r: f64) -> Result<Vec<f64>> {
    f.same_grid(g)?;
    let n = f.len();
    if n > T_R_ORACLE_MAX {
        return Err(Error::Refused(format!("nested oracle capped at N = {T_R_ORACLE_MAX}")));
    }
    let (fh, gh) = (f.spectrum(), g.spectrum());
    let bin = |k: i64| crate::grid::freq_bin(k, n);
    let rows: Vec<Vec<f64>> = ks
        .intervals
        .iter()
        .map(|iv| {
            (0..n)
                .map(|x| {
                    let t = x as f64 / n as f64;
                    let mut s = C64::new(0.0, 0.0);
                    for a in iv.lo..=iv.hi {
                        for b in a + 1..=iv.hi {
                            s += fh[bin(a)] * gh[bin(b)] * cis((a + b) as f64 * t);
                        }
                    }
                    (s / (n * n) as f64).norm()
                })
                .collect()
        })
        .collect();
    lr_combine(&rows, r)
}

// ---------------------------------------------------------------------------
// Filtration and the operators M, M₁, M₂

/// Dyadic `ω = [m 2^{-j}, (m+1) 2^{-j}) ⊆ [0, 1]`; the last interval of each level is closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnitDyadic {
    pub j: u32,
    pub m: u128,
}

/// Deepest level the resolvers descend to.
pub const FILTRATION_MAX_LEVEL: u32 = 120;

impl UnitDyadic {
    pub fn start(&self) -> f64 {
        self.m as f64 * 2f64.powi(-(self.j as i32))
    }

    pub fn end(&self) -> f64 {
        (self.m + 1) as f64 * 2f64.powi(-(self.j as i32))
    }

    pub fn left(&self) -> UnitDyadic {
        UnitDyadic { j: self.j + 1, m: 2 * self.m }
    }

    pub fn right(&self) -> UnitDyadic {
        UnitDyadic { j: self.j + 1, m: 2 * self.m + 1 }
    }

    pub fn contains(&self, v: f64) -> bool {
        let last = self.m + 1 == 1u128 << self.j;
        v >= self.start() && (v < self.end() || (last && v <= 1.0 + 1e-9))
    }
}

/// Step function `φ(x_n) = (1/N) Σ_{m ≤ n} |g_m|^p` of the normalized `g`.
#[derive(Clone, Debug)]
pub struct Filtration {
    phi: Vec<f64>,
}

impl Filtration {
    /// `g` is normalized to `‖g‖_p = 1` first.
    pub fn new(g: &Signal1D, p: f64) -> Result<Self> {
        if p.is_nan() || p <= 0.0 || p.is_infinite() {
            return Err(Error::Domain(format!("filtration exponent must be finite and positive, got {p}")));
        }
        let norm = g.lp_norm(p)?;
        if norm == 0.0 {
            return Err(Error::Domain("filtration of the zero function".into()));
        }
        let n = g.len() as f64;
        let mut acc = 0.0;
        let phi = g
            .samples()
            .iter()
            .map(|z| {
                acc += (z.norm() / norm).powf(p) / n;
                acc
            })
            .collect();
        Ok(Self { phi })
    }

    pub fn values(&self) -> &[f64] {
        &self.phi
    }

    /// Grid indices `[s, e)` with `φ ∈ ω`; contiguous because `φ` is nondecreasing.
    pub fn preimage(&self, w: &UnitDyadic) -> (usize, usize) {
        let s = self.phi.partition_point(|&v| v < w.start());
        let e = self.phi.partition_point(|&v| v < w.end());
        let last = w.m + 1 == 1u128 << w.j;
        (s, if last { self.phi.len() } else { e })
    }

    /// The unique `ω` with `φ(x₂) ∈ ω_L`, `φ(x₃) ∈ ω_R`; `None` when `φ(x₂) = φ(x₃)`.
    pub fn resolve_pair(&self, x2: usize, x3: usize) -> Result<Option<UnitDyadic>> {
        if x2 >= x3 || x3 >= self.phi.len() {
            return Err(Error::Domain(format!("need x2 < x3 < N, got ({x2}, {x3})")));
        }
        let (v2, v3) = (self.phi[x2], self.phi[x3]);
        if v2 >= v3 {
            return Ok(None);
        }
        let mut w = UnitDyadic { j: 0, m: 0 };
        while w.j < FILTRATION_MAX_LEVEL {
            let (l, r) = (w.left(), w.right());
            let (in2, in3) = (l.contains(v2), l.contains(v3));
            match (in2, in3) {
                (true, false) => return Ok(Some(w)),
                (true, true) => w = l,
                _ => w = r,
            }
        }
        Err(Error::NonTermination(format!("pair ({x2}, {x3}) not separated above level {FILTRATION_MAX_LEVEL}")))
    }

    /// Every `ω` whose halves both have nonempty preimages, in depth-first order.
    pub fn split_intervals(&self) -> Vec<UnitDyadic> {
        let mut out = Vec::new();
        let mut stack = vec![UnitDyadic { j: 0, m: 0 }];
        while let Some(w) = stack.pop() {
            let (s, e) = self.preimage(&w);
            if e <= s + 1 || self.phi[s] == self.phi[e - 1] || w.j >= FILTRATION_MAX_LEVEL {
                continue;
            }
            let (l, r) = (w.left(), w.right());
            let (ls, le) = self.preimage(&l);
            let (rs, re) = self.preimage(&r);
            if le > ls && re > rs {
                out.push(w);
            }
            stack.push(r);
            stack.push(l);
        }
        out
    }
}

/// Largest grid for the brute-force triple sum.
pub const M_BRUTE_MAX: usize = 64;

fn phase_table(n: usize, xi: i64) -> Vec<C64> {
    (0..n).map(|x| cis(xi as f64 * x as f64 / n as f64)).collect()
}

fn m_inputs(f1: &Signal1D, f2: &Signal1D, g: &Signal1D) -> Result<usize> {
    f1.same_grid(f2)?;
    f1.same_grid(g)?;
    Ok(f1.len())
}

/// Output sample `b` holds the value at `ξ = freq_rep(b)`.
fn per_frequency(grid: GridSpec, h: impl Fn(i64) -> C64 + Sync) -> Result<Signal1D> {
    let n = grid.size();
    let v: Vec<C64> = (0..n).into_par_iter().map(|b| h(freq_rep(b, n))).collect();
    Signal1D::new(grid, v)
}

/// `M(ξ) = N^{-3} Σ_{x₁<x₂<x₃} a₁(x₁) a₂(x₂) g(x₃) e^{2πiξ(x₁+x₂+x₃)/N}` where `a₁, a₂` are
/// the samples of `f1, f2` (they play the role of `f̂₁, f̂₂`). Sample `b` of the output holds
/// `ξ = freq_rep(b)`.
pub fn m_operator(f1: &Signal1D, f2: &Signal1D, g: &Signal1D) -> Result<Signal1D> {
    let n = m_inputs(f1, f2, g)?;
    if n > M_BRUTE_MAX {
        return Err(Error::Refused(format!("triple sum capped at N = {M_BRUTE_MAX}")));
    }
    let (a, b, c) = (f1.samples(), f2.samples(), g.samples());
    per_frequency(f1.grid(), |xi| {
        let e = phase_table(n, xi);
        let mut s = C64::new(0.0, 0.0);
        for x1 in 0..n {
            for x2 in x1 + 1..n {
                let p = a[x1] * e[x1] * b[x2] * e[x2];
                for x3 in x2 + 1..n {
                    s += p * c[x3] * e[x3];
                }
            }
        }
        s / (n * n * n) as f64
    })
}

/// Which part of the split of `M` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    /// `x₁ ∈ φ^{-1}(ω_L)`
    One,
    /// `x₁` before the start of `φ^{-1}(ω_L)`
    Two,
}

fn m_part_region(f1: &Signal1D, f2: &Signal1D, g: &Signal1D, p: f64, part: Part) -> Result<Signal1D> {
    let n = m_inputs(f1, f2, g)?;
    let filt = Filtration::new(g, p)?;
    let mut pairs = Vec::new();
    for x2 in 0..n {
        for x3 in x2 + 1..n {
            if let Some(w) = filt.resolve_pair(x2, x3)? {
                let (s, _) = filt.preimage(&w.left());
                let range = match part {
                    Part::One => s..x2,
                    Part::Two => 0..s,
                };
                pairs.push((range, x2, x3));
            }
        }
    }
    let (a, b, c) = (f1.samples(), f2.samples(), g.samples());
    per_frequency(f1.grid(), |xi| {
        let e = phase_table(n, xi);
        let mut s = C64::new(0.0, 0.0);
        for (range, x2, x3) in &pairs {
            let inner: C64 = range.clone().map(|x1| a[x1] * e[x1]).sum();
            s += inner * b[*x2] * e[*x2] * c[*x3] * e[*x3];
        }
        s / (n * n * n) as f64
    })
}

/// `M₁` as a region sum over pairs `(x₂, x₃)` resolved by the filtration of `g` in `L^p`.
pub fn m1_operator(f1: &Signal1D, f2: &Signal1D, g: &Signal1D, p: f64) -> Result<Signal1D> {
    m_part_region(f1, f2, g, p, Part::One)
}

/// `M₂`: the pairs of `M₁` with `x₁` before the start of `φ^{-1}(ω_L)`.
pub fn m2_operator(f1: &Signal1D, f2: &Signal1D, g: &Signal1D, p: f64) -> Result<Signal1D> {
    m_part_region(f1, f2, g, p, Part::Two)
}

/// `N^{-2} Σ_{x₁<x₂, both in [s,e)} a(x₁) b(x₂) e^{2πiξ(x₁+x₂)/N}`.
fn ordered_bilinear(a: &[C64], b: &[C64], e: &[C64], s: usize, end: usize) -> C64 {
    let mut prefix = C64::new(0.0, 0.0);
    let mut out = C64::new(0.0, 0.0);
    for x in s..end {
        out += prefix * b[x] * e[x];
        prefix += a[x] * e[x];
    }
    let n = a.len() as f64;
    out / (n * n)
}

/// `M₁ = Σ_ω BHT(P_{ω_L} f₁, P_{ω_L} f₂)(ξ) · (g 1_{ω_R})^(ξ)`, the bilinear factor being the
/// index-ordered sum over `φ^{-1}(ω_L)`.
pub fn m1_operator_bht(f1: &Signal1D, f2: &Signal1D, g: &Signal1D, p: f64) -> Result<Signal1D> {
    let n = m_inputs(f1, f2, g)?;
    let filt = Filtration::new(g, p)?;
    let omegas: Vec<((usize, usize), (usize, usize))> =
        filt.split_intervals().iter().map(|w| (filt.preimage(&w.left()), filt.preimage(&w.right()))).collect();
    let (a, b, c) = (f1.samples(), f2.samples(), g.samples());
    per_frequency(f1.grid(), |xi| {
        let e = phase_table(n, xi);
        omegas
            .iter()
            .map(|&((ls, le), (rs, re))| {
                let gh: C64 = (rs..re).map(|x| c[x] * e[x]).sum::<C64>() / n as f64;
                ordered_bilinear(a, b, &e, ls, le) * gh
            })
            .sum()
    })
}
