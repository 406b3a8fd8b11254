//! Fractional Leibniz rules in one parameter, two parameters and mixed norms, and the
//! paraproduct reconstruction of `D^α(f·g)` through shifted symbols.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grid::{cis, fft_in_place, freq_rep, Signal1D, Signal2D, C64};
use crate::vector_valued::{ratio_f64, Q};
use crate::wavepacket::{lp_band, lp_low, LP_WINDOW};

/// Reciprocal exponents `(1/p, 1/q)` of one product on the right side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct HolderTerm {
    pub inv_p: Q,
    pub inv_q: Q,
}

impl HolderTerm {
    pub fn new(inv_p: Q, inv_q: Q) -> Self {
        Self { inv_p, inv_q }
    }
}

/// `1/s` and one term per summand: two in one parameter, four in two.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ScalarExponents {
    pub inv_s: Q,
    pub terms: Vec<HolderTerm>,
}

impl ScalarExponents {
    /// Every term equal to `(1/p, 1/s - 1/p)`.
    pub fn uniform(inv_s: Q, inv_p: Q, count: usize) -> Self {
        Self { inv_s, terms: vec![HolderTerm::new(inv_p, inv_s - inv_p); count] }
    }
}

/// `(1/s₁, 1/s₂)` and, for each of the four terms, the x- and y-reciprocals.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MixedExponents {
    pub inv_s: [Q; 2],
    pub terms: [[HolderTerm; 2]; 4],
}

impl MixedExponents {
    pub fn uniform(inv_s: [Q; 2], inv_p: [Q; 2]) -> Self {
        let t = [
            HolderTerm::new(inv_p[0], inv_s[0] - inv_p[0]),
            HolderTerm::new(inv_p[1], inv_s[1] - inv_p[1]),
        ];
        Self { inv_s, terms: [t; 4] }
    }
}

#[derive(Clone, Debug)]
pub struct LeibnizInstance<S, E> {
    pub f: S,
    pub g: S,
    pub alpha: Q,
    /// Order along y; unused in one parameter.
    pub beta: Q,
    pub exponents: E,
}

pub type Instance1D = LeibnizInstance<Signal1D, ScalarExponents>;
pub type Instance2D = LeibnizInstance<Signal2D, ScalarExponents>;
pub type InstanceMixed = LeibnizInstance<Signal2D, MixedExponents>;

fn fail(msg: String) -> Error {
    Error::Precondition(msg)
}

fn check_order(name: &str, v: Q, allow_zero: bool) -> Result<()> {
    if v < Q::zero() || (!allow_zero && v.is_zero()) {
        let want = if allow_zero { ">= 0" } else { "> 0" };
        return Err(fail(format!("{name} {want} fails: {name} = {v}")));
    }
    Ok(())
}

/// `1 < p ≤ ∞` read on the reciprocal.
fn check_lebesgue(label: &str, inv: Q) -> Result<()> {
    if inv < Q::zero() || inv >= Q::one() {
        return Err(fail(format!("1 < {label} <= inf fails: 1/{label} = {inv}")));
    }
    Ok(())
}

fn check_holder(idx: usize, axis: &str, t: &HolderTerm, inv_s: Q) -> Result<()> {
    check_lebesgue(&format!("p{idx}{axis}"), t.inv_p)?;
    check_lebesgue(&format!("q{idx}{axis}"), t.inv_q)?;
    if t.inv_p + t.inv_q != inv_s {
        return Err(fail(format!(
            "Hoelder 1/p{idx}{axis} + 1/q{idx}{axis} = 1/s fails: {} + {} != {inv_s}",
            t.inv_p, t.inv_q
        )));
    }
    Ok(())
}

/// `1/(1+a) < s` read as `1/s < 1 + a`.
fn check_lower(label: &str, inv_s: Q, order: Q, order_name: &str) -> Result<()> {
    if inv_s >= Q::one() + order {
        return Err(fail(format!("{label} > 1/(1+{order_name}) fails: 1/{label} = {inv_s}, {order_name} = {order}")));
    }
    Ok(())
}

fn check_finite(label: &str, inv_s: Q) -> Result<()> {
    if inv_s <= Q::zero() {
        return Err(fail(format!("{label} < inf fails: 1/{label} = {inv_s}")));
    }
    Ok(())
}

pub fn admissible_1d(alpha: Q, e: &ScalarExponents) -> Result<()> {
    check_order("alpha", alpha, false)?;
    if e.terms.len() != 2 {
        return Err(fail(format!("one-parameter rule has 2 terms, got {}", e.terms.len())));
    }
    check_finite("s", e.inv_s)?;
    check_lower("s", e.inv_s, alpha, "alpha")?;
    for (i, t) in e.terms.iter().enumerate() {
        check_holder(i + 1, "", t, e.inv_s)?;
    }
    Ok(())
}

/// `β = 0` is accepted and means no derivative along y.
pub fn admissible_2d(alpha: Q, beta: Q, e: &ScalarExponents) -> Result<()> {
    check_order("alpha", alpha, false)?;
    check_order("beta", beta, true)?;
    if e.terms.len() != 4 {
        return Err(fail(format!("two-parameter rule has 4 terms, got {}", e.terms.len())));
    }
    check_finite("s", e.inv_s)?;
    check_lower("s", e.inv_s, alpha, "alpha")?;
    check_lower("s", e.inv_s, beta, "beta")?;
    for (i, t) in e.terms.iter().enumerate() {
        check_holder(i + 1, "", t, e.inv_s)?;
    }
    Ok(())
}

pub fn admissible_mixed(alpha: Q, beta: Q, e: &MixedExponents) -> Result<()> {
    check_order("alpha", alpha, false)?;
    check_order("beta", beta, true)?;
    let [s1, s2] = e.inv_s;
    check_finite("s1", s1)?;
    if s1 >= Q::from_integer(2) {
        return Err(fail(format!("s1 > 1/2 fails: 1/s1 = {s1}")));
    }
    check_lower("s1", s1, alpha, "alpha")?;
    check_lower("s1", s1, beta, "beta")?;
    check_finite("s2", s2)?;
    if s2 > Q::one() {
        return Err(fail(format!("s2 >= 1 fails: 1/s2 = {s2}")));
    }
    for (i, pair) in e.terms.iter().enumerate() {
        check_holder(i + 1, "x", &pair[0], s1)?;
        check_holder(i + 1, "y", &pair[1], s2)?;
    }
    Ok(())
}

fn exponent(inv: Q) -> f64 {
    if inv.is_zero() {
        f64::INFINITY
    } else {
        1.0 / ratio_f64(inv)
    }
}

/// `|ξ|^a`, with order zero the identity on every mode.
fn symbol(k: i64, a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        (k.abs() as f64).powf(a)
    }
}

fn deriv_1d(f: &Signal1D, a: f64) -> Signal1D {
    f.apply_real_multiplier(|k| symbol(k, a))
}

fn deriv_2d(f: &Signal2D, a: f64, b: f64) -> Signal2D {
    f.apply_multiplier(|kx, ky| C64::new(symbol(kx, a) * symbol(ky, b), 0.0))
}

/// Left sides below this multiple of `‖f‖_∞‖g‖_∞` count as exact zeros.
pub const ZERO_TOL: f64 = 1e-11;

fn sup(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn finish(lhs: f64, rhs: f64, scale: f64) -> Result<f64> {
    if lhs <= ZERO_TOL * scale {
        return Ok(0.0);
    }
    if rhs <= 0.0 {
        return Err(Error::Domain(format!("right side vanishes while left side is {lhs}")));
    }
    Ok(lhs / rhs)
}

/// `‖D^α(fg)‖_s / (‖D^α f‖_{p₁}‖g‖_{q₁} + ‖f‖_{p₂}‖D^α g‖_{q₂})`.
pub fn leibniz_ratio_1d(inst: &Instance1D) -> Result<f64> {
    admissible_1d(inst.alpha, &inst.exponents)?;
    inst.f.same_grid(&inst.g)?;
    let a = ratio_f64(inst.alpha);
    let e = &inst.exponents;
    let lhs = deriv_1d(&inst.f.mul(&inst.g)?, a).lp_norm(exponent(e.inv_s))?;
    let (df, dg) = (deriv_1d(&inst.f, a), deriv_1d(&inst.g, a));
    let [t1, t2] = [e.terms[0], e.terms[1]];
    let rhs = df.lp_norm(exponent(t1.inv_p))? * inst.g.lp_norm(exponent(t1.inv_q))?
        + inst.f.lp_norm(exponent(t2.inv_p))? * dg.lp_norm(exponent(t2.inv_q))?;
    finish(lhs, rhs, sup(inst.f.samples()) * sup(inst.g.samples()))
}

/// The four `(F, G)` factor pairs of the two-parameter right side.
fn four_pairs(f: &Signal2D, g: &Signal2D, a: f64, b: f64) -> [(Signal2D, Signal2D); 4] {
    [
        (deriv_2d(f, a, b), g.clone()),
        (f.clone(), deriv_2d(g, a, b)),
        (deriv_2d(f, a, 0.0), deriv_2d(g, 0.0, b)),
        (deriv_2d(f, 0.0, b), deriv_2d(g, a, 0.0)),
    ]
}

fn check_plane(f: &Signal2D, g: &Signal2D) -> Result<()> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch(f.samples().len(), g.samples().len()));
    }
    Ok(())
}

/// Four-term ratio with plane `L^p` norms.
pub fn leibniz_ratio_2d(inst: &Instance2D) -> Result<f64> {
    admissible_2d(inst.alpha, inst.beta, &inst.exponents)?;
    check_plane(&inst.f, &inst.g)?;
    let (a, b) = (ratio_f64(inst.alpha), ratio_f64(inst.beta));
    let e = &inst.exponents;
    let lhs = deriv_2d(&inst.f.mul(&inst.g)?, a, b).lp_norm(exponent(e.inv_s))?;
    let mut rhs = 0.0;
    for ((ff, gg), t) in four_pairs(&inst.f, &inst.g, a, b).iter().zip(&e.terms) {
        rhs += ff.lp_norm(exponent(t.inv_p))? * gg.lp_norm(exponent(t.inv_q))?;
    }
    finish(lhs, rhs, sup(inst.f.samples()) * sup(inst.g.samples()))
}

/// Four-term ratio in `L^{s₁}_x L^{s₂}_y`.
pub fn leibniz_ratio_mixed(inst: &InstanceMixed) -> Result<f64> {
    admissible_mixed(inst.alpha, inst.beta, &inst.exponents)?;
    check_plane(&inst.f, &inst.g)?;
    let (a, b) = (ratio_f64(inst.alpha), ratio_f64(inst.beta));
    let e = &inst.exponents;
    let lhs = deriv_2d(&inst.f.mul(&inst.g)?, a, b)
        .mixed_norm(exponent(e.inv_s[0]), exponent(e.inv_s[1]))?;
    let mut rhs = 0.0;
    for ((ff, gg), [tx, ty]) in four_pairs(&inst.f, &inst.g, a, b).iter().zip(&e.terms) {
        rhs += ff.mixed_norm(exponent(tx.inv_p), exponent(ty.inv_p))?
            * gg.mixed_norm(exponent(tx.inv_q), exponent(ty.inv_q))?;
    }
    finish(lhs, rhs, sup(inst.f.samples()) * sup(inst.g.samples()))
}

/// Half-width of the symbol window in units of `2^k`; the window is flat on `|u| ≤ R/2`.
pub const SHIFT_WINDOW: f64 = 8.0;
pub const DEFAULT_N_MAX: usize = 64;

/// `|u|^α` times the window, flat where every piece at its own scale lives (`|u| < 4`).
pub fn shift_symbol(alpha: f64, u: f64) -> f64 {
    u.abs().powf(alpha) * LP_WINDOW.profile(u / SHIFT_WINDOW)
}

/// Period in integer frequencies of the shift series at scale `k`.
pub fn shift_period(k: u32) -> usize {
    ((2.0 * SHIFT_WINDOW) as usize) << k
}

/// Coefficients `c_n`, indexed by `n mod P`, of the scale-`k` symbol
/// `ζ ↦ shift_symbol(ζ/2^k)` sampled on the integers of one period `P`.
pub fn shift_coefficients(alpha: f64, k: u32) -> Vec<C64> {
    let p = shift_period(k);
    let unit = (1u64 << k) as f64;
    let mut buf: Vec<C64> =
        (0..p).map(|j| C64::new(shift_symbol(alpha, freq_rep(j, p) as f64 / unit), 0.0)).collect();
    fft_in_place(&mut buf);
    let inv = 1.0 / p as f64;
    buf.iter_mut().for_each(|z| *z *= inv);
    buf
}

fn truncated_symbol(coeffs: &[C64], n_max: usize, zeta: i64) -> C64 {
    let p = coeffs.len();
    let half = (p / 2) as i64;
    let top = (n_max as i64).min(half - 1);
    let mut acc = C64::new(0.0, 0.0);
    for n in -top..=top {
        let c = coeffs[n.rem_euclid(p as i64) as usize];
        acc += c * cis((n * zeta) as f64 / p as f64);
    }
    // `n = -P/2` is its own alias and belongs to the series once `n_max` reaches it
    if n_max as i64 >= half {
        let c = coeffs[half as usize];
        acc += c * cis(-0.5 * zeta as f64);
    }
    acc
}

fn truncated_tail(coeffs: &[C64], n_max: usize) -> f64 {
    let p = coeffs.len();
    (0..p)
        .filter(|&j| freq_rep(j, p).unsigned_abs() as usize > n_max)
        .map(|j| coeffs[j].norm())
        .sum()
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct DecompositionCheck {
    /// `‖D^α(fg) − reconstruction‖_2`.
    pub residual: f64,
    pub direct_norm: f64,
    /// `Σ_k 2^{kα} (Σ_{|n|>n_max} |c_n^{(k)}|) ‖F_k‖_2`; dominates `residual`.
    pub tail_bound: f64,
    /// `max_{1≤n≤n_max} |c_n| n^{1+α}` over active scales.
    pub decay_constant: f64,
    /// `2C Σ_{n>n_max} n^{-(1+α)}` with `C = decay_constant`.
    pub analytic_tail: f64,
    /// `|c_n|`, `n = 0..=n_max`, at the finest active scale.
    pub coefficients: Vec<f64>,
    pub active_scales: Vec<u32>,
}

/// Spectra of `Σ` over the pieces assigned to scale `k`, `k = 0..=L`: low-high at
/// `b = k`, high-low at `a = k`, and diagonal `|a − b| ≤ 2` with `max(a, b, 0) = k`.
/// The pieces sum to `f·g` exactly.
pub fn scale_pieces(f: &Signal1D, g: &Signal1D) -> Result<Vec<Signal1D>> {
    f.same_grid(g)?;
    let grid = f.grid();
    let l = grid.log_size() as i32;
    // Δ_{-1} = P_0, Δ_a = Q_a
    let delta = |s: &Signal1D, a: i32| {
        if a < 0 {
            s.apply_real_multiplier(|k| lp_low(0, k as f64))
        } else {
            s.apply_real_multiplier(|k| lp_band(a, k as f64))
        }
    };
    let low = |s: &Signal1D, k: i32| s.apply_real_multiplier(|x| lp_low(k, x as f64));
    let df: Vec<Signal1D> = (-1..=l).map(|a| delta(f, a)).collect();
    let dg: Vec<Signal1D> = (-1..=l).map(|a| delta(g, a)).collect();
    let mut out = Vec::with_capacity(l as usize + 1);
    for k in 0..=l {
        let mut acc = Signal1D::zeros(grid);
        if k >= 2 {
            acc = acc.add(&low(f, k - 2).mul(&dg[(k + 1) as usize])?)?;
            acc = acc.add(&df[(k + 1) as usize].mul(&low(g, k - 2))?)?;
        }
        for a in -1..=l {
            for b in -1..=l {
                if (a - b).abs() <= 2 && a.max(b).max(0) == k {
                    acc = acc.add(&df[(a + 1) as usize].mul(&dg[(b + 1) as usize])?)?;
                }
            }
        }
        out.push(acc);
    }
    Ok(out)
}

fn top_octave_mass(f: &Signal1D) -> (f64, f64) {
    let n = f.len();
    let spec = f.spectrum();
    let total = sup(&spec);
    let top = spec
        .iter()
        .enumerate()
        .filter(|(j, _)| freq_rep(*j, n).unsigned_abs() as usize > n / 4)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    (top, total)
}

/// Rebuilds `D^α(fg)` as `Σ_k 2^{kα} Σ_{|n|≤n_max} c_n^{(k)} τ_{n/P_k} F_k`, where `F_k` are
/// the scale pieces and `τ_t` translates by `t` periods of the grid.
pub fn paraproduct_decomposition_check(
    f: &Signal1D,
    g: &Signal1D,
    alpha: f64,
    n_max: usize,
) -> Result<DecompositionCheck> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain(format!("order must be positive, got {alpha}")));
    }
    f.same_grid(g)?;
    for (name, s) in [("f", f), ("g", g)] {
        let (top, total) = top_octave_mass(s);
        if top > 1e-12 * total.max(f64::MIN_POSITIVE) {
            return Err(Error::Refused(format!(
                "{name} has spectrum above N/4 (max coefficient {top:.3e}); the product would alias"
            )));
        }
    }
    let n = f.len() as f64;
    let direct = deriv_1d(&f.mul(g)?, alpha);
    let pieces = scale_pieces(f, g)?;
    let mut recon = Signal1D::zeros(f.grid());
    let mut tail_bound = 0.0;
    let mut decay_constant: f64 = 0.0;
    let mut coefficients = vec![0.0; n_max + 1];
    let mut active = Vec::new();
    for (k, piece) in pieces.iter().enumerate() {
        let norm = piece.lp_norm(2.0)?;
        if norm <= 1e-14 * n {
            continue;
        }
        let k = k as u32;
        active.push(k);
        let coeffs = shift_coefficients(alpha, k);
        let gain = 2f64.powf(k as f64 * alpha);
        let shifted = piece.apply_multiplier(|z| truncated_symbol(&coeffs, n_max, z) * gain);
        recon = recon.add(&shifted)?;
        tail_bound += gain * truncated_tail(&coeffs, n_max) * norm;
        let p = coeffs.len();
        for (m, slot) in coefficients.iter_mut().enumerate() {
            let c = if m <= p / 2 { coeffs[m].norm() } else { 0.0 };
            *slot = c;
            if m >= 1 {
                decay_constant = decay_constant.max(c * (m as f64).powf(1.0 + alpha));
            }
        }
    }
    let residual = direct.sub(&recon)?.lp_norm(2.0)?;
    Ok(DecompositionCheck {
        residual,
        direct_norm: direct.lp_norm(2.0)?,
        tail_bound,
        decay_constant,
        analytic_tail: 2.0 * decay_constant * zeta_tail(1.0 + alpha, n_max),
        coefficients,
        active_scales: active,
    })
}

/// `Σ_{n>m} n^{-σ}`, bounded above by `∫_m^∞ x^{-σ} dx`.
pub fn zeta_tail(sigma: f64, m: usize) -> f64 {
    let m = m.max(1) as f64;
    m.powf(1.0 - sigma) / (sigma - 1.0)
}

/// Line-by-line check along `axis` (0 = x, 1 = y); residuals and bounds combine in `L²`
/// of the plane.
pub fn paraproduct_decomposition_check_2d(
    f: &Signal2D,
    g: &Signal2D,
    alpha: f64,
    axis: usize,
    n_max: usize,
) -> Result<DecompositionCheck> {
    check_plane(f, g)?;
    if axis > 1 {
        return Err(Error::Domain(format!("axis {axis} outside 0..2")));
    }
    let side = f.side();
    let line = |s: &Signal2D, i: usize| if axis == 0 { s.column(i) } else { s.row(i) };
    let mut res2 = 0.0;
    let mut dir2 = 0.0;
    let mut tail2 = 0.0;
    let mut out: Option<DecompositionCheck> = None;
    for i in 0..side {
        let c = paraproduct_decomposition_check(&line(f, i), &line(g, i), alpha, n_max)?;
        res2 += c.residual * c.residual;
        dir2 += c.direct_norm * c.direct_norm;
        tail2 += c.tail_bound * c.tail_bound;
        out = Some(match out {
            None => c,
            Some(mut acc) => {
                acc.decay_constant = acc.decay_constant.max(c.decay_constant);
                acc.analytic_tail = acc.analytic_tail.max(c.analytic_tail);
                if c.active_scales.last() > acc.active_scales.last() {
                    acc.coefficients = c.coefficients;
                }
                for k in c.active_scales {
                    if !acc.active_scales.contains(&k) {
                        acc.active_scales.push(k);
                    }
                }
                acc
            }
        });
    }
    let mut c = out.ok_or_else(|| Error::Domain("empty plane".into()))?;
    let m = side as f64;
    c.residual = (res2 / m).sqrt();
    c.direct_norm = (dir2 / m).sqrt();
    c.tail_bound = (tail2 / m).sqrt();
    c.active_scales.sort_unstable();
    Ok(c)
}
