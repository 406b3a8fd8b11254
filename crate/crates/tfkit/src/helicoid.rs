//! Exceptional sets, scaled-distance classes, the greedy stopping-time selection of maximal
//! dyadic intervals, triple stopping times, localized trilinear forms and numerical checks
//! of the induction statements `𝒫(0)`, `𝒫(1)`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{restrict, restrict_indices, DyadicInterval, TileSet};
use crate::error::{Error, Result};
use crate::grid::{lp_mean, GridSpec, Signal1D, C64};
use crate::operators::{check_theta, trilinear_form, TrilinearValue};
use crate::rng::trial_rng;
use crate::size_energy::{localized_average, maximal_of, modified_size};
use crate::vector_valued::{ratio_f64, TupleR};
use crate::wavepacket::{PacketCache, Window};

fn measure(mask: &[f64]) -> f64 {
    mask.iter().sum::<f64>() / mask.len().max(1) as f64
}

fn check_mask(mask: &[f64], grid: GridSpec, what: &str) -> Result<()> {
    if mask.len() != grid.size() {
        return Err(Error::GridMismatch(grid.size(), mask.len()));
    }
    if mask.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Domain(format!("{what} must be a 0/1 indicator")));
    }
    Ok(())
}

/// `Ω = {ℳ1_F > C|F|} ∪ {ℳ1_G > C|G|}` with the dyadic maximal function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub mask: Vec<f64>,
    pub constant: f64,
    pub measure: f64,
}

/// Largest constant tried by the doubling search.
pub const EXCEPTIONAL_MAX_C: f64 = 1099511627776.0; // 2^40

pub fn exceptional_at(f_mask: &[f64], g_mask: &[f64], c: f64) -> ExceptionalSet {
    let (mf, mg) = (maximal_of(f_mask), maximal_of(g_mask));
    let (tf, tg) = (c * measure(f_mask), c * measure(g_mask));
    let mask: Vec<f64> =
        mf.iter().zip(&mg).map(|(a, b)| if *a > tf || *b > tg { 1.0 } else { 0.0 }).collect();
    let m = measure(&mask);
    ExceptionalSet { mask, constant: c, measure: m }
}

/// Doubles `C` from 1 until `|Ω| ≤ budget`.
pub fn exceptional_set(f_mask: &[f64], g_mask: &[f64], budget: f64) -> Result<ExceptionalSet> {
    if f_mask.len() != g_mask.len() {
        return Err(Error::GridMismatch(f_mask.len(), g_mask.len()));
    }
    if measure(f_mask) == 0.0 || measure(g_mask) == 0.0 {
        return Err(Error::Precondition("exceptional set needs non-trivial masks".into()));
    }
    let mut c = 1.0;
    while c <= EXCEPTIONAL_MAX_C {
        let e = exceptional_at(f_mask, g_mask, c);
        if e.measure <= budget {
            return Ok(e);
        }
        c *= 2.0;
    }
    Err(Error::Precondition(format!("|Ω| stays above {budget} up to C = 2^40")))
}

/// `|H|/2`, the budget leaving a major subset of `H` outside `Ω`.
pub fn default_budget(h_mask: &[f64]) -> f64 {
    measure(h_mask) / 2.0
}

/// Class `d` of `1 + dist(I_P, Ω^c)/|I_P|`: `d = 0` iff `I_P` meets `Ω^c`, otherwise
/// `2^{d-1} < 1 + dist/|I_P| ≤ 2^d`.
pub fn distance_class(iv: &DyadicInterval, omega: &[f64]) -> Result<u32> {
    let n = omega.len();
    let dist = (0..n)
        .filter(|&x| omega[x] == 0.0)
        .map(|x| iv.torus_dist(x as f64 / n as f64))
        .fold(f64::INFINITY, f64::min);
    if dist.is_infinite() {
        return Err(Error::Precondition("Ω covers the whole torus".into()));
    }
    if dist == 0.0 {
        return Ok(0);
    }
    Ok((1.0 + dist / iv.length()).log2().ceil().max(1.0) as u32)
}

/// Tile indices grouped by distance class.
pub fn distance_partition(set: &TileSet, omega: &ExceptionalSet) -> Result<BTreeMap<u32, Vec<usize>>> {
    let classes = set
        .tiles()
        .par_iter()
        .map(|t| distance_class(&t.space, &omega.mask))
        .collect::<Result<Vec<_>>>()?;
    let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (k, d) in classes.into_iter().enumerate() {
        out.entry(d).or_default().push(k);
    }
    Ok(out)
}

/// One interval selected by the stopping time, with the tiles it claimed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub interval: DyadicInterval,
    pub tiles: Vec<usize>,
    /// `(1/|I|) ∫ w · χ̃_I^M`.
    pub average: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// First level; its window is `[2^{-n̄-1}, ∞)`.
    pub anchor: i32,
    pub levels: BTreeMap<i32, Vec<Selection>>,
    pub leftover: Vec<usize>,
}

impl Decomposition {
    /// `(tile → (level, interval))` for every claimed tile.
    pub fn assignment(&self) -> BTreeMap<usize, (i32, DyadicInterval)> {
        let mut out = BTreeMap::new();
        for (&n, sels) in &self.levels {
            for s in sels {
                for &k in &s.tiles {
                    out.insert(k, (n, s.interval));
                }
            }
        }
        out
    }

    /// Window `[lo, hi)` of level `n`.
    pub fn window(&self, n: i32) -> (f64, f64) {
        let hi = if n == self.anchor { f64::INFINITY } else { 2f64.powi(-n) };
        (2f64.powi(-n - 1), hi)
    }

    /// `Σ_{I ∈ 𝓘^n} |I| / (2^n |F|)` per level.
    pub fn packing_ratios(&self, mass: f64) -> Vec<(i32, f64)> {
        self.levels
            .iter()
            .map(|(&n, sels)| {
                let total: f64 = sels.iter().map(|s| s.interval.length()).sum();
                (n, total / (2f64.powi(n) * mass))
            })
            .collect()
    }
}

/// Levels examined past the anchor before giving up.
pub const STOPPING_MAX_LEVELS: i32 = 1100;

/// `n̄` with `2^{-n̄} ∼ 2^d |F|`: `n̄ = ⌊log₂(1/(2^d|F|))⌋`.
pub fn anchor_level(mass: f64, d: u32) -> i32 {
    (1.0 / (2f64.powi(d as i32) * mass)).log2().floor() as i32
}

/// Averages `(1/|I|) ∫ w χ̃_I^M` for every dyadic interval of the grid, coarsest first.
fn candidate_averages(weight: &[f64], grid: GridSpec, mexp: i32) -> Result<Vec<(DyadicInterval, f64)>> {
    DyadicInterval::all_space(grid)
        .into_par_iter()
        .map(|iv| Ok((iv, localized_average(weight, &iv, mexp, grid)?)))
        .collect()
}

/// Greedy selection: at each level, maximal dyadic `I` (largest first, then leftmost) whose
/// average lies in the level window and which contains an unclaimed `I_P`; `I` claims every
/// unclaimed tile with `I_P ⊆ I`.
pub fn stopping_time_select(set: &TileSet, weight: &[f64], mexp: i32, d: u32) -> Result<Decomposition> {
    let n = weight.len();
    let grid = GridSpec::from_size(n, 1)?;
    check_mask(weight, grid, "stopping-time weight")?;
    let mass = measure(weight);
    if mass == 0.0 {
        return Err(Error::Precondition("stopping time needs a nonzero weight".into()));
    }
    let anchor = anchor_level(mass, d);
    let cands = candidate_averages(weight, grid, mexp)?;
    let mut claimed = vec![false; set.len()];
    let mut remaining = set.len();
    let mut levels = BTreeMap::new();
    let mut level = anchor;
    let mut dec = Decomposition { anchor, levels: BTreeMap::new(), leftover: Vec::new() };
    while remaining > 0 {
        if level > anchor + STOPPING_MAX_LEVELS {
            dec.leftover = (0..set.len()).filter(|&k| !claimed[k]).collect();
            return Err(Error::NonTermination(format!(
                "{} tiles unclaimed after {} levels below 2^-{anchor}",
                dec.leftover.len(),
                STOPPING_MAX_LEVELS
            )));
        }
        let (lo, hi) = dec.window(level);
        let stock = claimed.clone();
        let mut chosen: Vec<Selection> = Vec::new();
        for &(iv, avg) in &cands {
            if !(lo <= avg && avg < hi) || chosen.iter().any(|s| s.interval.contains(&iv)) {
                continue;
            }
            let tiles: Vec<usize> =
                (0..set.len()).filter(|&k| !stock[k] && iv.contains(&set.tiles()[k].space)).collect();
            if tiles.is_empty() {
                continue;
            }
            for &k in &tiles {
                claimed[k] = true;
            }
            remaining -= tiles.len();
            chosen.push(Selection { interval: iv, tiles, average: avg });
        }
        if !chosen.is_empty() {
            levels.insert(level, chosen);
        }
        level += 1;
    }
    dec.levels = levels;
    Ok(dec)
}

/// Tiles sharing `(n₁, n₂, n₃)` and the intersection of their three selected intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub levels: (i32, i32, i32),
    pub interval: DyadicInterval,
    pub tiles: Vec<usize>,
    /// `(1/|I|) ∫ 1_E χ̃_I^M` for the three masks on the cell interval.
    pub averages: [f64; 3],
    /// `averages[j] · 2^{n_j}`; bounded above for every cell.
    pub certificate_ratios: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleDecomposition {
    pub single: [Decomposition; 3],
    pub cells: Vec<Cell>,
}

pub fn triple_stopping(set: &TileSet, masks: [&[f64]; 3], mexp: i32, d: u32) -> Result<TripleDecomposition> {
    let grid = GridSpec::from_size(masks[0].len(), 1)?;
    let decs = masks.iter().map(|m| stopping_time_select(set, m, mexp, d)).collect::<Result<Vec<_>>>()?;
    let assigns: Vec<_> = decs.iter().map(|d| d.assignment()).collect();
    let mut groups: BTreeMap<((i32, i32, i32), (i32, i64)), Vec<usize>> = BTreeMap::new();
    for k in 0..set.len() {
        let (a, b, c) = (assigns[0][&k], assigns[1][&k], assigns[2][&k]);
        // all three contain I_P, so they are nested and the finest one is the intersection
        let cell = [a.1, b.1, c.1].into_iter().max_by_key(|iv| iv.j).expect("three");
        groups.entry(((a.0, b.0, c.0), (cell.j, cell.m))).or_default().push(k);
    }
    let cells = groups
        .into_iter()
        .map(|((levels, (j, m)), tiles)| {
            let interval = DyadicInterval::new(j, m);
            let mut averages = [0.0; 3];
            for (i, mask) in masks.iter().enumerate() {
                averages[i] = localized_average(mask, &interval, mexp, grid)?;
            }
            let ns = [levels.0, levels.1, levels.2];
            let certificate_ratios = [0, 1, 2].map(|i| averages[i] * 2f64.powi(ns[i]));
            Ok(Cell { levels, interval, tiles, averages, certificate_ratios })
        })
        .collect::<Result<Vec<_>>>()?;
    let single: [Decomposition; 3] = decs.try_into().expect("three decompositions");
    Ok(TripleDecomposition { single, cells })
}

/// `Σ_{P ∈ ℙ(I₀)} |I_P|^{-1/2} ⟨f 1_F, φ¹⟩⟨g 1_G, φ²⟩⟨φ³, h 1_{H′}⟩`.
#[allow(clippy::too_many_arguments)]
pub fn localized_trilinear(
    fs: [&Signal1D; 3],
    masks: [&[f64]; 3],
    i0: &DyadicInterval,
    set: &TileSet,
    w: &Window,
    cache: &PacketCache,
) -> Result<TrilinearValue> {
    let masked = (0..3).map(|j| fs[j].masked(masks[j])).collect::<Result<Vec<_>>>()?;
    trilinear_form(&masked[0], &masked[1], &masked[2], &restrict(set, i0), w, cache, false)
}

/// `(1+θ_j)/2 − 1/r_j > 0` for each slot.
pub fn condition_c(theta: [f64; 3], r: &TupleR) -> Result<()> {
    let inv = [ratio_f64(r.inv_r1), ratio_f64(r.inv_r2), ratio_f64(r.inv_rprime)];
    for j in 0..3 {
        if (1.0 + theta[j]) / 2.0 - inv[j] <= 0.0 {
            return Err(Error::Precondition(format!(
                "condition C fails in slot {}: (1+θ)/2 = {} ≤ 1/r = {}",
                j + 1,
                (1.0 + theta[j]) / 2.0,
                inv[j]
            )));
        }
    }
    Ok(())
}

/// One localized instance: masks for `F`, `G`, `H′` and the interval `I₀`.
#[derive(Clone, Debug)]
pub struct PnInstance {
    pub masks: [Vec<f64>; 3],
    pub i0: DyadicInterval,
}

#[derive(Clone, Debug)]
pub struct PnConfig {
    /// 0 for scalar functions, 1 for families of `members` functions.
    pub level: u8,
    pub theta: [f64; 3],
    pub epsilon: f64,
    /// Required for level 1.
    pub tuple: Option<TupleR>,
    pub members: usize,
    pub mexp: i32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PnRow {
    pub i0: DyadicInterval,
    pub lhs: f64,
    pub sizes: [f64; 3],
    pub rhs: f64,
    pub ratio: f64,
}

/// Pointwise `ℓ^r`-dominated family: `(Σ_k |u_k(x)|^r)^{1/r} ≤ mask(x)`.
pub fn dominated_family(mask: &[f64], members: usize, r: f64, rng: &mut impl Rng) -> Vec<Vec<C64>> {
    let n = mask.len();
    let mut fam = vec![vec![C64::new(0.0, 0.0); n]; members];
    for x in 0..n {
        if mask[x] == 0.0 {
            continue;
        }
        let raw: Vec<C64> = (0..members)
            .map(|_| C64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let norm = lp_mean(&raw.iter().map(|z| z.norm()).collect::<Vec<_>>(), r).unwrap_or(0.0)
            * if r.is_infinite() { 1.0 } else { (members as f64).powf(1.0 / r) };
        let scale = if norm > 0.0 { rng.gen_range(0.0..1.0) / norm } else { 0.0 };
        for k in 0..members {
            fam[k][x] = raw[k] * scale;
        }
    }
    fam
}

/// Ratios `|Λ^n_{I₀}| / (Π_j s̃ize_{I₀}(1_{E_j})^{1/2+θ_j/2−ε} · |I₀|)` per instance.
pub fn verify_pn(cfg: &PnConfig, set: &TileSet, instances: &[PnInstance], w: &Window) -> Result<Vec<PnRow>> {
    check_theta(cfg.theta)?;
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 0.5) {
        return Err(Error::Domain(format!("ε must lie in (0, 1/2), got {}", cfg.epsilon)));
    }
    let rs: [f64; 3] = match (cfg.level, &cfg.tuple) {
        (0, _) => [1.0, 1.0, 1.0],
        (1, Some(t)) => {
            condition_c(cfg.theta, t)?;
            [t.inv_r1, t.inv_r2, t.inv_rprime].map(|v| if ratio_f64(v) == 0.0 { f64::INFINITY } else { 1.0 / ratio_f64(v) })
        }
        (1, None) => return Err(Error::Precondition("level 1 needs an exponent tuple".into())),
        (l, _) => return Err(Error::Domain(format!("level {l} not supported; use 0 or 1"))),
    };
    let members = if cfg.level == 0 { 1 } else { cfg.members.max(1) };
    let cache = PacketCache::new();
    instances
        .iter()
        .enumerate()
        .map(|(idx, inst)| {
            let grid = GridSpec::from_size(inst.masks[0].len(), 1)?;
            for m in &inst.masks {
                check_mask(m, grid, "instance mask")?;
            }
            let mut rng = trial_rng(cfg.seed, idx as u64);
            let fams: Vec<Vec<Vec<C64>>> =
                (0..3).map(|j| dominated_family(&inst.masks[j], members, rs[j], &mut rng)).collect();
            let mut lhs = C64::new(0.0, 0.0);
            for k in 0..members {
                let sig = |j: usize| Signal1D::new(grid, fams[j][k].clone());
                let (a, b, c) = (sig(0)?, sig(1)?, sig(2)?);
                let ms = [inst.masks[0].as_slice(), inst.masks[1].as_slice(), inst.masks[2].as_slice()];
                lhs += localized_trilinear([&a, &b, &c], ms, &inst.i0, set, w, &cache)?.value;
            }
            let mut sizes = [0.0; 3];
            for j in 0..3 {
                sizes[j] = if restrict_indices(set, &inst.i0).is_empty() {
                    0.0
                } else {
                    modified_size(&Signal1D::from_real(grid, &inst.masks[j])?, set, &inst.i0, cfg.mexp)?.value
                };
            }
            let rhs: f64 = (0..3).map(|j| sizes[j].powf(0.5 + cfg.theta[j] / 2.0 - cfg.epsilon)).product::<f64>()
                * inst.i0.length();
            let lhs = lhs.norm();
            let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
            Ok(PnRow { i0: inst.i0, lhs, sizes, rhs, ratio })
        })
        .collect()
}
