//! Sizes and energies of wave-packet coefficient sequences, their paraproduct
//! analogues, and the dyadic and shifted maximal functions.

use rayon::prelude::*;

use crate::dyadic::{
    restrict_indices, strongly_disjoint_pair, tile_le, top_order, DyadicInterval, Span, TileSet,
    Tree,
};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Signal1D, C64};
use crate::wavepacket::{chi_tilde, lp_low, PacketCache, Window};

/// Coefficients `⟨f, φ_{P_j}⟩` aligned with the tiles of a set; `component` is 0-based.
#[derive(Clone, Debug)]
pub struct CoeffMap<'a> {
    pub set: &'a TileSet,
    pub component: usize,
    pub values: Vec<C64>,
}

impl<'a> CoeffMap<'a> {
    pub fn new(set: &'a TileSet, component: usize, values: Vec<C64>) -> Result<Self> {
        if values.len() != set.len() || component > 2 {
            return Err(Error::Domain("coefficient map does not match its tile set".into()));
        }
        Ok(Self { set, component, values })
    }

    /// Same map with every coefficient multiplied by `c`.
    pub fn scaled(&self, c: f64) -> CoeffMap<'a> {
        CoeffMap { set: self.set, component: self.component, values: self.values.iter().map(|z| z * c).collect() }
    }
}

/// Inner products of `f` against the component-`j` packets of every tile.
pub fn coefficients<'a>(
    f: &Signal1D,
    set: &'a TileSet,
    j: usize,
    w: &Window,
    cache: &PacketCache,
) -> Result<CoeffMap<'a>> {
    let fhat = f.spectrum();
    let values = set
        .tiles()
        .par_iter()
        .map(|t| Ok(cache.get(&t.tile(j), w, f.grid())?.pair_with_spectrum(&fhat)))
        .collect::<Result<Vec<_>>>()?;
    CoeffMap::new(set, j, values)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    None,
    Tree(Tree),
    Interval(DyadicInterval),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeReport {
    pub value: f64,
    pub witness: Witness,
}

fn tree_mass(c: &CoeffMap, members: &[usize]) -> f64 {
    members.iter().map(|&k| c.values[k].norm_sqr()).sum()
}

/// Members of the maximal `i`-tree under tile `top` within `pool`.
fn tree_under(set: &TileSet, pool: &[usize], top: usize, i: usize) -> Vec<usize> {
    let tt = set.tiles()[top].tile(i);
    pool.iter().copied().filter(|&k| tile_le(&set.tiles()[k].tile(i), &tt)).collect()
}

/// `sup_T (|I_T|^{-1} Σ_{P∈T} |c_P|²)^{1/2}` over `i`-trees, `i ≠ j`, with tops in the set.
///
/// For a fixed top the full tree under it dominates every subtree with that top, so the
/// supremum is a maximum over `(top, i)`.
pub fn size(c: &CoeffMap) -> SizeReport {
    let set = c.set;
    if set.is_empty() {
        return SizeReport { value: 0.0, witness: Witness::None };
    }
    let pool: Vec<usize> = (0..set.len()).collect();
    let cands: Vec<(usize, usize)> = (0..set.len())
        .flat_map(|t| (0..3).filter(|&i| i != c.component).map(move |i| (t, i)))
        .collect();
    let scored: Vec<(f64, Tree)> = cands
        .par_iter()
        .map(|&(t, i)| {
            let members = tree_under(set, &pool, t, i);
            let v = (tree_mass(c, &members) / set.tiles()[t].space.length()).sqrt();
            (v, Tree { top: set.tiles()[t], members, index: i })
        })
        .collect();
    // first maximum in candidate order keeps the witness deterministic
    let mut best = 0;
    for (k, s) in scored.iter().enumerate() {
        if s.0 > scored[best].0 {
            best = k;
        }
    }
    let (value, tree) = scored.into_iter().nth(best).expect("non-empty");
    SizeReport { value, witness: Witness::Tree(tree) }
}

/// Re-evaluates a size witness.
pub fn tree_size(c: &CoeffMap, tree: &Tree) -> f64 {
    (tree_mass(c, &tree.members) / tree.top.space.length()).sqrt()
}

/// `(1/|I|) ∫ |f| χ̃_I^M` on the grid.
pub fn localized_average(abs_f: &[f64], iv: &DyadicInterval, mexp: i32, grid: GridSpec) -> Result<f64> {
    let w = chi_tilde(iv, mexp, grid)?;
    let s: f64 = abs_f.iter().zip(&w).map(|(a, b)| a * b).sum();
    Ok(s / abs_f.len() as f64 / iv.length())
}

/// `sup_{P} (1/|I_P|) ∫ |f| χ̃_{I_P}^M`.
pub fn simple_size(f: &Signal1D, set: &TileSet, mexp: i32) -> Result<f64> {
    let abs = f.abs();
    let mut spaces: Vec<DyadicInterval> = set.tiles().iter().map(|t| t.space).collect();
    spaces.sort_by_key(|s| (s.j, s.m));
    spaces.dedup();
    let vals = spaces
        .par_iter()
        .map(|iv| localized_average(&abs, iv, mexp, f.grid()))
        .collect::<Result<Vec<_>>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `J ⊆ 3I₀` on the torus.
fn inside_triple(j: &DyadicInterval, i0: &DyadicInterval) -> bool {
    if 3.0 * i0.length() >= 1.0 {
        return true;
    }
    let t = i0.dilate(3);
    let s = j.span();
    let one = DyadicInterval::torus().span().len();
    (-1..=1).any(|k| t.contains(&Span { lo: s.lo + k * one, hi: s.hi + k * one }))
}

/// `s̃ize_{ℙ(I₀)} f`: supremum over dyadic `J ⊆ 3I₀` containing some `I_P`, `P ∈ ℙ(I₀)`.
pub fn modified_size(f: &Signal1D, set: &TileSet, i0: &DyadicInterval, mexp: i32) -> Result<SizeReport> {
    let local = restrict_indices(set, i0);
    if local.is_empty() {
        return Err(Error::Precondition("no admissible J: the restricted tile set is empty".into()));
    }
    let spaces: Vec<DyadicInterval> = local.iter().map(|&k| set.tiles()[k].space).collect();
    let cands: Vec<DyadicInterval> = DyadicInterval::all_space(f.grid())
        .into_iter()
        .filter(|j| inside_triple(j, i0) && spaces.iter().any(|s| j.contains(s)))
        .collect();
    let abs = f.abs();
    let vals = cands
        .par_iter()
        .map(|j| localized_average(&abs, j, mexp, f.grid()))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (k, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = k;
        }
    }
    Ok(SizeReport { value: vals[best], witness: Witness::Interval(cands[best]) })
}

#[derive(Clone, Debug)]
pub struct EnergyReport {
    pub value: f64,
    pub level: i32,
    pub chain: Vec<Tree>,
}

/// Largest `Σ_{T'} |c|² / |I_{T'}|` over subtrees of `members` with tops in `members`.
fn max_subtree_density(c: &CoeffMap, members: &[usize]) -> f64 {
    let set = c.set;
    let mut best: f64 = 0.0;
    for &t in members {
        for i in (0..3).filter(|&i| i != c.component) {
            let sub = tree_under(set, members, t, i);
            best = best.max(tree_mass(c, &sub) / set.tiles()[t].space.length());
        }
    }
    best
}

fn energy_at_level(c: &CoeffMap, n: i32) -> (f64, Vec<Tree>) {
    let set = c.set;
    let j = c.component;
    let lo = 4f64.powi(n);
    let hi = 4f64.powi(n + 1);
    let mut alive = vec![true; set.len()];
    let mut chain: Vec<Tree> = Vec::new();
    let mut total = 0.0;
    let tree_kinds: Vec<usize> = (0..3).filter(|&i| i != j).collect();
    let cands: Vec<(usize, usize)> = top_order(set, tree_kinds[0])
        .into_iter()
        .flat_map(|t| tree_kinds.iter().map(move |&i| (t, i)))
        .collect();
    for (t, i) in cands {
        if !alive[t] {
            continue;
        }
        let pool: Vec<usize> = (0..set.len()).filter(|&k| alive[k]).collect();
        let members = tree_under(set, &pool, t, i);
        let len = set.tiles()[t].space.length();
        if tree_mass(c, &members) < lo * len {
            continue;
        }
        if max_subtree_density(c, &members) > hi {
            continue;
        }
        let tree = Tree { top: set.tiles()[t], members, index: i };
        if !chain.iter().all(|e| strongly_disjoint_pair(set, e, &tree, j)) {
            continue;
        }
        chain.push(tree);
        for &k in &chain.last().expect("pushed").members {
            alive[k] = false;
        }
        total += len;
    }
    (2f64.powi(n) * total.sqrt(), chain)
}

/// Greedy lower bound for `sup_n 2^n sup_𝕋 (Σ_{T∈𝕋} |I_T|)^{1/2}`.
///
/// For each level, tops are scanned largest first; a tree is kept when it clears the
/// `2^n` threshold, all its subtrees stay under `2^{n+1}`, and the chain remains strongly
/// disjoint. Kept trees are removed from the pool.
pub fn energy(c: &CoeffMap) -> EnergyReport {
    let set = c.set;
    let mags: Vec<f64> = c.values.iter().map(|z| z.norm()).filter(|&v| v > 0.0).collect();
    if set.is_empty() || mags.is_empty() {
        return EnergyReport { value: 0.0, level: 0, chain: Vec::new() };
    }
    let lens: Vec<f64> = set.tiles().iter().map(|t| t.space.length()).collect();
    let (min_len, max_len) = (lens.iter().cloned().fold(f64::INFINITY, f64::min), lens.iter().cloned().fold(0.0, f64::max));
    let min_c = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    let mass: f64 = mags.iter().map(|v| v * v).sum();
    let n_lo = (min_c / max_len.sqrt()).log2().floor() as i32 - 1;
    let n_hi = (mass / min_len).sqrt().log2().ceil() as i32;
    let levels: Vec<i32> = (n_lo..=n_hi).collect();
    let results: Vec<(f64, Vec<Tree>)> = levels.par_iter().map(|&n| energy_at_level(c, n)).collect();
    let mut best = 0;
    for (k, r) in results.iter().enumerate() {
        if r.0 > results[best].0 {
            best = k;
        }
    }
    let (value, chain) = results.into_iter().nth(best).expect("non-empty");
    EnergyReport { value, level: levels[best], chain }
}

/// Energy table of `f` on `ℙ(I₀)` for `f` placed at scaled distances `2^{k-1}..2^k` from `I₀`.
#[derive(Clone, Debug)]
pub struct DecayRow {
    pub k: u32,
    pub energy: f64,
    pub l2: f64,
}

/// Checks `2^{k-1} ≤ dist(supp f, I₀)/|I₀| ≤ 2^k` on the torus.
pub fn support_distance_ok(f: &Signal1D, i0: &DyadicInterval, k: u32) -> bool {
    let n = f.len();
    let mut dmin = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    for (x, z) in f.samples().iter().enumerate() {
        if *z != C64::new(0.0, 0.0) {
            let d = i0.torus_dist(x as f64 / n as f64) / i0.length();
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
    }
    if dmin.is_infinite() {
        return true;
    }
    let lo = 2f64.powi(k as i32 - 1);
    let hi = 2f64.powi(k as i32);
    dmin >= lo - 1e-12 && dmax <= hi + 1e-12
}

/// `energy_{ℙ(I₀)}` of `⟨f, φ_{P_j}⟩`, refusing inputs that violate the support condition.
pub fn localized_energy(
    f: &Signal1D,
    set: &TileSet,
    i0: &DyadicInterval,
    k: u32,
    j: usize,
    w: &Window,
    cache: &PacketCache,
) -> Result<DecayRow> {
    if !support_distance_ok(f, i0, k) {
        return Err(Error::Precondition(format!("support of f is not at scaled distance ~2^{k} from I0")));
    }
    let local = set.subset(&restrict_indices(set, i0));
    let c = coefficients(f, &local, j, w, cache)?;
    Ok(DecayRow { k, energy: energy(&c).value, l2: f.lp_norm(2.0)? })
}

/// Paraproduct packet templates on an interval `I` with `|I| = 2^{-j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Template {
    /// Centered at frequency 0, width `2^j`: nonzero mean.
    NonLacunary,
    /// On `[2^j, 2^{j+1})`: mean zero.
    Lacunary,
}

/// Fourier coefficients of the template packet for `iv`, unit `L²` norm.
pub fn template_spectrum(iv: &DyadicInterval, t: Template, grid: GridSpec) -> Result<Vec<(i64, C64)>> {
    let w = 2f64.powi(iv.j);
    if w < 4.0 {
        return Err(Error::Resolution { bins: w as i64 });
    }
    let n = grid.size() as f64;
    let center = match t {
        Template::NonLacunary => 0.0,
        Template::Lacunary => 1.5 * w,
    };
    if center + 0.5 * w > n / 2.0 {
        return Err(Error::Domain(format!("template for {iv} leaves the band")));
    }
    let half = 0.45 * w;
    let x0 = iv.center();
    let lo = (center - half).ceil() as i64;
    let hi = (center + half).floor() as i64;
    let mut spec: Vec<(i64, C64)> = (lo..=hi)
        .filter_map(|k| {
            let v = crate::wavepacket::PACKET_WINDOW.profile((k as f64 - center) / half);
            (v > 0.0).then(|| (k, crate::grid::cis(-(k as f64) * x0) * v))
        })
        .collect();
    let e: f64 = spec.iter().map(|(_, z)| z.norm_sqr()).sum();
    let s = n / e.sqrt();
    for (_, z) in spec.iter_mut() {
        *z *= s;
    }
    Ok(spec)
}

/// `⟨f, φ_I⟩` for each interval under the template.
pub fn template_coefficients(f: &Signal1D, ivs: &[DyadicInterval], t: Template) -> Result<Vec<C64>> {
    let n = f.len();
    let fhat = f.spectrum();
    ivs.iter()
        .map(|iv| {
            let spec = template_spectrum(iv, t, f.grid())?;
            let s: C64 = spec.iter().map(|&(k, c)| fhat[crate::grid::freq_bin(k, n)] * c.conj()).sum();
            Ok(s / (n * n) as f64)
        })
        .collect()
}

/// `‖v‖_{1,∞} = sup_λ λ |{v > λ}|`, exact over grid level sets.
pub fn weak_l1(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let n = v.len() as f64;
    v.iter().enumerate().map(|(k, x)| x * (k + 1) as f64 / n).fold(0.0, f64::max)
}

/// Lacunary square-function average `|I₀|^{-1} ‖(Σ_{I⊆I₀} |c_I|²/|I| 1_I)^{1/2}‖_{1,∞}`.
fn lacunary_local(ivs: &[DyadicInterval], coeffs: &[C64], i0: &DyadicInterval, n: usize) -> f64 {
    let mut sq = vec![0.0; n];
    for (iv, c) in ivs.iter().zip(coeffs) {
        if i0.contains(iv) {
            let (a, b) = iv.grid_range(n);
            let v = c.norm_sqr() / iv.length();
            for s in &mut sq[a..b] {
                *s += v;
            }
        }
    }
    let root: Vec<f64> = sq.iter().map(|s| s.sqrt()).collect();
    weak_l1(&root) / i0.length()
}

fn local_quantities(f: &Signal1D, ivs: &[DyadicInterval], lacunary: bool) -> Result<Vec<f64>> {
    let t = if lacunary { Template::Lacunary } else { Template::NonLacunary };
    let coeffs = template_coefficients(f, ivs, t)?;
    Ok(if lacunary {
        ivs.iter().map(|i0| lacunary_local(ivs, &coeffs, i0, f.len())).collect()
    } else {
        ivs.iter().zip(&coeffs).map(|(iv, c)| c.norm() / iv.length().sqrt()).collect()
    })
}

/// Paraproduct size: non-lacunary `sup |c_I|/|I|^{1/2}`, or the lacunary weak-`L¹` average.
pub fn paraproduct_size(f: &Signal1D, ivs: &[DyadicInterval], lacunary: bool) -> Result<f64> {
    Ok(local_quantities(f, ivs, lacunary)?.into_iter().fold(0.0, f64::max))
}

/// `sup_n 2^n Σ_{I ∈ 𝔻_n} |I|` where `𝔻_n` are the maximal intervals whose local quantity
/// is at least `2^n`; for nested-or-disjoint families this maximizes over disjoint collections.
pub fn paraproduct_energy(f: &Signal1D, ivs: &[DyadicInterval], lacunary: bool) -> Result<f64> {
    let q = local_quantities(f, ivs, lacunary)?;
    let pos: Vec<f64> = q.iter().cloned().filter(|&v| v > 0.0).collect();
    if pos.is_empty() {
        return Ok(0.0);
    }
    let lo = pos.iter().cloned().fold(f64::INFINITY, f64::min).log2().floor() as i32;
    let hi = pos.iter().cloned().fold(0.0, f64::max).log2().floor() as i32;
    let mut best: f64 = 0.0;
    for n in lo..=hi {
        let t = 2f64.powi(n);
        let mut sel: Vec<DyadicInterval> =
            ivs.iter().zip(&q).filter(|(_, &v)| v >= t).map(|(iv, _)| *iv).collect();
        sel.sort_by_key(|iv| (iv.j, iv.m));
        sel.dedup();
        let total: f64 = sel
            .iter()
            .filter(|iv| !sel.iter().any(|o| o.contains(iv) && o != *iv))
            .map(|iv| iv.length())
            .sum();
        best = best.max(t * total);
    }
    Ok(best)
}

/// Dyadic maximal function: `max` over dyadic `I ∋ x` of the average of `|f|` on `I`.
pub fn maximal_function(f: &Signal1D) -> Vec<f64> {
    maximal_of(&f.abs())
}

pub fn maximal_of(abs: &[f64]) -> Vec<f64> {
    let n = abs.len();
    let mut out = vec![0.0f64; n];
    let mut block = 1;
    while block <= n {
        for start in (0..n).step_by(block) {
            let avg = abs[start..start + block].iter().sum::<f64>() / block as f64;
            for o in &mut out[start..start + block] {
                *o = o.max(avg);
            }
        }
        block *= 2;
    }
    out
}

/// `sup_l |P_{l,n} f|` with kernels translated by `n·2^{-l}`.
pub fn shifted_maximal(f: &Signal1D, shift: i64) -> Result<Vec<f64>> {
    let l = f.grid().log_size() as i32;
    let mut out = vec![0.0f64; f.len()];
    for k in 0..l {
        let g = f.apply_multiplier(|xi| crate::grid::cis(shift as f64 * xi as f64 * 2f64.powi(-k)) * lp_low(k, xi as f64));
        for (o, z) in out.iter_mut().zip(g.samples()) {
            *o = o.max(z.norm());
        }
    }
    Ok(out)
}
