//! Bilinear and trilinear operators: the bilinear Hilbert transform as a multiplier and as a
//! model sum, trilinear forms, discrete and continuous paraproducts, the Carleson operator,
//! biparameter paraproducts and the tensor product `BHT ⊗ Π`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicInterval, TileSet};
use crate::error::{Error, Result};
use crate::grid::{fft_in_place, freq_bin, freq_rep, ifft_in_place, GridSpec, Signal1D, Signal2D, C64};
use crate::size_energy::{coefficients, energy, size, template_spectrum, Template};
use crate::wavepacket::{lp_band, lp_low, PacketCache, WavePacket, Window};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

// ---------------------------------------------------------------------------
// BHT as a multiplier

/// `Σ_{ξ<η} f̂(ξ)ĝ(η)e^{2πix(ξ+η)} / N²`, double sum over integer representatives.
pub fn bht_direct_reference(f: &Signal1D, g: &Signal1D) -> Result<Signal1D> {
    f.same_grid(g)?;
    let n = f.len();
    let (fh, gh) = (f.spectrum(), g.spectrum());
    let mut out = vec![ZERO; n];
    for a in 0..n {
        let xi = freq_rep(a, n);
        if fh[a] == ZERO {
            continue;
        }
        for b in 0..n {
            if xi < freq_rep(b, n) {
                out[freq_bin(xi + freq_rep(b, n), n)] += fh[a] * gh[b];
            }
        }
    }
    let s = 1.0 / n as f64;
    out.iter_mut().for_each(|z| *z *= s);
    Signal1D::from_spectrum(f.grid(), out)
}

const HALF_CONV_BLOCK: usize = 32;

/// Linear convolution by zero-padded transforms.
fn linear_convolution(a: &[C64], b: &[C64]) -> Vec<C64> {
    let len = a.len() + b.len() - 1;
    let m = len.next_power_of_two();
    let mut fa = a.to_vec();
    fa.resize(m, ZERO);
    let mut fb = b.to_vec();
    fb.resize(m, ZERO);
    fft_in_place(&mut fa);
    fft_in_place(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    ifft_in_place(&mut fa);
    fa.truncate(len);
    fa
}

/// `out[i + j] += a[i] b[j]` over `i < j`; indices are frequency-sorted.
fn half_convolution(a: &[C64], b: &[C64], out: &mut [C64]) {
    let n = a.len();
    if n <= HALF_CONV_BLOCK {
        for i in 0..n {
            for j in i + 1..n {
                out[i + j] += a[i] * b[j];
            }
        }
        return;
    }
    let h = n / 2;
    half_convolution(&a[..h], &b[..h], &mut out[..2 * h]);
    half_convolution(&a[h..], &b[h..], &mut out[2 * h..]);
    let cross = linear_convolution(&a[..h], &b[h..]);
    for (i, z) in cross.into_iter().enumerate() {
        out[h + i] += z;
    }
}

/// Same operator as [`bht_direct_reference`] in `O(N log² N)`: cross pairs between the low
/// and high halves of the sorted frequency list form a full convolution.
pub fn bht_direct(f: &Signal1D, g: &Signal1D) -> Result<Signal1D> {
    f.same_grid(g)?;
    let n = f.len();
    let (fh, gh) = (f.spectrum(), g.spectrum());
    // sorted index i ↔ frequency i + lo
    let lo = -(n as i64) / 2 + 1;
    let a: Vec<C64> = (0..n).map(|i| fh[freq_bin(i as i64 + lo, n)]).collect();
    let b: Vec<C64> = (0..n).map(|i| gh[freq_bin(i as i64 + lo, n)]).collect();
    let mut sums = vec![ZERO; 2 * n - 1];
    half_convolution(&a, &b, &mut sums);
    let mut out = vec![ZERO; n];
    for (s, z) in sums.into_iter().enumerate() {
        out[freq_bin(s as i64 + 2 * lo, n)] += z / n as f64;
    }
    Signal1D::from_spectrum(f.grid(), out)
}

// ---------------------------------------------------------------------------
// Model sums

/// Value of a trilinear form with optional per-tile terms (same order as the tiles).
#[derive(Clone, Debug, PartialEq)]
pub struct TrilinearValue {
    pub value: C64,
    pub breakdown: Option<Vec<C64>>,
}

fn require_certified(set: &TileSet) -> Result<()> {
    if !set.is_certified() {
        return Err(Error::Refused("tile set has not been certified rank-1".into()));
    }
    Ok(())
}

fn tile_packets(
    set: &TileSet,
    w: &Window,
    grid: GridSpec,
    cache: &PacketCache,
) -> Result<Vec<[std::sync::Arc<WavePacket>; 3]>> {
    set.tiles()
        .par_iter()
        .map(|t| Ok([cache.get(&t.tile(0), w, grid)?, cache.get(&t.tile(1), w, grid)?, cache.get(&t.tile(2), w, grid)?]))
        .collect()
}

/// `|I_P|^{-1/2} ⟨f, φ¹_P⟩⟨g, φ²_P⟩` for every tile.
fn model_coefficients(f: &Signal1D, g: &Signal1D, set: &TileSet, packets: &[[std::sync::Arc<WavePacket>; 3]]) -> Vec<C64> {
    let (fh, gh) = (f.spectrum(), g.spectrum());
    set.tiles()
        .par_iter()
        .zip(packets.par_iter())
        .map(|(t, p)| p[0].pair_with_spectrum(&fh) * p[1].pair_with_spectrum(&gh) / t.space.length().sqrt())
        .collect()
}

/// `Σ_P |I_P|^{-1/2} ⟨f,φ¹_P⟩⟨g,φ²_P⟩ φ³_P`.
pub fn bht_model(f: &Signal1D, g: &Signal1D, set: &TileSet, w: &Window, cache: &PacketCache) -> Result<Signal1D> {
    f.same_grid(g)?;
    require_certified(set)?;
    let packets = tile_packets(set, w, f.grid(), cache)?;
    let coef = model_coefficients(f, g, set, &packets);
    let mut out = vec![ZERO; f.len()];
    for (a, p) in coef.iter().zip(&packets) {
        p[2].accumulate_spectrum(*a, &mut out);
    }
    Signal1D::from_spectrum(f.grid(), out)
}

/// `Σ_P |I_P|^{-1/2} ⟨f,φ¹_P⟩⟨g,φ²_P⟩⟨φ³_P,h⟩`, so that the value equals
/// `⟨bht_model(f,g), h⟩`.
pub fn trilinear_form(
    f: &Signal1D,
    g: &Signal1D,
    h: &Signal1D,
    set: &TileSet,
    w: &Window,
    cache: &PacketCache,
    keep_breakdown: bool,
) -> Result<TrilinearValue> {
    f.same_grid(g)?;
    f.same_grid(h)?;
    require_certified(set)?;
    let packets = tile_packets(set, w, f.grid(), cache)?;
    let coef = model_coefficients(f, g, set, &packets);
    let hh = h.spectrum();
    let terms: Vec<C64> = coef
        .par_iter()
        .zip(packets.par_iter())
        .map(|(a, p)| a * p[2].pair_with_spectrum(&hh).conj())
        .collect();
    let value = terms.iter().sum();
    Ok(TrilinearValue { value, breakdown: keep_breakdown.then_some(terms) })
}

/// Both sides of `|Λ| ≲ Π_j size_j^{θ_j} energy_j^{1-θ_j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub form: f64,
    /// `Σ_P |I_P|^{-1/2} |a¹_P a²_P a³_P|`, which dominates `|Λ|`.
    pub absolute_form: f64,
    pub sizes: [f64; 3],
    pub energies: [f64; 3],
    pub bound: f64,
    /// `absolute_form / bound`; zero when both vanish.
    pub ratio: f64,
}

pub fn check_theta(theta: [f64; 3]) -> Result<()> {
    let ok = theta.iter().all(|t| (0.0..1.0).contains(t)) && (theta.iter().sum::<f64>() - 1.0).abs() < 1e-12;
    if !ok {
        return Err(Error::Domain(format!("inadmissible exponents {theta:?}")));
    }
    Ok(())
}

pub fn trilinear_size_energy_bound_check(
    fs: [&Signal1D; 3],
    set: &TileSet,
    theta: [f64; 3],
    w: &Window,
    cache: &PacketCache,
) -> Result<BoundReport> {
    check_theta(theta)?;
    require_certified(set)?;
    fs[0].same_grid(fs[1])?;
    fs[0].same_grid(fs[2])?;
    let maps = (0..3).map(|j| coefficients(fs[j], set, j, w, cache)).collect::<Result<Vec<_>>>()?;
    let mut sizes = [0.0; 3];
    let mut energies = [0.0; 3];
    for j in 0..3 {
        sizes[j] = size(&maps[j]).value;
        energies[j] = energy(&maps[j]).value;
    }
    let mut form = ZERO;
    let mut absolute_form = 0.0;
    for (k, t) in set.tiles().iter().enumerate() {
        let s = 1.0 / t.space.length().sqrt();
        form += maps[0].values[k] * maps[1].values[k] * maps[2].values[k].conj() * s;
        absolute_form += (maps[0].values[k] * maps[1].values[k] * maps[2].values[k]).norm() * s;
    }
    let bound: f64 = (0..3).map(|j| sizes[j].powf(theta[j]) * energies[j].powf(1.0 - theta[j])).product();
    let ratio = if absolute_form == 0.0 { 0.0 } else { absolute_form / bound };
    Ok(BoundReport { form: form.norm(), absolute_form, sizes, energies, bound, ratio })
}

/// Indicator masks of `𝓘_0 = 3I_0` and the annuli `𝓘_l = 2^{l+1}·3I_0 \ 2^l·3I_0`
/// (torus distance), which together cover the grid.
pub fn shell_masks(i0: &DyadicInterval, grid: GridSpec) -> Vec<Vec<f64>> {
    let n = grid.size();
    let len = i0.length();
    let level = |x: usize| -> usize {
        // x lies in the dilate 2^l·3I_0 iff dist(x, I_0) ≤ (3·2^l − 1)|I_0|/2
        let d = i0.torus_dist(x as f64 / n as f64) / len;
        let mut l = 0;
        while d > (3.0 * 2f64.powi(l as i32) - 1.0) / 2.0 {
            l += 1;
        }
        l
    };
    let levels: Vec<usize> = (0..n).map(level).collect();
    let top = levels.iter().copied().max().unwrap_or(0);
    (0..=top)
        .map(|l| levels.iter().map(|&v| if v == l { 1.0 } else { 0.0 }).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Paraproducts

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParaproductKind {
    /// `Σ_k P̃_k(Q_k f · Q_k g)`
    I,
    /// `Σ_k Q̃_k(P_{k-2} f · Q_k g)`
    II,
    /// `Σ_k Q̃_k(Q_k f · P_{k-2} g)`
    III,
}

/// Lag between the low-pass and band-pass scales in kinds II and III.
pub const PARAPRODUCT_LAG: i32 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParaproductSpec {
    pub kind: ParaproductKind,
    pub scales: Vec<i32>,
}

impl ParaproductSpec {
    /// Every admissible scale of the grid.
    pub fn full(kind: ParaproductKind, grid: GridSpec) -> Self {
        let l = grid.log_size() as i32;
        let first = if kind == ParaproductKind::I { 0 } else { PARAPRODUCT_LAG };
        Self { kind, scales: (first..l).collect() }
    }

    pub fn validate(&self, grid: GridSpec) -> Result<()> {
        let l = grid.log_size() as i32;
        let first = if self.kind == ParaproductKind::I { 0 } else { PARAPRODUCT_LAG };
        match self.scales.iter().find(|k| !(first..l).contains(*k)) {
            Some(k) => Err(Error::Domain(format!("scale {k} outside {first}..{l} for kind {:?}", self.kind))),
            None => Ok(()),
        }
    }

    /// Symbols `(f-slot, g-slot, outer)` at scale `k`.
    pub fn symbols(&self, k: i32) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
        let kind = self.kind;
        let low = move |xi: f64| lp_low(k - PARAPRODUCT_LAG, xi);
        let band = move |xi: f64| lp_band(k, xi);
        let fs = move |xi: f64| match kind {
            ParaproductKind::II => low(xi),
            _ => band(xi),
        };
        let gs = move |xi: f64| match kind {
            ParaproductKind::III => low(xi),
            _ => band(xi),
        };
        // ≡ 1 on the Fourier support of the inner product
        let outer = move |xi: f64| match kind {
            ParaproductKind::I => lp_low(k + 3, xi),
            _ => lp_low(k + 3, xi) - lp_low(k - PARAPRODUCT_LAG, xi),
        };
        (fs, gs, outer)
    }

    /// `Σ_k f-slot_k(η₁) g-slot_k(η₂) outer_k(η₁+η₂)`.
    pub fn symbol(&self, eta1: i64, eta2: i64) -> f64 {
        self.scales
            .iter()
            .map(|&k| {
                let (fs, gs, out) = self.symbols(k);
                fs(eta1 as f64) * gs(eta2 as f64) * out((eta1 + eta2) as f64)
            })
            .sum()
    }
}

pub fn paraproduct(f: &Signal1D, g: &Signal1D, spec: &ParaproductSpec) -> Result<Signal1D> {
    f.same_grid(g)?;
    spec.validate(f.grid())?;
    let terms: Vec<Signal1D> = spec
        .scales
        .par_iter()
        .map(|&k| {
            let (fs, gs, out) = spec.symbols(k);
            let a = f.apply_real_multiplier(|xi| fs(xi as f64));
            let b = g.apply_real_multiplier(|xi| gs(xi as f64));
            a.mul(&b).map(|p| p.apply_real_multiplier(|xi| out(xi as f64)))
        })
        .collect::<Result<_>>()?;
    let mut acc = Signal1D::zeros(f.grid());
    for t in &terms {
        acc = acc.add(t)?;
    }
    Ok(acc)
}

/// Lacunarity of the three slots of a discrete paraproduct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotTemplates(pub [Template; 3]);

impl SlotTemplates {
    pub fn validate(&self) -> Result<()> {
        let non = self.0.iter().filter(|t| **t == Template::NonLacunary).count();
        if non != 1 {
            return Err(Error::Domain(format!("exactly one non-lacunary slot required, found {non}")));
        }
        Ok(())
    }
}

fn pair_sparse(spec: &[(i64, C64)], fhat: &[C64], n: usize) -> C64 {
    spec.iter().map(|&(k, c)| fhat[freq_bin(k, n)] * c.conj()).sum::<C64>() / (n * n) as f64
}

fn discrete_terms(
    f: &Signal1D,
    g: &Signal1D,
    ivs: &[DyadicInterval],
    slots: SlotTemplates,
) -> Result<Vec<(C64, Vec<(i64, C64)>)>> {
    f.same_grid(g)?;
    slots.validate()?;
    let n = f.len();
    let (fh, gh) = (f.spectrum(), g.spectrum());
    ivs.par_iter()
        .map(|iv| {
            let s1 = template_spectrum(iv, slots.0[0], f.grid())?;
            let s2 = template_spectrum(iv, slots.0[1], f.grid())?;
            let s3 = template_spectrum(iv, slots.0[2], f.grid())?;
            let a = pair_sparse(&s1, &fh, n) * pair_sparse(&s2, &gh, n) / iv.length().sqrt();
            Ok((a, s3))
        })
        .collect()
}

/// `Σ_{I} |I|^{-1/2} ⟨f,φ¹_I⟩⟨g,φ²_I⟩φ³_I` with per-slot templates.
pub fn paraproduct_discrete(f: &Signal1D, g: &Signal1D, ivs: &[DyadicInterval], slots: SlotTemplates) -> Result<Signal1D> {
    let n = f.len();
    let mut out = vec![ZERO; n];
    for (a, s3) in discrete_terms(f, g, ivs, slots)? {
        for (k, c) in s3 {
            out[freq_bin(k, n)] += a * c;
        }
    }
    Signal1D::from_spectrum(f.grid(), out)
}

/// `Σ_I |I|^{-1/2} ⟨f,φ¹_I⟩⟨g,φ²_I⟩⟨φ³_I,h⟩`.
pub fn paraproduct_discrete_form(
    f: &Signal1D,
    g: &Signal1D,
    h: &Signal1D,
    ivs: &[DyadicInterval],
    slots: SlotTemplates,
) -> Result<C64> {
    f.same_grid(h)?;
    let hh = h.spectrum();
    let n = f.len();
    Ok(discrete_terms(f, g, ivs, slots)?.iter().map(|(a, s3)| a * pair_sparse(s3, &hh, n).conj()).sum())
}

// ---------------------------------------------------------------------------
// Carleson operator

/// `sup_M |Σ_{ξ<M} f̂(ξ)e^{2πixξ}| / N` over every cut, including the empty and full sums.
pub fn carleson(f: &Signal1D) -> Vec<f64> {
    let n = f.len();
    let fh = f.spectrum();
    let lo = -(n as i64) / 2 + 1;
    let sorted: Vec<(i64, C64)> = (0..n as i64).map(|i| (i + lo, fh[freq_bin(i + lo, n)])).collect();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let t = x as f64 / n as f64;
            let mut acc = ZERO;
            let mut best: f64 = 0.0;
            for &(k, c) in &sorted {
                acc += c * crate::grid::cis(k as f64 * t);
                best = best.max(acc.norm());
            }
            best / n as f64
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Two-dimensional operators

/// `Σ_{k,l} Out_k⊗Out_l[(F_k⊗F_l f)·(G_k⊗G_l g)]` with the x-axis scales from `specs.0` and
/// the y-axis scales from `specs.1`.
pub fn biparam_paraproduct(f: &Signal2D, g: &Signal2D, specs: (&ParaproductSpec, &ParaproductSpec)) -> Result<Signal2D> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch(f.side(), g.side()));
    }
    let line = f.grid().with_axes(1)?;
    specs.0.validate(line)?;
    specs.1.validate(line)?;
    let pairs: Vec<(i32, i32)> =
        specs.0.scales.iter().flat_map(|&k| specs.1.scales.iter().map(move |&l| (k, l))).collect();
    let terms: Vec<Signal2D> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let (fx, gx, ox) = specs.0.symbols(k);
            let (fy, gy, oy) = specs.1.symbols(l);
            let a = f.apply_multiplier(|u, v| C64::new(fx(u as f64) * fy(v as f64), 0.0));
            let b = g.apply_multiplier(|u, v| C64::new(gx(u as f64) * gy(v as f64), 0.0));
            a.mul(&b).map(|p| p.apply_multiplier(|u, v| C64::new(ox(u as f64) * oy(v as f64), 0.0)))
        })
        .collect::<Result<_>>()?;
    let mut acc = Signal2D::zeros(f.grid());
    for t in &terms {
        acc = acc.add(t)?;
    }
    Ok(acc)
}

/// Both evaluations of `BHT ⊗ Π`.
#[derive(Clone, Debug)]
pub struct TensorPaths {
    /// `Σ_k BHT_x(F^y_k f, G^y_k g)`.
    pub scale_sum: Signal2D,
    /// Quadruple frequency sum with symbol `1[ξ₁<ξ₂]·m_Π(η₁,η₂)`; present when `N ≤ 32`.
    pub direct: Option<Signal2D>,
}

impl TensorPaths {
    pub fn discrepancy(&self) -> Option<f64> {
        self.direct.as_ref().map(|d| d.max_abs_diff(&self.scale_sum))
    }
}

/// Largest side for the quadruple-sum path.
pub const TENSOR_DIRECT_MAX: usize = 32;

fn bht_along_x(f: &Signal2D, g: &Signal2D) -> Result<Signal2D> {
    let n = f.side();
    let cols = (0..n).into_par_iter().map(|y| bht_direct(&f.column(y), &g.column(y))).collect::<Result<Vec<_>>>()?;
    let mut out = Signal2D::zeros(f.grid());
    for (y, c) in cols.iter().enumerate() {
        out.set_column(y, c);
    }
    Ok(out)
}

/// Quadruple sum `Σ_{ξ₁<ξ₂} Σ_{η₁,η₂} f̂ ĝ m_Π(η₁,η₂) e^{2πi(x(ξ₁+ξ₂)+y(η₁+η₂))} / N⁴`.
pub fn tensor_bht_direct(f: &Signal2D, g: &Signal2D, spec: &ParaproductSpec) -> Result<Signal2D> {
    let n = f.side();
    let (fh, gh) = (f.spectrum(), g.spectrum());
    let m: Vec<f64> = (0..n * n).map(|i| spec.symbol(freq_rep(i / n, n), freq_rep(i % n, n))).collect();
    let mut out = vec![ZERO; n * n];
    for a1 in 0..n {
        let x1 = freq_rep(a1, n);
        for a2 in 0..n {
            let x2 = freq_rep(a2, n);
            if x1 >= x2 {
                continue;
            }
            let sx = freq_bin(x1 + x2, n);
            for b1 in 0..n {
                let fv = fh[a1 * n + b1];
                if fv == ZERO {
                    continue;
                }
                for b2 in 0..n {
                    let w = m[b1 * n + b2];
                    if w == 0.0 {
                        continue;
                    }
                    let sy = freq_bin(freq_rep(b1, n) + freq_rep(b2, n), n);
                    out[sx * n + sy] += fv * gh[a2 * n + b2] * w;
                }
            }
        }
    }
    let s = 1.0 / (n * n) as f64;
    out.iter_mut().for_each(|z| *z *= s);
    Signal2D::from_spectrum(f.grid(), out)
}

/// `BHT ⊗ Π` for kinds I and II; kind III follows from kind II by swapping the inputs and
/// reflecting `x`.
pub fn tensor_bht_paraproduct(f: &Signal2D, g: &Signal2D, spec: &ParaproductSpec) -> Result<TensorPaths> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch(f.side(), g.side()));
    }
    if spec.kind == ParaproductKind::III {
        return Err(Error::Domain("kind III is obtained from kind II by swapping the inputs".into()));
    }
    spec.validate(f.grid().with_axes(1)?)?;
    let terms = spec
        .scales
        .iter()
        .map(|&k| {
            let (fs, gs, _) = spec.symbols(k);
            let a = f.apply_axis_multiplier(1, |v| C64::new(fs(v as f64), 0.0));
            let b = g.apply_axis_multiplier(1, |v| C64::new(gs(v as f64), 0.0));
            bht_along_x(&a, &b)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut scale_sum = Signal2D::zeros(f.grid());
    for t in &terms {
        scale_sum = scale_sum.add(t)?;
    }
    let direct = if f.side() <= TENSOR_DIRECT_MAX { Some(tensor_bht_direct(f, g, spec)?) } else { None };
    Ok(TensorPaths { scale_sum, direct })
}

// ---------------------------------------------------------------------------
// Square functions

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axes {
    X,
    Y,
    Both,
}

/// `(Σ_k |Q_k f|²)^{1/2}`, `k = 0..L`.
pub fn square_function(f: &Signal1D) -> Vec<f64> {
    let l = f.grid().log_size() as i32;
    let bands: Vec<Vec<f64>> =
        (0..l).into_par_iter().map(|k| f.apply_real_multiplier(|xi| lp_band(k, xi as f64)).abs()).collect();
    (0..f.len()).map(|x| bands.iter().map(|b| b[x] * b[x]).sum::<f64>().sqrt()).collect()
}

/// Square function along one or both axes; `Both` sums over `(k, l)` of `Q^x_k Q^y_l f`.
pub fn square_function_2d(f: &Signal2D, axes: Axes) -> Vec<f64> {
    let l = f.side().trailing_zeros() as i32;
    let pairs: Vec<(Option<i32>, Option<i32>)> = match axes {
        Axes::X => (0..l).map(|k| (Some(k), None)).collect(),
        Axes::Y => (0..l).map(|k| (None, Some(k))).collect(),
        Axes::Both => (0..l).flat_map(|k| (0..l).map(move |m| (Some(k), Some(m)))).collect(),
    };
    let band = |k: Option<i32>, xi: i64| k.map_or(1.0, |k| lp_band(k, xi as f64));
    let bands: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|&(kx, ky)| f.apply_multiplier(|u, v| C64::new(band(kx, u) * band(ky, v), 0.0)).abs())
        .collect();
    (0..f.samples().len()).map(|i| bands.iter().map(|b| b[i] * b[i]).sum::<f64>().sqrt()).collect()
}
