//! Wave packets, Fourier projections, Littlewood–Paley multipliers, fractional
//! derivatives, shifted kernels and the decaying weight `χ̃_I`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::dyadic::{DyadicInterval, Tile};
use crate::error::{Error, Result};
use crate::grid::{cis, freq_bin, GridSpec, Signal1D, Signal2D, C64};

/// Even bump on `[-1, 1]`, equal to 1 on `[-flat, flat]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    flat: f64,
}

/// Window used for wave packets.
pub const PACKET_WINDOW: Window = Window { flat: 0.8 };
/// Window behind the Littlewood–Paley family: flat on `[-1/2, 1/2]`.
pub const LP_WINDOW: Window = Window { flat: 0.5 };

impl Window {
    pub fn new(flat: f64) -> Result<Self> {
        if !(flat > 0.0 && flat < 1.0) {
            return Err(Error::Domain(format!("flat fraction must lie in (0,1), got {flat}")));
        }
        Ok(Self { flat })
    }

    pub fn flat_fraction(&self) -> f64 {
        self.flat
    }

    /// Raised cosine of a quintic smoothstep; `C²` at both ends of the transition.
    pub fn profile(&self, u: f64) -> f64 {
        let a = u.abs();
        if a <= self.flat {
            1.0
        } else if a >= 1.0 {
            0.0
        } else {
            let t = (a - self.flat) / (1.0 - self.flat);
            let s = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
            0.5 * (1.0 + (PI * s).cos())
        }
    }
}

#[derive(Debug)]
pub struct WavePacket {
    tile: Tile,
    grid: GridSpec,
    /// Nonzero Fourier coefficients as `(integer frequency, coefficient)`.
    spectrum: Vec<(i64, C64)>,
    l2norm: f64,
    samples: OnceLock<Signal1D>,
}

impl WavePacket {
    pub fn tile(&self) -> &Tile {
        &self.tile
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn spectrum(&self) -> &[(i64, C64)] {
        &self.spectrum
    }

    pub fn l2norm(&self) -> f64 {
        self.l2norm
    }

    pub fn samples(&self) -> &Signal1D {
        self.samples.get_or_init(|| {
            let n = self.grid.size();
            let mut full = vec![C64::new(0.0, 0.0); n];
            for &(k, c) in &self.spectrum {
                full[freq_bin(k, n)] = c;
            }
            Signal1D::from_spectrum(self.grid, full).expect("sized")
        })
    }

    /// `⟨f, φ⟩` from the transform of `f` (as returned by `Signal1D::spectrum`).
    pub fn pair_with_spectrum(&self, fhat: &[C64]) -> C64 {
        let n = self.grid.size();
        let s: C64 = self.spectrum.iter().map(|&(k, c)| fhat[freq_bin(k, n)] * c.conj()).sum();
        s / (n * n) as f64
    }

    /// Adds `a·φ̂` into a full coefficient vector.
    pub fn accumulate_spectrum(&self, a: C64, out: &mut [C64]) {
        let n = self.grid.size();
        for &(k, c) in &self.spectrum {
            out[freq_bin(k, n)] += a * c;
        }
    }
}

/// Packet with Fourier support in `(9/10)ω_P`, centered on `I_P`, of unit `L²` norm.
pub fn make_wave_packet(tile: &Tile, w: &Window, grid: GridSpec) -> Result<WavePacket> {
    let n = grid.size() as i64;
    let omega = tile.freq;
    let width = omega.length();
    if width < 4.0 {
        return Err(Error::Resolution { bins: width as i64 });
    }
    if omega.start() < -(n as f64) / 2.0 - 0.5 || omega.end() > (n / 2) as f64 + 1.0 {
        return Err(Error::Domain(format!("frequency interval {omega} leaves the band of N={n}")));
    }
    let (c, half) = (omega.center(), 0.45 * width);
    let x0 = tile.space.center();
    let (lo, hi) = omega.integer_range();
    let mut spectrum: Vec<(i64, C64)> = (lo..hi)
        .filter_map(|k| {
            let v = w.profile((k as f64 - c) / half);
            (v > 0.0).then(|| (k, cis(-(k as f64) * x0) * v))
        })
        .collect();
    // ‖φ‖₂² = N^{-2} Σ |φ̂|² in the normalized measure
    let energy: f64 = spectrum.iter().map(|(_, z)| z.norm_sqr()).sum();
    let scale = n as f64 / energy.sqrt();
    for (_, z) in spectrum.iter_mut() {
        *z *= scale;
    }
    Ok(WavePacket { tile: *tile, grid, spectrum, l2norm: 1.0, samples: OnceLock::new() })
}

/// Concurrent memo of packets keyed by tile, window and grid.
#[derive(Default)]
pub struct PacketCache {
    map: RwLock<HashMap<(Tile, u64, GridSpec), Arc<WavePacket>>>,
}

impl PacketCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, tile: &Tile, w: &Window, grid: GridSpec) -> Result<Arc<WavePacket>> {
        let key = (*tile, w.flat.to_bits(), grid);
        if let Some(p) = self.map.read().expect("cache lock").get(&key) {
            return Ok(p.clone());
        }
        let p = Arc::new(make_wave_packet(tile, w, grid)?);
        self.map.write().expect("cache lock").entry(key).or_insert(p.clone());
        Ok(p)
    }
}

/// `(1/N) Σ f·conj(φ)`.
pub fn inner_product(f: &Signal1D, phi: &WavePacket) -> Result<C64> {
    if f.grid() != phi.grid {
        return Err(Error::GridMismatch(f.len(), phi.grid.size()));
    }
    f.inner(phi.samples())
}

/// Closed range of integer frequencies `lo ≤ k ≤ hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct FreqInterval {
    pub lo: i64,
    pub hi: i64,
}

impl FreqInterval {
    pub fn new(lo: i64, hi: i64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, k: i64) -> bool {
        self.lo <= k && k <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn intersect(&self, o: &FreqInterval) -> FreqInterval {
        FreqInterval { lo: self.lo.max(o.lo), hi: self.hi.min(o.hi) }
    }

    pub fn overlaps(&self, o: &FreqInterval) -> bool {
        !self.intersect(o).is_empty()
    }

    /// Integer frequencies of a dyadic frequency interval.
    pub fn from_dyadic(w: &DyadicInterval) -> Self {
        let (lo, hi) = w.integer_range();
        Self { lo, hi: hi - 1 }
    }
}

/// Sharp (`1_I`) or smooth (window fitted to `I`) Fourier projection.
pub fn fourier_project(f: &Signal1D, iv: &FreqInterval, sharp: bool) -> Signal1D {
    if sharp {
        f.apply_real_multiplier(|k| if iv.contains(k) { 1.0 } else { 0.0 })
    } else {
        let c = 0.5 * (iv.lo + iv.hi) as f64;
        let h = 0.5 * (iv.hi - iv.lo + 1) as f64;
        f.apply_real_multiplier(|k| PACKET_WINDOW.profile((k as f64 - c) / h))
    }
}

/// Symbol of `P_k`: `φ̂(ξ / 2^k)`.
pub fn lp_low(k: i32, xi: f64) -> f64 {
    LP_WINDOW.profile(xi * 2f64.powi(-k))
}

/// Symbol of `Q_k`: `φ̂(ξ / 2^{k+1}) − φ̂(ξ / 2^k)`, supported on `2^{k-1} < |ξ| < 2^{k+1}`.
pub fn lp_band(k: i32, xi: f64) -> f64 {
    lp_low(k + 1, xi) - lp_low(k, xi)
}

fn check_scale(f: &Signal1D, k: i32) -> Result<()> {
    let l = f.grid().log_size() as i32;
    if !(0..l).contains(&k) {
        return Err(Error::Domain(format!("scale {k} outside 0..{l}")));
    }
    Ok(())
}

/// `(P_k f, Q_k f)`; the telescoping sum `P_0 + Σ_{k=0}^{L-1} Q_k` is the identity.
pub fn lp_projections(f: &Signal1D, k: i32) -> Result<(Signal1D, Signal1D)> {
    check_scale(f, k)?;
    Ok((
        f.apply_real_multiplier(|xi| lp_low(k, xi as f64)),
        f.apply_real_multiplier(|xi| lp_band(k, xi as f64)),
    ))
}

/// `|ξ|^α` multiplier.
pub fn fractional_derivative(f: &Signal1D, alpha: f64) -> Result<Signal1D> {
    check_alpha(alpha)?;
    Ok(f.apply_real_multiplier(|k| (k.abs() as f64).powf(alpha)))
}

/// `|ξ|^α` along one axis of a 2D signal (0 = x, 1 = y).
pub fn fractional_derivative_2d(f: &Signal2D, alpha: f64, axis: usize) -> Result<Signal2D> {
    check_alpha(alpha)?;
    if axis > 1 {
        return Err(Error::Domain(format!("axis {axis} outside 0..2")));
    }
    Ok(f.apply_axis_multiplier(axis, |k| C64::new((k.abs() as f64).powf(alpha), 0.0)))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain(format!("order must be positive, got {alpha}")));
    }
    Ok(())
}

/// `χ̃_I(x) = (1 + dist(x, I)/|I|)^{-M}` on the grid, torus distance.
pub fn chi_tilde(iv: &DyadicInterval, mexp: i32, grid: GridSpec) -> Result<Vec<f64>> {
    if mexp < 1 {
        return Err(Error::Domain(format!("weight exponent must be at least 1, got {mexp}")));
    }
    let n = grid.size();
    let len = iv.length();
    Ok((0..n)
        .map(|i| (1.0 + iv.torus_dist(i as f64 / n as f64) / len).powi(-mexp))
        .collect())
}

pub const DEFAULT_CHI_EXP: i32 = 20;

/// Kernels translated by `n·2^{-k}`: extra phase `e^{2πinξ/2^k}` on `P_k`, `Q_k`.
pub fn shifted_ops(f: &Signal1D, k: i32, n: i64) -> Result<(Signal1D, Signal1D)> {
    check_scale(f, k)?;
    if n.unsigned_abs() as usize > f.len() {
        return Err(Error::Domain(format!("shift {n} exceeds grid size")));
    }
    let phase = |xi: i64| cis(n as f64 * xi as f64 * 2f64.powi(-k));
    Ok((
        f.apply_multiplier(|xi| phase(xi) * lp_low(k, xi as f64)),
        f.apply_multiplier(|xi| phase(xi) * lp_band(k, xi as f64)),
    ))
}
