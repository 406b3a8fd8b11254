//! Signals on the periodic unit torus sampled at `N = 2^L` points per axis.
//!
//! Transforms are unnormalized forward (`f̂(k) = Σ f(n) e^{-2πikn/N}`) and carry the
//! `1/N` on the inverse. Norms use the normalized counting measure, so `‖1‖_p = 1`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const MAX_LOG_SIZE: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    log_size: u32,
    axes: u8,
}

impl GridSpec {
    pub fn new(log_size: u32, axes: u8) -> Result<Self> {
        if !(3..=MAX_LOG_SIZE).contains(&log_size) {
            return Err(Error::Domain(format!("log_size {log_size} outside 3..={MAX_LOG_SIZE}")));
        }
        if axes != 1 && axes != 2 {
            return Err(Error::Domain(format!("axes must be 1 or 2, got {axes}")));
        }
        Ok(Self { log_size, axes })
    }

    /// One-axis grid with `n` points; `n` must be a power of two.
    pub fn line(n: usize) -> Result<Self> {
        Self::from_size(n, 1)
    }

    pub fn plane(n: usize) -> Result<Self> {
        Self::from_size(n, 2)
    }

    pub fn from_size(n: usize, axes: u8) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::Domain(format!("grid size {n} is not a power of two")));
        }
        Self::new(n.trailing_zeros(), axes)
    }

    pub fn log_size(&self) -> u32 {
        self.log_size
    }

    pub fn size(&self) -> usize {
        1usize << self.log_size
    }

    pub fn axes(&self) -> u8 {
        self.axes
    }

    pub fn total_len(&self) -> usize {
        self.size().pow(self.axes as u32)
    }

    pub fn with_axes(&self, axes: u8) -> Result<Self> {
        Self::new(self.log_size, axes)
    }
}

/// Integer representative in `(-N/2, N/2]` of DFT bin `bin`.
pub fn freq_rep(bin: usize, n: usize) -> i64 {
    let k = bin as i64;
    if k > (n / 2) as i64 {
        k - n as i64
    } else {
        k
    }
}

/// DFT bin holding integer frequency `k` (taken mod `N`).
pub fn freq_bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward unnormalized transform in place.
pub fn fft_in_place(buf: &mut [C64]) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// Inverse transform in place, including the `1/N` factor.
pub fn ifft_in_place(buf: &mut [C64]) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    plan.process(buf);
    let s = 1.0 / buf.len() as f64;
    for z in buf.iter_mut() {
        *z *= s;
    }
}

/// `e^{2πi t}`.
pub fn cis(t: f64) -> C64 {
    let a = 2.0 * PI * t;
    C64::new(a.cos(), a.sin())
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::Domain(format!("exponent p must be positive, got {p}")));
    }
    Ok(())
}

/// `((1/n) Σ v^p)^{1/p}` over nonnegative values; `p = ∞` gives the max.
pub fn lp_mean(values: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if values.is_empty() {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(values.iter().cloned().fold(0.0, f64::max));
    }
    let scale = values.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    // scaled to keep large p from overflowing
    let s: f64 = values.iter().map(|v| (v / scale).powf(p)).sum();
    Ok(scale * (s / values.len() as f64).powf(1.0 / p))
}

/// Pointwise `(Σ_k v_k^r)^{1/r}` across equally long rows.
pub fn lr_combine(rows: &[Vec<f64>], r: f64) -> Result<Vec<f64>> {
    check_p(r)?;
    let len = rows.first().map(|v| v.len()).unwrap_or(0);
    if rows.iter().any(|v| v.len() != len) {
        return Err(Error::GridMismatch(len, rows.iter().map(|v| v.len()).max().unwrap_or(0)));
    }
    let mut out = vec![0.0; len];
    for (x, o) in out.iter_mut().enumerate() {
        let col = rows.iter().map(|v| v[x]);
        *o = if r.is_infinite() {
            col.fold(0.0, f64::max)
        } else {
            let m = rows.iter().map(|v| v[x]).fold(0.0, f64::max);
            if m == 0.0 {
                0.0
            } else {
                m * col.map(|v| (v / m).powf(r)).sum::<f64>().powf(1.0 / r)
            }
        };
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signal1D {
    grid: GridSpec,
    samples: Vec<C64>,
}

impl Signal1D {
    pub fn new(grid: GridSpec, samples: Vec<C64>) -> Result<Self> {
        if grid.axes() != 1 {
            return Err(Error::Domain("Signal1D needs a one-axis grid".into()));
        }
        if samples.len() != grid.size() {
            return Err(Error::GridMismatch(grid.size(), samples.len()));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, samples: vec![C64::new(0.0, 0.0); grid.size()] }
    }

    pub fn constant(grid: GridSpec, c: C64) -> Self {
        Self { grid, samples: vec![c; grid.size()] }
    }

    /// Samples `f(n/N)`.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> C64) -> Self {
        let n = grid.size();
        Self { grid, samples: (0..n).map(|i| f(i as f64 / n as f64)).collect() }
    }

    pub fn from_real(grid: GridSpec, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// The character `e_k(x) = e^{2πikx}`.
    pub fn exponential(grid: GridSpec, k: i64) -> Self {
        let n = grid.size() as i64;
        let samples = (0..n).map(|i| cis((k * i).rem_euclid(n) as f64 / n as f64)).collect();
        Self { grid, samples }
    }

    /// Inverse transform of the given coefficient vector (length `N`).
    pub fn from_spectrum(grid: GridSpec, mut coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.size() {
            return Err(Error::GridMismatch(grid.size(), coeffs.len()));
        }
        ifft_in_place(&mut coeffs);
        Self::new(grid, coeffs)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn same_grid(&self, other: &Signal1D) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    /// Fourier coefficients as a raw vector indexed by bin.
    pub fn spectrum(&self) -> Vec<C64> {
        let mut buf = self.samples.clone();
        fft_in_place(&mut buf);
        buf
    }

    pub fn dft(&self) -> Signal1D {
        Signal1D { grid: self.grid, samples: self.spectrum() }
    }

    pub fn idft(&self) -> Signal1D {
        let mut buf = self.samples.clone();
        ifft_in_place(&mut buf);
        Signal1D { grid: self.grid, samples: buf }
    }

    /// Fourier multiplier with symbol evaluated on integer representatives.
    pub fn apply_multiplier(&self, m: impl Fn(i64) -> C64) -> Signal1D {
        let n = self.len();
        let mut buf = self.spectrum();
        for (b, z) in buf.iter_mut().enumerate() {
            *z *= m(freq_rep(b, n));
        }
        ifft_in_place(&mut buf);
        Signal1D { grid: self.grid, samples: buf }
    }

    pub fn apply_real_multiplier(&self, m: impl Fn(i64) -> f64) -> Signal1D {
        self.apply_multiplier(|k| C64::new(m(k), 0.0))
    }

    pub fn abs(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_mean(&self.abs(), p)
    }

    /// `(1/N) Σ f·conj(g)`.
    pub fn inner(&self, other: &Signal1D) -> Result<C64> {
        self.same_grid(other)?;
        let s: C64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum();
        Ok(s / self.len() as f64)
    }

    pub fn scale(&self, c: C64) -> Signal1D {
        Signal1D { grid: self.grid, samples: self.samples.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Signal1D) -> Result<Signal1D> {
        self.same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        Ok(Signal1D { grid: self.grid, samples })
    }

    pub fn sub(&self, other: &Signal1D) -> Result<Signal1D> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Signal1D) -> Result<Signal1D> {
        self.same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        Ok(Signal1D { grid: self.grid, samples })
    }

    pub fn conj(&self) -> Signal1D {
        Signal1D { grid: self.grid, samples: self.samples.iter().map(|z| z.conj()).collect() }
    }

    /// Pointwise multiplication by a real mask.
    pub fn masked(&self, mask: &[f64]) -> Result<Signal1D> {
        if mask.len() != self.len() {
            return Err(Error::GridMismatch(self.len(), mask.len()));
        }
        let samples = self.samples.iter().zip(mask).map(|(z, m)| z * *m).collect();
        Ok(Signal1D { grid: self.grid, samples })
    }

    pub fn max_abs_diff(&self, other: &Signal1D) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Samples `f(x, y)` stored row-major: row index is `x`, column index is `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal2D {
    grid: GridSpec,
    samples: Vec<C64>,
}

impl Signal2D {
    pub fn new(grid: GridSpec, samples: Vec<C64>) -> Result<Self> {
        if grid.axes() != 2 {
            return Err(Error::Domain("Signal2D needs a two-axis grid".into()));
        }
        if samples.len() != grid.total_len() {
            return Err(Error::GridMismatch(grid.total_len(), samples.len()));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, samples: vec![C64::new(0.0, 0.0); grid.total_len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> C64) -> Self {
        let n = grid.size();
        let h = 1.0 / n as f64;
        let mut samples = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                samples.push(f(x as f64 * h, y as f64 * h));
            }
        }
        Self { grid, samples }
    }

    /// `a(x) b(y)`.
    pub fn tensor(a: &Signal1D, b: &Signal1D) -> Result<Self> {
        a.same_grid(b)?;
        let grid = a.grid().with_axes(2)?;
        let mut samples = Vec::with_capacity(a.len() * b.len());
        for u in a.samples() {
            for v in b.samples() {
                samples.push(u * v);
            }
        }
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn side(&self) -> usize {
        self.grid.size()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn at(&self, x: usize, y: usize) -> C64 {
        self.samples[x * self.side() + y]
    }

    pub fn row(&self, x: usize) -> Signal1D {
        let n = self.side();
        let grid = self.grid.with_axes(1).expect("valid grid");
        Signal1D { grid, samples: self.samples[x * n..(x + 1) * n].to_vec() }
    }

    pub fn column(&self, y: usize) -> Signal1D {
        let n = self.side();
        let grid = self.grid.with_axes(1).expect("valid grid");
        Signal1D { grid, samples: (0..n).map(|x| self.samples[x * n + y]).collect() }
    }

    pub fn set_column(&mut self, y: usize, col: &Signal1D) {
        let n = self.side();
        for x in 0..n {
            self.samples[x * n + y] = col.samples()[x];
        }
    }

    fn transform_rows(buf: &mut [C64], n: usize, inverse: bool) {
        for row in buf.chunks_mut(n) {
            if inverse {
                ifft_in_place(row)
            } else {
                fft_in_place(row)
            }
        }
    }

    fn transpose(buf: &mut [C64], n: usize) {
        for i in 0..n {
            for j in (i + 1)..n {
                buf.swap(i * n + j, j * n + i);
            }
        }
    }

    fn transform(buf: &mut [C64], n: usize, inverse: bool) {
        Self::transform_rows(buf, n, inverse);
        Self::transpose(buf, n);
        Self::transform_rows(buf, n, inverse);
        Self::transpose(buf, n);
    }

    /// 2D coefficients indexed `[kx * N + ky]` by bin.
    pub fn spectrum(&self) -> Vec<C64> {
        let mut buf = self.samples.clone();
        Self::transform(&mut buf, self.side(), false);
        buf
    }

    pub fn from_spectrum(grid: GridSpec, mut coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.total_len() {
            return Err(Error::GridMismatch(grid.total_len(), coeffs.len()));
        }
        Self::transform(&mut coeffs, grid.size(), true);
        Self::new(grid, coeffs)
    }

    pub fn apply_multiplier(&self, m: impl Fn(i64, i64) -> C64) -> Signal2D {
        let n = self.side();
        let mut buf = self.spectrum();
        for bx in 0..n {
            let kx = freq_rep(bx, n);
            for by in 0..n {
                buf[bx * n + by] *= m(kx, freq_rep(by, n));
            }
        }
        Self::transform(&mut buf, n, true);
        Signal2D { grid: self.grid, samples: buf }
    }

    /// Multiplier acting on one axis only (0 = x, 1 = y).
    pub fn apply_axis_multiplier(&self, axis: usize, m: impl Fn(i64) -> C64) -> Signal2D {
        let n = self.side();
        let table: Vec<C64> = (0..n).map(|b| m(freq_rep(b, n))).collect();
        let mut buf = self.samples.clone();
        if axis == 0 {
            Self::transpose(&mut buf, n);
        }
        for row in buf.chunks_mut(n) {
            fft_in_place(row);
            for (z, t) in row.iter_mut().zip(&table) {
                *z *= t;
            }
            ifft_in_place(row);
        }
        if axis == 0 {
            Self::transpose(&mut buf, n);
        }
        Signal2D { grid: self.grid, samples: buf }
    }

    pub fn abs(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_mean(&self.abs(), p)
    }

    /// `‖ ‖f(x,·)‖_{L^{p2}_y} ‖_{L^{p1}_x}`.
    pub fn mixed_norm(&self, p1: f64, p2: f64) -> Result<f64> {
        check_p(p1)?;
        check_p(p2)?;
        let n = self.side();
        let abs = self.abs();
        let inner = abs.chunks(n).map(|row| lp_mean(row, p2)).collect::<Result<Vec<_>>>()?;
        lp_mean(&inner, p1)
    }

    pub fn scale(&self, c: C64) -> Signal2D {
        Signal2D { grid: self.grid, samples: self.samples.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Signal2D) -> Result<Signal2D> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.samples.len(), other.samples.len()));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        Ok(Signal2D { grid: self.grid, samples })
    }

    pub fn mul(&self, other: &Signal2D) -> Result<Signal2D> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.samples.len(), other.samples.len()));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        Ok(Signal2D { grid: self.grid, samples })
    }

    pub fn max_abs_diff(&self, other: &Signal2D) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Ordered family of signals, optionally nested one level per iterated space.
#[derive(Clone, Debug)]
pub enum SignalFamily {
    Flat(Vec<Signal1D>),
    Nested(Vec<SignalFamily>),
}

impl SignalFamily {
    pub fn flat(members: Vec<Signal1D>) -> Result<Self> {
        let fam = SignalFamily::Flat(members);
        fam.validate()?;
        Ok(fam)
    }

    pub fn nested(members: Vec<SignalFamily>) -> Result<Self> {
        let fam = SignalFamily::Nested(members);
        fam.validate()?;
        Ok(fam)
    }

    pub fn depth(&self) -> usize {
        match self {
            SignalFamily::Flat(_) => 1,
            SignalFamily::Nested(v) => 1 + v.first().map(|f| f.depth()).unwrap_or(0),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SignalFamily::Flat(v) => v.len(),
            SignalFamily::Nested(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn grid(&self) -> Option<GridSpec> {
        match self {
            SignalFamily::Flat(v) => v.first().map(|s| s.grid()),
            SignalFamily::Nested(v) => v.first().and_then(|f| f.grid()),
        }
    }

    /// Flattened members in order.
    pub fn leaves(&self) -> Vec<&Signal1D> {
        match self {
            SignalFamily::Flat(v) => v.iter().collect(),
            SignalFamily::Nested(v) => v.iter().flat_map(|f| f.leaves()).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Domain("empty signal family".into()));
        }
        let grid = self.grid().expect("non-empty");
        if self.leaves().iter().any(|s| s.grid() != grid) {
            return Err(Error::Domain("family members live on different grids".into()));
        }
        if let SignalFamily::Nested(v) = self {
            let d = v[0].depth();
            for f in v {
                f.validate()?;
                if f.depth() != d {
                    return Err(Error::Domain("ragged nesting depth".into()));
                }
            }
        }
        Ok(())
    }

    /// Pointwise iterated `ℓ^r` aggregate; `rs[0]` is the innermost exponent.
    pub fn lr_pointwise(&self, rs: &[f64]) -> Result<Vec<f64>> {
        if rs.len() != self.depth() {
            return Err(Error::Domain(format!(
                "family depth {} needs {} exponents, got {}",
                self.depth(),
                self.depth(),
                rs.len()
            )));
        }
        if let Some(&r) = rs.iter().find(|&&r| r.is_nan() || r < 1.0) {
            return Err(Error::Domain(format!("family exponent must lie in [1, ∞], got {r}")));
        }
        let outer = *rs.last().expect("non-empty");
        let rows = match self {
            SignalFamily::Flat(v) => v.iter().map(|s| s.abs()).collect::<Vec<_>>(),
            SignalFamily::Nested(v) => v
                .iter()
                .map(|f| f.lr_pointwise(&rs[..rs.len() - 1]))
                .collect::<Result<Vec<_>>>()?,
        };
        lr_combine(&rows, outer)
    }

    /// `‖(Σ_k |f_k|^r)^{1/r}‖_{L^p}` with iterated inner exponents.
    pub fn lr_family_norm(&self, rs: &[f64], p: f64) -> Result<f64> {
        lp_mean(&self.lr_pointwise(rs)?, p)
    }
}

/// Reciprocal exponents `(1/p, 1/q, 1/s′)`; `p = ∞` is stored as `0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTuple {
    pub inv_p: f64,
    pub inv_q: f64,
    pub inv_sprime: f64,
}

impl ExponentTuple {
    pub fn new(inv_p: f64, inv_q: f64, inv_sprime: f64) -> Self {
        Self { inv_p, inv_q, inv_sprime }
    }

    /// From `(p, q, s)` with `1/s = 1/p + 1/q`.
    pub fn from_pqs(p: f64, q: f64) -> Self {
        let (ip, iq) = (recip(p), recip(q));
        Self { inv_p: ip, inv_q: iq, inv_sprime: 1.0 - ip - iq }
    }

    pub fn holder(&self) -> bool {
        (self.inv_p + self.inv_q + self.inv_sprime - 1.0).abs() < 1e-12
    }

    pub fn p(&self) -> f64 {
        recip(self.inv_p)
    }

    pub fn q(&self) -> f64 {
        recip(self.inv_q)
    }

    /// Target exponent `s` with `1/s = 1 − 1/s′`.
    pub fn s(&self) -> f64 {
        recip(1.0 - self.inv_sprime)
    }
}

/// `1/x` with `1/∞ = 0` and `1/0 = ∞`.
pub fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}
