//! Seeded input generators. Every generator draws in a fixed order that does not depend
//! on the grid size, so the same seed describes the same continuum object at every `N`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{GridSpec, Signal1D, Signal2D, C64};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `index` under `master`; independent of scheduling order.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    rng(trial_seed(master, index))
}

fn unit_complex(r: &mut impl Rng) -> C64 {
    C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Independent uniform samples in the unit square of the complex plane.
pub fn white_signal(grid: GridSpec, r: &mut impl Rng) -> Signal1D {
    Signal1D::new(grid, (0..grid.size()).map(|_| unit_complex(r)).collect()).expect("sized")
}

/// Trigonometric polynomial with random coefficients on `|k| ≤ band`.
pub fn band_limited(grid: GridSpec, band: i64, r: &mut impl Rng) -> Signal1D {
    let coeffs: Vec<(i64, C64)> = (-band..=band).map(|k| (k, unit_complex(r))).collect();
    trig_poly(grid, &coeffs)
}

/// Band-limited on `lo ≤ |k| ≤ hi`, with zero mean when `lo > 0`.
pub fn band_pass(grid: GridSpec, lo: i64, hi: i64, r: &mut impl Rng) -> Signal1D {
    let coeffs: Vec<(i64, C64)> = (-hi..=hi)
        .filter(|k| k.abs() >= lo)
        .map(|k| (k, unit_complex(r)))
        .collect();
    trig_poly(grid, &coeffs)
}

/// `Σ c_k e^{2πikx}`; frequencies must be representable on the grid.
pub fn trig_poly(grid: GridSpec, coeffs: &[(i64, C64)]) -> Signal1D {
    let n = grid.size();
    let mut spec = vec![C64::new(0.0, 0.0); n];
    for &(k, c) in coeffs {
        assert!(2 * k.abs() < n as i64, "frequency {k} not representable at N={n}");
        spec[crate::grid::freq_bin(k, n)] += c * n as f64;
    }
    Signal1D::from_spectrum(grid, spec).expect("sized")
}

/// Random finite union of intervals of the torus, as a 0/1 mask.
pub fn interval_set(grid: GridSpec, pieces: usize, max_len: f64, r: &mut impl Rng) -> Vec<f64> {
    let iv: Vec<(f64, f64)> = (0..pieces)
        .map(|_| {
            let a: f64 = r.gen_range(0.0..1.0);
            let l: f64 = r.gen_range(0.0..max_len);
            (a, a + l)
        })
        .collect();
    mask_of_intervals(grid, &iv)
}

/// 0/1 mask of a union of intervals `[a, b)` taken mod 1.
pub fn mask_of_intervals(grid: GridSpec, iv: &[(f64, f64)]) -> Vec<f64> {
    let n = grid.size();
    (0..n)
        .map(|i| {
            let x = i as f64 / n as f64;
            let hit = iv.iter().any(|&(a, b)| {
                let t = (x - a).rem_euclid(1.0);
                t < b - a
            });
            if hit {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Independent Bernoulli(density) mask.
pub fn bernoulli_mask(len: usize, density: f64, r: &mut impl Rng) -> Vec<f64> {
    (0..len).map(|_| if r.gen_bool(density) { 1.0 } else { 0.0 }).collect()
}

/// Random unimodular phases times a mask: `|f| = 1_F`.
pub fn dominated_by(mask: &[f64], r: &mut impl Rng) -> Vec<C64> {
    mask.iter()
        .map(|&m| {
            let t: f64 = r.gen_range(0.0..1.0);
            crate::grid::cis(t) * m
        })
        .collect()
}

/// Random coefficients on the square `|kx|, |ky| ≤ band`.
pub fn band_limited_2d(grid: GridSpec, band: i64, r: &mut impl Rng) -> Signal2D {
    let n = grid.size();
    let mut spec = vec![C64::new(0.0, 0.0); n * n];
    for kx in -band..=band {
        for ky in -band..=band {
            let c = unit_complex(r);
            let bx = crate::grid::freq_bin(kx, n);
            let by = crate::grid::freq_bin(ky, n);
            spec[bx * n + by] = c * (n * n) as f64;
        }
    }
    Signal2D::from_spectrum(grid, spec).expect("sized")
}
