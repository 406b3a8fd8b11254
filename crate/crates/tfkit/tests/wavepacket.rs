use proptest::prelude::*;
use tfkit::dyadic::{DyadicInterval, Tile};
use tfkit::grid::{GridSpec, Signal1D, C64};
use tfkit::rng::{band_limited, rng, white_signal};
use tfkit::wavepacket::*;

const M_CHECK: i32 = 10;

fn line(n: usize) -> GridSpec {
    GridSpec::line(n).unwrap()
}

fn tile(j: i32, m: i64, fm: i64) -> Tile {
    Tile::new(DyadicInterval::new(j, m), DyadicInterval::new(-j, fm)).unwrap()
}

#[test]
fn window_profile_bounds() {
    for w in [PACKET_WINDOW, LP_WINDOW, Window::new(0.3).unwrap()] {
        assert_eq!(w.profile(0.0), 1.0);
        assert_eq!(w.profile(1.0), 0.0);
        assert_eq!(w.profile(-1.5), 0.0);
        for i in 0..=200 {
            let u = -1.0 + i as f64 / 100.0;
            let v = w.profile(u);
            assert!((0.0..=1.0).contains(&v));
            assert_eq!(v, w.profile(-u));
        }
    }
    assert!(Window::new(1.0).is_err());
}

#[test]
fn packet_norm_and_self_pairing() {
    let g = line(128);
    let p = make_wave_packet(&tile(3, 5, 2), &PACKET_WINDOW, g).unwrap();
    assert!((p.samples().lp_norm(2.0).unwrap() - 1.0).abs() < 1e-12);
    let z = inner_product(p.samples(), &p).unwrap();
    assert!((z - C64::new(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn disjoint_frequencies_are_orthogonal() {
    let g = line(128);
    let a = make_wave_packet(&tile(3, 1, 0), &PACKET_WINDOW, g).unwrap();
    let b = make_wave_packet(&tile(3, 4, 3), &PACKET_WINDOW, g).unwrap();
    let support = |p: &WavePacket| p.spectrum().iter().map(|&(k, _)| k).collect::<Vec<_>>();
    let sb = support(&b);
    assert!(support(&a).iter().all(|k| !sb.contains(k)));
    assert!(inner_product(a.samples(), &b).unwrap().norm() < 1e-15);
    // exact spectrum of e_40, which lies outside ω_P
    let mut ehat = vec![C64::new(0.0, 0.0); 128];
    ehat[40] = C64::new(128.0, 0.0);
    assert_eq!(a.pair_with_spectrum(&ehat), C64::new(0.0, 0.0));
}

#[test]
fn inner_product_matches_frequency_sum() {
    let g = line(256);
    let f = white_signal(g, &mut rng(1));
    let p = make_wave_packet(&tile(4, 3, -1), &PACKET_WINDOW, g).unwrap();
    let direct = inner_product(&f, &p).unwrap();
    let via_spectrum = p.pair_with_spectrum(&f.spectrum());
    assert!((direct - via_spectrum).norm() < 1e-12);
}

#[test]
fn packet_spatial_decay() {
    let g = line(512);
    let t = tile(4, 6, 1);
    let p = make_wave_packet(&t, &PACKET_WINDOW, g).unwrap();
    let len = t.space.length();
    let mut c: f64 = 0.0;
    for (i, z) in p.samples().samples().iter().enumerate() {
        let d = t.space.torus_dist(i as f64 / 512.0);
        c = c.max(z.norm() * len.sqrt() * (1.0 + d / len).powi(M_CHECK));
    }
    println!("spatial decay constant at M = {M_CHECK}: {c:.3e}");
    assert!(c.is_finite() && c > 0.0);
}

#[test]
fn packet_errors() {
    let g = line(64);
    assert!(matches!(make_wave_packet(&tile(1, 0, 0), &PACKET_WINDOW, g), Err(tfkit::Error::Resolution { .. })));
    assert!(make_wave_packet(&tile(2, 0, 40), &PACKET_WINDOW, g).is_err());
}

#[test]
fn sharp_projection_on_exponentials() {
    let g = line(64);
    let iv = FreqInterval::new(-3, 5);
    let e = Signal1D::exponential(g, 4);
    assert!(fourier_project(&e, &iv, true).max_abs_diff(&e) < 1e-14);
    let o = Signal1D::exponential(g, 9);
    assert!(fourier_project(&o, &iv, true).max_abs_diff(&Signal1D::zeros(g)) < 1e-14);
}

#[test]
fn littlewood_paley_flat_parts() {
    let g = line(128);
    for k in 1..6 {
        let m = 1i64 << (k - 1);
        let e = Signal1D::exponential(g, m);
        let (p, q) = lp_projections(&e, k).unwrap();
        assert!(p.max_abs_diff(&e) < 1e-14, "P_{k} e_{m}");
        assert!(q.max_abs_diff(&Signal1D::zeros(g)) < 1e-14, "Q_{k} e_{m}");
    }
    let c = Signal1D::constant(g, C64::new(2.0, 1.0));
    for k in 1..7 {
        let (p, q) = lp_projections(&c, k).unwrap();
        assert!(p.max_abs_diff(&c) < 1e-14 && q.lp_norm(2.0).unwrap() < 1e-14);
    }
    assert!(lp_projections(&c, 7).is_err());
}

#[test]
fn fractional_derivative_on_exponentials() {
    let g = line(64);
    for (n, a) in [(3i64, 0.5), (-7, 1.5), (12, 2.0)] {
        let d = fractional_derivative(&Signal1D::exponential(g, n), a).unwrap();
        let want = Signal1D::exponential(g, n).scale(C64::new((n.abs() as f64).powf(a), 0.0));
        assert!(d.max_abs_diff(&want) < 1e-10);
    }
    let c = Signal1D::constant(g, C64::new(1.0, 0.0));
    assert!(fractional_derivative(&c, 0.7).unwrap().lp_norm(2.0).unwrap() < 1e-14);
    assert!(fractional_derivative(&c, 0.0).is_err());
}

#[test]
fn chi_tilde_values() {
    let g = line(64);
    let iv = DyadicInterval::new(3, 2);
    let w = chi_tilde(&iv, 20, g).unwrap();
    let (lo, hi) = iv.grid_range(64);
    assert!(w[lo..hi].iter().all(|&v| v == 1.0));
    // one interval length to the right of I
    assert!((w[hi + 8] - 2f64.powi(-20)).abs() < 1e-18);
    assert!(w[hi + 8] < w[hi + 7] && w[lo - 8] == w[hi + 8]);
    assert!(chi_tilde(&iv, 0, g).is_err());
}

#[test]
fn shifted_ops_reduce_and_rotate() {
    let g = line(128);
    let f = white_signal(g, &mut rng(2));
    let (p0, q0) = shifted_ops(&f, 3, 0).unwrap();
    let (p, q) = lp_projections(&f, 3).unwrap();
    assert!(p0.max_abs_diff(&p) < 1e-14 && q0.max_abs_diff(&q) < 1e-14);
    let e = Signal1D::exponential(g, 9);
    let (_, qs) = shifted_ops(&e, 3, 5).unwrap();
    let (_, qe) = lp_projections(&e, 3).unwrap();
    for (a, b) in qs.samples().iter().zip(qe.samples()) {
        assert!((a.norm() - b.norm()).abs() < 1e-12);
    }
    assert!(shifted_ops(&f, 3, 129).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn littlewood_paley_reconstructs(seed in any::<u64>(), l in 3u32..11) {
        let g = GridSpec::new(l, 1).unwrap();
        let f = white_signal(g, &mut rng(seed));
        let mut acc = f.apply_real_multiplier(|k| lp_low(0, k as f64));
        for k in 0..l as i32 {
            acc = acc.add(&lp_projections(&f, k).unwrap().1).unwrap();
        }
        prop_assert!(acc.sub(&f).unwrap().lp_norm(2.0).unwrap() <= 1e-10 * f.lp_norm(2.0).unwrap());
    }

    #[test]
    fn derivative_orders_compose(seed in any::<u64>(), a in 0.1f64..2.0, b in 0.1f64..2.0) {
        let f = band_limited(line(128), 40, &mut rng(seed));
        let ab = fractional_derivative(&fractional_derivative(&f, a).unwrap(), b).unwrap();
        let direct = fractional_derivative(&f, a + b).unwrap();
        prop_assert!(ab.sub(&direct).unwrap().lp_norm(2.0).unwrap() <= 1e-10 * direct.lp_norm(2.0).unwrap());
    }

    #[test]
    fn lp_band_support(k in 0i32..10, xi in -4096.0f64..4096.0) {
        let v = lp_band(k, xi);
        let lo = 2f64.powi(k - 1);
        let hi = 2f64.powi(k + 1);
        prop_assert!((0.0..=1.0).contains(&v));
        if xi.abs() <= lo || xi.abs() >= hi {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn packets_have_unit_norm(j in 2i32..6, m in 0i64..64, fm in -3i64..3) {
        let t = tile(j, m % (1i64 << j), fm);
        let p = make_wave_packet(&t, &PACKET_WINDOW, line(256)).unwrap();
        prop_assert!((p.samples().lp_norm(2.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
