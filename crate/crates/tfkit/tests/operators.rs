use tfkit::dyadic::{canonical_family, canonical_scales, restrict, DyadicInterval, TileSet};
use tfkit::grid::{freq_bin, GridSpec, Signal1D, Signal2D, C64};
use tfkit::operators::*;
use tfkit::rng::{band_limited, band_limited_2d, rng, trial_rng, white_signal};
use tfkit::size_energy::{template_spectrum, Template};
use tfkit::wavepacket::{inner_product, lp_band, PacketCache, PACKET_WINDOW};
use tfkit::Error;

fn line(n: usize) -> GridSpec {
    GridSpec::line(n).unwrap()
}

fn plane(n: usize) -> GridSpec {
    GridSpec::plane(n).unwrap()
}

fn family(n: usize) -> TileSet {
    let g = line(n);
    canonical_family(g, &canonical_scales(g)).unwrap()
}

fn rel_diff(a: &Signal1D, b: &Signal1D) -> f64 {
    a.max_abs_diff(b) / b.lp_norm(f64::INFINITY).unwrap().max(1e-300)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn bht_direct_exponentials() {
    let g = line(32);
    for (a, b) in [(-7, 3), (0, 1), (-15, 16), (2, 9)] {
        let out = bht_direct(&Signal1D::exponential(g, a), &Signal1D::exponential(g, b)).unwrap();
        assert!(out.max_abs_diff(&Signal1D::exponential(g, a + b)) < 1e-12, "({a},{b})");
        let out = bht_direct(&Signal1D::exponential(g, b), &Signal1D::exponential(g, a)).unwrap();
        assert!(out.lp_norm(f64::INFINITY).unwrap() < 1e-12, "({b},{a})");
    }
}

#[test]
fn bht_accelerated_matches_double_sum() {
    for (n, seed) in [(16usize, 1u64), (64, 2), (128, 3), (512, 4)] {
        let mut r = rng(seed);
        let (f, h) = (white_signal(line(n), &mut r), white_signal(line(n), &mut r));
        let d = rel_diff(&bht_direct(&f, &h).unwrap(), &bht_direct_reference(&f, &h).unwrap());
        assert!(d <= 1e-10, "N={n}: {d}");
    }
    let err = bht_direct(&Signal1D::zeros(line(8)), &Signal1D::zeros(line(16))).unwrap_err();
    assert!(matches!(err, Error::GridMismatch(..)));
}

#[test]
fn bht_dilation_covariance() {
    let n = 128;
    let g = line(n);
    let mut r = rng(9);
    let f = band_limited(g, n as i64 / 4 - 1, &mut r);
    let h = band_limited(g, n as i64 / 4 - 1, &mut r);
    let dil = |s: &Signal1D| Signal1D::new(g, (0..n).map(|j| s.samples()[(2 * j) % n]).collect()).unwrap();
    let lhs = bht_direct(&dil(&f), &dil(&h)).unwrap();
    let rhs = dil(&bht_direct(&f, &h).unwrap());
    assert!(lhs.max_abs_diff(&rhs) < 1e-10);
}

#[test]
fn bht_bilinear() {
    let g = line(64);
    let mut r = rng(17);
    let (f1, f2, h) = (white_signal(g, &mut r), white_signal(g, &mut r), white_signal(g, &mut r));
    let (a, b) = (c(0.3, -1.2), c(2.0, 0.5));
    let lhs = bht_direct(&f1.scale(a).add(&f2.scale(b)).unwrap(), &h).unwrap();
    let rhs = bht_direct(&f1, &h).unwrap().scale(a).add(&bht_direct(&f2, &h).unwrap().scale(b)).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-10);
}

#[test]
fn model_empty_single_and_uncertified() {
    let g = line(64);
    let cache = PacketCache::new();
    let mut r = rng(2);
    let (f, h) = (white_signal(g, &mut r), white_signal(g, &mut r));
    let out = bht_model(&f, &h, &TileSet::empty(), &PACKET_WINDOW, &cache).unwrap();
    assert_eq!(out.lp_norm(f64::INFINITY).unwrap(), 0.0);

    let set = family(64);
    let one = set.subset(&[5]);
    let t = one.tiles()[0];
    let p: Vec<_> = (0..3).map(|i| cache.get(&t.tile(i), &PACKET_WINDOW, g).unwrap()).collect();
    let c1 = inner_product(&f, &p[0]).unwrap();
    let c2 = inner_product(&h, &p[1]).unwrap();
    let want = p[2].samples().scale(c1 * c2 / t.space.length().sqrt());
    let out = bht_model(&f, &h, &one, &PACKET_WINDOW, &cache).unwrap();
    assert!(out.max_abs_diff(&want) < 1e-12);

    let raw = TileSet::uncertified(set.tiles().to_vec());
    assert!(matches!(bht_model(&f, &h, &raw, &PACKET_WINDOW, &cache), Err(Error::Refused(_))));
    assert!(matches!(trilinear_form(&f, &h, &f, &raw, &PACKET_WINDOW, &cache, false), Err(Error::Refused(_))));
}

#[test]
fn model_linear_in_each_slot() {
    let g = line(64);
    let cache = PacketCache::new();
    let set = family(64);
    let mut r = rng(4);
    let (f1, f2, h) = (white_signal(g, &mut r), white_signal(g, &mut r), white_signal(g, &mut r));
    let (a, b) = (c(-0.7, 0.2), c(1.1, 1.9));
    let comb = f1.scale(a).add(&f2.scale(b)).unwrap();
    let m = |x: &Signal1D, y: &Signal1D| bht_model(x, y, &set, &PACKET_WINDOW, &cache).unwrap();
    let lhs = m(&comb, &h);
    let rhs = m(&f1, &h).scale(a).add(&m(&f2, &h).scale(b)).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-12 * lhs.lp_norm(f64::INFINITY).unwrap().max(1.0));
    let lhs = m(&h, &comb);
    let rhs = m(&h, &f1).scale(a).add(&m(&h, &f2).scale(b)).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-12 * lhs.lp_norm(f64::INFINITY).unwrap().max(1.0));
}

#[test]
fn trilinear_duality_and_breakdown() {
    for (n, seed) in [(64usize, 1u64), (256, 2)] {
        let g = line(n);
        let cache = PacketCache::new();
        let set = family(n);
        let mut r = rng(seed);
        let (f, h, k) = (white_signal(g, &mut r), white_signal(g, &mut r), white_signal(g, &mut r));
        let tv = trilinear_form(&f, &h, &k, &set, &PACKET_WINDOW, &cache, true).unwrap();
        let pair = bht_model(&f, &h, &set, &PACKET_WINDOW, &cache).unwrap().inner(&k).unwrap();
        assert!((tv.value - pair).norm() <= 1e-10 * pair.norm(), "N={n}");
        let sum: C64 = tv.breakdown.unwrap().iter().sum();
        assert!((sum - tv.value).norm() <= 1e-12 * tv.value.norm());
    }
}

#[test]
fn trilinear_orthogonal_third_slot() {
    let g = line(64);
    let cache = PacketCache::new();
    let set = family(64);
    let one = set.subset(&[0]);
    let t = one.tiles()[0];
    let (lo, hi) = t.freqs[2].integer_range();
    // a frequency outside ω₃ of the only tile
    let k = if hi + 3 < 32 { hi + 3 } else { lo - 3 };
    let h = Signal1D::exponential(g, k);
    let mut r = rng(8);
    let (f1, f2) = (white_signal(g, &mut r), white_signal(g, &mut r));
    let tv = trilinear_form(&f1, &f2, &h, &one, &PACKET_WINDOW, &cache, false).unwrap();
    assert!(tv.value.norm() < 1e-14);
}

#[test]
fn size_energy_bound_examples() {
    let g = line(64);
    let cache = PacketCache::new();
    let set = family(64);
    let z = Signal1D::zeros(g);
    let rep = trilinear_size_energy_bound_check([&z, &z, &z], &set, [1.0 / 3.0; 3], &PACKET_WINDOW, &cache).unwrap();
    assert_eq!((rep.form, rep.bound, rep.ratio), (0.0, 0.0, 0.0));

    assert!(check_theta([0.5, 0.5, 0.0]).is_ok());
    assert!(check_theta([1.0, 0.0, 0.0]).is_err());
    assert!(check_theta([0.5, 0.4, 0.0]).is_err());
    let f = white_signal(g, &mut rng(1));
    assert!(trilinear_size_energy_bound_check([&f, &f, &f], &set, [0.6, 0.6, -0.2], &PACKET_WINDOW, &cache).is_err());

    let mut worst: f64 = 0.0;
    for t in 0..10 {
        let mut r = trial_rng(5, t);
        let fs: Vec<Signal1D> = (0..3).map(|_| white_signal(g, &mut r)).collect();
        let rep = trilinear_size_energy_bound_check([&fs[0], &fs[1], &fs[2]], &set, [1.0 / 3.0; 3], &PACKET_WINDOW, &cache)
            .unwrap();
        assert!(rep.ratio.is_finite());
        assert!(rep.form <= rep.absolute_form * (1.0 + 1e-12));
        worst = worst.max(rep.ratio);
    }
    println!("size-energy ratio, theta = 1/3 each: max {worst:.4}");
}

#[test]
fn shell_pieces_sum_to_localized_form() {
    let n = 128;
    let g = line(n);
    let cache = PacketCache::new();
    let i0 = DyadicInterval::new(2, 1);
    let set = restrict(&family(n), &i0);
    assert!(!set.is_empty());
    let mut r = rng(12);
    let (f, h, k) = (white_signal(g, &mut r), white_signal(g, &mut r), white_signal(g, &mut r));
    let total = trilinear_form(&f, &h, &k, &set, &PACKET_WINDOW, &cache, false).unwrap().value;
    let masks = shell_masks(&i0, g);
    assert!(masks.len() >= 2);
    let mut acc = C64::new(0.0, 0.0);
    for m in &masks {
        acc += trilinear_form(&f.masked(m).unwrap(), &h, &k, &set, &PACKET_WINDOW, &cache, false).unwrap().value;
    }
    assert!((acc - total).norm() <= 1e-12 * total.norm().max(1e-300));
}

fn kinds() -> [ParaproductKind; 3] {
    [ParaproductKind::I, ParaproductKind::II, ParaproductKind::III]
}

#[test]
fn paraproduct_constant_g_kind_two() {
    let g = line(128);
    let f = white_signal(g, &mut rng(3));
    let one = Signal1D::constant(g, c(2.5, 0.0));
    let out = paraproduct(&f, &one, &ParaproductSpec::full(ParaproductKind::II, g)).unwrap();
    assert!(out.lp_norm(f64::INFINITY).unwrap() < 1e-12);
}

#[test]
fn paraproduct_exponential_support() {
    let n = 128;
    let g = line(n);
    for m in [3i64, 5, 12, -20] {
        let e = Signal1D::exponential(g, m);
        for kind in kinds() {
            let spec = ParaproductSpec::full(kind, g);
            let out = paraproduct(&e, &e, &spec).unwrap();
            let spec_out = out.spectrum();
            for (b, z) in spec_out.iter().enumerate() {
                if b != freq_bin(2 * m, n) {
                    assert!(z.norm() < 1e-9, "{kind:?} m={m}: mode {b}");
                }
            }
            let want = spec.symbol(m, m);
            let got = spec_out[freq_bin(2 * m, n)] / n as f64;
            assert!((got - want).norm() < 1e-12, "{kind:?} m={m}: {got} vs {want}");
            match kind {
                // only scales with 2^{k-1} < |m| < 2^{k+1}
                ParaproductKind::I => {
                    let active: Vec<i32> =
                        spec.scales.iter().copied().filter(|&k| lp_band(k, m as f64) != 0.0).collect();
                    assert!(!active.is_empty() && active.len() <= 2);
                    for k in active {
                        assert!(2f64.powi(k - 1) < m.abs() as f64 && (m.abs() as f64) < 2f64.powi(k + 1));
                    }
                    assert!(want > 0.0);
                }
                // low and band pieces of a single frequency never coexist
                _ => assert_eq!(want, 0.0),
            }
        }
    }
}

#[test]
fn paraproduct_bilinear_and_scale_validation() {
    let g = line(64);
    let mut r = rng(6);
    let (f1, f2, h) = (white_signal(g, &mut r), white_signal(g, &mut r), white_signal(g, &mut r));
    let (a, b) = (c(1.5, -0.5), c(-0.25, 2.0));
    for kind in kinds() {
        let spec = ParaproductSpec::full(kind, g);
        let p = |x: &Signal1D, y: &Signal1D| paraproduct(x, y, &spec).unwrap();
        let lhs = p(&f1.scale(a).add(&f2.scale(b)).unwrap(), &h);
        let rhs = p(&f1, &h).scale(a).add(&p(&f2, &h).scale(b)).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        let lhs = p(&h, &f1.scale(a).add(&f2.scale(b)).unwrap());
        let rhs = p(&h, &f1).scale(a).add(&p(&h, &f2).scale(b)).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }
    let bad = ParaproductSpec { kind: ParaproductKind::II, scales: vec![1] };
    assert!(paraproduct(&f1, &h, &bad).is_err());
    let bad = ParaproductSpec { kind: ParaproductKind::I, scales: vec![6] };
    assert!(paraproduct(&f1, &h, &bad).is_err());
}

fn slots(i: usize) -> SlotTemplates {
    let mut t = [Template::Lacunary; 3];
    t[i] = Template::NonLacunary;
    SlotTemplates(t)
}

fn pair_sparse(spec: &[(i64, C64)], f: &Signal1D) -> C64 {
    let n = f.len();
    let fh = f.spectrum();
    spec.iter().map(|&(k, c)| fh[freq_bin(k, n)] * c.conj()).sum::<C64>() / (n * n) as f64
}

#[test]
fn discrete_paraproduct_examples() {
    let n = 128;
    let g = line(n);
    let mut r = rng(21);
    let (f, h, k) = (white_signal(g, &mut r), white_signal(g, &mut r), white_signal(g, &mut r));
    let out = paraproduct_discrete(&f, &h, &[], slots(0)).unwrap();
    assert_eq!(out.lp_norm(f64::INFINITY).unwrap(), 0.0);

    let iv = DyadicInterval::new(3, 5);
    let sp: Vec<_> = (0..3).map(|i| template_spectrum(&iv, slots(1).0[i], g).unwrap()).collect();
    let a = pair_sparse(&sp[0], &f) * pair_sparse(&sp[1], &h) / iv.length().sqrt();
    let mut full = vec![C64::new(0.0, 0.0); n];
    for &(q, z) in &sp[2] {
        full[freq_bin(q, n)] += a * z;
    }
    let want = Signal1D::from_spectrum(g, full).unwrap();
    let out = paraproduct_discrete(&f, &h, &[iv], slots(1)).unwrap();
    assert!(out.max_abs_diff(&want) < 1e-12);

    let ivs: Vec<DyadicInterval> = (2..5).flat_map(|j| (0..(1i64 << j)).map(move |m| DyadicInterval::new(j, m))).collect();
    for s in 0..3 {
        let form = paraproduct_discrete_form(&f, &h, &k, &ivs, slots(s)).unwrap();
        let pair = paraproduct_discrete(&f, &h, &ivs, slots(s)).unwrap().inner(&k).unwrap();
        assert!((form - pair).norm() <= 1e-10 * pair.norm().max(1e-300));
    }

    let two = SlotTemplates([Template::NonLacunary, Template::NonLacunary, Template::Lacunary]);
    assert!(matches!(paraproduct_discrete(&f, &h, &ivs, two), Err(Error::Domain(_))));
    let none = SlotTemplates([Template::Lacunary; 3]);
    assert!(matches!(paraproduct_discrete(&f, &h, &ivs, none), Err(Error::Domain(_))));
}

#[test]
fn carleson_examples_and_scan() {
    let g = line(64);
    for k in [-31, -3, 0, 7, 32] {
        let out = carleson(&Signal1D::exponential(g, k));
        assert!(out.iter().all(|v| (v - 1.0).abs() < 1e-12), "k={k}");
    }
    let out = carleson(&Signal1D::constant(g, c(-2.5, 0.0)));
    assert!(out.iter().all(|v| (v - 2.5).abs() < 1e-12));

    let mut worst: f64 = 0.0;
    for t in 0..20 {
        let f = white_signal(line(128), &mut trial_rng(77, t));
        let cf = carleson(&f);
        // the full partial sum is one of the cuts
        assert!(cf.iter().zip(f.abs()).all(|(a, b)| *a >= b - 1e-12));
        let l2 = (cf.iter().map(|v| v * v).sum::<f64>() / cf.len() as f64).sqrt();
        worst = worst.max(l2 / f.lp_norm(2.0).unwrap());
    }
    println!("Carleson L2 constant over scan: {worst:.4}");
    assert!(worst.is_finite() && worst >= 1.0);
}

#[test]
fn biparam_constant_and_separable() {
    let n = 32;
    let g = plane(n);
    let gl = line(n);
    let mut r = rng(14);
    let f = band_limited_2d(g, 10, &mut r);
    let one = Signal2D::from_fn(g, |_, _| c(1.0, 0.0));
    let sx = ParaproductSpec::full(ParaproductKind::I, gl);
    let sy = ParaproductSpec::full(ParaproductKind::II, gl);
    let out = biparam_paraproduct(&f, &one, (&sx, &sy)).unwrap();
    assert!(out.lp_norm(f64::INFINITY).unwrap() < 1e-12);

    let (a, b, cc, d) = (
        white_signal(gl, &mut r),
        white_signal(gl, &mut r),
        white_signal(gl, &mut r),
        white_signal(gl, &mut r),
    );
    for (kx, ky) in [(ParaproductKind::I, ParaproductKind::II), (ParaproductKind::III, ParaproductKind::I)] {
        let (sx, sy) = (ParaproductSpec::full(kx, gl), ParaproductSpec::full(ky, gl));
        let out = biparam_paraproduct(
            &Signal2D::tensor(&a, &b).unwrap(),
            &Signal2D::tensor(&cc, &d).unwrap(),
            (&sx, &sy),
        )
        .unwrap();
        let want = Signal2D::tensor(&paraproduct(&a, &cc, &sx).unwrap(), &paraproduct(&b, &d, &sy).unwrap()).unwrap();
        assert!(out.max_abs_diff(&want) < 1e-10);
    }
}

#[test]
fn biparam_bilinear() {
    let g = plane(16);
    let gl = line(16);
    let mut r = rng(15);
    let (f1, f2, h) = (band_limited_2d(g, 7, &mut r), band_limited_2d(g, 7, &mut r), band_limited_2d(g, 7, &mut r));
    let specs = (ParaproductSpec::full(ParaproductKind::II, gl), ParaproductSpec::full(ParaproductKind::III, gl));
    let p = |x: &Signal2D, y: &Signal2D| biparam_paraproduct(x, y, (&specs.0, &specs.1)).unwrap();
    let (a, b) = (c(0.5, 0.5), c(-1.0, 3.0));
    let lhs = p(&f1.scale(a).add(&f2.scale(b)).unwrap(), &h);
    let rhs = p(&f1, &h).scale(a).add(&p(&f2, &h).scale(b)).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-10);
}

#[test]
fn tensor_examples() {
    let n = 32;
    let g = plane(n);
    let gl = line(n);
    let mut r = rng(31);
    let f = band_limited_2d(g, 15, &mut r);
    let one = Signal2D::from_fn(g, |_, _| c(1.0, 0.0));
    let spec = ParaproductSpec::full(ParaproductKind::II, gl);
    let paths = tensor_bht_paraproduct(&f, &one, &spec).unwrap();
    assert!(paths.scale_sum.lp_norm(f64::INFINITY).unwrap() < 1e-12);

    let (a, b, m, k) = (-3i64, 5i64, 1i64, 9i64);
    let ex = |u: i64, v: i64| Signal2D::tensor(&Signal1D::exponential(gl, u), &Signal1D::exponential(gl, v)).unwrap();
    for kind in [ParaproductKind::I, ParaproductKind::II] {
        let spec = ParaproductSpec::full(kind, gl);
        let (mm, nn) = if kind == ParaproductKind::I { (k, k) } else { (m, k) };
        let weight: f64 = spec
            .scales
            .iter()
            .map(|&s| {
                let (fs, gs, _) = spec.symbols(s);
                fs(mm as f64) * gs(nn as f64)
            })
            .sum();
        assert!(weight > 0.0, "{kind:?}: pick frequencies the scales select");
        let paths = tensor_bht_paraproduct(&ex(a, mm), &ex(b, nn), &spec).unwrap();
        let want = ex(a + b, mm + nn).scale(c(weight, 0.0));
        assert!(paths.scale_sum.max_abs_diff(&want) < 1e-12, "{kind:?}");
        assert!(paths.direct.unwrap().max_abs_diff(&want) < 1e-12, "{kind:?}");
        // a ≥ b leaves the half-plane
        let paths = tensor_bht_paraproduct(&ex(b, mm), &ex(a, nn), &spec).unwrap();
        assert!(paths.scale_sum.lp_norm(f64::INFINITY).unwrap() < 1e-12);
    }
    let spec = ParaproductSpec::full(ParaproductKind::III, gl);
    assert!(matches!(tensor_bht_paraproduct(&f, &f, &spec), Err(Error::Domain(_))));
}

#[test]
fn tensor_two_paths_agree() {
    let n = 32;
    let g = plane(n);
    let gl = line(n);
    for (kind, seed) in [(ParaproductKind::I, 1u64), (ParaproductKind::II, 2)] {
        let mut r = rng(seed);
        let f = band_limited_2d(g, 15, &mut r);
        let h = band_limited_2d(g, 15, &mut r);
        let paths = tensor_bht_paraproduct(&f, &h, &ParaproductSpec::full(kind, gl)).unwrap();
        let d = paths.discrepancy().unwrap();
        println!("{kind:?}: two-path discrepancy {d:.3e}");
        assert!(d <= 1e-8);
    }
    let big = plane(64);
    let f = band_limited_2d(big, 4, &mut rng(3));
    let paths = tensor_bht_paraproduct(&f, &f, &ParaproductSpec::full(ParaproductKind::I, line(64))).unwrap();
    assert!(paths.direct.is_none());
}

#[test]
fn square_function_examples() {
    let n = 128;
    let g = line(n);
    for m in [1i64, 3, 6, 16, -40] {
        let s = square_function(&Signal1D::exponential(g, m));
        let bands: Vec<f64> = (0..7).map(|k| lp_band(k, m as f64)).filter(|v| *v != 0.0).collect();
        assert!(!bands.is_empty() && bands.len() <= 2, "m={m}");
        let want = bands.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(s.iter().all(|v| (v - want).abs() < 1e-12), "m={m}");
    }
    let s = square_function(&Signal1D::constant(g, c(4.0, -1.0)));
    assert!(s.iter().all(|v| v.abs() < 1e-12));
    let s = square_function_2d(&Signal2D::from_fn(plane(16), |_, _| c(1.0, 0.0)), Axes::Both);
    assert!(s.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn square_function_norm_scan() {
    let n = 256;
    let g = line(n);
    for p in [1.0, 2.0, 3.0] {
        let mut worst: f64 = 0.0;
        for t in 0..20 {
            let f = band_limited(g, 60, &mut trial_rng(90, t));
            let mean = f.spectrum()[0] / n as f64;
            let s: Vec<f64> = square_function(&f).iter().map(|v| v + mean.norm()).collect();
            let sp = tfkit::grid::lp_mean(&s, p).unwrap();
            worst = worst.max(f.lp_norm(p).unwrap() / sp);
        }
        println!("p = {p}: ||f||_p / ||Sf + |P0 f| ||_p max {worst:.4}");
        if p == 2.0 {
            // Σ_k band_k² ≥ 1/2 away from the zero mode
            assert!(worst <= 2f64.sqrt() + 1e-9);
        }
        assert!(worst.is_finite());
    }
}

#[test]
fn square_function_2d_axes() {
    let n = 32;
    let gl = line(n);
    let (a, b) = (Signal1D::exponential(gl, 5), Signal1D::exponential(gl, 12));
    let f = Signal2D::tensor(&a, &b).unwrap();
    let (sa, sb) = (square_function(&a)[0], square_function(&b)[0]);
    let x = square_function_2d(&f, Axes::X);
    let y = square_function_2d(&f, Axes::Y);
    let both = square_function_2d(&f, Axes::Both);
    assert!(x.iter().all(|v| (v - sa).abs() < 1e-12));
    assert!(y.iter().all(|v| (v - sb).abs() < 1e-12));
    assert!(both.iter().all(|v| (v - sa * sb).abs() < 1e-12));
}
