mod common;

use common::*;
use sisbox_core::catalog;
use sisbox_core::grid::Settings;
use sisbox_core::periodic::PeriodicSpectrum;
use sisbox_core::samples::TimeSamples;
use sisbox_core::signal::{PiecewiseConstantSpectrum, SignalRepresentation};
use sisbox_core::space::*;
use sisbox_core::spectral::*;
use sisbox_core::{Error, Verdict};

fn boxes(intervals: &[(f64, f64, f64)]) -> SignalRepresentation<f64> {
    let iv: Vec<_> = intervals.iter().map(|&(a, b, v)| (a, b, c(v))).collect();
    SignalRepresentation::piecewise("box", PiecewiseConstantSpectrum::from_intervals(&iv).unwrap())
}

fn spectrum(f: &SignalRepresentation<f64>, s: &Settings) -> Vec<C> {
    f.grid_spectrum(&s.grid).unwrap().to_vec()
}

#[test]
fn tight_frame_examples() {
    let s = Settings::default();
    let sinc = boxes(&[(-0.5, 0.5, 1.0)]);
    let phi = tight_frame_generator(&sinc, &s).unwrap();
    assert!(max_dev(&spectrum(&phi, &s), &spectrum(&sinc, &s)) < 1e-15);

    let two = boxes(&[(0.0, 1.0, 2.0)]);
    let phi = tight_frame_generator(&two, &s).unwrap();
    assert!(max_dev(&spectrum(&phi, &s), &spectrum(&boxes(&[(0.0, 1.0, 1.0)]), &s)) < 1e-15);

    // per-fiber normalization: on (1/4, 1/2] the fiber is (1, -1/2) with Grammian 5/4
    let s2 = settings_for("ex2");
    let f = generator("ex2");
    let phi = spectrum(&tight_frame_generator(&f, &s2).unwrap(), &s2);
    let fv = spectrum(&f, &s2);
    let g = &s2.grid;
    for r in 257..512 {
        for m in [0, 1] {
            let j = g.index(m, r).unwrap();
            assert!((phi[j] - fv[j] / 1.25f64.sqrt()).norm() < 1e-12);
        }
        assert_eq!(phi[g.index(2, r).unwrap()], c(0.0));
    }

    assert!(matches!(
        tight_frame_generator(&SignalRepresentation::<f64>::zero(s.grid), &s),
        Err(Error::Degenerate(_))
    ));
}

#[test]
fn tight_frame_grammian_is_support_indicator() {
    for name in GENERATORS {
        let s = settings_for(name);
        let f = generator(name);
        let mask = support_mask(&grammian(&f, &s.grid).unwrap(), 1e-9).unwrap();
        let g = grammian(&tight_frame_generator(&f, &s).unwrap(), &s.grid).unwrap();
        for r in 0..s.grid.resolution() {
            let want = if mask.get(r) { 1.0 } else { 0.0 };
            assert!((g[r].re - want).abs() < 1e-9, "{name} r = {r}");
        }
    }
}

#[test]
fn build_space_examples() {
    let s = Settings::default();
    let shannon = space("shannon");
    assert!(max_dev(&shannon.sampling_spectrum().unwrap(), &spectrum(shannon.generator(), &s)) < 1e-12);

    let ex3 = space("ex3");
    assert!(ex3.certified());
    assert!(ex3.sampling_function().as_time().is_some());
    assert!(max_dev(&ex3.sampling_spectrum().unwrap(), &spectrum(ex3.generator(), &s)) < 1e-12);

    let tripled = SamplingSpace::build(boxes(&[(-0.5, 0.5, 3.0)]), &s).unwrap();
    assert!(max_dev(&tripled.sampling_spectrum().unwrap(), &spectrum(&boxes(&[(-0.5, 0.5, 1.0)]), &s)) < 1e-12);
}

#[test]
fn build_space_rejects_vanishing_zak() {
    let s = Settings::default();
    // fibers (1, -1) on [0, 1/2) cancel, so Z vanishes where G = 2
    let f = boxes(&[(0.0, 1.0, 1.0), (1.0, 1.5, -1.0)]);
    match SamplingSpace::build(f.clone(), &s) {
        Err(Error::NotASamplingSpace { omega, modulus }) => {
            assert!((0.0..0.5).contains(&omega));
            assert!(modulus < 1e-12);
        }
        other => panic!("unexpected {other:?}"),
    }
    let unchecked = SamplingSpace::build_unchecked(f, &s).unwrap();
    assert!(!unchecked.certified());
    let r = unchecked.reconstruct(&TimeSamples::delta(0), &[0.0]);
    assert!(matches!(r, Err(Error::Uncertified(_))));
}

#[test]
fn zak_cancelling_everywhere_is_refused() {
    // |Z| is pure roundoff on the whole support, so max/min ratios alone look fine
    let s = Settings::default();
    let f = boxes(&[(0.0, 1.0, 1.0), (1.0, 2.0, -1.0)]);
    let r = check_sz99(&f, &s).unwrap();
    assert_eq!(r.zak, Verdict::Fail, "{r}");
    assert!(matches!(SamplingSpace::build(f, &s), Err(Error::NotASamplingSpace { .. })));
}

#[test]
fn sz99_examples() {
    let s = Settings::default();
    for name in ["shannon", "ex3"] {
        let r = check_sz99(&generator(name), &s).unwrap();
        assert_eq!(r.overall, Verdict::Pass, "{name}: {r}");
        assert!((r.zak_lower.get() - 1.0).abs() < 1e-9 && (r.zak_upper.get() - 1.0).abs() < 1e-9, "{name}: {r}");
    }
    let r = check_sz99(&boxes(&[(0.0, 1.0, 1.0), (1.0, 1.5, -1.0)]), &s).unwrap();
    assert_eq!(r.zak, Verdict::Fail);
    assert_eq!(r.overall, Verdict::Fail);
    assert!(r.zak_lower.get() < 1e-12);
}

#[test]
fn unit_band_box_has_unit_zak() {
    // χ_[0,1) periodizes to 1, so its Zak fiber never vanishes
    let s = Settings::default();
    let r = check_sz99(&boxes(&[(0.0, 1.0, 1.0)]), &s).unwrap();
    assert_eq!(r.zak, Verdict::Pass, "{r}");
    assert!((r.zak_lower.get() - 1.0).abs() < 1e-12);
}

#[test]
fn synthesize_examples() {
    let s = Settings::default();
    let sp = space("shannon");
    let g = spectrum(sp.generator(), &s);
    let f0 = sp.synthesize(&TimeSamples::delta(0));
    assert!(max_dev(&spectrum(&f0, &s), &g) < 1e-15);
    let f1 = sp.synthesize(&TimeSamples::delta(1));
    let f1v = spectrum(&f1, &s);
    for (j, v) in f1v.iter().enumerate() {
        let w: f64 = s.grid.omega(j);
        let expect = g[j] * C::from_polar(1.0, -std::f64::consts::TAU * w);
        assert!((v - expect).norm() < 1e-12);
    }

    let sp3 = space("ex3");
    let f = sp3.synthesize(&TimeSamples::delta(1));
    let k = f.as_time().unwrap();
    assert!((k.eval(1.0) - c(1.0)).norm() < 1e-15);
    assert!(k.eval(0.0).norm() < 1e-15);
}

#[test]
fn synthesized_sincs_match_direct_sum() {
    let s = Settings::default();
    let sp = space("shannon");
    let mut rng = rng(11);
    let coeffs = random_coeffs(&mut rng, 9, 6);
    let f = sp.synthesize(&coeffs);
    for _ in 0..32 {
        let x: f64 = rand::RngExt::random_range(&mut rng, -8.0..8.0);
        let got = inverse_fourier_evaluate(&f, x, &s.grid).unwrap();
        let direct: C = coeffs.iter().map(|(k, ck)| ck * sinc(x - k as f64)).sum();
        assert!((got - direct).norm() < 1e-6, "x = {x}: {}", (got - direct).norm());
    }
}

#[test]
fn reconstruct_examples() {
    let s = Settings::default();
    let sp = space("shannon");
    let xs: Vec<f64> = (0..41).map(|i| -5.0 + 0.25 * i as f64).collect();
    let rec = sp.reconstruct(&TimeSamples::delta(0), &xs).unwrap();
    let direct: Vec<C> = xs.iter().map(|&x| c(sinc(x))).collect();
    assert!(max_dev(&rec.values, &direct) < 1e-12);
    assert_eq!(rec.tail_bound, 0.0);

    // band-limited hat against its exact transform sinc²(x/2)/2
    let f = catalog::blhat::<f64>(&s.grid);
    let samples = integer_samples(&f, &s).unwrap();
    let xs: Vec<f64> = (0..200).map(|i| -8.0 + 16.0 * i as f64 / 199.0).collect();
    let rec = sp.reconstruct(&samples, &xs).unwrap();
    let peak = 0.5;
    for (&x, v) in xs.iter().zip(&rec.values) {
        let exact = 0.5 * sinc(x / 2.0).powi(2);
        assert!((v - c(exact)).norm() / peak < 1e-2, "x = {x}");
    }

    let sp3 = space("ex3");
    let mut rng = rng(3);
    let coeffs = random_coeffs(&mut rng, 16, 20);
    let member = sp3.synthesize(&coeffs);
    let samples = integer_samples(&member, &s).unwrap();
    let ks: Vec<f64> = (-22..=22).map(|k| k as f64).collect();
    let rec = sp3.reconstruct(&samples, &ks).unwrap();
    for (&k, v) in ks.iter().zip(&rec.values) {
        assert!((v - coeffs.get(k as i64)).norm() < 1e-12, "k = {k}");
    }
}

#[test]
fn project_examples() {
    let s = Settings::default();
    let sp = space("shannon");
    let mut rng = rng(5);
    let member = sp.synthesize(&random_coeffs(&mut rng, 9, 10));
    let p = sp.project(&member).unwrap();
    assert!(max_dev(&spectrum(&p, &s), &spectrum(&member, &s)) < 1e-12);

    // χ_[2,3) lives on shift 2 of every fiber, the sinc never does: the bracket vanishes
    let outside = boxes(&[(2.0, 3.0, 1.0)]);
    let p = spectrum(&sp.project(&outside).unwrap(), &s);
    assert!(p.iter().all(|v| v.norm() < 1e-15));

    let half_space = SamplingSpace::build(boxes(&[(0.0, 0.5, 1.0)]), &s).unwrap();
    let disjoint = boxes(&[(1.5, 2.0, 1.0)]);
    let p = spectrum(&half_space.project(&disjoint).unwrap(), &s);
    assert!(p.iter().all(|v| v.norm() == 0.0));

    // fiberwise least squares: χ_[-1,1) has fibers (1, 1), the sinc has (1) → r = 1
    let wide = boxes(&[(-1.0, 1.0, 1.0)]);
    let p = spectrum(&sp.project(&wide).unwrap(), &s);
    assert!(max_dev(&p, &spectrum(&boxes(&[(-0.5, 0.5, 1.0)]), &s)) < 1e-12);
}

#[test]
fn projection_is_idempotent_and_contractive() {
    for name in GENERATORS {
        let s = settings_for(name);
        let sp = space(name);
        let f = boxes(&[(-1.5, -0.25, 0.7), (0.25, 2.0, -1.2)]);
        let p1 = sp.project(&f).unwrap();
        let p2 = sp.project(&p1).unwrap();
        let (v1, v2) = (spectrum(&p1, &s), spectrum(&p2, &s));
        assert!(spectral_distance(&v1, &v2, &s.grid) < 1e-9 * spectral_norm(&v1, &s.grid).max(1.0), "{name}");
        assert!(spectral_norm(&v1, &s.grid) <= spectral_norm(&spectrum(&f, &s), &s.grid) + 1e-12);
    }
}

#[test]
fn gram_oracle_examples() {
    let s = Settings::default();
    let (a, b) = gram_matrix_bounds_oracle(&generator("shannon"), &s, 16).unwrap();
    assert!((a - 1.0).abs() < 1e-6 && (b - 1.0).abs() < 1e-6);
    assert!(matches!(
        gram_matrix_bounds_oracle(&SignalRepresentation::<f64>::zero(s.grid), &s, 8),
        Err(Error::Degenerate(_))
    ));
    assert!(matches!(
        gram_matrix_bounds_oracle(&generator("shannon"), &s, 600),
        Err(Error::Truncation { requested: 600, limit: 512 })
    ));
    assert!(gram_matrix_bounds_oracle(&generator("shannon"), &s, 1).is_err());

    // the piecewise-sine kernel has Gram symbol 3/2 + (4/π)cos 2πω; the T×T
    // section of that tridiagonal Toeplitz matrix has eigenvalues
    // 3/2 + (4/π)cos(πj/(T+1)), j = 1..T
    let t = 64;
    let (lo, hi) = gram_matrix_bounds_oracle(&generator("ex3"), &s, t).unwrap();
    let q = 4.0 / std::f64::consts::PI;
    let angle = std::f64::consts::PI / (t as f64 + 1.0);
    assert!((lo - (1.5 - q * angle.cos())).abs() < 1e-5, "{lo}");
    assert!((hi - (1.5 + q * angle.cos())).abs() < 1e-5, "{hi}");
    let (a, b) = space("ex3").frame_bounds();
    assert!((a - (1.5 - q)).abs() < 1e-5 && (b - (1.5 + q)).abs() < 1e-5, "({a}, {b})");
    assert!((lo - a).abs() / a < 0.05 && (hi - b).abs() / b < 0.05);
}

#[test]
fn sampling_function_zak_is_support_indicator() {
    for name in GENERATORS {
        let s = settings_for(name);
        let sp = space(name);
        let z = zak_time_fiber(&integer_samples(sp.sampling_function(), &s).unwrap(), &s.grid);
        for r in 0..s.grid.resolution() {
            let want = if sp.mask().get(r) { 1.0 } else { 0.0 };
            assert!((z[r] - c(want)).norm() < 1e-6, "{name}: r = {r}, {}", z[r]);
        }
        let sv = sp.sampling_spectrum().unwrap();
        for (j, v) in sv.iter().enumerate() {
            if !sp.mask().get(j % s.grid.resolution()) {
                assert_eq!(v.norm(), 0.0);
            }
        }
    }
}

#[test]
fn members_factor_through_the_sampling_function() {
    for name in GENERATORS {
        let s = settings_for(name);
        let n = s.grid.resolution();
        let sp = space(name);
        let mut rng = rng(21);
        let f = sp.synthesize(&random_coeffs(&mut rng, 8, 12));
        let fv = spectrum(&f, &s);
        let zf = zak_fiber(&f, &s).unwrap();
        let sv = sp.sampling_spectrum().unwrap();
        for (j, v) in fv.iter().enumerate() {
            assert!((v - zf[j % n] * sv[j]).norm() < 1e-5, "{name}");
        }
        // G_f = |Z_f|²·G_s on E_f
        let gf = grammian_values(&fv, &s.grid);
        let gs = grammian_values(&sv, &s.grid);
        let ef = support_mask(&gf, 1e-9).unwrap();
        for r in ef.indices() {
            let rhs = zf[r].norm_sqr() * gs[r].re;
            assert!((gf[r].re - rhs).abs() <= 1e-5 * gf[r].re.abs().max(1e-300), "{name} r = {r}");
        }
    }
}

#[test]
fn support_set_is_invariant_under_invertible_multipliers() {
    for name in GENERATORS {
        let s = settings_for(name);
        let f = generator(name);
        let n = s.grid.resolution();
        let m = PeriodicSpectrum::new(
            (0..n).map(|r| C::from_polar(1.5 + (r as f64 / n as f64 * 6.0).sin(), r as f64 * 0.01)).collect(),
        );
        let mf = SignalRepresentation::modulated("m f", f.clone(), m);
        let a = support_mask(&grammian(&f, &s.grid).unwrap(), 1e-9).unwrap();
        let b = support_mask(&grammian(&mf, &s.grid).unwrap(), 1e-9).unwrap();
        assert_eq!(a.bits(), b.bits(), "{name}");
    }
}
