mod common;

use common::*;
use proptest::prelude::*;
use sisbox_core::catalog;
use sisbox_core::grid::Settings;
use sisbox_core::membership::*;
use sisbox_core::periodic::PeriodicSpectrum;
use sisbox_core::signal::{PiecewiseConstantSpectrum, SignalRepresentation};
use sisbox_core::space::SamplingSpace;
use sisbox_core::spectral::*;
use sisbox_core::{Error, Verdict};

fn boxes(intervals: &[(f64, f64, f64)]) -> SignalRepresentation<f64> {
    let iv: Vec<_> = intervals.iter().map(|&(a, b, v)| (a, b, c(v))).collect();
    SignalRepresentation::piecewise("boxes", PiecewiseConstantSpectrum::from_intervals(&iv).unwrap())
}

/// Fibers of ex2 on `(2^-(n+1), 2^-n]`: partial sums of the alternating
/// harmonic series (Zak), of `1/(k+1)²` (Grammian) and of `1/(k+1)` (Σ|f̂|).
fn ex2_cells(n_max: usize) -> Vec<(f64, f64, f64)> {
    (0..=n_max)
        .map(|n| {
            let zak: f64 = (0..=n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / (k + 1) as f64).sum();
            let g: f64 = (0..=n).map(|k| 1.0 / ((k + 1) as f64).powi(2)).sum();
            let abs: f64 = (0..=n).map(|k| 1.0 / (k + 1) as f64).sum();
            (zak, g, abs)
        })
        .collect()
}

fn value(r: &ConditionReport, cond: &str, key: &str) -> f64 {
    r.condition(cond).unwrap().get(key).unwrap().get()
}

fn shannon_settings() -> Settings {
    Settings::default()
}

#[test]
fn zak_criterion_examples() {
    let s = shannon_settings();
    for norm in [Normalization::Zak, Normalization::Grammian] {
        let r = check_theorem2(&catalog::shannon::<f64>(), &s, norm).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.normalization, Some(norm));
        assert!((value(&r, "zak_bound", "A") - 1.0).abs() < 1e-12);
        assert!((value(&r, "zak_bound", "B") - 1.0).abs() < 1e-12);
    }

    let r = check_theorem2(&SignalRepresentation::<f64>::zero(s.grid), &s, Normalization::Zak).unwrap();
    assert!(r.passed(), "{r}");
    assert_eq!(r.support_measure, 0.0);

    // Z vanishes on [0, 1/2) where G = 2
    let r = check_theorem2(&boxes(&[(0.0, 1.0, 1.0), (1.0, 1.5, -1.0)]), &s, Normalization::Zak).unwrap();
    assert_eq!(r.condition("zak_bound").unwrap().verdict, Verdict::Fail, "{r}");
    assert!(!r.passed());

    // χ_[0,1) periodizes to 1: a genuine member
    let r = check_theorem2(&boxes(&[(0.0, 1.0, 1.0)]), &s, Normalization::Zak).unwrap();
    assert!(r.passed(), "{r}");

    let r = check_theorem2(&generator("ex3"), &s, Normalization::Zak).unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn integrable_conditions_band_limited() {
    let s = shannon_settings();
    for f in [catalog::shannon::<f64>(), catalog::blhat(&s.grid)] {
        let r = check_theorem5(&f, &s).unwrap();
        assert!(r.passed(), "{r}");
        // single-entry fibers: G = |Z|², Σ|f̂| = |Z|, |Z(ω,-x)| = |Z(0,ω)|
        assert!((value(&r, "b", "A") - 1.0).abs() < 1e-12);
        assert!((value(&r, "b", "B") - 1.0).abs() < 1e-12);
        assert!((value(&r, "c", "integral") - r.support_measure).abs() < 1e-12);
        assert!((value(&r, "d", "L") - r.support_measure).abs() < 1e-9);
    }
}

#[test]
fn integrable_conditions_on_nested_blocks() {
    let s = settings_for("ex2");
    let r = check_theorem5(&generator("ex2"), &s).unwrap();
    assert!(r.passed(), "{r}");
    assert_eq!(r.route, Route::ExactCells);
    let cells = ex2_cells(catalog::DEFAULT_N_MAX);
    let ratios: Vec<f64> = cells.iter().map(|&(z, g, _)| g / (z * z)).collect();
    let a = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let b = ratios.iter().copied().fold(0.0, f64::max);
    assert!((value(&r, "b", "A") - a).abs() < 1e-12);
    assert!((value(&r, "b", "B") - b).abs() < 1e-12);
    assert!(a >= 1.0 - 1e-12 && b <= 6.6);
    // ∫ Σ|f̂|/|Z| over cells of measure 2^-(n+1), plus the innermost cell
    let mut integral: f64 = cells.iter().enumerate().map(|(n, &(z, _, abs))| 0.5f64.powi(n as i32 + 1) * abs / z.abs()).sum();
    let (z, _, abs) = cells[catalog::DEFAULT_N_MAX];
    integral += 0.5f64.powi(catalog::DEFAULT_N_MAX as i32 + 1) * abs / z.abs();
    assert!((value(&r, "c", "integral") - integral).abs() < 1e-12);
}

#[test]
fn integrable_conditions_vacuous_and_refused() {
    let s = shannon_settings();
    let r = check_theorem5(&SignalRepresentation::<f64>::zero(s.grid), &s).unwrap();
    assert!(r.passed(), "{r}");
    assert_eq!(value(&r, "c", "integral"), 0.0);
    assert_eq!(value(&r, "d", "L"), 0.0);
    assert!(matches!(check_theorem5(&generator("ex3"), &s), Err(Error::NotIntegrable)));
    assert!(matches!(check_sz04(&generator("ex3"), &s), Err(Error::NotIntegrable)));
}

#[test]
fn sz04_examples() {
    let s = shannon_settings();
    let r = check_sz04(&catalog::shannon::<f64>(), &s).unwrap();
    assert!(r.passed(), "{r}");
    assert!((value(&r, "lower", "A") - 1.0).abs() < 1e-12);
    assert!((value(&r, "upper", "B") - 1.0).abs() < 1e-12);

    let r = check_sz04(&SignalRepresentation::<f64>::zero(s.grid), &s).unwrap();
    assert!(r.passed());

    let s2 = settings_for("ex2");
    let f = generator("ex2");
    let r = check_sz04(&f, &s2).unwrap();
    assert_eq!(r.condition("lower").unwrap().verdict, Verdict::Pass);
    assert_eq!(r.condition("upper").unwrap().verdict, Verdict::Fail, "{r}");
    assert!(r.condition("upper").unwrap().get("B").unwrap().value.is_none());
    let (z, _, abs) = ex2_cells(catalog::DEFAULT_N_MAX)[catalog::DEFAULT_N_MAX];
    assert!((value(&r, "upper", "ratio_on_finest_cell") - abs * abs / (z * z)).abs() < 1e-9);
    assert!(check_theorem5(&f, &s2).unwrap().passed());
}

#[test]
fn construct_examples() {
    let s = shannon_settings();
    let built = construct_s_from_f(&catalog::shannon::<f64>(), &s).unwrap();
    assert!(built.space.certified());
    assert!(built.interpolation_error < 1e-12);
    assert!(built.identity_error < 1e-12);
    let want = catalog::shannon::<f64>().grid_spectrum(&s.grid).unwrap();
    assert!(max_dev(&built.space.generator().grid_spectrum(&s.grid).unwrap(), &want) < 1e-12);

    // half band: ŝ = f̂/Z on [0, 1/2), and the unit extension on [1/2, 1)
    let half = boxes(&[(0.0, 0.5, 2.0)]);
    let built = construct_s_from_f(&half, &s).unwrap();
    let sv = built.space.generator().grid_spectrum(&s.grid).unwrap();
    let expect = boxes(&[(0.0, 1.0, 1.0)]).grid_spectrum(&s.grid).unwrap();
    assert!(max_dev(&sv, &expect) < 1e-12);

    let s2 = settings_for("ex2");
    let built = construct_s_from_f(&generator("ex2"), &s2).unwrap();
    assert!(built.space.certified());
    assert!(built.interpolation_error < 1e-6, "{}", built.interpolation_error);
    assert!(built.identity_error < 1e-9);

    assert!(matches!(construct_s_from_f(&SignalRepresentation::<f64>::zero(s.grid), &s), Err(Error::Degenerate(_))));
    assert!(matches!(
        construct_s_from_f(&boxes(&[(0.0, 1.0, 1.0), (1.0, 1.5, -1.0)]), &s),
        Err(Error::ConstructionRefused(_))
    ));
}

#[test]
fn constructed_space_round_trip() {
    let s = settings_for("ex2");
    let f = generator("ex2");
    let built = construct_s_from_f(&f, &s).unwrap();
    assert!(built.space.membership_residual(&f).unwrap() < 1e-6);
    let samples = integer_samples(&f, &s).unwrap();
    let mut rng = rng(8);
    let xs: Vec<f64> = (0..32).map(|_| rand::RngExt::random_range(&mut rng, -8.0..8.0)).collect();
    let rec = built.space.reconstruct(&samples, &xs).unwrap();
    // the member on the same discrete model its samples come from
    let direct = time_values(&f, &xs, &s.grid).unwrap();
    assert!(max_dev(&rec.values, &direct) < 1e-4);
}

#[test]
fn induced_subspace_examples() {
    let s = shannon_settings();
    let sp = space("shannon");
    let whole = induced_subspace(&sp, sp.sampling_function()).unwrap();
    assert!(whole.symbol_error < 1e-9 && whole.projection_error < 1e-9);
    assert_eq!(whole.mask.measure(), 1.0);

    let half = restrict_piecewise(
        match catalog::shannon::<f64>().repr() {
            sisbox_core::signal::Representation::PiecewiseConstant(p) => p,
            _ => unreachable!(),
        },
        |w| w - w.floor() < 0.5,
    )
    .unwrap();
    let f = SignalRepresentation::piecewise("half", half);
    let sub = induced_subspace(&sp, &f).unwrap();
    assert!((sub.mask.measure() - 0.5).abs() < 1e-12);
    let sf = sub.space.sampling_spectrum().unwrap();
    assert!(max_dev(&sf, &boxes(&[(0.0, 0.5, 1.0)]).grid_spectrum(&s.grid).unwrap()) < 1e-9);

    assert!(matches!(induced_subspace(&sp, &boxes(&[(0.5, 1.5, 1.0)])), Err(Error::NotInSpace { .. })));
}

#[test]
fn induced_subspace_of_band_limited_members() {
    for name in ["hat", "ex3", "ex2"] {
        let s = settings_for(name);
        let sp = space(name);
        let n = s.grid.resolution();
        let mut rng = rng(4);
        let coeffs = random_coeffs(&mut rng, 6, 8);
        // the synthesis multiplier, switched off on [0.2, 0.6)
        let f = sp.synthesize(&coeffs);
        let m = zak_fiber(&f, &s).unwrap();
        let masked = PeriodicSpectrum::new(
            (0..n).map(|r| if (0.2..0.6).contains(&(r as f64 / n as f64)) { c(0.0) } else { m[r] }).collect(),
        );
        let g = SignalRepresentation::modulated("masked member", sp.sampling_function().clone(), masked);
        let sub = induced_subspace(&sp, &g).unwrap();
        assert!(sub.mask.measure() < sp.mask().measure() - 0.39, "{name}");
        assert!(sub.symbol_error < 1e-9, "{name}: {}", sub.symbol_error);
        assert!(sub.projection_error < 1e-9, "{name}: {}", sub.projection_error);
    }
}

#[test]
fn synthesized_members_satisfy_integrable_conditions() {
    for name in ["shannon", "hat", "ex2"] {
        let s = settings_for(name);
        let sp = space(name);
        let mut rng = rng(17);
        let f = sp.synthesize(&random_coeffs(&mut rng, 5, 6));
        let r = check_theorem5(&f, &s).unwrap();
        assert!(r.passed(), "{name}: {r}");
    }
}

#[test]
fn l_is_stable_under_probe_resampling() {
    for (name, f) in [("ex2", generator("ex2")), ("hat", generator("hat"))] {
        let s = settings_for(name);
        let probes = |seed: u64| -> Vec<f64> {
            let mut rng = rng(seed);
            (0..64).map(|_| rand::RngExt::random::<f64>(&mut rng)).collect()
        };
        let l1 = value(&check_theorem5_with_probes(&f, &s, &probes(1)).unwrap(), "d", "L");
        let l2 = value(&check_theorem5_with_probes(&f, &s, &probes(2)).unwrap(), "d", "L");
        assert!((l1 - l2).abs() / l1.max(l2) < 0.1, "{name}: {l1} vs {l2}");
    }
}

#[test]
fn probes_are_seeded() {
    let a = l_probes::<f64>(7);
    assert_eq!(a.len(), L_PROBES_UNIFORM + L_PROBES_RANDOM);
    assert_eq!(a, l_probes::<f64>(7));
    assert_ne!(a, l_probes::<f64>(8));
    assert!(a.iter().all(|x| (0.0..1.0).contains(x)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // sufficient conditions imply the characterization
    #[test]
    fn sz04_pass_implies_integrable_conditions_pass(
        pieces in prop::collection::vec((-3i32..3, 0u8..4, -2.0f64..2.0), 1..5)
    ) {
        let s = shannon_settings();
        let iv: Vec<(f64, f64, f64)> = pieces
            .iter()
            .map(|&(m, q, v)| (m as f64 + q as f64 / 4.0, m as f64 + (q as f64 + 1.0) / 4.0, v))
            .collect();
        let spectrum = PiecewiseConstantSpectrum::from_intervals(
            &iv.iter().map(|&(a, b, v)| (a, b, c(v))).collect::<Vec<_>>(),
        );
        prop_assume!(spectrum.is_ok());
        let f = SignalRepresentation::piecewise("random boxes", spectrum.unwrap());
        let sz = check_sz04(&f, &s).unwrap();
        let t5 = check_theorem5(&f, &s).unwrap();
        prop_assert!(!sz.passed() || t5.passed(), "{} / {}", sz, t5);
    }
}

#[test]
fn integrable_conditions_necessary_for_generators() {
    for name in ["shannon", "hat", "ex2"] {
        let s = settings_for(name);
        let sp = SamplingSpace::build(generator(name), &s).unwrap();
        assert!(check_theorem5(sp.sampling_function(), &s).unwrap().passed(), "{name}");
    }
}
