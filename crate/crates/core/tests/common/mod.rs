#![allow(dead_code)]

use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use sisbox_core::catalog;
use sisbox_core::grid::{FrequencyGrid, Settings};
use sisbox_core::samples::TimeSamples;
use sisbox_core::signal::SignalRepresentation;
use sisbox_core::space::SamplingSpace;

pub type C = Complex<f64>;

pub fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// Grid each catalog generator is exercised on (ex2 at n_max = 60 needs K = 64).
pub fn settings_for(name: &str) -> Settings {
    match name {
        "ex2" => Settings::with_grid(FrequencyGrid::new(64, 1024).unwrap()),
        _ => Settings::default(),
    }
}

pub fn generator(name: &str) -> SignalRepresentation<f64> {
    catalog::build(name, catalog::DEFAULT_N_MAX, &settings_for(name).grid).unwrap()
}

pub fn space(name: &str) -> SamplingSpace<f64> {
    SamplingSpace::build(generator(name), &settings_for(name)).unwrap()
}

pub const GENERATORS: [&str; 4] = ["shannon", "ex2", "ex3", "hat"];

pub fn random_coeffs(rng: &mut StdRng, count: usize, spread: i64) -> TimeSamples<f64> {
    let mut pairs = Vec::new();
    while pairs.len() < count {
        let k = rng.random_range(-spread..=spread);
        if pairs.iter().all(|&(j, _)| j != k) {
            pairs.push((k, C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
        }
    }
    TimeSamples::from_pairs(pairs)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x)
    }
}

pub fn max_dev(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
