//! Named reference signals.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::scalar::{creal, czero, Real};
use crate::signal::{FnKernel, GridSpectrum, PiecewiseConstantSpectrum, SignalRepresentation, TimeKernel, UnitPiece};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Whether the signal is used as the generator of a sampling space.
    pub generator: bool,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { name: "shannon", summary: "sinc: spectrum χ_[-1/2,1/2)", generator: true },
    CatalogEntry { name: "blhat", summary: "band-limited hat: spectrum (1-2|ω|)χ_[-1/2,1/2)", generator: false },
    CatalogEntry {
        name: "ex2",
        summary: "alternating blocks Σ (-1)^n/(n+1)·χ_[n, n+2^-n], truncated at n_max",
        generator: true,
    },
    CatalogEntry {
        name: "ex3",
        summary: "interpolating kernel: 1 on [-1/2,1/2], sin(π|x|) out to ±1",
        generator: true,
    },
    CatalogEntry { name: "hat", summary: "triangle 1-|x| on [-1,1]", generator: true },
];

pub const DEFAULT_N_MAX: usize = 60;

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownSignal {
        name: name.to_string(),
        known: CATALOG.iter().map(|e| e.name).collect::<Vec<_>>().join(", "),
    })
}

/// Builds a catalog signal. `grid` is only used by grid-sampled entries.
pub fn build<T: Real>(name: &str, n_max: usize, grid: &FrequencyGrid) -> Result<SignalRepresentation<T>> {
    entry(name)?;
    Ok(match name {
        "shannon" => shannon(),
        "blhat" => blhat(grid),
        "ex2" => ex2(n_max),
        "ex3" => ex3(),
        "hat" => hat(),
        _ => unreachable!("entry() accepted an unlisted name"),
    })
}

/// Smallest admissible `K` for a catalog signal, if it is band-limited.
pub fn required_half_bandwidth(name: &str, n_max: usize) -> Option<usize> {
    match name {
        "shannon" | "blhat" => Some(1),
        "ex2" => Some(FrequencyGrid::required_half_bandwidth(n_max + 1)),
        _ => None,
    }
}

pub fn shannon<T: Real>() -> SignalRepresentation<T> {
    let half = T::lit(0.5);
    let spectrum = PiecewiseConstantSpectrum::from_intervals(&[(-half, half, creal(T::one()))])
        .expect("unit box is a valid spectrum");
    SignalRepresentation::piecewise("shannon", spectrum)
}

pub fn blhat<T: Real>(grid: &FrequencyGrid) -> SignalRepresentation<T> {
    let spectrum = GridSpectrum::from_fn(*grid, |w: T| {
        let v = T::one() - T::lit(2.0) * w.abs();
        if w >= T::lit(-0.5) && w < T::lit(0.5) { creal(v.max(T::zero())) } else { czero() }
    });
    SignalRepresentation::grid("blhat", spectrum)
}

/// Blocks `[n, n + 2^-n]` with value `(-1)^n/(n+1)` for `n ≤ n_max`; the
/// spectral energy of the omitted blocks is recorded as known tail.
pub fn ex2<T: Real>(n_max: usize) -> SignalRepresentation<T> {
    let value = |n: usize| {
        let sign = if n.is_multiple_of(2) { T::one() } else { -T::one() };
        Complex::new(sign / T::from_usize_exact(n + 1), T::zero())
    };
    let width = |n: usize| T::lit(0.5f64.powi(n as i32));
    let pieces = (0..=n_max)
        .map(|n| UnitPiece { shift: n as i64, lo: T::zero(), hi: width(n), value: value(n) })
        .collect();
    let spectrum = PiecewiseConstantSpectrum::from_pieces(pieces).expect("blocks are disjoint");
    let tail: f64 = (n_max + 1..n_max + 200).map(|n| 0.5f64.powi(n as i32) / ((n + 1) as f64).powi(2)).sum();
    SignalRepresentation::piecewise("ex2", spectrum).with_known_tail(T::lit(tail))
}

fn ex3_profile<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x.abs() <= half {
        T::one()
    } else {
        (T::PI() * x.abs()).sin()
    }
}

/// Continuous and compactly supported, with `s(k) = δ_{0k}`.
pub fn ex3<T: Real>() -> SignalRepresentation<T> {
    let kernel = FnKernel {
        name: "ex3",
        func: ex3_profile::<T>,
        support: (-T::one(), T::one()),
        breakpoints: vec![T::lit(-0.5), T::lit(0.5)],
    };
    // listed without an integrable spectrum, so only the Zak-based criteria apply
    SignalRepresentation::time("ex3", TimeKernel::new(kernel, TimeKernel::<T>::DEFAULT_ORDER), false)
}

fn hat_profile<T: Real>(x: T) -> T {
    (T::one() - x.abs()).max(T::zero())
}

pub fn hat<T: Real>() -> SignalRepresentation<T> {
    let kernel =
        FnKernel { name: "hat", func: hat_profile::<T>, support: (-T::one(), T::one()), breakpoints: vec![T::zero()] };
    SignalRepresentation::time("hat", TimeKernel::new(kernel, TimeKernel::<T>::DEFAULT_ORDER), true)
}
