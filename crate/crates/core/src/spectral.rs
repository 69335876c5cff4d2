//! Periodization, Grammians, bracket products, Zak fibers and time evaluation.
//!
//! Every "almost everywhere" statement about 1-periodic functions becomes a
//! statement about the `N` unit-grid points `r/N`. Time values of spectral
//! signals are computed with the grid rule
//! `f(x) ≈ (1/N) Σ_j f̂(ω_j) e^{2πiω_j x}`; for integer `x` this rule is
//! `N`-periodic, so integer samples are taken on the window `[-N/2, N/2)`
//! and the sampled Zak fiber reproduces the periodization (Poisson) up to
//! rounding.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, Settings};
use crate::periodic::{PeriodicSpectrum, SupportMask};
use crate::report::Verdict;
use crate::samples::TimeSamples;
use crate::scalar::{cis_turns, czero, Real};
use crate::signal::{Modulated, Representation, SignalRepresentation};

/// `Σ_m F(r/N + m)` for every unit-grid point.
pub fn periodize_values<T: Real>(values: &[Complex<T>], grid: &FrequencyGrid) -> PeriodicSpectrum<T> {
    let n = grid.resolution();
    let mut out = vec![czero(); n];
    for block in values.chunks(n) {
        for (o, v) in out.iter_mut().zip(block) {
            *o += v;
        }
    }
    PeriodicSpectrum::new(out)
}

/// `Σ_m F(r/N + m)·conj(G(r/N + m))`.
pub fn bracket_values<T: Real>(f: &[Complex<T>], g: &[Complex<T>], grid: &FrequencyGrid) -> PeriodicSpectrum<T> {
    let n = grid.resolution();
    let mut out = vec![czero(); n];
    for (fb, gb) in f.chunks(n).zip(g.chunks(n)) {
        for ((o, a), b) in out.iter_mut().zip(fb).zip(gb) {
            *o += a * b.conj();
        }
    }
    PeriodicSpectrum::new(out)
}

/// `Σ_m |F(r/N + m)|²`, real and nonnegative.
pub fn grammian_values<T: Real>(values: &[Complex<T>], grid: &FrequencyGrid) -> PeriodicSpectrum<T> {
    let n = grid.resolution();
    let mut out = vec![T::zero(); n];
    for block in values.chunks(n) {
        for (o, v) in out.iter_mut().zip(block) {
            *o += v.norm_sqr();
        }
    }
    PeriodicSpectrum::new(out.into_iter().map(|g| Complex::new(g, T::zero())).collect())
}

/// `Σ_m F(r/N + m) e^{2πimx}`.
pub fn dual_values<T: Real>(values: &[Complex<T>], grid: &FrequencyGrid, x: T) -> PeriodicSpectrum<T> {
    let n = grid.resolution();
    let mut out = vec![czero(); n];
    for (block, chunk) in values.chunks(n).enumerate() {
        let m = block as i64 - grid.half_bandwidth() as i64;
        let phase = cis_turns(T::from_i64_exact(m) * x);
        for (o, v) in out.iter_mut().zip(chunk) {
            *o += v * phase;
        }
    }
    PeriodicSpectrum::new(out)
}

pub fn periodize<T: Real>(f: &SignalRepresentation<T>, grid: &FrequencyGrid) -> Result<PeriodicSpectrum<T>> {
    Ok(periodize_values(&f.grid_spectrum(grid)?, grid))
}

pub fn grammian<T: Real>(f: &SignalRepresentation<T>, grid: &FrequencyGrid) -> Result<PeriodicSpectrum<T>> {
    Ok(grammian_values(&f.grid_spectrum(grid)?, grid))
}

pub fn bracket<T: Real>(
    f: &SignalRepresentation<T>,
    g: &SignalRepresentation<T>,
    grid: &FrequencyGrid,
) -> Result<PeriodicSpectrum<T>> {
    Ok(bracket_values(&f.grid_spectrum(grid)?, &g.grid_spectrum(grid)?, grid))
}

/// The Zak transform of `f̂` at `(ω, -x)`: `Σ_m f̂(ω + m) e^{2πimx}`.
pub fn zak_dual_fiber<T: Real>(f: &SignalRepresentation<T>, x: T, grid: &FrequencyGrid) -> Result<PeriodicSpectrum<T>> {
    Ok(dual_values(&f.grid_spectrum(grid)?, grid, x))
}

/// `Z_f(0, ω) = Σ_k f(k) e^{-2πikω}` on the unit grid.
pub fn zak_time_fiber<T: Real>(samples: &TimeSamples<T>, grid: &FrequencyGrid) -> PeriodicSpectrum<T> {
    let n = grid.resolution();
    let tw = grid.twiddles::<T>();
    let pairs = samples.pairs();
    let values = (0..n)
        .into_par_iter()
        .map(|r| {
            pairs
                .iter()
                .map(|&(k, v)| v * tw[(-(k as i128) * r as i128).rem_euclid(n as i128) as usize])
                .sum()
        })
        .collect();
    PeriodicSpectrum::new(values)
}

/// Inverse Fourier transform at `x`: exact for piecewise-constant spectra,
/// direct for time kernels, a sum over the base for finite shift sums, and
/// the grid rule otherwise.
pub fn inverse_fourier_evaluate<T: Real>(f: &SignalRepresentation<T>, x: T, grid: &FrequencyGrid) -> Result<Complex<T>> {
    Ok(match f.repr() {
        Representation::PiecewiseConstant(p) => p.inverse_fourier(x),
        Representation::Time(k) => k.eval(x),
        Representation::Modulated(Modulated { base, shifts: Some(coeffs), .. }) => {
            let mut sum = czero();
            for &(k, c) in coeffs {
                sum += c * inverse_fourier_evaluate(base, x - T::from_i64_exact(k), grid)?;
            }
            sum
        }
        _ => {
            let values = f.grid_spectrum(grid)?;
            GridRule::new(&values, grid).eval(x)
        }
    })
}

/// Evaluator for `(1/N) Σ_j F_j e^{2πiω_j x}` that walks runs of nonzero
/// spectrum values with a phase recurrence.
pub struct GridRule<'a, T> {
    values: &'a [Complex<T>],
    grid: FrequencyGrid,
    runs: Vec<(usize, usize)>,
}

impl<'a, T: Real> GridRule<'a, T> {
    const RESYNC: usize = 256;

    pub fn new(values: &'a [Complex<T>], grid: &FrequencyGrid) -> Self {
        let mut runs = Vec::new();
        let mut start = None;
        for (j, v) in values.iter().enumerate() {
            let nz = v.norm_sqr() > T::zero();
            match (nz, start) {
                (true, None) => start = Some(j),
                (false, Some(s)) => {
                    runs.push((s, j));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push((s, values.len()));
        }
        Self { values, grid: *grid, runs }
    }

    pub fn eval(&self, x: T) -> Complex<T> {
        let step = cis_turns(x * self.grid.step::<T>());
        let mut acc = czero();
        for &(a, b) in &self.runs {
            let mut phase = czero();
            for j in a..b {
                if (j - a) % Self::RESYNC == 0 {
                    phase = cis_turns(self.grid.omega::<T>(j) * x);
                }
                acc += self.values[j] * phase;
                phase *= step;
            }
        }
        acc * self.grid.step::<T>()
    }

    pub fn eval_many(&self, xs: &[T]) -> Vec<Complex<T>> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }
}

/// Time values on the discrete model: direct evaluation for time kernels,
/// the grid rule for spectral signals.
pub fn time_values<T: Real>(f: &SignalRepresentation<T>, xs: &[T], grid: &FrequencyGrid) -> Result<Vec<Complex<T>>> {
    match f.repr() {
        Representation::Time(k) => Ok(xs.par_iter().map(|&x| k.eval(x)).collect()),
        _ => {
            let values = f.grid_spectrum(grid)?;
            Ok(GridRule::new(&values, grid).eval_many(xs))
        }
    }
}

/// Grid-rule samples `f(k)` for `k ∈ [-N/2, N/2)`, returned in that order.
pub fn grid_integer_samples<T: Real>(values: &[Complex<T>], grid: &FrequencyGrid) -> Vec<Complex<T>> {
    let n = grid.resolution();
    let tw = grid.twiddles::<T>();
    let nonzero: Vec<(usize, Complex<T>)> =
        values.iter().enumerate().filter(|(_, v)| v.norm_sqr() > T::zero()).map(|(j, &v)| (j % n, v)).collect();
    let half = (n / 2) as i64;
    let scale = grid.step::<T>();
    (-half..half)
        .into_par_iter()
        .map(|k| {
            // e^{2πiω_j k} = e^{2πi r k/N} because K·k is an integer
            let kk = k.rem_euclid(n as i64) as usize;
            nonzero.iter().map(|&(r, v)| v * tw[(r * kk) % n]).sum::<Complex<T>>() * scale
        })
        .collect()
}

/// Whether [`inverse_fourier_evaluate`] is exact for `f` (no grid rule involved).
pub fn has_exact_inverse<T: Real>(f: &SignalRepresentation<T>) -> bool {
    match f.repr() {
        Representation::PiecewiseConstant(_) | Representation::Time(_) => true,
        Representation::Modulated(Modulated { base, shifts: Some(_), .. }) => has_exact_inverse(base),
        _ => false,
    }
}

/// Like [`time_values`], but exact wherever [`has_exact_inverse`] holds.
pub fn exact_time_values<T: Real>(f: &SignalRepresentation<T>, xs: &[T], grid: &FrequencyGrid) -> Result<Vec<Complex<T>>> {
    if has_exact_inverse(f) {
        xs.par_iter().map(|&x| inverse_fourier_evaluate(f, x, grid)).collect()
    } else {
        time_values(f, xs, grid)
    }
}

/// Integer samples inside `|k| ≤ k_max`.
///
/// Time kernels are evaluated directly. Spectral signals use the grid rule,
/// which is `N`-periodic in `k`; the window is additionally capped to
/// `[-N/2, N/2)` and the energy of the remaining period is the tail.
/// Modulated signals take the inverse DFT of `m·Z_base(0,·)`, which is the
/// same discrete model.
pub fn integer_samples<T: Real>(f: &SignalRepresentation<T>, settings: &Settings) -> Result<TimeSamples<T>> {
    let kmax = settings.kmax as i64;
    match f.repr() {
        Representation::Time(k) => {
            let (lo, hi) = k.support();
            let first = lo.ceil().to_i64().unwrap_or(-kmax);
            let last = hi.floor().to_i64().unwrap_or(kmax);
            let inside: Vec<_> =
                (first.max(-kmax)..=last.min(kmax)).map(|i| (i, k.eval(T::from_i64_exact(i)))).collect();
            let tail: T = (first..=last)
                .filter(|i| i.abs() > kmax)
                .map(|i| k.eval(T::from_i64_exact(i)).norm_sqr())
                .sum();
            Ok(TimeSamples::from_pairs(inside).with_tail_energy(tail))
        }
        Representation::Modulated(_) => {
            let zak = zak_fiber(f, settings)?;
            Ok(window_samples(fiber_coefficients(&zak), &settings.grid, kmax))
        }
        _ => {
            let grid = settings.grid;
            let values = f.grid_spectrum(&grid)?;
            Ok(window_samples(grid_integer_samples(&values, &grid), &grid, kmax))
        }
    }
}

/// Splits one period of samples (ordered `k = -N/2 .. N/2`) into the
/// `|k| ≤ k_max` window and the tail energy of the rest.
fn window_samples<T: Real>(all: Vec<Complex<T>>, grid: &FrequencyGrid, kmax: i64) -> TimeSamples<T> {
    let half = (grid.resolution() / 2) as i64;
    let lo = (-kmax).max(-half);
    let hi = kmax.min(half - 1);
    let mut tail = T::zero();
    let mut window = Vec::with_capacity((hi - lo + 1).max(0) as usize);
    for (i, v) in all.into_iter().enumerate() {
        let k = i as i64 - half;
        if k >= lo && k <= hi {
            window.push(v);
        } else {
            tail += v.norm_sqr();
        }
    }
    TimeSamples::new(lo, window).with_tail_energy(tail)
}

/// Fourier coefficients `(1/N) Σ_r Z_r e^{2πikr/N}` for `k ∈ [-N/2, N/2)`.
pub fn fiber_coefficients<T: Real>(zak: &PeriodicSpectrum<T>) -> Vec<Complex<T>> {
    let n = zak.resolution();
    let tw = FrequencyGrid::new(1, n).map(|g| g.twiddles::<T>()).expect("fiber resolution is a power of two");
    let nonzero: Vec<(usize, Complex<T>)> =
        zak.values().iter().enumerate().filter(|(_, v)| v.norm_sqr() > T::zero()).map(|(r, &v)| (r, v)).collect();
    let half = (n / 2) as i64;
    let scale = T::one() / T::from_usize_exact(n);
    (-half..half)
        .into_par_iter()
        .map(|k| {
            let kk = k.rem_euclid(n as i64) as usize;
            nonzero.iter().map(|&(r, v)| v * tw[(r * kk) % n]).sum::<Complex<T>>() * scale
        })
        .collect()
}

/// `Z_f(0,·)` in the discrete model: from integer samples, except that a
/// modulated signal multiplies the fiber of its base.
pub fn zak_fiber<T: Real>(f: &SignalRepresentation<T>, settings: &Settings) -> Result<PeriodicSpectrum<T>> {
    match f.repr() {
        Representation::Modulated(m) => {
            let base = zak_fiber(&m.base, settings)?;
            if base.resolution() != m.multiplier.resolution() {
                return Err(Error::GridMismatch);
            }
            Ok(PeriodicSpectrum::new(
                base.values().iter().zip(m.multiplier.values()).map(|(a, b)| a * b).collect(),
            ))
        }
        _ => Ok(zak_time_fiber(&integer_samples(f, settings)?, &settings.grid)),
    }
}

/// Support set `{ω : G(ω) > ε·max G}`.
pub fn support_mask<T: Real>(g: &PeriodicSpectrum<T>, eps: T) -> Result<SupportMask> {
    let max = g.values().iter().map(|v| v.re).fold(T::zero(), T::max);
    for (index, v) in g.values().iter().enumerate() {
        if v.re < -eps * max.max(T::one()) {
            return Err(Error::NotAGrammian { index, value: v.re.to_f64_lossy() });
        }
    }
    let threshold = eps * max;
    let bits = g.values().iter().map(|v| max > T::zero() && v.re > threshold).collect();
    Ok(SupportMask::new(bits, eps.to_f64_lossy()))
}

/// `(min, max)` of `G` over the mask.
pub fn essential_bounds<T: Real>(g: &PeriodicSpectrum<T>, mask: &SupportMask) -> Result<(T, T)> {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for r in mask.indices() {
        lo = lo.min(g[r].re);
        hi = hi.max(g[r].re);
    }
    if mask.is_empty() {
        return Err(Error::Degenerate("support set is empty".into()));
    }
    if lo <= T::zero() {
        return Err(Error::Degenerate("Grammian vanishes on the support set".into()));
    }
    Ok((lo, hi))
}

/// Maximum over probe points of `Σ_{|k| ≤ k_max} |f(x + k)|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftSquareSum<T> {
    pub max: T,
    pub argmax: T,
    /// Energy of the translates left out of the window, at the maximizing probe.
    pub tail: T,
}

pub fn shift_square_sum<T: Real>(
    f: &SignalRepresentation<T>,
    xs: &[T],
    settings: &Settings,
) -> Result<ShiftSquareSum<T>> {
    let kmax = settings.kmax as i64;
    let sums: Vec<(T, T)> = match f.repr() {
        Representation::Time(kernel) => {
            let (lo, hi) = kernel.support();
            xs.par_iter()
                .map(|&x| {
                    // k with x + k inside the support
                    let first = (lo - x).ceil().to_i64().unwrap_or(0);
                    let last = (hi - x).floor().to_i64().unwrap_or(0);
                    let mut window = T::zero();
                    let mut tail = T::zero();
                    for k in first..=last {
                        let v = kernel.eval(x + T::from_i64_exact(k)).norm_sqr();
                        if k.abs() <= kmax {
                            window += v;
                        } else {
                            tail += v;
                        }
                    }
                    (window, tail)
                })
                .collect()
        }
        _ => {
            let grid = settings.grid;
            let values = f.grid_spectrum(&grid)?;
            let full_period = 2 * kmax >= grid.resolution() as i64;
            xs.par_iter()
                .map(|&x| {
                    let total = period_square_sum(&values, &grid, x);
                    if full_period {
                        return (total, T::zero());
                    }
                    let rule = GridRule::new(&values, &grid);
                    let window: T =
                        (-kmax..=kmax).map(|k| rule.eval(x + T::from_i64_exact(k)).norm_sqr()).sum();
                    (window, (total - window).max(T::zero()))
                })
                .collect()
        }
    };
    let mut best = ShiftSquareSum { max: T::zero(), argmax: xs.first().copied().unwrap_or_else(T::zero), tail: T::zero() };
    for (&x, &(w, t)) in xs.iter().zip(&sums) {
        if w > best.max {
            best = ShiftSquareSum { max: w, argmax: x, tail: t };
        }
    }
    Ok(best)
}

/// `Σ_{k over one period} |f(x + k)|² = (1/N) Σ_r |Σ_m F(r/N + m) e^{2πi(r/N + m)x}|²`
/// for the grid rule (discrete Parseval).
fn period_square_sum<T: Real>(values: &[Complex<T>], grid: &FrequencyGrid, x: T) -> T {
    let n = grid.resolution();
    let mut fiber = vec![czero::<T>(); n];
    let step = cis_turns(x * grid.step::<T>());
    for (block, chunk) in values.chunks(n).enumerate() {
        if chunk.iter().all(|v| v.norm_sqr() == T::zero()) {
            continue;
        }
        let mut phase = czero();
        for (r, (o, v)) in fiber.iter_mut().zip(chunk).enumerate() {
            if r % 256 == 0 {
                phase = cis_turns(grid.omega::<T>(block * n + r) * x);
            }
            *o += v * phase;
            phase *= step;
        }
    }
    fiber.iter().map(|v| v.norm_sqr()).sum::<T>() * grid.step::<T>()
}

/// Scale-normalized jump statistic `max |f(x + h) - f(x)| / (max|f|·√h)`.
pub const CONTINUITY_CONSTANT: f64 = 1.0;
const CONTINUITY_STEPS: usize = 512;
const CONTINUITY_REFINE: usize = 16;

/// Outcome of the sampled continuity heuristic. It can falsify continuity
/// (a jump that survives refinement) but never prove it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityCheck {
    pub verdict: Verdict,
    pub coarse_statistic: f64,
    pub refined_statistic: f64,
    pub step: f64,
    pub threshold: f64,
}

pub fn continuity_check<T: Real>(f: &SignalRepresentation<T>, settings: &Settings) -> Result<ContinuityCheck> {
    let (lo, hi) = match f.repr() {
        Representation::Time(k) => {
            let (a, b) = k.support();
            (a - T::lit(0.25), b + T::lit(0.25))
        }
        _ => (T::lit(-4.0), T::lit(4.0)),
    };
    let h = (hi - lo) / T::from_usize_exact(CONTINUITY_STEPS);
    let xs: Vec<T> = (0..=CONTINUITY_STEPS).map(|i| lo + h * T::from_usize_exact(i)).collect();
    let vals = exact_time_values(f, &xs, &settings.grid)?;
    let scale = vals.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let threshold = CONTINUITY_CONSTANT;
    if scale == T::zero() {
        return Ok(ContinuityCheck {
            verdict: Verdict::Pass,
            coarse_statistic: 0.0,
            refined_statistic: 0.0,
            step: h.to_f64_lossy(),
            threshold,
        });
    }
    let (worst, jump) = vals
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i, (w[1] - w[0]).norm()))
        .fold((0, T::zero()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let coarse = (jump / (scale * h.sqrt())).to_f64_lossy();

    let fine_h = h / T::from_usize_exact(CONTINUITY_REFINE);
    let fine_xs: Vec<T> = (0..=CONTINUITY_REFINE).map(|i| xs[worst] + fine_h * T::from_usize_exact(i)).collect();
    let fine_vals = exact_time_values(f, &fine_xs, &settings.grid)?;
    let fine_jump = fine_vals.windows(2).map(|w| (w[1] - w[0]).norm()).fold(T::zero(), T::max);
    let refined = (fine_jump / (scale * fine_h.sqrt())).to_f64_lossy();

    let verdict = if coarse <= threshold {
        Verdict::Pass
    } else if refined >= coarse {
        // the jump did not shrink with the step: a discontinuity
        Verdict::Fail
    } else {
        Verdict::Indeterminate
    };
    Ok(ContinuityCheck { verdict, coarse_statistic: coarse, refined_statistic: refined, step: h.to_f64_lossy(), threshold })
}

/// `sqrt((1/N) Σ_j |F_j|²)`, the grid `L²` norm of a spectrum.
pub fn spectral_norm<T: Real>(values: &[Complex<T>], grid: &FrequencyGrid) -> T {
    crate::signal::grid_energy(values, grid).sqrt()
}

/// Grid `L²` norm of `a - b`.
pub fn spectral_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>], grid: &FrequencyGrid) -> T {
    let e: T = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (e * grid.step::<T>()).sqrt()
}

/// `max_j |a_j - b_j|`.
pub fn max_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(T::zero(), T::max)
}
