//! Signal representations.
//!
//! A signal of one real variable is known either through its spectrum
//! (piecewise constant, or sampled on a [`FrequencyGrid`]) or through a
//! compactly supported time kernel whose spectrum is obtained by quadrature.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::periodic::PeriodicSpectrum;
use crate::quadrature::composite_nodes;
use crate::scalar::{cis_turns, czero, Real};

/// Constant spectral value on `[shift + lo, shift + hi)` with `0 ≤ lo < hi ≤ 1`.
///
/// Keeping the integer part separate lets very narrow pieces far from the
/// origin (widths below one ulp of their position) stay exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPiece<T> {
    pub shift: i64,
    pub lo: T,
    pub hi: T,
    pub value: Complex<T>,
}

impl<T: Real> UnitPiece<T> {
    pub fn start(&self) -> T {
        T::from_i64_exact(self.shift) + self.lo
    }

    pub fn end(&self) -> T {
        T::from_i64_exact(self.shift) + self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantSpectrum<T> {
    pieces: Vec<UnitPiece<T>>,
}

impl<T: Real> PiecewiseConstantSpectrum<T> {
    /// Builds a spectrum from unit pieces; pieces must be pairwise disjoint.
    pub fn from_pieces(mut pieces: Vec<UnitPiece<T>>) -> Result<Self> {
        for p in &pieces {
            if !(p.lo >= T::zero() && p.lo < p.hi && p.hi <= T::one()) {
                return Err(Error::InvalidSignal(format!(
                    "piece at shift {} has bounds [{}, {}) outside [0, 1]",
                    p.shift, p.lo, p.hi
                )));
            }
        }
        pieces.sort_by(|a, b| (a.shift, a.lo).partial_cmp(&(b.shift, b.lo)).unwrap());
        for w in pieces.windows(2) {
            if w[0].shift == w[1].shift && w[0].hi > w[1].lo {
                return Err(Error::InvalidSignal(format!(
                    "intervals [{}, {}) and [{}, {}) overlap",
                    w[0].start(),
                    w[0].end(),
                    w[1].start(),
                    w[1].end()
                )));
            }
        }
        pieces.retain(|p| p.value.norm_sqr() > T::zero());
        Ok(Self { pieces })
    }

    /// Builds a spectrum from intervals `[a, b)` with constant values, cutting
    /// each interval at the integers it crosses.
    pub fn from_intervals(intervals: &[(T, T, Complex<T>)]) -> Result<Self> {
        let mut pieces = Vec::new();
        for &(a, b, value) in intervals {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidSignal(format!("interval [{a}, {b}) is empty or not finite")));
            }
            let mut left = a;
            while left < b {
                let shift = left.floor();
                let right = (shift + T::one()).min(b);
                pieces.push(UnitPiece {
                    shift: shift.to_i64().ok_or_else(|| Error::InvalidSignal("interval too far out".into()))?,
                    lo: left - shift,
                    hi: right - shift,
                    value,
                });
                left = right;
            }
        }
        Self::from_pieces(pieces)
    }

    pub fn pieces(&self) -> &[UnitPiece<T>] {
        &self.pieces
    }

    /// Whether every piece endpoint is a point of the `1/N` lattice, so that
    /// grid cells refine the exact fiber cells.
    pub fn resolved_by(&self, grid: &FrequencyGrid) -> bool {
        let n = T::from_usize_exact(grid.resolution());
        self.pieces.iter().all(|q| (q.lo * n).fract().is_zero() && (q.hi * n).fract().is_zero())
    }

    /// Intervals `[a, b)` with values, as floating-point endpoints.
    pub fn intervals(&self) -> Vec<(T, T, Complex<T>)> {
        self.pieces.iter().map(|p| (p.start(), p.end(), p.value)).collect()
    }

    pub fn value_at(&self, omega: T) -> Complex<T> {
        let shift = omega.floor();
        let frac = omega - shift;
        let shift = shift.to_i64().unwrap_or(i64::MAX);
        self.pieces
            .iter()
            .find(|p| p.shift == shift && p.lo <= frac && frac < p.hi)
            .map(|p| p.value)
            .unwrap_or_else(czero)
    }

    /// Smallest power-of-two `K` with the support inside `[-K, K)`.
    pub fn required_half_bandwidth(&self) -> usize {
        let extent = self
            .pieces
            .iter()
            .map(|p| if p.shift < 0 { p.shift.unsigned_abs() } else { p.shift as u64 + 1 })
            .max()
            .unwrap_or(1);
        FrequencyGrid::required_half_bandwidth(extent as usize)
    }

    /// Cell averages over `[ω_j, ω_j + 1/N)`.
    pub fn grid_values(&self, grid: &FrequencyGrid) -> Result<Vec<Complex<T>>> {
        let required = self.required_half_bandwidth();
        if required > grid.half_bandwidth() {
            return Err(Error::BandwidthOverflow { required, have: grid.half_bandwidth() });
        }
        let n = grid.resolution();
        let nt = T::from_usize_exact(n);
        let mut out = vec![czero(); grid.len()];
        for p in &self.pieces {
            let first = (p.lo * nt).floor().to_usize().unwrap_or(0).min(n - 1);
            let last = ((p.hi * nt).ceil().to_usize().unwrap_or(n)).clamp(first + 1, n);
            for r in first..last {
                let cell_lo = T::from_usize_exact(r) / nt;
                let cell_hi = T::from_usize_exact(r + 1) / nt;
                let overlap = p.hi.min(cell_hi) - p.lo.max(cell_lo);
                if overlap > T::zero() {
                    let j = grid.index(p.shift, r).expect("bandwidth checked");
                    out[j] += p.value * (overlap * nt);
                }
            }
        }
        Ok(out)
    }

    /// Exact inverse Fourier transform `∫ f̂(ω) e^{2πiωx} dω`.
    pub fn inverse_fourier(&self, x: T) -> Complex<T> {
        let two = T::lit(2.0);
        self.pieces
            .iter()
            .map(|p| {
                // ∫_a^b e^{2πiωx} dω = w·e^{2πi(a + w/2)x}·sinc(w x)
                let w = p.width();
                let centre = cis_turns(T::from_i64_exact(p.shift) * x) * cis_turns((p.lo + w / two) * x);
                let arg = T::PI() * w * x;
                let sinc = if arg == T::zero() { T::one() } else { arg.sin() / arg };
                p.value * centre * (w * sinc)
            })
            .sum()
    }

    /// `∫ |f̂|²`.
    pub fn energy(&self) -> T {
        self.pieces.iter().map(|p| p.value.norm_sqr() * p.width()).sum()
    }
}

/// Spectrum sampled at every point of a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpectrum<T> {
    grid: FrequencyGrid,
    values: Arc<[Complex<T>]>,
}

impl<T: Real> GridSpectrum<T> {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidSignal(format!(
                "grid spectrum has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values: values.into() })
    }

    /// Samples `f̂(ω_j)` from a closure.
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(T) -> Complex<T>) -> Self {
        let values: Vec<_> = (0..grid.len()).map(|j| f(grid.omega(j))).collect();
        Self { grid, values: values.into() }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &Arc<[Complex<T>]> {
        &self.values
    }
}

/// A compactly supported time function.
pub trait TimeFunction<T: Real>: fmt::Debug + Send + Sync {
    fn eval(&self, x: T) -> Complex<T>;

    /// Closed support interval `[lo, hi]`.
    fn support(&self) -> (T, T);

    /// Points inside the support where the function may lose smoothness.
    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }

    /// Spectrum on the grid; defaults to quadrature of `∫ f(x) e^{-2πiωx} dx`.
    fn spectrum(&self, grid: &FrequencyGrid, order: usize) -> Vec<Complex<T>> {
        quadrature_spectrum(self, grid, order)
    }

    /// `∫ |f|²`, when it can be computed cheaply.
    fn energy(&self, order: usize) -> Option<T> {
        let (lo, hi) = self.support();
        let nodes = composite_nodes(lo, hi, &self.breakpoints(), order);
        Some(nodes.iter().map(|&(x, w)| self.eval(x).norm_sqr() * w).sum())
    }
}

fn quadrature_spectrum<T: Real, F: TimeFunction<T> + ?Sized>(
    f: &F,
    grid: &FrequencyGrid,
    order: usize,
) -> Vec<Complex<T>> {
    let (lo, hi) = f.support();
    let weighted: Vec<(T, Complex<T>)> = composite_nodes(lo, hi, &f.breakpoints(), order)
        .into_iter()
        .map(|(x, w)| (x, f.eval(x) * w))
        .filter(|(_, v)| v.norm_sqr() > T::zero())
        .collect();
    let n = grid.resolution();
    let nt = T::from_usize_exact(n);
    let mut out = vec![czero(); grid.len()];
    out.par_chunks_mut(n).enumerate().for_each(|(block, acc)| {
        let shift = T::from_i64_exact(block as i64 - grid.half_bandwidth() as i64);
        for &(x, fw) in &weighted {
            let step = cis_turns(-x / nt);
            let mut phase = cis_turns(-x * shift);
            for (r, a) in acc.iter_mut().enumerate() {
                if r % 128 == 0 && r > 0 {
                    phase = cis_turns(-x * (shift + T::from_usize_exact(r) / nt));
                }
                *a += fw * phase;
                phase *= step;
            }
        }
    });
    out
}

/// Real kernel given by a plain function on its support.
#[derive(Clone)]
pub struct FnKernel<T> {
    pub name: &'static str,
    pub func: fn(T) -> T,
    pub support: (T, T),
    pub breakpoints: Vec<T>,
}

impl<T> fmt::Debug for FnKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnKernel").field("name", &self.name).finish()
    }
}

impl<T: Real> TimeFunction<T> for FnKernel<T> {
    fn eval(&self, x: T) -> Complex<T> {
        if x < self.support.0 || x > self.support.1 {
            return czero();
        }
        Complex::new((self.func)(x), T::zero())
    }

    fn support(&self) -> (T, T) {
        self.support
    }

    fn breakpoints(&self) -> Vec<T> {
        self.breakpoints.clone()
    }
}

/// Finite combination `Σ c_k ψ(x - k)` of integer translates of a kernel.
#[derive(Debug, Clone)]
pub struct ShiftSum<T: Real> {
    base: TimeKernel<T>,
    coeffs: Vec<(i64, Complex<T>)>,
}

impl<T: Real> ShiftSum<T> {
    pub fn new(base: TimeKernel<T>, mut coeffs: Vec<(i64, Complex<T>)>) -> Self {
        coeffs.retain(|(_, c)| c.norm_sqr() > T::zero());
        coeffs.sort_by_key(|&(k, _)| k);
        Self { base, coeffs }
    }

    pub fn base(&self) -> &TimeKernel<T> {
        &self.base
    }

    pub fn coeffs(&self) -> &[(i64, Complex<T>)] {
        &self.coeffs
    }
}

impl<T: Real> TimeFunction<T> for ShiftSum<T> {
    fn eval(&self, x: T) -> Complex<T> {
        let (lo, hi) = self.base.support();
        // only translates with x - k inside [lo, hi] contribute
        let kmin = (x - hi).ceil().to_i64().unwrap_or(i64::MIN);
        let kmax = (x - lo).floor().to_i64().unwrap_or(i64::MAX);
        let start = self.coeffs.partition_point(|&(k, _)| k < kmin);
        self.coeffs[start..]
            .iter()
            .take_while(|&&(k, _)| k <= kmax)
            .map(|&(k, c)| c * self.base.eval(x - T::from_i64_exact(k)))
            .sum()
    }

    fn support(&self) -> (T, T) {
        let (lo, hi) = self.base.support();
        match (self.coeffs.first(), self.coeffs.last()) {
            (Some(&(a, _)), Some(&(b, _))) => (lo + T::from_i64_exact(a), hi + T::from_i64_exact(b)),
            _ => (T::zero(), T::zero()),
        }
    }

    fn spectrum(&self, grid: &FrequencyGrid, _order: usize) -> Vec<Complex<T>> {
        let multiplier = trig_multiplier(&self.coeffs, grid);
        let base = self.base.spectrum(grid);
        let n = grid.resolution();
        base.iter().enumerate().map(|(j, &v)| v * multiplier[j % n]).collect()
    }

    fn energy(&self, _order: usize) -> Option<T> {
        None
    }
}

/// `Σ_k c_k e^{-2πikω}` at the unit-grid points `r/N`.
pub(crate) fn trig_multiplier<T: Real>(coeffs: &[(i64, Complex<T>)], grid: &FrequencyGrid) -> Vec<Complex<T>> {
    let n = grid.resolution();
    let tw = grid.twiddles::<T>();
    (0..n)
        .into_par_iter()
        .map(|r| {
            coeffs
                .iter()
                .map(|&(k, c)| c * tw[(-(k as i128) * r as i128).rem_euclid(n as i128) as usize])
                .sum()
        })
        .collect()
}

/// Time-domain signal with a quadrature order and a per-grid spectrum cache.
#[derive(Clone)]
pub struct TimeKernel<T: Real> {
    func: Arc<dyn TimeFunction<T>>,
    order: usize,
    cache: Arc<Mutex<Vec<(FrequencyGrid, Arc<[Complex<T>]>)>>>,
}

impl<T: Real> fmt::Debug for TimeKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeKernel").field("func", &self.func).field("order", &self.order).finish()
    }
}

impl<T: Real> TimeKernel<T> {
    pub const DEFAULT_ORDER: usize = 2048;

    pub fn new(func: impl TimeFunction<T> + 'static, order: usize) -> Self {
        Self { func: Arc::new(func), order: order.max(8), cache: Arc::default() }
    }

    pub fn func(&self) -> &Arc<dyn TimeFunction<T>> {
        &self.func
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eval(&self, x: T) -> Complex<T> {
        self.func.eval(x)
    }

    pub fn support(&self) -> (T, T) {
        self.func.support()
    }

    pub fn spectrum(&self, grid: &FrequencyGrid) -> Arc<[Complex<T>]> {
        if let Some((_, v)) = self.cache.lock().unwrap().iter().find(|(g, _)| g == grid) {
            return v.clone();
        }
        let values: Arc<[Complex<T>]> = self.func.spectrum(grid, self.order).into();
        self.cache.lock().unwrap().push((*grid, values.clone()));
        values
    }

    pub fn energy(&self) -> Option<T> {
        self.func.energy(self.order)
    }
}

/// `m(ω)·f̂(ω)` for a 1-periodic multiplier `m`.
///
/// Kept symbolic so that integer samples follow from `Z_{mf}(0,·) = m·Z_f(0,·)`
/// instead of being recomputed from a truncated spectrum.
#[derive(Debug, Clone)]
pub struct Modulated<T: Real> {
    pub base: Arc<SignalRepresentation<T>>,
    pub multiplier: PeriodicSpectrum<T>,
    /// Set when `m = Σ_k c_k e^{-2πikω}` is a finite sum, so that
    /// `f(x) = Σ_k c_k base(x - k)` can be evaluated without the grid.
    pub shifts: Option<Vec<(i64, Complex<T>)>>,
}

#[derive(Debug, Clone)]
pub enum Representation<T: Real> {
    PiecewiseConstant(PiecewiseConstantSpectrum<T>),
    Grid(GridSpectrum<T>),
    Time(TimeKernel<T>),
    Modulated(Modulated<T>),
}

/// A function of one real variable together with its class-𝒰 flag
/// (absolutely integrable spectrum).
#[derive(Debug, Clone)]
pub struct SignalRepresentation<T: Real> {
    name: String,
    repr: Representation<T>,
    integrable_spectrum: bool,
    known_tail: T,
}

impl<T: Real> SignalRepresentation<T> {
    pub fn piecewise(name: impl Into<String>, spectrum: PiecewiseConstantSpectrum<T>) -> Self {
        Self {
            name: name.into(),
            repr: Representation::PiecewiseConstant(spectrum),
            integrable_spectrum: true,
            known_tail: T::zero(),
        }
    }

    pub fn grid(name: impl Into<String>, spectrum: GridSpectrum<T>) -> Self {
        Self { name: name.into(), repr: Representation::Grid(spectrum), integrable_spectrum: true, known_tail: T::zero() }
    }

    pub fn time(name: impl Into<String>, kernel: TimeKernel<T>, integrable_spectrum: bool) -> Self {
        Self { name: name.into(), repr: Representation::Time(kernel), integrable_spectrum, known_tail: T::zero() }
    }

    /// `m·f̂`; inherits the integrability flag and scales the known tail.
    pub fn modulated(name: impl Into<String>, base: SignalRepresentation<T>, multiplier: PeriodicSpectrum<T>) -> Self {
        let bound = multiplier.max_modulus();
        Self {
            name: name.into(),
            integrable_spectrum: base.integrable_spectrum,
            known_tail: base.known_tail * bound * bound,
            repr: Representation::Modulated(Modulated { base: Arc::new(base), multiplier, shifts: None }),
        }
    }

    /// `Σ_k c_k base(x - k)`, with spectrum `(Σ_k c_k e^{-2πikω})·basê`.
    pub fn shift_sum(
        name: impl Into<String>,
        base: SignalRepresentation<T>,
        coeffs: Vec<(i64, Complex<T>)>,
        grid: &FrequencyGrid,
    ) -> Self {
        let multiplier = PeriodicSpectrum::new(trig_multiplier(&coeffs, grid));
        let mut out = Self::modulated(name, base, multiplier);
        if let Representation::Modulated(m) = &mut out.repr {
            m.shifts = Some(coeffs);
        }
        out
    }

    /// Grid spectrum that is identically zero.
    pub fn zero(grid: FrequencyGrid) -> Self {
        Self::grid("zero", GridSpectrum { grid, values: vec![czero(); grid.len()].into() })
    }

    /// Records spectral energy known to be discarded by a truncated construction.
    pub fn with_known_tail(mut self, tail: T) -> Self {
        self.known_tail = tail;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_integrable_spectrum(mut self, flag: bool) -> Self {
        self.integrable_spectrum = flag;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn repr(&self) -> &Representation<T> {
        &self.repr
    }

    pub fn integrable_spectrum(&self) -> bool {
        self.integrable_spectrum
    }

    pub fn known_tail(&self) -> T {
        self.known_tail
    }

    pub fn as_time(&self) -> Option<&TimeKernel<T>> {
        match &self.repr {
            Representation::Time(k) => Some(k),
            _ => None,
        }
    }

    /// Spectrum values at every grid point.
    pub fn grid_spectrum(&self, grid: &FrequencyGrid) -> Result<Arc<[Complex<T>]>> {
        match &self.repr {
            Representation::PiecewiseConstant(p) => Ok(p.grid_values(grid)?.into()),
            Representation::Grid(g) => {
                if g.grid != *grid {
                    return Err(Error::GridMismatch);
                }
                Ok(g.values.clone())
            }
            Representation::Time(k) => Ok(k.spectrum(grid)),
            Representation::Modulated(m) => {
                let n = grid.resolution();
                if m.multiplier.resolution() != n {
                    return Err(Error::GridMismatch);
                }
                let base = m.base.grid_spectrum(grid)?;
                Ok(base.iter().enumerate().map(|(j, &v)| v * m.multiplier[j % n]).collect())
            }
        }
    }

    /// Spectral energy not represented on the grid: the known truncation of
    /// the construction plus, for time kernels, `‖f‖² - ∫_{grid} |f̂|²`.
    pub fn spectral_tail(&self, grid: &FrequencyGrid) -> Result<T> {
        let measured = match &self.repr {
            Representation::Time(k) => match k.energy() {
                Some(total) => {
                    let on_grid = grid_energy(&k.spectrum(grid), grid);
                    (total - on_grid).max(T::zero())
                }
                None => T::zero(),
            },
            Representation::Modulated(m) => {
                let bound = m.multiplier.max_modulus();
                return Ok(m.base.spectral_tail(grid)? * bound * bound);
            }
            _ => T::zero(),
        };
        Ok(self.known_tail + measured)
    }
}

/// `∫ |F|²` by the grid rule, `(1/N) Σ_j |F_j|²`.
pub fn grid_energy<T: Real>(values: &[Complex<T>], grid: &FrequencyGrid) -> T {
    values.iter().map(|v| v.norm_sqr()).sum::<T>() * grid.step::<T>()
}
