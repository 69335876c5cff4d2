//! Sampling spaces `V(φ)`: frame bounds, the sampling function, the
//! three-condition sampling certificate, synthesis, reconstruction and
//! orthogonal projection.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibers::{ExactFibers, Fiber};
use crate::grid::{FrequencyGrid, Settings};
use crate::periodic::{PeriodicSpectrum, SupportMask};
use crate::report::{Checked, Verdict};
use crate::samples::TimeSamples;
use crate::scalar::{creal, czero, Real};
use crate::signal::{Representation, ShiftSum, SignalRepresentation, TimeKernel};
use crate::spectral::{
    bracket_values, continuity_check, essential_bounds, fiber_coefficients, grammian_values, has_exact_inverse,
    inverse_fourier_evaluate, shift_square_sum,
    spectral_distance, spectral_norm, support_mask, zak_fiber, zak_time_fiber, ContinuityCheck, GridRule,
};

/// Number of uniform `x` probes in `[0, 1)` used for shift-sum bounds.
pub const SHIFT_PROBES: usize = 64;

/// Largest number of translates kept when a sampling function of a time
/// kernel is itself written as a finite combination of translates.
const MAX_TIME_TERMS: usize = 32;

/// Outcome of the three sampling-space conditions on a candidate generator:
/// continuity, bounded `Σ|φ(x-k)|²`, and `A·χ_E ≤ |Z_φ(0,·)| ≤ B·χ_E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sz99Report {
    pub continuity: ContinuityCheck,
    pub shift_sum: Verdict,
    pub shift_sum_bound: Checked,
    pub zak: Verdict,
    pub zak_lower: Checked,
    pub zak_upper: Checked,
    /// Largest `|Z|` off the support set; must vanish up to the grid guard.
    pub zak_off_support: Checked,
    pub overall: Verdict,
}

impl fmt::Display for Sz99Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "continuity {} (jump statistic {:.3}), shift sum {} (bound {}), Zak {} (A_Z {}, B_Z {}, off-support {}), overall {}",
            self.continuity.verdict,
            self.continuity.coarse_statistic,
            self.shift_sum,
            self.shift_sum_bound,
            self.zak,
            self.zak_lower,
            self.zak_upper,
            self.zak_off_support,
            self.overall
        )
    }
}

pub(crate) fn unit_probes<T: Real>(count: usize) -> Vec<T> {
    (0..count).map(|i| T::from_usize_exact(i) / T::from_usize_exact(count)).collect()
}

/// Checks the three sampling-space conditions on `candidate`.
pub fn check_sz99<T: Real>(candidate: &SignalRepresentation<T>, settings: &Settings) -> Result<Sz99Report> {
    let eps = settings.eps;
    let continuity = continuity_check(candidate, settings)?;

    let sums = shift_square_sum(candidate, &unit_probes::<T>(SHIFT_PROBES), settings)?;
    let bound = (sums.max + sums.tail).to_f64_lossy();
    let shift_sum = Verdict::from_bool(bound.is_finite() && bound < 1.0 / eps);
    let shift_sum_bound = Checked::new(bound, 1.0 / eps);

    let grid = settings.grid;
    let g = grammian_values(&candidate.grid_spectrum(&grid)?, &grid);
    let mask = support_mask(&g, settings.eps::<T>())?;
    let zak = zak_fiber(candidate, settings)?;
    let max_g = g.values().iter().map(|v| v.re).fold(T::zero(), T::max).to_f64_lossy();
    let (mut lo, mut hi, mut off) = (f64::INFINITY, 0.0f64, 0.0f64);
    for (r, z) in zak.values().iter().enumerate() {
        let m = z.norm().to_f64_lossy();
        if mask.get(r) {
            lo = lo.min(m);
            hi = hi.max(m);
        } else {
            off = off.max(m);
        }
    }
    // off the support G ≤ ε·max G, and |Z|² ≤ 2K·G by Cauchy–Schwarz
    let off_tol = (2.0 * grid.half_bandwidth() as f64 * eps * max_g).sqrt() + 1e-12;
    // |Z| is measured against √G as well, so a Zak transform that cancels to
    // roundoff everywhere is not mistaken for a bounded-below one
    let floor = eps * hi.max(max_g.sqrt());
    let (zak_verdict, zak_lower, zak_upper) = if mask.is_empty() {
        (Verdict::Fail, Checked::new(0.0, eps), Checked::new(0.0, 1.0 / eps))
    } else {
        (
            Verdict::from_bool(lo > floor && off <= off_tol),
            Checked::new(lo, floor),
            Checked::new(hi, 1.0 / eps),
        )
    };
    let overall = Verdict::all([continuity.verdict, shift_sum, zak_verdict]);
    Ok(Sz99Report {
        continuity,
        shift_sum,
        shift_sum_bound,
        zak: zak_verdict,
        zak_lower,
        zak_upper,
        zak_off_support: Checked::new(off, off_tol),
        overall,
    })
}

/// `φ̂ = ψ̂ / G_ψ^{1/2}` on the support set and zero elsewhere; the integer
/// translates of `φ` form a tight frame of `V(ψ)`.
pub fn tight_frame_generator<T: Real>(psi: &SignalRepresentation<T>, settings: &Settings) -> Result<SignalRepresentation<T>> {
    let grid = settings.grid;
    let g = grammian_values(&psi.grid_spectrum(&grid)?, &grid);
    let mask = support_mask(&g, settings.eps::<T>())?;
    if mask.is_empty() {
        return Err(Error::Degenerate("generator is zero".into()));
    }
    let m = PeriodicSpectrum::new(
        g.values()
            .iter()
            .enumerate()
            .map(|(r, v)| if mask.get(r) { creal(T::one() / v.re.sqrt()) } else { czero() })
            .collect(),
    );
    Ok(SignalRepresentation::modulated(format!("{} (tight frame)", psi.name()), psi.clone(), m))
}

/// The shift-invariant space generated by one function, with its Grammian,
/// support set, frame bounds, sampling function and sampling certificate.
#[derive(Debug, Clone)]
pub struct SamplingSpace<T: Real> {
    generator: SignalRepresentation<T>,
    settings: Settings,
    grammian: PeriodicSpectrum<T>,
    mask: SupportMask,
    bounds: (T, T),
    zak: PeriodicSpectrum<T>,
    sampling: SignalRepresentation<T>,
    sampling_shift_bound: T,
    sz99: Sz99Report,
}

/// Values of a reconstruction with a bound on the error caused by the
/// samples outside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<T> {
    pub values: Vec<Complex<T>>,
    pub tail_bound: T,
}

impl<T: Real> SamplingSpace<T> {
    /// Builds `V(ψ)` and refuses it unless the sampling certificate passes.
    pub fn build(psi: SignalRepresentation<T>, settings: &Settings) -> Result<Self> {
        Self::build_inner(psi, settings, true)
    }

    /// Builds `V(ψ)` without requiring the certificate; reconstruction is refused
    /// on such a space unless the certificate happens to pass.
    pub fn build_unchecked(psi: SignalRepresentation<T>, settings: &Settings) -> Result<Self> {
        Self::build_inner(psi, settings, false)
    }

    fn build_inner(psi: SignalRepresentation<T>, settings: &Settings, checked: bool) -> Result<Self> {
        let grid = settings.grid;
        let eps = settings.eps::<T>();
        let grammian = grammian_values(&psi.grid_spectrum(&grid)?, &grid);
        let mask = support_mask(&grammian, eps)?;
        if mask.is_empty() {
            return Err(Error::Degenerate(format!("{} has zero Grammian", psi.name())));
        }
        let bounds = essential_bounds(&grammian, &mask)?;
        if checked && bounds.0 <= eps * bounds.1 {
            return Err(Error::Degenerate(format!(
                "translates of {} are not a frame sequence (A = {:e}, B = {:e})",
                psi.name(),
                bounds.0.to_f64_lossy(),
                bounds.1.to_f64_lossy()
            )));
        }

        let zak = zak_fiber(&psi, settings)?;
        let g_max = grammian.values().iter().map(|v| v.re).fold(T::zero(), T::max);
        let guard = eps * zak.max_modulus().max(g_max.sqrt());
        let mut multiplier = Vec::with_capacity(grid.resolution());
        for (r, z) in zak.values().iter().enumerate() {
            if !mask.get(r) {
                multiplier.push(czero());
            } else if z.norm() <= guard {
                if checked {
                    return Err(Error::NotASamplingSpace {
                        omega: grid.unit_omega::<f64>(r),
                        modulus: z.norm().to_f64_lossy(),
                    });
                }
                multiplier.push(czero());
            } else {
                multiplier.push(z.inv());
            }
        }
        let sampling = sampling_function(&psi, PeriodicSpectrum::new(multiplier))?;

        let sz99 = check_sz99(&psi, settings)?;
        if checked && !sz99.overall.passed() {
            return Err(Error::Sz99Failed(Box::new(sz99)));
        }
        let sums = shift_square_sum(&sampling, &unit_probes::<T>(SHIFT_PROBES), settings)?;
        Ok(Self {
            generator: psi,
            settings: *settings,
            grammian,
            mask,
            bounds,
            zak,
            sampling,
            sampling_shift_bound: sums.max + sums.tail,
            sz99,
        })
    }

    pub fn generator(&self) -> &SignalRepresentation<T> {
        &self.generator
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.settings.grid
    }

    pub fn grammian(&self) -> &PeriodicSpectrum<T> {
        &self.grammian
    }

    /// The support set `E_φ`.
    pub fn mask(&self) -> &SupportMask {
        &self.mask
    }

    /// `(A, B)`: the extreme Grammian values on the support set.
    pub fn frame_bounds(&self) -> (T, T) {
        self.bounds
    }

    /// `Z_φ(0,·)` of the generator.
    pub fn zak(&self) -> &PeriodicSpectrum<T> {
        &self.zak
    }

    pub fn sampling_function(&self) -> &SignalRepresentation<T> {
        &self.sampling
    }

    pub fn sampling_spectrum(&self) -> Result<std::sync::Arc<[Complex<T>]>> {
        self.sampling.grid_spectrum(&self.settings.grid)
    }

    /// `sup_x Σ_k |s(x - k)|²` over the probe set, used for tail bounds.
    pub fn sampling_shift_bound(&self) -> T {
        self.sampling_shift_bound
    }

    pub fn sz99(&self) -> &Sz99Report {
        &self.sz99
    }

    pub fn certified(&self) -> bool {
        self.sz99.overall.passed()
    }

    /// `f̂ = (Σ_k c_k e^{-2πikω})·φ̂`.
    pub fn synthesize(&self, coeffs: &TimeSamples<T>) -> SignalRepresentation<T> {
        let pairs = coeffs.pairs();
        let name = format!("synthesized in V({})", self.generator.name());
        if let Some(kernel) = self.generator.as_time() {
            let sum = ShiftSum::new(kernel.clone(), pairs);
            return SignalRepresentation::time(name, TimeKernel::new(sum, kernel.order()), self.generator.integrable_spectrum());
        }
        SignalRepresentation::shift_sum(name, self.generator.clone(), pairs, &self.settings.grid)
    }

    /// `f(x) = Σ_k f(k) s(x - k)` at every `x`.
    ///
    /// A time-kernel sampling function is summed over its support, one with
    /// an exact inverse transform over all samples; otherwise the equivalent
    /// spectral identity `f̂ = Z_f(0,·)·ŝ` is evaluated on the grid.
    pub fn reconstruct(&self, samples: &TimeSamples<T>, xs: &[T]) -> Result<Reconstruction<T>> {
        if !self.certified() {
            return Err(Error::Uncertified(Box::new(self.sz99.clone())));
        }
        let tail_bound = (samples.tail_energy() * self.sampling_shift_bound).sqrt();
        let values = if let Some(s) = self.sampling.as_time() {
            use rayon::prelude::*;
            let (lo, hi) = s.support();
            xs.par_iter()
                .map(|&x| {
                    let first = (x - hi).ceil().to_i64().unwrap_or(i64::MIN).max(samples.start());
                    let last = (x - lo).floor().to_i64().unwrap_or(i64::MAX).min(samples.start() + samples.len() as i64 - 1);
                    (first..=last).map(|k| samples.get(k) * s.eval(x - T::from_i64_exact(k))).sum()
                })
                .collect()
        } else if has_exact_inverse(&self.sampling) {
            use rayon::prelude::*;
            let grid = self.settings.grid;
            let nonzero: Vec<(i64, Complex<T>)> = samples.iter().filter(|(_, v)| v.norm_sqr() > T::zero()).collect();
            xs.par_iter()
                .map(|&x| {
                    let mut sum = czero();
                    for &(k, c) in &nonzero {
                        sum += c * inverse_fourier_evaluate(&self.sampling, x - T::from_i64_exact(k), &grid)?;
                    }
                    Ok(sum)
                })
                .collect::<Result<_>>()?
        } else {
            let grid = self.settings.grid;
            let zf = zak_time_fiber(samples, &grid);
            let n = grid.resolution();
            let spectrum: Vec<Complex<T>> =
                self.sampling_spectrum()?.iter().enumerate().map(|(j, &v)| v * zf[j % n]).collect();
            GridRule::new(&spectrum, &grid).eval_many(xs)
        };
        Ok(Reconstruction { values, tail_bound })
    }

    /// Fiberwise projection multiplier `r = [f̂, φ̂]/G_φ` on `E_φ`.
    pub fn projection_multiplier(&self, f: &SignalRepresentation<T>) -> Result<PeriodicSpectrum<T>> {
        let grid = self.settings.grid;
        let b = bracket_values(&f.grid_spectrum(&grid)?, &self.generator.grid_spectrum(&grid)?, &grid);
        Ok(PeriodicSpectrum::new(
            (0..grid.resolution())
                .map(|r| if self.mask.get(r) { b[r] / self.grammian[r].re } else { czero() })
                .collect(),
        ))
    }

    /// Orthogonal projection onto `V(φ)`: `r·φ̂` with `r = [f̂, φ̂]/G_φ` on `E_φ`.
    pub fn project(&self, f: &SignalRepresentation<T>) -> Result<SignalRepresentation<T>> {
        let r = self.projection_multiplier(f)?;
        Ok(SignalRepresentation::modulated(format!("P {}", f.name()), self.generator.clone(), r))
    }

    /// `‖f̂ - P f̂‖ / ‖f̂‖` on the grid (zero for the zero function).
    pub fn membership_residual(&self, f: &SignalRepresentation<T>) -> Result<T> {
        let grid = self.settings.grid;
        let fv = f.grid_spectrum(&grid)?;
        let pv = self.project(f)?.grid_spectrum(&grid)?;
        let norm = spectral_norm(&fv, &grid);
        if norm == T::zero() {
            return Ok(T::zero());
        }
        Ok(spectral_distance(&fv, &pv, &grid) / norm)
    }

    /// Fails with [`Error::NotInSpace`] when the relative residual exceeds `tol`.
    pub fn require_member(&self, f: &SignalRepresentation<T>, tol: f64) -> Result<()> {
        let residual = self.membership_residual(f)?.to_f64_lossy();
        if residual > tol {
            return Err(Error::NotInSpace { name: f.name().to_string(), residual });
        }
        Ok(())
    }
}

/// `ŝ = m·ψ̂` with `m = χ_E / Z_ψ(0,·)`.
///
/// For a time kernel whose multiplier has few Fourier coefficients `d_k` the
/// result stays in the time domain as `Σ_k d_k ψ(x - k)`, so it can still be
/// evaluated exactly at every point.
fn sampling_function<T: Real>(psi: &SignalRepresentation<T>, multiplier: PeriodicSpectrum<T>) -> Result<SignalRepresentation<T>> {
    let name = format!("s[{}]", psi.name());
    if let Representation::Time(kernel) = psi.repr() {
        let n = multiplier.resolution() as i64;
        let coeffs = fiber_coefficients(&multiplier);
        let peak = coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max);
        let kept: Vec<(i64, Complex<T>)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > T::lit(1e-13) * peak)
            .map(|(i, &c)| (i as i64 - n / 2, c))
            .collect();
        if kept.len() <= MAX_TIME_TERMS {
            let sum = ShiftSum::new(kernel.clone(), kept);
            return Ok(SignalRepresentation::time(
                name,
                TimeKernel::new(sum, kernel.order()),
                psi.integrable_spectrum(),
            ));
        }
    }
    if let Representation::PiecewiseConstant(p) = psi.repr() {
        let n = multiplier.resolution();
        if p.resolved_by(&FrequencyGrid::new(1, n)?) {
            // the multiplier is constant on every exact cell
            let at = |c: &Fiber<T>| multiplier[(c.lo * T::from_usize_exact(n)).to_usize().unwrap_or(0).min(n - 1)];
            let exact = ExactFibers::new(p).map_pieces(|c, _, v| v * at(c), |_| Vec::new())?;
            return Ok(SignalRepresentation::piecewise(name, exact)
                .with_known_tail(psi.known_tail() * multiplier.max_modulus() * multiplier.max_modulus()));
        }
    }
    Ok(SignalRepresentation::modulated(name, psi.clone(), multiplier))
}

/// Extreme eigenvalues of the `T×T` Gram matrix `⟨ψ(·-j), ψ(·-k)⟩`, built from
/// the Fourier coefficients of the Grammian. An independent check on the
/// frame bounds read off the Grammian.
pub fn gram_matrix_bounds_oracle<T: Real>(
    psi: &SignalRepresentation<T>,
    settings: &Settings,
    truncation: usize,
) -> Result<(f64, f64)> {
    if truncation < 2 || truncation > settings.kmax {
        return Err(Error::Truncation { requested: truncation, limit: settings.kmax });
    }
    let grid = settings.grid;
    let g = grammian_values(&psi.grid_spectrum(&grid)?, &grid);
    if g.max_modulus() == T::zero() {
        return Err(Error::Degenerate(format!("{} has zero Grammian", psi.name())));
    }
    let n = grid.resolution();
    let gf: Vec<f64> = g.values().iter().map(|v| v.re.to_f64_lossy()).collect();
    // g_d = ∫_0^1 G(ω) e^{2πidω} dω on the grid
    let coeff = |d: i64| -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for (r, &v) in gf.iter().enumerate() {
            let turns = (d * r as i64).rem_euclid(n as i64) as f64 / n as f64;
            acc += Complex::from_polar(v, std::f64::consts::TAU * turns);
        }
        acc / n as f64
    };
    let coeffs: Vec<Complex<f64>> = (0..truncation as i64).map(coeff).collect();
    // Hermitian Toeplitz matrix as a real symmetric matrix of twice the size
    let t = truncation;
    let mut m = DMatrix::<f64>::zeros(2 * t, 2 * t);
    for j in 0..t {
        for k in 0..t {
            let c = if k >= j { coeffs[k - j] } else { coeffs[j - k].conj() };
            m[(j, k)] = c.re;
            m[(j + t, k + t)] = c.re;
            m[(j, k + t)] = -c.im;
            m[(j + t, k)] = c.im;
        }
    }
    let eig = m.symmetric_eigen().eigenvalues;
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}
