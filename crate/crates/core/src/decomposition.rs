//! Determining sets, direct sums along periodic partitions, and sampling on
//! the lattice `(ℤ + b)/a`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Settings;
use crate::membership::MEMBER_TOLERANCE;
use crate::periodic::{PeriodicSpectrum, SupportMask};
use crate::report::Verdict;
use crate::samples::TimeSamples;
use crate::scalar::{czero, Real};
use crate::signal::SignalRepresentation;
use crate::space::{Reconstruction, SamplingSpace};
use crate::spectral::{grammian_values, max_distance, spectral_distance, spectral_norm, support_mask, zak_fiber};

/// Finite family of periodic sets `{E_j}` meant to partition `E_φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPartition {
    pub masks: Vec<SupportMask>,
}

impl PeriodicPartition {
    pub fn new(masks: Vec<SupportMask>) -> Self {
        Self { masks }
    }

    /// Each part is a union of subintervals `[lo, hi)` of `[0, 1)`.
    pub fn from_intervals(resolution: usize, parts: &[Vec<(f64, f64)>]) -> Self {
        Self::new(parts.iter().map(|p| SupportMask::from_intervals(resolution, p)).collect())
    }

    /// Measure of points covered more than once.
    pub fn overlap_measure(&self) -> f64 {
        let Some(first) = self.masks.first() else { return 0.0 };
        let n = first.resolution();
        let multiple = (0..n).filter(|&r| self.masks.iter().filter(|m| m.get(r)).count() > 1).count();
        multiple as f64 / n as f64
    }

    pub fn union(&self, resolution: usize) -> SupportMask {
        self.masks.iter().fold(SupportMask::empty(resolution), |acc, m| acc.union(m))
    }

    /// Fails unless the parts are disjoint and cover `target`, both up to `1/N`.
    pub fn validate(&self, target: &SupportMask) -> Result<()> {
        let n = target.resolution();
        if self.masks.iter().any(|m| m.resolution() != n) {
            return Err(Error::GridMismatch);
        }
        let overlap = self.overlap_measure();
        let uncovered = self.union(n).symmetric_difference(target).measure();
        let slack = 1.0 / n as f64;
        if overlap > slack || uncovered > slack {
            return Err(Error::Partition { overlap, uncovered });
        }
        Ok(())
    }
}

/// Outcome of the determining-set test for an ordered family `f_1, …, f_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingSetReport<T> {
    /// Names of the functions in the order used to build the blocks.
    pub order: Vec<String>,
    /// `E_{f_i}`.
    pub masks: Vec<SupportMask>,
    /// `|(∪ E_{f_i}) △ E_φ|`.
    pub symmetric_difference: f64,
    pub verdict: Verdict,
    /// `B_1 = E_{f_1}`, `B_i = E_{f_i} ∖ ∪_{j<i} B_j`; empty unless the test passed.
    pub blocks: Vec<SupportMask>,
    /// `α̂_i = 1/Z_{f_i}(0,·)` on `B_i`, zero elsewhere.
    pub multipliers: Vec<PeriodicSpectrum<T>>,
    /// `max_j |ŝ(ω_j) - Σ_i α̂_i(ω_j) f̂_i(ω_j)|`.
    pub expansion_error: Option<f64>,
}

impl<T> DeterminingSetReport<T> {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Tests whether the members `funcs` determine `V(φ)`: their support sets
/// must cover `E_φ` up to a null set (here, up to one grid cell).
pub fn check_determining_set<T: Real>(
    space: &SamplingSpace<T>,
    funcs: &[SignalRepresentation<T>],
) -> Result<DeterminingSetReport<T>> {
    let settings = space.settings();
    let grid = settings.grid;
    let n = grid.resolution();
    for f in funcs {
        space.require_member(f, MEMBER_TOLERANCE)?;
    }
    let mut masks = Vec::with_capacity(funcs.len());
    for f in funcs {
        let g = grammian_values(&f.grid_spectrum(&grid)?, &grid);
        masks.push(support_mask(&g, settings.eps::<T>())?);
    }
    let union = masks.iter().fold(SupportMask::empty(n), |acc, m| acc.union(m));
    let symmetric_difference = union.symmetric_difference(space.mask()).measure();
    let verdict = Verdict::from_bool(symmetric_difference <= 1.0 / n as f64);
    let mut report = DeterminingSetReport {
        order: funcs.iter().map(|f| f.name().to_string()).collect(),
        masks,
        symmetric_difference,
        verdict,
        blocks: Vec::new(),
        multipliers: Vec::new(),
        expansion_error: None,
    };
    if !verdict.passed() {
        return Ok(report);
    }

    let mut covered = SupportMask::empty(n);
    for (f, mask) in funcs.iter().zip(&report.masks) {
        let block = mask.difference(&covered);
        covered = covered.union(&block);
        let zak = zak_fiber(f, settings)?;
        let alpha = PeriodicSpectrum::new(
            (0..n)
                .map(|r| if block.get(r) && zak[r].norm() > T::zero() { zak[r].inv() } else { czero() })
                .collect(),
        );
        report.blocks.push(block);
        report.multipliers.push(alpha);
    }
    let expansion = combine(funcs, &report.multipliers, settings)?;
    let s = space.sampling_spectrum()?;
    report.expansion_error = Some(max_distance(&s, &expansion).to_f64_lossy());
    Ok(report)
}

/// `Σ_i m_i(ω) f̂_i(ω)` on the grid.
fn combine<T: Real>(
    funcs: &[SignalRepresentation<T>],
    multipliers: &[PeriodicSpectrum<T>],
    settings: &Settings,
) -> Result<Vec<Complex<T>>> {
    let grid = settings.grid;
    let n = grid.resolution();
    let mut out = vec![czero(); grid.len()];
    for (f, m) in funcs.iter().zip(multipliers) {
        let fv = f.grid_spectrum(&grid)?;
        out.par_iter_mut().enumerate().for_each(|(j, o)| *o += fv[j] * m[j % n]);
    }
    Ok(out)
}

/// Expands a member as `f̂ = Σ_i β̂_i f̂_i` with `β̂_i = α̂_i·Z_f(0,·)` and
/// returns the grid `L²` norm of what is left over.
pub fn span_sum_check<T: Real>(
    space: &SamplingSpace<T>,
    report: &DeterminingSetReport<T>,
    funcs: &[SignalRepresentation<T>],
    probe: &SignalRepresentation<T>,
) -> Result<f64> {
    if !report.passed() {
        return Err(Error::ReportNotPassed);
    }
    space.require_member(probe, MEMBER_TOLERANCE)?;
    let settings = space.settings();
    let grid = settings.grid;
    let zak = zak_fiber(probe, settings)?;
    let betas: Vec<PeriodicSpectrum<T>> = report
        .multipliers
        .iter()
        .map(|a| PeriodicSpectrum::new(a.values().iter().zip(zak.values()).map(|(x, z)| x * z).collect()))
        .collect();
    let expansion = combine(funcs, &betas, settings)?;
    let fv = probe.grid_spectrum(&grid)?;
    Ok(spectral_distance(&fv, &expansion, &grid).to_f64_lossy())
}

/// Components `V(φ_j)`, `φ̂_j = φ̂χ_{E_j}`, of a direct-sum decomposition.
#[derive(Debug, Clone)]
pub struct Decomposition<T: Real> {
    pub components: Vec<SamplingSpace<T>>,
    /// Index into the partition of each returned component.
    pub indices: Vec<usize>,
    /// Parts whose component could not be built, with the reason.
    pub rejected: Vec<(usize, String)>,
    /// `max_j |ŝ_j - ŝχ_{E_j}|` over all components.
    pub masking_error: f64,
    /// `max_ω |Σ_j ŝ_j - ŝ|`.
    pub sum_error: f64,
}

/// Splits `V(φ)` along a partition of `E_φ` into certified sampling spaces.
pub fn decompose<T: Real>(space: &SamplingSpace<T>, partition: &PeriodicPartition) -> Result<Decomposition<T>> {
    partition.validate(space.mask())?;
    let settings = *space.settings();
    let grid = settings.grid;
    let n = grid.resolution();
    let built: Vec<(usize, Result<SamplingSpace<T>>)> = partition
        .masks
        .par_iter()
        .enumerate()
        .map(|(i, mask)| {
            let chi = PeriodicSpectrum::new(
                mask.bits().iter().map(|&b| if b { crate::scalar::cone() } else { czero() }).collect(),
            );
            let phi = SignalRepresentation::modulated(
                format!("{}|E{}", space.generator().name(), i + 1),
                space.generator().clone(),
                chi,
            );
            (i, SamplingSpace::build(phi, &settings))
        })
        .collect();

    let s = space.sampling_spectrum()?;
    let mut out = Decomposition {
        components: Vec::new(),
        indices: Vec::new(),
        rejected: Vec::new(),
        masking_error: 0.0,
        sum_error: 0.0,
    };
    let mut total = vec![czero::<T>(); grid.len()];
    for (i, result) in built {
        match result {
            Ok(component) => {
                let sj = component.sampling_spectrum()?;
                let mask = &partition.masks[i];
                for (j, (&a, &b)) in sj.iter().zip(s.iter()).enumerate() {
                    let expected = if mask.get(j % n) { b } else { czero() };
                    out.masking_error = out.masking_error.max((a - expected).norm().to_f64_lossy());
                    total[j] += a;
                }
                out.components.push(component);
                out.indices.push(i);
            }
            Err(e) => out.rejected.push((i, e.to_string())),
        }
    }
    out.sum_error = max_distance(&total, &s).to_f64_lossy();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectSumResiduals {
    /// `‖f - Σ_j P_j f‖`.
    pub residual: f64,
    /// `max_{j≠l} ‖P_l P_j f‖`.
    pub max_cross: f64,
}

/// Projects a probe onto every component and measures how far the pieces
/// are from summing to the probe and from being mutually orthogonal.
pub fn verify_direct_sum<T: Real>(
    components: &[SamplingSpace<T>],
    probe: &SignalRepresentation<T>,
) -> Result<DirectSumResiduals> {
    let Some(first) = components.first() else {
        return Ok(DirectSumResiduals { residual: 0.0, max_cross: 0.0 });
    };
    let grid = *first.grid();
    let parts: Vec<SignalRepresentation<T>> = components.iter().map(|c| c.project(probe)).collect::<Result<_>>()?;
    let mut total = vec![czero::<T>(); grid.len()];
    for p in &parts {
        for (t, v) in total.iter_mut().zip(p.grid_spectrum(&grid)?.iter()) {
            *t += v;
        }
    }
    let residual = spectral_distance(&probe.grid_spectrum(&grid)?, &total, &grid).to_f64_lossy();
    let mut max_cross = 0.0f64;
    for (j, p) in parts.iter().enumerate() {
        for (l, c) in components.iter().enumerate() {
            if j != l {
                let cross = c.project(p)?.grid_spectrum(&grid)?;
                max_cross = max_cross.max(spectral_norm(&cross, &grid).to_f64_lossy());
            }
        }
    }
    Ok(DirectSumResiduals { residual, max_cross })
}

/// `D_a t_b V(φ)` with `D_a g(x) = √a·g(ax)` and `t_b g(x) = g(x - b)`,
/// sampled on the lattice `(k + b)/a`.
#[derive(Debug, Clone)]
pub struct RescaledSpace<T: Real> {
    base: SamplingSpace<T>,
    a: T,
    b: T,
}

/// Rescales a sampling space to the lattice `(ℤ + b)/a`.
pub fn lattice_rescale<T: Real>(space: &SamplingSpace<T>, a: T, b: T) -> Result<RescaledSpace<T>> {
    if !(a > T::zero()) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidSignal(format!("lattice parameters a = {a}, b = {b} need a > 0")));
    }
    Ok(RescaledSpace { base: space.clone(), a, b })
}

impl<T: Real> RescaledSpace<T> {
    pub fn base(&self) -> &SamplingSpace<T> {
        &self.base
    }

    pub fn dilation(&self) -> T {
        self.a
    }

    pub fn translation(&self) -> T {
        self.b
    }

    /// Lattice point `(k + b)/a`.
    pub fn sample_point(&self, k: i64) -> T {
        (T::from_i64_exact(k) + self.b) / self.a
    }

    /// `x ↦ a x - b`, the inverse lattice map.
    pub fn base_point(&self, x: T) -> T {
        self.a * x - self.b
    }

    /// Values of `√a·f(a x - b)` for a member `f` of the base space.
    pub fn member_values(&self, f: &SignalRepresentation<T>, xs: &[T]) -> Result<Vec<Complex<T>>> {
        let ys: Vec<T> = xs.iter().map(|&x| self.base_point(x)).collect();
        let scale = self.a.sqrt();
        Ok(crate::spectral::exact_time_values(f, &ys, self.base.grid())?.into_iter().map(|v| v * scale).collect())
    }

    /// `g(x) = Σ_k g((k + b)/a)·s(a x - b - k)`, i.e. `Σ_k g((k+b)/a)·ψ(x - k/a)/√a`
    /// with `ψ = D_a t_b s`.
    pub fn reconstruct(&self, lattice_samples: &TimeSamples<T>, xs: &[T]) -> Result<Reconstruction<T>> {
        let ys: Vec<T> = xs.iter().map(|&x| self.base_point(x)).collect();
        self.base.reconstruct(lattice_samples, &ys)
    }
}
