//! Does a function belong to some sampling space?
//!
//! Piecewise-constant spectra are decided on their exact fiber cells; every
//! other representation is decided on the unit grid. Either way the report
//! lists each condition with the constants it computed and the tolerance
//! they were compared against.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibers::{ExactFibers, Fiber};
use crate::grid::Settings;
use crate::periodic::{PeriodicSpectrum, SupportMask};
use crate::report::{Checked, Verdict};
use crate::scalar::{cone, creal, czero, Real};
use crate::signal::{GridSpectrum, PiecewiseConstantSpectrum, Representation, SignalRepresentation};
use crate::space::{unit_probes, SamplingSpace, SHIFT_PROBES};
use crate::spectral::{
    continuity_check, dual_values, grammian_values, integer_samples, max_distance, shift_square_sum,
    spectral_distance, support_mask, zak_fiber, zak_time_fiber,
};

/// Relative size of the finest-cell group used to detect growth in
/// truncated families, and the excess that counts as growth.
const GROWTH_FRACTION: f64 = 0.1;
const GROWTH_EXCESS: f64 = 0.01;

/// Uniform and random probe counts for the `x`-uniform bound `L`.
pub const L_PROBES_UNIFORM: usize = 64;
pub const L_PROBES_RANDOM: usize = 64;

/// Residual below which a function counts as a member of a space.
pub const MEMBER_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionKind {
    /// Continuity, bounded shift sums and a two-sided Zak bound on `h`.
    Theorem2,
    /// Conditions a)–d) for generators with integrable spectrum.
    Theorem5,
    /// The two sufficient inequalities relating `|Σf̂|`, `Σ|f̂|²` and `Σ|f̂|`.
    Sz04,
}

/// Normalization of `h` in `check_theorem2`: `ĥ = f̂/Z_f(0,·)` (the one
/// shown to be the sampling function) or `ĥ = f̂/G_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    #[default]
    Zak,
    Grammian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Exact fiber cells of a piecewise-constant spectrum.
    ExactCells,
    /// Unit-grid points.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub verdict: Verdict,
    pub values: BTreeMap<String, Checked>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Condition {
    fn new(label: &str, verdict: Verdict) -> Self {
        Self { label: label.into(), verdict, values: BTreeMap::new(), note: String::new() }
    }

    fn value(mut self, key: &str, checked: Checked) -> Self {
        self.values.insert(key.into(), checked);
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn get(&self, key: &str) -> Option<&Checked> {
        self.values.get(key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Spectral energy outside the represented band.
    pub spectral_tail_energy: f64,
    /// Energy of integer samples outside the sample window.
    pub sample_tail_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    pub signal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
    pub route: Route,
    /// Measure of the support set `E_f` (grid fraction or exact cell measure).
    pub support_measure: f64,
    pub conditions: Vec<Condition>,
    pub truncation: Truncation,
    pub overall: Verdict,
}

impl ConditionReport {
    fn new(
        kind: ConditionKind,
        signal: &str,
        route: Route,
        support_measure: f64,
        conditions: Vec<Condition>,
        truncation: Truncation,
    ) -> Self {
        let overall = Verdict::all(conditions.iter().map(|c| c.verdict));
        Self { kind, signal: signal.into(), normalization: None, route, support_measure, conditions, truncation, overall }
    }

    pub fn condition(&self, label: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.label == label)
    }

    pub fn passed(&self) -> bool {
        self.overall.passed()
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on {}: {}", self.kind, self.signal, self.overall)?;
        for c in &self.conditions {
            write!(f, "; {} {}", c.label, c.verdict)?;
            for (k, v) in &c.values {
                write!(f, " {k}={v}")?;
            }
        }
        Ok(())
    }
}

/// Extremum of sampled values, declared unbounded when it exceeds `limit`
/// or, for truncated families, when the finest cells overshoot the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extremum {
    Max,
    Min,
}

fn extremum(cells: &[(f64, f64)], which: Extremum, truncated: bool, limit: f64) -> Option<f64> {
    let pick = |it: &mut dyn Iterator<Item = f64>| match which {
        Extremum::Max => it.fold(f64::NEG_INFINITY, f64::max),
        Extremum::Min => it.fold(f64::INFINITY, f64::min),
    };
    if cells.is_empty() {
        return Some(0.0);
    }
    let all = pick(&mut cells.iter().map(|c| c.1));
    let outside = match which {
        Extremum::Max => !(all <= limit),
        Extremum::Min => !(all >= 1.0 / limit),
    };
    if outside {
        return None;
    }
    if truncated && cells.len() >= 10 {
        let mut sorted: Vec<(f64, f64)> = cells.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let fine = ((cells.len() as f64) * GROWTH_FRACTION).ceil() as usize;
        let fine_ext = pick(&mut sorted[..fine].iter().map(|c| c.1));
        let rest_ext = pick(&mut sorted[fine..].iter().map(|c| c.1));
        let grows = match which {
            Extremum::Max => fine_ext > rest_ext * (1.0 + GROWTH_EXCESS),
            Extremum::Min => fine_ext < rest_ext * (1.0 - GROWTH_EXCESS),
        };
        if grows {
            return None;
        }
    }
    Some(all)
}

fn bound_check(value: Option<f64>, tolerance: f64) -> Checked {
    match value {
        Some(v) => Checked::new(v, tolerance),
        None => Checked::unbounded(tolerance),
    }
}

/// `x`-probes for the uniform bound `L`: a uniform grid plus seeded random points in `[0, 1)`.
pub fn l_probes<T: Real>(seed: u64) -> Vec<T> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut xs = unit_probes::<T>(L_PROBES_UNIFORM);
    xs.extend((0..L_PROBES_RANDOM).map(|_| T::lit(rng.random::<f64>())));
    xs
}

/// Support set of an exact fiber decomposition: cells with `G > ε·max G`.
fn exact_support<T: Real>(fibers: &ExactFibers<T>, eps: f64) -> (Vec<&Fiber<T>>, f64) {
    let max_g = fibers.cells().iter().map(|c| c.grammian().to_f64_lossy()).fold(0.0, f64::max);
    let cells: Vec<&Fiber<T>> = fibers
        .cells()
        .iter()
        .filter(|c| c.measure() > T::zero() && c.grammian().to_f64_lossy() > eps * max_g && max_g > 0.0)
        .collect();
    let measure = cells.iter().map(|c| c.measure().to_f64_lossy()).sum();
    (cells, measure)
}

fn zak_guard<T: Real>(zs: impl Iterator<Item = Complex<T>>, eps: f64) -> f64 {
    eps * zs.map(|z| z.norm().to_f64_lossy()).fold(0.0, f64::max)
}

/// Membership in some sampling space, via the normalized function `h` with
/// `ĥ = f̂/Z_f(0,·)` (or `f̂/G_f`) on `E_f`: `h` must be continuous, have
/// bounded shift sums, and satisfy `A·χ_{E_f} ≤ |Z_h(0,·)| ≤ B·χ_{E_f}`.
pub fn check_theorem2<T: Real>(
    f: &SignalRepresentation<T>,
    settings: &Settings,
    normalization: Normalization,
) -> Result<ConditionReport> {
    let eps = settings.eps;
    let truncated = f.known_tail() > T::zero();
    let (h, route, measure, zak_cells, shift_bound, truncation) = match f.repr() {
        Representation::PiecewiseConstant(p) => {
            let fibers = ExactFibers::new(p);
            let (support, measure) = exact_support(&fibers, eps);
            let guard = zak_guard(support.iter().map(|c| c.zak()), eps);
            let scale = |c: &Fiber<T>| -> Option<Complex<T>> {
                let z = c.zak();
                match normalization {
                    _ if !support.iter().any(|s| s.lo == c.lo) => None,
                    Normalization::Zak if z.norm().to_f64_lossy() > guard => Some(z.inv()),
                    Normalization::Zak => None,
                    Normalization::Grammian => Some(creal(T::one() / c.grammian())),
                }
            };
            let hp = fibers.map_pieces(|c, _, v| scale(c).map_or(czero(), |s| v * s), |_| Vec::new())?;
            let hf = ExactFibers::new(&hp);
            let zak_cells: Vec<(f64, f64)> = support
                .iter()
                .map(|c| (c.measure().to_f64_lossy(), scale(c).map_or(0.0, |s| (c.zak() * s).norm().to_f64_lossy())))
                .collect();
            let bound = unit_probes::<T>(SHIFT_PROBES)
                .into_iter()
                .map(|x| hf.shift_square_sum(x).to_f64_lossy())
                .fold(0.0, f64::max);
            let truncation =
                Truncation { spectral_tail_energy: f.known_tail().to_f64_lossy(), sample_tail_energy: 0.0 };
            (SignalRepresentation::piecewise("h", hp), Route::ExactCells, measure, zak_cells, bound, truncation)
        }
        _ => {
            let grid = settings.grid;
            let g = grammian_values(&f.grid_spectrum(&grid)?, &grid);
            let mask = support_mask(&g, settings.eps::<T>())?;
            let samples = integer_samples(f, settings)?;
            let zak = zak_fiber(f, settings)?;
            let guard = zak_guard(mask.indices().map(|r| zak[r]), eps);
            let m = PeriodicSpectrum::new(
                (0..grid.resolution())
                    .map(|r| {
                        if !mask.get(r) {
                            return czero();
                        }
                        match normalization {
                            Normalization::Zak if zak[r].norm().to_f64_lossy() > guard => zak[r].inv(),
                            Normalization::Zak => czero(),
                            Normalization::Grammian => creal(T::one() / g[r].re),
                        }
                    })
                    .collect(),
            );
            let h = SignalRepresentation::modulated("h", f.clone(), m);
            let zh = zak_fiber(&h, settings)?;
            let cell = 1.0 / grid.resolution() as f64;
            let zak_cells = mask.indices().map(|r| (cell, zh[r].norm().to_f64_lossy())).collect();
            let sums = shift_square_sum(&h, &unit_probes::<T>(SHIFT_PROBES), settings)?;
            let truncation = Truncation {
                spectral_tail_energy: f.spectral_tail(&grid)?.to_f64_lossy(),
                sample_tail_energy: samples.tail_energy().to_f64_lossy(),
            };
            (h, Route::Grid, mask.measure(), zak_cells, (sums.max + sums.tail).to_f64_lossy(), truncation)
        }
    };

    let mut conditions = Vec::new();
    let continuity = continuity_check(&h, settings)?;
    conditions.push(
        Condition::new("continuity", continuity.verdict)
            .value("jump_statistic", Checked::new(continuity.coarse_statistic, continuity.threshold))
            .value("refined_statistic", Checked::new(continuity.refined_statistic, continuity.threshold))
            .note("sampled heuristic: can falsify continuity, never prove it"),
    );
    conditions.push(
        Condition::new("shift_sum", Verdict::from_bool(shift_bound.is_finite() && shift_bound < 1.0 / eps))
            .value("bound", Checked::new(shift_bound, 1.0 / eps)),
    );
    let zak_condition = if zak_cells.is_empty() {
        Condition::new("zak_bound", Verdict::Pass).note("vacuous: E_f is empty")
    } else {
        let lo = extremum(&zak_cells, Extremum::Min, truncated, 1.0 / eps);
        let hi = extremum(&zak_cells, Extremum::Max, truncated, 1.0 / eps);
        let ok = matches!((lo, hi), (Some(a), Some(b)) if a > eps * b);
        Condition::new("zak_bound", Verdict::from_bool(ok))
            .value("A", bound_check(lo.filter(|&a| a > 0.0), eps))
            .value("B", bound_check(hi, 1.0 / eps))
    };
    conditions.push(zak_condition);
    let mut report = ConditionReport::new(ConditionKind::Theorem2, f.name(), route, measure, conditions, truncation);
    report.normalization = Some(normalization);
    Ok(report)
}

/// Per-point data `check_theorem5` and `check_sz04` need: `(measure, Z, G, Σ|f̂|)`.
struct FiberTable<T> {
    rows: Vec<(f64, Complex<T>, T, T)>,
    route: Route,
    measure: f64,
    truncation: Truncation,
    sample_energy: f64,
}

fn integrable_only<T: Real>(f: &SignalRepresentation<T>) -> Result<()> {
    if !f.integrable_spectrum() {
        return Err(Error::NotIntegrable);
    }
    Ok(())
}

fn fiber_table<T: Real>(f: &SignalRepresentation<T>, settings: &Settings, with_zak_samples: bool) -> Result<FiberTable<T>> {
    let eps = settings.eps;
    match f.repr() {
        Representation::PiecewiseConstant(p) => {
            let fibers = ExactFibers::new(p);
            let (support, measure) = exact_support(&fibers, eps);
            Ok(FiberTable {
                rows: support
                    .iter()
                    .map(|c| (c.measure().to_f64_lossy(), c.zak(), c.grammian(), c.abs_sum()))
                    .collect(),
                route: Route::ExactCells,
                measure,
                truncation: Truncation {
                    spectral_tail_energy: f.known_tail().to_f64_lossy(),
                    sample_tail_energy: 0.0,
                },
                sample_energy: fibers.sample_energy().to_f64_lossy(),
            })
        }
        _ => {
            let grid = settings.grid;
            let n = grid.resolution();
            let values = f.grid_spectrum(&grid)?;
            let g = grammian_values(&values, &grid);
            let mask = support_mask(&g, settings.eps::<T>())?;
            let (zak, sample_energy, sample_tail) = if with_zak_samples {
                let samples = integer_samples(f, settings)?;
                (
                    zak_time_fiber(&samples, &grid),
                    samples.energy().to_f64_lossy(),
                    samples.tail_energy().to_f64_lossy(),
                )
            } else {
                (crate::spectral::periodize_values(&values, &grid), 0.0, 0.0)
            };
            let mut abs = vec![T::zero(); n];
            for block in values.chunks(n) {
                for (a, v) in abs.iter_mut().zip(block) {
                    *a += v.norm();
                }
            }
            let cell = 1.0 / n as f64;
            Ok(FiberTable {
                rows: mask.indices().map(|r| (cell, zak[r], g[r].re, abs[r])).collect(),
                route: Route::Grid,
                measure: mask.measure(),
                truncation: Truncation {
                    spectral_tail_energy: f.spectral_tail(&grid)?.to_f64_lossy(),
                    sample_tail_energy: sample_tail,
                },
                sample_energy,
            })
        }
    }
}

/// Conditions a)–d) characterizing membership in a sampling space whose
/// generator has integrable spectrum.
pub fn check_theorem5<T: Real>(f: &SignalRepresentation<T>, settings: &Settings) -> Result<ConditionReport> {
    check_theorem5_with_probes(f, settings, &l_probes::<T>(settings.seed))
}

pub fn check_theorem5_with_probes<T: Real>(
    f: &SignalRepresentation<T>,
    settings: &Settings,
    probes: &[T],
) -> Result<ConditionReport> {
    integrable_only(f)?;
    let eps = settings.eps;
    let limit = 1.0 / eps;
    let truncated = f.known_tail() > T::zero();
    let table = fiber_table(f, settings, true)?;
    let guard = zak_guard(table.rows.iter().map(|r| r.1), eps);
    let zero_zak = table.rows.iter().any(|r| !(r.1.norm().to_f64_lossy() > guard));

    let energy = table.sample_energy + table.truncation.sample_tail_energy;
    let a = Condition::new("a", Verdict::from_bool(energy.is_finite() && energy < limit))
        .value("sample_energy", Checked::new(energy, limit))
        .value("sample_tail_energy", Checked::new(table.truncation.sample_tail_energy, limit));

    let vacuous = table.rows.is_empty();
    let (b, c, d) = if vacuous {
        let zero = |label: &str, key: &str| {
            Condition::new(label, Verdict::Pass).value(key, Checked::new(0.0, limit)).note("vacuous: E_f is empty")
        };
        (
            Condition::new("b", Verdict::Pass)
                .value("A", Checked::new(0.0, eps))
                .value("B", Checked::new(0.0, limit))
                .note("vacuous: E_f is empty"),
            zero("c", "integral"),
            zero("d", "L"),
        )
    } else {
        let ratio_cells: Vec<(f64, f64)> = table
            .rows
            .iter()
            .map(|r| (r.0, r.2.to_f64_lossy() / r.1.norm_sqr().to_f64_lossy()))
            .collect();
        let (lo, hi) = if zero_zak {
            (None, None)
        } else {
            (
                extremum(&ratio_cells, Extremum::Min, truncated, limit),
                extremum(&ratio_cells, Extremum::Max, truncated, limit),
            )
        };
        let b = Condition::new("b", Verdict::from_bool(matches!((lo, hi), (Some(x), Some(_)) if x > 0.0)))
            .value("A", bound_check(lo, eps))
            .value("B", bound_check(hi, limit));

        let integral: f64 = if zero_zak {
            f64::INFINITY
        } else {
            table.rows.iter().map(|r| r.0 * r.3.to_f64_lossy() / r.1.norm().to_f64_lossy()).sum()
        };
        let c = Condition::new("c", Verdict::from_bool(integral < limit)).value("integral", Checked::new(integral, limit));

        let l = if zero_zak { f64::INFINITY } else { uniform_bound(f, settings, &table, probes)? };
        let d = Condition::new("d", Verdict::from_bool(l < limit))
            .value("L", Checked::new(l, limit))
            .value("probes", Checked::new(probes.len() as f64, 0.0))
            .note(format!(
                "x probed at {L_PROBES_UNIFORM} uniform + {L_PROBES_RANDOM} seeded random points of [0, 1) (seed {})",
                settings.seed
            ));
        (b, c, d)
    };
    Ok(ConditionReport::new(
        ConditionKind::Theorem5,
        f.name(),
        table.route,
        table.measure,
        vec![a, b, c, d],
        table.truncation,
    ))
}

/// `L = max_x ∫_{E_f ∩ [0,1)} |Σ_m f̂(ω+m) e^{2πimx} / Z_f(0,ω)|² dω` over the probes.
fn uniform_bound<T: Real>(f: &SignalRepresentation<T>, settings: &Settings, table: &FiberTable<T>, probes: &[T]) -> Result<f64> {
    use rayon::prelude::*;
    match f.repr() {
        Representation::PiecewiseConstant(p) => {
            let fibers = ExactFibers::new(p);
            let (support, _) = exact_support(&fibers, settings.eps);
            Ok(probes
                .par_iter()
                .map(|&x| {
                    support
                        .iter()
                        .map(|c| c.measure().to_f64_lossy() * (c.dual(x) / c.zak()).norm_sqr().to_f64_lossy())
                        .sum::<f64>()
                })
                .reduce(|| 0.0, f64::max))
        }
        _ => {
            let grid = settings.grid;
            let values = f.grid_spectrum(&grid)?;
            let g = grammian_values(&values, &grid);
            let mask = support_mask(&g, settings.eps::<T>())?;
            let zak: Vec<Complex<T>> = table.rows.iter().map(|r| r.1).collect();
            let indices: Vec<usize> = mask.indices().collect();
            Ok(probes
                .par_iter()
                .map(|&x| {
                    let dual = dual_values(&values, &grid, x);
                    indices
                        .iter()
                        .zip(&zak)
                        .map(|(&r, z)| (dual[r] / z).norm_sqr().to_f64_lossy())
                        .sum::<f64>()
                        / grid.resolution() as f64
                })
                .reduce(|| 0.0, f64::max))
        }
    }
}

/// The sufficient inequalities `A|Σf̂|² ≤ Σ|f̂|²` and `(Σ|f̂|)² ≤ B|Σf̂|²`,
/// with the best constants found.
pub fn check_sz04<T: Real>(f: &SignalRepresentation<T>, settings: &Settings) -> Result<ConditionReport> {
    integrable_only(f)?;
    let eps = settings.eps;
    let limit = 1.0 / eps;
    let truncated = f.known_tail() > T::zero();
    let table = fiber_table(f, settings, false)?;
    let guard = zak_guard(table.rows.iter().map(|r| r.1), eps);
    let nonzero: Vec<&(f64, Complex<T>, T, T)> =
        table.rows.iter().filter(|r| r.1.norm().to_f64_lossy() > guard).collect();

    let (lower, upper) = if table.rows.is_empty() {
        (
            Condition::new("lower", Verdict::Pass).value("A", Checked::new(0.0, eps)).note("vacuous: E_f is empty"),
            Condition::new("upper", Verdict::Pass).value("B", Checked::new(0.0, limit)).note("vacuous: E_f is empty"),
        )
    } else {
        let ratio_a: Vec<(f64, f64)> =
            nonzero.iter().map(|r| (r.0, r.2.to_f64_lossy() / r.1.norm_sqr().to_f64_lossy())).collect();
        let a = if ratio_a.is_empty() { None } else { extremum(&ratio_a, Extremum::Min, truncated, limit) };
        let lower = Condition::new("lower", Verdict::from_bool(a.is_some_and(|x| x > 0.0))).value("A", bound_check(a, eps));

        let ratio_b: Vec<(f64, f64)> = table
            .rows
            .iter()
            .map(|r| (r.0, r.3.to_f64_lossy().powi(2) / r.1.norm_sqr().to_f64_lossy()))
            .collect();
        let b = if nonzero.len() < table.rows.len() {
            None
        } else {
            extremum(&ratio_b, Extremum::Max, truncated, limit)
        };
        let finest = ratio_b
            .iter()
            .copied()
            .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap())
            .expect("support is nonempty");
        let upper = Condition::new("upper", Verdict::from_bool(b.is_some()))
            .value("B", bound_check(b, limit))
            .value("ratio_on_finest_cell", Checked::new(finest.1, limit))
            .note(format!("finest support cell has measure {:e}", finest.0));
        (lower, upper)
    };
    Ok(ConditionReport::new(
        ConditionKind::Sz04,
        f.name(),
        table.route,
        table.measure,
        vec![lower, upper],
        table.truncation,
    ))
}

/// A sampling space built from a single member, together with the checks
/// that `f̂ = Z_f(0,·)·ŝ` and `s(k) = δ_{0k}`.
#[derive(Debug, Clone)]
pub struct ConstructedSpace<T: Real> {
    pub space: SamplingSpace<T>,
    pub report: ConditionReport,
    /// `max_j |f̂(ω_j) - Z_f(0,ω_j)·ŝ(ω_j)|`.
    pub identity_error: f64,
    /// `max_k |s(k) - δ_{0k}|` over the sample window.
    pub interpolation_error: f64,
}

/// `ŝ = f̂/Z_f(0,·)` on `E_f`, `1` on `[0,1) ∖ E_f`, `0` elsewhere; refused
/// unless the `check_theorem5` conditions pass.
pub fn construct_s_from_f<T: Real>(f: &SignalRepresentation<T>, settings: &Settings) -> Result<ConstructedSpace<T>> {
    let report = check_theorem5(f, settings)?;
    if !report.passed() {
        return Err(Error::ConstructionRefused(Box::new(report)));
    }
    let eps = settings.eps;
    let grid = settings.grid;
    let name = format!("s[{}]", f.name());
    let s = match f.repr() {
        // cell averages of unresolved pieces do not factor through Z, so those
        // spectra are normalized on the grid instead
        Representation::PiecewiseConstant(p) if p.resolved_by(&grid) => {
            let fibers = ExactFibers::new(p);
            let (support, _) = exact_support(&fibers, eps);
            if support.is_empty() {
                return Err(Error::Degenerate(format!("{} has empty support set", f.name())));
            }
            let in_support = |c: &Fiber<T>| support.iter().any(|s| s.lo == c.lo);
            let sp = fibers.map_pieces(
                |c, _, v| if in_support(c) { v / c.zak() } else { czero() },
                |c| if in_support(c) { Vec::new() } else { vec![(0, cone())] },
            )?;
            SignalRepresentation::piecewise(name, sp).with_known_tail(f.known_tail())
        }
        _ => {
            let values = f.grid_spectrum(&grid)?;
            let g = grammian_values(&values, &grid);
            let mask = support_mask(&g, settings.eps::<T>())?;
            if mask.is_empty() {
                return Err(Error::Degenerate(format!("{} has empty support set", f.name())));
            }
            let zak = zak_fiber(f, settings)?;
            let n = grid.resolution();
            let s_values: Vec<Complex<T>> = values
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let (shift, r) = grid.split(j);
                    if mask.get(r) {
                        v / zak[r]
                    } else if shift == 0 {
                        cone()
                    } else {
                        czero()
                    }
                })
                .collect();
            debug_assert_eq!(s_values.len() % n, 0);
            SignalRepresentation::grid(name, GridSpectrum::new(grid, s_values)?)
                .with_integrable_spectrum(f.integrable_spectrum())
                .with_known_tail(f.known_tail())
        }
    };
    let space = SamplingSpace::build(s, settings)?;

    let n = grid.resolution();
    let zf = zak_fiber(f, settings)?;
    let fv = f.grid_spectrum(&grid)?;
    let sv = space.sampling_spectrum()?;
    let product: Vec<Complex<T>> = sv.iter().enumerate().map(|(j, &v)| v * zf[j % n]).collect();
    let identity_error = max_distance(&fv, &product).to_f64_lossy();
    let samples = integer_samples(space.sampling_function(), settings)?;
    let interpolation_error = samples
        .iter()
        .map(|(k, v)| (v - if k == 0 { cone() } else { czero() }).norm().to_f64_lossy())
        .fold(0.0, f64::max);
    Ok(ConstructedSpace { space, report, identity_error, interpolation_error })
}

/// `S(f)`: the sampling space induced by a member `f` of `V(φ)`.
#[derive(Debug, Clone)]
pub struct InducedSubspace<T: Real> {
    pub member: SignalRepresentation<T>,
    /// `E_f`.
    pub mask: SupportMask,
    pub space: SamplingSpace<T>,
    /// `max_j |ŝ_f(ω_j) - ŝ(ω_j)χ_{E_f}(ω_j)|`.
    pub symbol_error: f64,
    /// `‖s_f - P_{S(f)} s‖` on the grid.
    pub projection_error: f64,
}

impl<T: Real> InducedSubspace<T> {
    pub fn sampling_function(&self) -> &SignalRepresentation<T> {
        self.space.sampling_function()
    }
}

/// Builds `S(f)` from `ĥ = f̂/Z_f(0,·)` on `E_f` and checks both
/// characterizations of its sampling function.
pub fn induced_subspace<T: Real>(space: &SamplingSpace<T>, f: &SignalRepresentation<T>) -> Result<InducedSubspace<T>> {
    space.require_member(f, MEMBER_TOLERANCE)?;
    let settings = space.settings();
    let grid = settings.grid;
    let n = grid.resolution();
    let g = grammian_values(&f.grid_spectrum(&grid)?, &grid);
    let mask = support_mask(&g, settings.eps::<T>())?;
    let zak = zak_fiber(f, settings)?;
    let guard = zak_guard(mask.indices().map(|r| zak[r]), settings.eps);
    let m = PeriodicSpectrum::new(
        (0..n)
            .map(|r| if mask.get(r) && zak[r].norm().to_f64_lossy() > guard { zak[r].inv() } else { czero() })
            .collect(),
    );
    let h = SignalRepresentation::modulated(format!("h[{}]", f.name()), f.clone(), m);
    let sub = SamplingSpace::build(h, settings)?;

    let sf = sub.sampling_spectrum()?;
    let s = space.sampling_spectrum()?;
    let masked: Vec<Complex<T>> =
        s.iter().enumerate().map(|(j, &v)| if mask.get(j % n) { v } else { czero() }).collect();
    let symbol_error = max_distance(&sf, &masked).to_f64_lossy();
    let projected = sub.project(space.sampling_function())?.grid_spectrum(&grid)?;
    let projection_error = spectral_distance(&sf, &projected, &grid).to_f64_lossy();
    Ok(InducedSubspace { member: f.clone(), mask, space: sub, symbol_error, projection_error })
}

/// Restricts a piecewise-constant spectrum to the cells of a periodic set.
pub fn restrict_piecewise<T: Real>(
    p: &PiecewiseConstantSpectrum<T>,
    keep: impl Fn(T) -> bool,
) -> Result<PiecewiseConstantSpectrum<T>> {
    let fibers = ExactFibers::new(p);
    fibers.map_pieces(|c, _, v| if keep((c.lo + c.hi) / T::lit(2.0)) { v } else { czero() }, |_| Vec::new())
}
