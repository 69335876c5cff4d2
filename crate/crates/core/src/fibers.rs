//! Exact fiber decomposition of piecewise-constant spectra.
//!
//! Cutting `[0, 1)` at every piece endpoint (taken modulo 1) yields cells on
//! which each sequence `{f̂(ω + m)}_m` is constant. Fiber sums such as the
//! periodization, the Grammian or `Σ|f̂(ω+m)|` are then exact step functions
//! with one value per cell, independent of any grid resolution.

use num_complex::Complex;

use crate::scalar::{cis_turns, Real};
use crate::signal::{PiecewiseConstantSpectrum, UnitPiece};

/// One cell `[lo, hi)` of the unit interval and the nonzero values
/// `f̂(ω + m)` shared by all of its points.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber<T> {
    pub lo: T,
    pub hi: T,
    pub entries: Vec<(i64, Complex<T>)>,
}

impl<T: Real> Fiber<T> {
    pub fn measure(&self) -> T {
        self.hi - self.lo
    }

    /// `Σ_m f̂(ω + m)`, which equals `Z_f(0, ω)` by Poisson summation.
    pub fn zak(&self) -> Complex<T> {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// `Σ_m |f̂(ω + m)|²`.
    pub fn grammian(&self) -> T {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    /// `Σ_m |f̂(ω + m)|`.
    pub fn abs_sum(&self) -> T {
        self.entries.iter().map(|e| e.1.norm()).sum()
    }

    /// `Σ_m f̂(ω + m) e^{2πimx}`.
    pub fn dual(&self, x: T) -> Complex<T> {
        self.entries.iter().map(|&(m, v)| v * cis_turns(T::from_i64_exact(m) * x)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactFibers<T> {
    cells: Vec<Fiber<T>>,
}

impl<T: Real> ExactFibers<T> {
    pub fn new(spectrum: &PiecewiseConstantSpectrum<T>) -> Self {
        let mut cuts = vec![T::zero(), T::one()];
        for p in spectrum.pieces() {
            cuts.push(p.lo);
            cuts.push(p.hi);
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut cells: Vec<Fiber<T>> =
            cuts.windows(2).map(|w| Fiber { lo: w[0], hi: w[1], entries: Vec::new() }).collect();
        for p in spectrum.pieces() {
            // cell boundaries are copies of the piece endpoints, so equality is exact
            let first = cells.partition_point(|c| c.lo < p.lo);
            for cell in cells[first..].iter_mut().take_while(|c| c.hi <= p.hi) {
                cell.entries.push((p.shift, p.value));
            }
        }
        for cell in &mut cells {
            cell.entries.sort_by_key(|e| e.0);
        }
        Self { cells }
    }

    pub fn cells(&self) -> &[Fiber<T>] {
        &self.cells
    }

    /// The cell containing `ω mod 1`.
    pub fn cell_at(&self, omega: T) -> &Fiber<T> {
        let w = omega - omega.floor();
        let i = self.cells.partition_point(|c| c.hi <= w);
        &self.cells[i.min(self.cells.len() - 1)]
    }

    /// Rebuilds a spectrum from per-cell values: `f̂(ω + m) ← g(cell, m, f̂)`.
    pub fn map_pieces(
        &self,
        f: impl Fn(&Fiber<T>, i64, Complex<T>) -> Complex<T>,
        extra: impl Fn(&Fiber<T>) -> Vec<(i64, Complex<T>)>,
    ) -> crate::error::Result<PiecewiseConstantSpectrum<T>> {
        let mut pieces = Vec::new();
        for cell in &self.cells {
            for &(m, v) in &cell.entries {
                pieces.push(UnitPiece { shift: m, lo: cell.lo, hi: cell.hi, value: f(cell, m, v) });
            }
            for (m, v) in extra(cell) {
                pieces.push(UnitPiece { shift: m, lo: cell.lo, hi: cell.hi, value: v });
            }
        }
        PiecewiseConstantSpectrum::from_pieces(pieces)
    }

    /// `∫_0^1 |Σ_m f̂(ω+m)|² dω`, the sample energy `Σ_k |f(k)|²`.
    pub fn sample_energy(&self) -> T {
        self.cells.iter().map(|c| c.zak().norm_sqr() * c.measure()).sum()
    }

    /// `Σ_k |f(x + k)|² = ∫_0^1 |Σ_m f̂(ω+m) e^{2πimx}|² dω`.
    pub fn shift_square_sum(&self, x: T) -> T {
        self.cells.iter().map(|c| c.dual(x).norm_sqr() * c.measure()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex2(n_max: i64) -> PiecewiseConstantSpectrum<f64> {
        let pieces = (0..=n_max)
            .map(|n| UnitPiece {
                shift: n,
                lo: 0.0,
                hi: 0.5f64.powi(n as i32),
                value: Complex::new(if n % 2 == 0 { 1.0 } else { -1.0 } / (n + 1) as f64, 0.0),
            })
            .collect();
        PiecewiseConstantSpectrum::from_pieces(pieces).unwrap()
    }

    #[test]
    fn nested_blocks_give_partial_sums() {
        let fibers = ExactFibers::new(&ex2(60));
        assert_eq!(fibers.cells().len(), 61);
        for n in 0..=60i32 {
            let cell = fibers.cell_at(0.75 * 0.5f64.powi(n));
            let partial: f64 = (0..=n).map(|k| (-1f64).powi(k) / (k + 1) as f64).sum();
            let squares: f64 = (0..=n).map(|k| 1.0 / ((k + 1) as f64).powi(2)).sum();
            assert_eq!(cell.entries.len(), n as usize + 1);
            assert!((cell.zak().re - partial).abs() < 1e-15);
            assert!((cell.grammian() - squares).abs() < 1e-15);
        }
        // the innermost cell below 2^-60 carries every block
        assert_eq!(fibers.cells()[0].entries.len(), 61);
    }

    #[test]
    fn sample_energy_matches_parseval_for_box() {
        let s = PiecewiseConstantSpectrum::<f64>::from_intervals(&[(-0.5, 0.5, Complex::new(1.0, 0.0))]).unwrap();
        let fibers = ExactFibers::new(&s);
        assert!((fibers.sample_energy() - 1.0).abs() < 1e-15);
        // sinc translates: Σ_k sinc²(x + k) = 1
        for &x in &[0.0, 0.3, 0.77] {
            assert!((fibers.shift_square_sum(x) - 1.0).abs() < 1e-14);
        }
    }
}
