//! 1-periodic functions and periodic sets sampled on the unit grid.

use std::ops::Index;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A 1-periodic function sampled at `r/N`, `r = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpectrum<T> {
    values: Vec<Complex<T>>,
}

impl<T: Real> PeriodicSpectrum<T> {
    pub fn new(values: Vec<Complex<T>>) -> Self {
        assert!(!values.is_empty(), "periodic spectrum needs at least one point");
        Self { values }
    }

    pub fn resolution(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Value at the grid point at or below `ω mod 1`.
    pub fn eval(&self, omega: T) -> Complex<T> {
        let n = self.values.len();
        let frac = omega - omega.floor();
        let r = (frac * T::from_usize_exact(n)).floor().to_usize().unwrap_or(0).min(n - 1);
        self.values[r]
    }

    pub fn max_modulus(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// `max_r |self(r) - other(r)|`.
    pub fn max_deviation(&self, other: &Self) -> T {
        assert_eq!(self.values.len(), other.values.len());
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }
}

impl<T> Index<usize> for PeriodicSpectrum<T> {
    type Output = Complex<T>;

    fn index(&self, r: usize) -> &Complex<T> {
        &self.values[r]
    }
}

/// Discretization of a periodic measurable set: one flag per unit-grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportMask {
    bits: Vec<bool>,
    eps: f64,
}

impl SupportMask {
    pub fn new(bits: Vec<bool>, eps: f64) -> Self {
        assert!(!bits.is_empty(), "mask needs at least one point");
        Self { bits, eps }
    }

    pub fn full(n: usize) -> Self {
        Self::new(vec![true; n], 0.0)
    }

    pub fn empty(n: usize) -> Self {
        Self::new(vec![false; n], 0.0)
    }

    /// Marks `r/N` when it lies in some `[lo, hi)` taken modulo 1.
    pub fn from_intervals(n: usize, intervals: &[(f64, f64)]) -> Self {
        let bits = (0..n)
            .map(|r| {
                let w = r as f64 / n as f64;
                intervals.iter().any(|&(lo, hi)| {
                    if hi - lo >= 1.0 {
                        return true;
                    }
                    let (a, b) = (lo - lo.floor(), hi - lo.floor());
                    (a <= w && w < b) || (a <= w + 1.0 && w + 1.0 < b)
                })
            })
            .collect();
        Self::new(bits, 0.0)
    }

    pub fn resolution(&self) -> usize {
        self.bits.len()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, r: usize) -> bool {
        self.bits[r]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Grid fraction covered, in `[0, 1]`.
    pub fn measure(&self) -> f64 {
        self.count() as f64 / self.bits.len() as f64
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(r, _)| r)
    }

    fn zip(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        assert_eq!(self.bits.len(), other.bits.len(), "masks on different grids");
        Self {
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
            eps: self.eps.max(other.eps),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a != b)
    }

    pub fn complement(&self) -> Self {
        Self { bits: self.bits.iter().map(|b| !b).collect(), eps: self.eps }
    }

    /// Maximal runs `[lo, hi)` of marked points, as unit-interval subintervals.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let n = self.bits.len();
        let mut out = Vec::new();
        let mut start = None;
        for r in 0..=n {
            let on = r < n && self.bits[r];
            match (on, start) {
                (true, None) => start = Some(r),
                (false, Some(s)) => {
                    out.push((s as f64 / n as f64, r as f64 / n as f64));
                    start = None;
                }
                _ => {}
            }
        }
        out
    }
}
