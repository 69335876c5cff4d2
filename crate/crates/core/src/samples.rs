//! Integer samples `{f(k)}` of a time function.

use num_complex::Complex;

use crate::scalar::{czero, Real};

/// Samples `f(k)` for `k` in a contiguous window, with the energy of the
/// samples outside that window (when known) recorded as `tail_energy`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSamples<T> {
    start: i64,
    values: Vec<Complex<T>>,
    tail_energy: T,
}

impl<T: Real> TimeSamples<T> {
    pub fn new(start: i64, values: Vec<Complex<T>>) -> Self {
        Self { start, values, tail_energy: T::zero() }
    }

    pub fn empty() -> Self {
        Self::new(0, Vec::new())
    }

    /// Builds a window covering every given `(k, value)`; gaps are zero.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, Complex<T>)>) -> Self {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let (Some(lo), Some(hi)) = (pairs.iter().map(|p| p.0).min(), pairs.iter().map(|p| p.0).max()) else {
            return Self::empty();
        };
        let mut values = vec![czero(); (hi - lo + 1) as usize];
        for (k, v) in pairs {
            values[(k - lo) as usize] += v;
        }
        Self::new(lo, values)
    }

    /// `f(k) = δ_{k,at}`.
    pub fn delta(at: i64) -> Self {
        Self::new(at, vec![Complex::new(T::one(), T::zero())])
    }

    pub fn with_tail_energy(mut self, tail: T) -> Self {
        self.tail_energy = tail;
        self
    }

    pub fn tail_energy(&self) -> T {
        self.tail_energy
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn get(&self, k: i64) -> Complex<T> {
        let i = k - self.start;
        if i < 0 || i >= self.values.len() as i64 {
            return czero();
        }
        self.values[i as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.start + i as i64, v))
    }

    /// Nonzero entries.
    pub fn pairs(&self) -> Vec<(i64, Complex<T>)> {
        self.iter().filter(|(_, v)| v.norm_sqr() > T::zero()).collect()
    }

    /// `Σ |f(k)|²` over the window.
    pub fn energy(&self) -> T {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            start: self.start,
            values: self.values.iter().map(|&v| v * factor).collect(),
            tail_energy: self.tail_energy * factor.norm_sqr(),
        }
    }
}
