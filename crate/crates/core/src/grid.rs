//! Frequency-line discretization.
//!
//! The frequency axis is truncated to `[-K, K)` and sampled with `N` points
//! per unit interval, so grid point `j` sits at `ω_j = -K + j/N`. Both `K`
//! and `N` are powers of two; an integer shift `m` maps grid index `j` to
//! `j + m·N`, which is what makes periodization an exact finite sum.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis_turns, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrequencyGrid {
    half_bandwidth: usize,
    resolution: usize,
}

impl FrequencyGrid {
    pub const DEFAULT_HALF_BANDWIDTH: usize = 32;
    pub const DEFAULT_RESOLUTION: usize = 1024;

    pub fn new(half_bandwidth: usize, resolution: usize) -> Result<Self> {
        for (name, v) in [("K", half_bandwidth), ("N", resolution)] {
            if v == 0 || !v.is_power_of_two() {
                return Err(Error::InvalidGrid(format!("{name} = {v} must be a positive power of two")));
            }
        }
        Ok(Self { half_bandwidth, resolution })
    }

    /// `K`: the spectrum is supported in `[-K, K)`.
    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    /// `N`: grid points per unit frequency interval.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Total number of grid points, `2·K·N`.
    pub fn len(&self) -> usize {
        2 * self.half_bandwidth * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of unit blocks `2K`; block `b` holds integer shift `b - K`.
    pub fn blocks(&self) -> usize {
        2 * self.half_bandwidth
    }

    pub fn shifts(&self) -> std::ops::Range<i64> {
        let k = self.half_bandwidth as i64;
        -k..k
    }

    pub fn step<T: Real>(&self) -> T {
        T::one() / T::from_usize_exact(self.resolution)
    }

    pub fn omega<T: Real>(&self, j: usize) -> T {
        let offset = j as i64 - (self.half_bandwidth * self.resolution) as i64;
        T::from_i64_exact(offset) / T::from_usize_exact(self.resolution)
    }

    /// Unit-interval point `r/N`.
    pub fn unit_omega<T: Real>(&self, r: usize) -> T {
        T::from_usize_exact(r) / T::from_usize_exact(self.resolution)
    }

    /// Grid index of `shift + r/N`, if that point lies in `[-K, K)`.
    pub fn index(&self, shift: i64, r: usize) -> Option<usize> {
        let block = shift + self.half_bandwidth as i64;
        if block < 0 || block >= self.blocks() as i64 || r >= self.resolution {
            return None;
        }
        Some(block as usize * self.resolution + r)
    }

    /// Splits a grid index into `(shift, r)`.
    pub fn split(&self, j: usize) -> (i64, usize) {
        let block = j / self.resolution;
        (block as i64 - self.half_bandwidth as i64, j % self.resolution)
    }

    /// Smallest admissible `K` covering frequencies up to `|ω| ≤ extent`.
    pub fn required_half_bandwidth(extent: usize) -> usize {
        extent.max(1).next_power_of_two()
    }

    /// `e^{2πi n/N}` for `n = 0..N`.
    pub fn twiddles<T: Real>(&self) -> Vec<Complex<T>> {
        let n = T::from_usize_exact(self.resolution);
        (0..self.resolution).map(|i| cis_turns(T::from_usize_exact(i) / n)).collect()
    }
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self { half_bandwidth: Self::DEFAULT_HALF_BANDWIDTH, resolution: Self::DEFAULT_RESOLUTION }
    }
}

/// Knobs shared by every operation: grid, zero-guard `ε`, sample window
/// `k_max`, and the seed for randomized probe sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub grid: FrequencyGrid,
    pub eps: f64,
    pub kmax: usize,
    pub seed: u64,
}

impl Settings {
    pub const DEFAULT_EPS: f64 = 1e-9;
    pub const DEFAULT_KMAX: usize = 512;
    pub const DEFAULT_SEED: u64 = 0x5155_5eed;

    pub fn with_grid(grid: FrequencyGrid) -> Self {
        Self { grid, ..Self::default() }
    }

    pub fn eps<T: Real>(&self) -> T {
        T::lit(self.eps)
    }
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            grid: FrequencyGrid::default(),
            eps: Self::DEFAULT_EPS,
            kmax: Self::DEFAULT_KMAX,
            seed: Self::DEFAULT_SEED,
        }
    }
}
