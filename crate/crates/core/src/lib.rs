//! Sampling spaces inside shift-invariant spaces of `L²(ℝ)`.
//!
//! Everything is generic over the real scalar ([`Real`]: `f32` or `f64`);
//! the aliases at the crate root fix it to `f64`, and [`single`] holds the
//! `f32` versions.

pub mod catalog;
pub mod decomposition;
pub mod error;
pub mod fibers;
pub mod grid;
pub mod membership;
pub mod periodic;
pub mod quadrature;
pub mod report;
pub mod samples;
pub mod scalar;
pub mod signal;
pub mod space;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{FrequencyGrid, Settings};
pub use periodic::SupportMask;
pub use report::{Checked, Verdict};
pub use scalar::Real;

pub type Complex = num_complex::Complex<f64>;
pub type Signal = signal::SignalRepresentation<f64>;
pub type PeriodicSpectrum = periodic::PeriodicSpectrum<f64>;
pub type TimeSamples = samples::TimeSamples<f64>;
pub type SamplingSpace = space::SamplingSpace<f64>;
pub type DeterminingSetReport = decomposition::DeterminingSetReport<f64>;
pub type RescaledSpace = decomposition::RescaledSpace<f64>;

/// Single-precision aliases.
pub mod single {
    pub type Complex = num_complex::Complex<f32>;
    pub type Signal = crate::signal::SignalRepresentation<f32>;
    pub type PeriodicSpectrum = crate::periodic::PeriodicSpectrum<f32>;
    pub type TimeSamples = crate::samples::TimeSamples<f32>;
    pub type SamplingSpace = crate::space::SamplingSpace<f32>;
}
