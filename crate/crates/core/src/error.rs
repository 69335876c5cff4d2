//! Error type for sisbox-core.

use thiserror::Error;

use crate::membership::ConditionReport;
use crate::space::Sz99Report;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    /// The spectrum reaches outside `[-K, K)`.
    #[error("spectrum exceeds the grid bandwidth K = {have}; K = {required} is required")]
    BandwidthOverflow { required: usize, have: usize },
    #[error("signals live on different frequency grids")]
    GridMismatch,
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("not a Grammian: entry {index} has value {value}")]
    NotAGrammian { index: usize, value: f64 },
    #[error("degenerate space: {0}")]
    Degenerate(String),
    /// The Zak fiber of the generator vanishes on a point of its spectral support.
    #[error("not a sampling space: |Z(0, ω)| = {modulus:e} at ω = {omega} inside the support set")]
    NotASamplingSpace { omega: f64, modulus: f64 },
    #[error("sampling-space certificate failed: {0}")]
    Sz99Failed(Box<Sz99Report>),
    #[error("space is not certified as a sampling space: {0}")]
    Uncertified(Box<Sz99Report>),
    #[error("{name} is not a member of the space (relative residual {residual:e})")]
    NotInSpace { name: String, residual: f64 },
    #[error("spectrum is not absolutely integrable; use the continuity/Zak criterion (check_theorem2) instead")]
    NotIntegrable,
    #[error("construction refused: {0}")]
    ConstructionRefused(Box<ConditionReport>),
    #[error("truncation {requested} is out of range (2 ≤ T ≤ {limit})")]
    Truncation { requested: usize, limit: usize },
    #[error("invalid partition: overlap measure {overlap}, uncovered measure {uncovered}")]
    Partition { overlap: f64, uncovered: f64 },
    #[error("unknown signal `{name}`; known signals: {known}")]
    UnknownSignal { name: String, known: String },
    #[error("determining-set report did not pass")]
    ReportNotPassed,
}
