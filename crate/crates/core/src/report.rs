//! Verdicts and tolerance-tagged values shared by all reports.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    /// Pass iff every verdict passes; any fail wins over indeterminate.
    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Self {
        let mut out = Verdict::Pass;
        for v in verdicts {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Indeterminate => out = Verdict::Indeterminate,
                Verdict::Pass => {}
            }
        }
        out
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// A computed constant with the tolerance it was compared against.
/// `value = None` marks a quantity found to be unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checked {
    pub value: Option<f64>,
    pub tolerance: f64,
}

impl Checked {
    pub fn new(value: f64, tolerance: f64) -> Self {
        Self { value: value.is_finite().then_some(value), tolerance }
    }

    pub fn unbounded(tolerance: f64) -> Self {
        Self { value: None, tolerance }
    }

    pub fn get(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Checked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "{v:.6e} (tol {:.1e})", self.tolerance),
            None => write!(f, "unbounded (tol {:.1e})", self.tolerance),
        }
    }
}
