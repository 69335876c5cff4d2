//! The JSON report every command emits (`"schema": 1`).

use std::fmt;

use serde::{Deserialize, Serialize};
use sisbox_core::grid::Settings;
use sisbox_core::membership::ConditionReport;
use sisbox_core::space::Sz99Report;
use sisbox_core::{Checked, Verdict};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    /// Arguments as given on the command line.
    pub command: Vec<String>,
    pub settings: Settings,
    pub n_max: usize,
    pub notes: Vec<String>,
    pub sections: Vec<Section>,
    /// Files written by the command.
    pub outputs: Vec<String>,
    pub verdict: Verdict,
    pub elapsed_seconds: f64,
}

impl ReportDocument {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "section", rename_all = "snake_case")]
pub enum Section {
    Analysis(Analysis),
    Conditions(ConditionReport),
    Induced(Induced),
    NotMember(NotMember),
    Reconstruction(ReconstructionSummary),
    Refused(Refused),
    Decomposition(DecompositionSummary),
    DeterminingSet(DeterminingSummary),
}

impl Section {
    pub fn verdict(&self) -> Verdict {
        match self {
            Section::Analysis(a) => a.verdict,
            Section::Conditions(r) => r.overall,
            Section::Induced(i) => i.verdict,
            Section::NotMember(_) | Section::Refused(_) => Verdict::Fail,
            Section::Reconstruction(r) => r.verdict,
            Section::Decomposition(d) => d.verdict,
            Section::DeterminingSet(d) => d.verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub signal: String,
    /// `max G`; the support set is `G > ε·max G`.
    pub grammian_max: Checked,
    /// Measure of `E`, resolved to `1/N`.
    pub support_measure: Checked,
    /// Essential bounds of `G` on `E`; `None` for an empty support set.
    pub frame_lower: Option<Checked>,
    pub frame_upper: Option<Checked>,
    /// `A > ε·B`.
    pub frame: Verdict,
    pub sz99: Sz99Report,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Induced {
    pub signal: String,
    pub space: String,
    pub support_measure: Checked,
    /// `max |ŝ_f - ŝχ_{E_f}|`.
    pub symbol_error: Checked,
    /// `‖s_f - P_{S(f)} s‖`.
    pub projection_error: Checked,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotMember {
    pub signal: String,
    pub space: String,
    pub residual: Checked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionSummary {
    pub space: String,
    pub samples: usize,
    pub points: usize,
    /// `(a, b)` when sampling on `(ℤ + b)/a`.
    pub lattice: Option<(f64, f64)>,
    /// Bound on the error caused by samples outside the window.
    pub tail_bound: Checked,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refused {
    pub space: String,
    pub reason: String,
    pub sz99: Sz99Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub part: usize,
    pub support_measure: Checked,
    pub frame_lower: Checked,
    pub frame_upper: Checked,
    pub certified: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub space: String,
    pub components: Vec<ComponentSummary>,
    pub rejected: Vec<(usize, String)>,
    /// `max_j |ŝ_j - ŝχ_{E_j}|`.
    pub masking_error: Checked,
    /// `max |Σ_j ŝ_j - ŝ|`.
    pub sum_error: Checked,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminingSummary {
    pub space: String,
    pub order: Vec<String>,
    /// `E_{f_i}` as subintervals of `[0, 1)`.
    pub masks: Vec<Vec<(f64, f64)>>,
    /// `|(∪E_{f_i}) △ E_φ|`, compared against `1/N`.
    pub symmetric_difference: Checked,
    pub blocks: Vec<Vec<(f64, f64)>>,
    /// `max |Σ α̂_i f̂_i - ŝ|`.
    pub expansion_error: Option<Checked>,
    pub verdict: Verdict,
}

fn intervals(list: &[(f64, f64)]) -> String {
    if list.is_empty() {
        return "∅".into();
    }
    list.iter().map(|(a, b)| format!("[{a}, {b})")).collect::<Vec<_>>().join(" ∪ ")
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Section::Analysis(a) => {
                writeln!(f, "analysis of {}: {}", a.signal, a.verdict)?;
                writeln!(f, "  max G {}, |E| {}", a.grammian_max, a.support_measure)?;
                match (&a.frame_lower, &a.frame_upper) {
                    (Some(lo), Some(hi)) => writeln!(f, "  frame bounds A {lo}, B {hi}: {}", a.frame)?,
                    _ => writeln!(f, "  frame bounds: empty support set")?,
                }
                write!(f, "  SZ99: {}", a.sz99)
            }
            Section::Conditions(r) => {
                write!(f, "{:?} on {}: {}", r.kind, r.signal, r.overall)?;
                if let Some(n) = r.normalization {
                    write!(f, " (normalization {n:?})")?;
                }
                write!(f, "\n  route {:?}, |E_f| {}", r.route, r.support_measure)?;
                for c in &r.conditions {
                    write!(f, "\n  {}: {}", c.label, c.verdict)?;
                    for (k, v) in &c.values {
                        write!(f, "  {k} = {v}")?;
                    }
                    if !c.note.is_empty() {
                        write!(f, "  [{}]", c.note)?;
                    }
                }
                write!(
                    f,
                    "\n  truncation: spectral tail {:e}, sample tail {:e}",
                    r.truncation.spectral_tail_energy, r.truncation.sample_tail_energy
                )
            }
            Section::Induced(i) => write!(
                f,
                "S({}) inside V({}): {}\n  |E_f| {}, symbol error {}, projection error {}",
                i.signal, i.space, i.verdict, i.support_measure, i.symbol_error, i.projection_error
            ),
            Section::NotMember(m) => {
                write!(f, "{} is not a member of V({}): residual {}", m.signal, m.space, m.residual)
            }
            Section::Reconstruction(r) => {
                write!(f, "reconstruction in V({}): {} samples, {} points", r.space, r.samples, r.points)?;
                if let Some((a, b)) = r.lattice {
                    write!(f, ", lattice (k + {b})/{a}")?;
                }
                write!(f, "; tail bound {}: {}", r.tail_bound, r.verdict)
            }
            Section::Refused(r) => write!(f, "refused on V({}): {}\n  SZ99: {}", r.space, r.reason, r.sz99),
            Section::Decomposition(d) => {
                write!(f, "decomposition of V({}): {}", d.space, d.verdict)?;
                for c in &d.components {
                    write!(
                        f,
                        "\n  part {}: |E_j| {}, A {}, B {}, certified {}",
                        c.part, c.support_measure, c.frame_lower, c.frame_upper, c.certified
                    )?;
                }
                for (part, why) in &d.rejected {
                    write!(f, "\n  part {part} rejected: {why}")?;
                }
                write!(f, "\n  masking error {}, sum error {}", d.masking_error, d.sum_error)
            }
            Section::DeterminingSet(d) => {
                write!(f, "determining set for V({}): {}", d.space, d.verdict)?;
                for (name, m) in d.order.iter().zip(&d.masks) {
                    write!(f, "\n  E[{name}] = {}", intervals(m))?;
                }
                write!(f, "\n  |(∪E_f) △ E| {}", d.symmetric_difference)?;
                for (i, b) in d.blocks.iter().enumerate() {
                    write!(f, "\n  B_{} = {}", i + 1, intervals(b))?;
                }
                if let Some(e) = &d.expansion_error {
                    write!(f, "\n  expansion error {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ReportDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sisbox {}: {}", self.command.join(" "), self.verdict)?;
        writeln!(
            f,
            "grid K = {}, N = {}, ε = {:e}, k_max = {}, seed {:#x}",
            self.settings.grid.half_bandwidth(),
            self.settings.grid.resolution(),
            self.settings.eps,
            self.settings.kmax,
            self.settings.seed
        )?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        for s in &self.sections {
            writeln!(f, "{s}")?;
        }
        for o in &self.outputs {
            writeln!(f, "wrote {o}")?;
        }
        write!(f, "elapsed {:.3} s", self.elapsed_seconds)
    }
}
