//! Command-line front end for `sisbox-core`.
//!
//! Every command produces a [`ReportDocument`]; the process exits with 0
//! when its verdict passes, 2 when it fails and 1 on usage or input errors.

pub mod io;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use sisbox_core::decomposition::{check_determining_set, decompose, lattice_rescale};
use sisbox_core::grid::{FrequencyGrid, Settings};
use sisbox_core::membership::{self, check_sz04, check_theorem2, check_theorem5, Normalization};
use sisbox_core::signal::SignalRepresentation;
use sisbox_core::space::{check_sz99, SamplingSpace};
use sisbox_core::spectral::{essential_bounds, grammian, support_mask, zak_fiber};
use sisbox_core::{catalog, Checked, Verdict};

use report::*;

/// Relative projection residual under which a function counts as a member.
pub const MEMBER_TOLERANCE: f64 = membership::MEMBER_TOLERANCE;
/// Tolerance for identities that hold exactly on the grid.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}:{line}: {message}")]
    Parse { origin: String, line: usize, message: String },
    #[error("{path}: {error}")]
    Io { path: String, error: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] sisbox_core::Error),
}

#[derive(Debug, Parser)]
#[command(name = "sisbox", version, about = "Sampling in shift-invariant spaces: certification, membership, reconstruction")]
pub struct Cli {
    #[command(flatten)]
    pub options: GridOptions,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GridOptions {
    /// Half bandwidth K (power of two); SISBOX_GRID="K,N" sets the default.
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
    /// Grid points per unit frequency N (power of two).
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Sample window |k| ≤ kmax.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Seed for randomized probe sets.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of spectral blocks kept for ex2.
    #[arg(long, global = true, default_value_t = catalog::DEFAULT_N_MAX)]
    pub nmax: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    /// Induced subspace S(f) of a member of --space
    #[value(name = "1")]
    One,
    /// Continuity / shift-sum / Zak criterion
    #[value(name = "2")]
    Two,
    /// Conditions a)–d) for integrable spectra
    #[value(name = "5")]
    Five,
    /// The classical sufficient conditions
    #[value(name = "sz04")]
    Sz04,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    Zak,
    Grammian,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grammian, support set, frame bounds and the sampling-space certificate.
    Analyze {
        /// Catalog name or spectrum file (.json pieces or .csv grid).
        signal: String,
        /// Write `omega,grammian,zak_abs` over [0, 1) for plotting.
        #[arg(long, value_name = "CSV")]
        plot: Option<PathBuf>,
    },
    /// Decide membership of a signal in some sampling space.
    Membership {
        signal: String,
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        /// Parent space (required for --theorem 1).
        #[arg(long)]
        space: Option<String>,
        #[arg(long, value_enum, default_value = "zak")]
        normalization: NormalizationArg,
        /// With --theorem 5: write the constructed sampling spectrum (grid CSV).
        #[arg(long, value_name = "CSV")]
        emit_spectrum: Option<PathBuf>,
    },
    /// Rebuild a member from its samples.
    Reconstruct {
        #[arg(long)]
        space: String,
        /// Samples `k,re,im`; with --lattice these are g((k + b)/a).
        #[arg(long)]
        samples: PathBuf,
        /// Evaluation points, one per line (default: --count points on [--from, --to]).
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 201)]
        count: usize,
        /// Sample on the lattice (ℤ + b)/a, given as `a,b`.
        #[arg(long, value_parser = parse_lattice, allow_hyphen_values = true)]
        lattice: Option<(f64, f64)>,
        /// Output CSV `x,re,im` (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a space along a periodic partition of its support set.
    Decompose {
        #[arg(long)]
        space: String,
        /// JSON list of parts, each a list of [lo, hi] subintervals of [0, 1).
        #[arg(long)]
        partition: PathBuf,
        /// Directory for one `component_<j>.csv` sampling spectrum per part.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Test whether members determine the space.
    Determine {
        #[arg(long)]
        space: String,
        /// Comma-separated members (catalog names or spectrum files).
        #[arg(long, value_delimiter = ',', required = true)]
        functions: Vec<String>,
        /// Directory for `blocks.json` (the sets B_i) and `alpha_<i>.csv` multipliers on [0, 1).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn parse_lattice(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("a: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("b: {e}"))?;
    if !(a > 0.0) {
        return Err(format!("a = {a} must be positive"));
    }
    Ok((a, b))
}

/// Runs one invocation, writing to the given streams; returns the exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    match execute(&cli, &args[1.min(args.len())..]) {
        Ok(outcome) => {
            if let Some(path) = &cli.report {
                let json = serde_json::to_string_pretty(&outcome.document).expect("report serializes");
                if let Err(e) = write_file(path, &(json + "\n")) {
                    let _ = writeln!(stderr, "error: {e}");
                    return 1;
                }
            }
            let summary = if cli.json {
                serde_json::to_string_pretty(&outcome.document).expect("report serializes")
            } else {
                outcome.document.to_string()
            };
            match outcome.data {
                Some(data) => {
                    let _ = write!(stdout, "{data}");
                    let _ = writeln!(stderr, "{summary}");
                }
                None => {
                    let _ = writeln!(stdout, "{summary}");
                }
            }
            if outcome.document.passed() {
                0
            } else {
                2
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// A finished command: its report and, optionally, data for standard output.
pub struct Outcome {
    pub document: ReportDocument,
    pub data: Option<String>,
}

struct Context {
    settings: Settings,
    n_max: usize,
    notes: Vec<String>,
    outputs: Vec<String>,
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|error| CliError::Io { path: path.display().to_string(), error })
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|error| CliError::Io { path: path.display().to_string(), error })
}

fn is_file_spec(spec: &str) -> bool {
    catalog::entry(spec).is_err() && (spec.ends_with(".json") || spec.ends_with(".csv") || Path::new(spec).exists())
}

/// `K` needed by a signal given by name or piecewise file, when known up front.
fn required_k(spec: &str, n_max: usize) -> Result<Option<usize>, CliError> {
    if catalog::entry(spec).is_ok() {
        return Ok(catalog::required_half_bandwidth(spec, n_max));
    }
    if spec.ends_with(".json") {
        let p = io::read_piecewise(spec, &read_file(Path::new(spec))?)?;
        return Ok(Some(p.required_half_bandwidth()));
    }
    Ok(None)
}

fn grid_from_env() -> Result<Option<(usize, usize)>, CliError> {
    match std::env::var("SISBOX_GRID") {
        Ok(v) if !v.trim().is_empty() => {
            let bad = || CliError::Usage(format!("SISBOX_GRID = `{v}` must be `K,N`"));
            let (k, n) = v.split_once(',').ok_or_else(bad)?;
            Ok(Some((k.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?)))
        }
        _ => Ok(None),
    }
}

impl Context {
    fn new(options: &GridOptions, signals: &[&str]) -> Result<Self, CliError> {
        let env = grid_from_env()?;
        let mut notes = Vec::new();
        let explicit_k = options.k.or(env.map(|e| e.0));
        let n = options.n.or(env.map(|e| e.1)).unwrap_or(FrequencyGrid::DEFAULT_RESOLUTION);
        let k = match explicit_k {
            Some(k) => k,
            None => {
                let mut k = FrequencyGrid::DEFAULT_HALF_BANDWIDTH;
                for s in signals {
                    if let Some(req) = required_k(s, options.nmax)? {
                        if req > k {
                            notes.push(format!("K widened from {k} to {req} so that {s} fits on the grid"));
                            k = req;
                        }
                    }
                }
                k
            }
        };
        let defaults = Settings::default();
        let settings = Settings {
            grid: FrequencyGrid::new(k, n)?,
            eps: options.eps.unwrap_or(defaults.eps),
            kmax: options.kmax.unwrap_or(defaults.kmax),
            seed: options.seed.unwrap_or(defaults.seed),
        };
        if !(settings.eps > 0.0 && settings.eps < 1.0) {
            return Err(CliError::Usage(format!("--eps {} must lie in (0, 1)", settings.eps)));
        }
        Ok(Self { settings, n_max: options.nmax, notes, outputs: Vec::new() })
    }

    fn signal(&self, spec: &str) -> Result<SignalRepresentation<f64>, CliError> {
        if !is_file_spec(spec) {
            return Ok(catalog::build(spec, self.n_max, &self.settings.grid)?);
        }
        let path = Path::new(spec);
        let text = read_file(path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| spec.to_string());
        if spec.ends_with(".csv") {
            let g = io::read_grid_spectrum(spec, &text, self.settings.grid)?;
            Ok(SignalRepresentation::grid(name, g))
        } else {
            Ok(SignalRepresentation::piecewise(name, io::read_piecewise(spec, &text)?))
        }
    }

    fn write(&mut self, path: &Path, text: &str) -> Result<(), CliError> {
        write_file(path, text)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn finish(self, command: &[String], sections: Vec<Section>, started: Instant) -> ReportDocument {
        let verdict = Verdict::all(sections.iter().map(Section::verdict));
        ReportDocument {
            schema: SCHEMA,
            command: command.to_vec(),
            settings: self.settings,
            n_max: self.n_max,
            notes: self.notes,
            sections,
            outputs: self.outputs,
            verdict,
            elapsed_seconds: started.elapsed().as_secs_f64(),
        }
    }
}

fn signals_of(command: &Command) -> Vec<&str> {
    match command {
        Command::Analyze { signal, .. } => vec![signal],
        Command::Membership { signal, space, .. } => std::iter::once(signal.as_str()).chain(space.as_deref()).collect(),
        Command::Reconstruct { space, .. } | Command::Decompose { space, .. } => vec![space],
        Command::Determine { space, functions, .. } => {
            std::iter::once(space.as_str()).chain(functions.iter().map(String::as_str)).collect()
        }
    }
}

/// Builds the space and certifies it; an uncertified space becomes a refusal section.
fn certified_space(ctx: &Context, spec: &str) -> Result<Result<SamplingSpace<f64>, Refused>, CliError> {
    let psi = ctx.signal(spec)?;
    let name = psi.name().to_string();
    let space = SamplingSpace::build_unchecked(psi, &ctx.settings)?;
    if space.certified() {
        Ok(Ok(space))
    } else {
        Ok(Err(Refused { space: name, reason: "space is not certified as a sampling space".into(), sz99: space.sz99().clone() }))
    }
}

pub fn execute(cli: &Cli, command: &[String]) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let mut ctx = Context::new(&cli.options, &signals_of(&cli.command))?;
    let settings = ctx.settings;
    let grid = settings.grid;
    let mut data = None;
    let sections = match &cli.command {
        Command::Analyze { signal, plot } => {
            let f = ctx.signal(signal)?;
            let g = grammian(&f, &grid)?;
            let mask = support_mask(&g, settings.eps)?;
            let gmax = g.values().iter().map(|v| v.re).fold(0.0, f64::max);
            let (lower, upper, frame) = match essential_bounds(&g, &mask) {
                Ok((a, b)) => (
                    Some(Checked::new(a, settings.eps * b)),
                    Some(Checked::new(b, 1.0 / settings.eps)),
                    Verdict::from_bool(a > settings.eps * b),
                ),
                Err(_) => (None, None, Verdict::Fail),
            };
            let sz99 = check_sz99(&f, &settings)?;
            if let Some(path) = plot {
                let z = zak_fiber(&f, &settings)?;
                let n = grid.resolution();
                let mut csv = String::from("omega,grammian,zak_abs\n");
                for r in 0..n {
                    csv.push_str(&format!("{},{},{}\n", r as f64 / n as f64, g[r].re, z[r].norm()));
                }
                ctx.write(path, &csv)?;
            }
            let verdict = Verdict::all([frame, sz99.overall]);
            vec![Section::Analysis(Analysis {
                signal: f.name().to_string(),
                grammian_max: Checked::new(gmax, settings.eps),
                support_measure: Checked::new(mask.measure(), 1.0 / grid.resolution() as f64),
                frame_lower: lower,
                frame_upper: upper,
                frame,
                sz99,
                verdict,
            })]
        }
        Command::Membership { signal, theorem, space, normalization, emit_spectrum } => {
            if space.is_some() != (*theorem == TheoremArg::One) {
                return Err(CliError::Usage("--space is required with --theorem 1 and only used there".into()));
            }
            if emit_spectrum.is_some() && *theorem != TheoremArg::Five {
                return Err(CliError::Usage("--emit-spectrum is only available with --theorem 5".into()));
            }
            let f = ctx.signal(signal)?;
            match theorem {
                TheoremArg::One => {
                    let space_spec = space.as_deref().expect("checked above");
                    match certified_space(&ctx, space_spec)? {
                        Err(refused) => vec![Section::Refused(refused)],
                        Ok(parent) => induced_section(&parent, &f)?,
                    }
                }
                TheoremArg::Two => {
                    let norm = match normalization {
                        NormalizationArg::Zak => Normalization::Zak,
                        NormalizationArg::Grammian => Normalization::Grammian,
                    };
                    vec![Section::Conditions(check_theorem2(&f, &settings, norm)?)]
                }
                TheoremArg::Five => {
                    let report = check_theorem5(&f, &settings)?;
                    if let (Some(path), true) = (emit_spectrum, report.passed()) {
                        let built = membership::construct_s_from_f(&f, &settings)?;
                        let values = built.space.generator().grid_spectrum(&grid)?;
                        ctx.notes.push(format!(
                            "constructed sampling function: identity error {:e}, max |s(k) - δ_0k| {:e}",
                            built.identity_error, built.interpolation_error
                        ));
                        ctx.write(path, &io::write_grid_spectrum(&values, &grid))?;
                    }
                    vec![Section::Conditions(report)]
                }
                TheoremArg::Sz04 => vec![Section::Conditions(check_sz04(&f, &settings)?)],
            }
        }
        Command::Reconstruct { space, samples, points, from, to, count, lattice, out } => {
            let samples = io::read_samples(&samples.display().to_string(), &read_file(samples)?)?;
            let xs: Vec<f64> = match points {
                Some(p) => io::read_abscissae(&p.display().to_string(), &read_file(p)?)?,
                None => match *count {
                    0 => Vec::new(),
                    1 => vec![*from],
                    c => (0..c).map(|i| from + (to - from) * i as f64 / (c - 1) as f64).collect(),
                },
            };
            match certified_space(&ctx, space)? {
                Err(refused) => vec![Section::Refused(refused)],
                Ok(sp) => {
                    let rec = match lattice {
                        Some((a, b)) => lattice_rescale(&sp, *a, *b)?.reconstruct(&samples, &xs)?,
                        None => sp.reconstruct(&samples, &xs)?,
                    };
                    let csv = io::write_points(&xs, &rec.values);
                    match out {
                        Some(path) => ctx.write(path, &csv)?,
                        None => data = Some(csv),
                    }
                    vec![Section::Reconstruction(ReconstructionSummary {
                        space: sp.generator().name().to_string(),
                        samples: samples.iter().filter(|(_, v)| v.norm_sqr() > 0.0).count(),
                        points: xs.len(),
                        lattice: *lattice,
                        tail_bound: Checked::new(rec.tail_bound, 0.0),
                        verdict: Verdict::Pass,
                    })]
                }
            }
        }
        Command::Decompose { space, partition, out_dir } => {
            let partition =
                io::read_partition(&partition.display().to_string(), &read_file(partition)?, grid.resolution())?;
            match certified_space(&ctx, space)? {
                Err(refused) => vec![Section::Refused(refused)],
                Ok(sp) => {
                    let d = decompose(&sp, &partition)?;
                    let mut components = Vec::new();
                    for (comp, &part) in d.components.iter().zip(&d.indices) {
                        let (a, b) = comp.frame_bounds();
                        components.push(ComponentSummary {
                            part,
                            support_measure: Checked::new(comp.mask().measure(), 1.0 / grid.resolution() as f64),
                            frame_lower: Checked::new(a, settings.eps * b),
                            frame_upper: Checked::new(b, 1.0 / settings.eps),
                            certified: Verdict::from_bool(comp.certified()),
                        });
                        if let Some(dir) = out_dir {
                            let values = comp.sampling_spectrum()?;
                            ctx.write(&dir.join(format!("component_{part}.csv")), &io::write_grid_spectrum(&values, &grid))?;
                        }
                    }
                    let verdict = Verdict::from_bool(
                        d.rejected.is_empty()
                            && components.iter().all(|c| c.certified.passed())
                            && d.masking_error < IDENTITY_TOLERANCE
                            && d.sum_error < IDENTITY_TOLERANCE,
                    );
                    vec![Section::Decomposition(DecompositionSummary {
                        space: sp.generator().name().to_string(),
                        components,
                        rejected: d.rejected.clone(),
                        masking_error: Checked::new(d.masking_error, IDENTITY_TOLERANCE),
                        sum_error: Checked::new(d.sum_error, IDENTITY_TOLERANCE),
                        verdict,
                    })]
                }
            }
        }
        Command::Determine { space, functions, out_dir } => match certified_space(&ctx, space)? {
            Err(refused) => vec![Section::Refused(refused)],
            Ok(sp) => {
                let funcs: Vec<SignalRepresentation<f64>> =
                    functions.iter().map(|s| ctx.signal(s)).collect::<Result<_, _>>()?;
                let r = match check_determining_set(&sp, &funcs) {
                    Err(sisbox_core::Error::NotInSpace { name, residual }) => {
                        return Ok(Outcome {
                            document: ctx.finish(
                                command,
                                vec![Section::NotMember(NotMember {
                                    signal: name,
                                    space: sp.generator().name().to_string(),
                                    residual: Checked::new(residual, MEMBER_TOLERANCE),
                                })],
                                started,
                            ),
                            data: None,
                        })
                    }
                    other => other?,
                };
                if let Some(dir) = out_dir {
                    if r.passed() {
                        ctx.write(&dir.join("blocks.json"), &io::write_partition(&r.blocks))?;
                    }
                    for (i, m) in r.multipliers.iter().enumerate() {
                        let values: Vec<Complex<f64>> = m.values().to_vec();
                        ctx.write(&dir.join(format!("alpha_{}.csv", i + 1)), &io::write_periodic(&values))?;
                    }
                }
                let verdict = match r.expansion_error {
                    Some(e) if r.passed() => Verdict::from_bool(e < IDENTITY_TOLERANCE),
                    _ => r.verdict,
                };
                vec![Section::DeterminingSet(DeterminingSummary {
                    space: sp.generator().name().to_string(),
                    order: r.order.clone(),
                    masks: r.masks.iter().map(|m| m.intervals()).collect(),
                    symmetric_difference: Checked::new(r.symmetric_difference, 1.0 / grid.resolution() as f64),
                    blocks: r.blocks.iter().map(|m| m.intervals()).collect(),
                    expansion_error: r.expansion_error.map(|e| Checked::new(e, IDENTITY_TOLERANCE)),
                    verdict,
                })]
            }
        },
    };
    Ok(Outcome { document: ctx.finish(command, sections, started), data })
}

fn induced_section(parent: &SamplingSpace<f64>, f: &SignalRepresentation<f64>) -> Result<Vec<Section>, CliError> {
    let space = parent.generator().name().to_string();
    match membership::induced_subspace(parent, f) {
        Ok(sub) => {
            let verdict = Verdict::from_bool(
                sub.symbol_error < IDENTITY_TOLERANCE && sub.projection_error < IDENTITY_TOLERANCE,
            );
            Ok(vec![Section::Induced(Induced {
                signal: f.name().to_string(),
                space,
                support_measure: Checked::new(sub.mask.measure(), 1.0 / parent.grid().resolution() as f64),
                symbol_error: Checked::new(sub.symbol_error, IDENTITY_TOLERANCE),
                projection_error: Checked::new(sub.projection_error, IDENTITY_TOLERANCE),
                verdict,
            })])
        }
        Err(sisbox_core::Error::NotInSpace { name, residual }) => Ok(vec![Section::NotMember(NotMember {
            signal: name,
            space,
            residual: Checked::new(residual, MEMBER_TOLERANCE),
        })]),
        Err(e) => Err(e.into()),
    }
}
