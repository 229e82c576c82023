//! The `plantbench` command line.
//!
//! Every command that writes files also writes `<output>.manifest.toml`
//! holding the parsed command, the tool version and SHA-256 digests of its
//! inputs and outputs. `plantbench replay <manifest>` re-runs the command
//! into a scratch directory and compares the digests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use plantbench_core::dynamics::{DynamicsClass, Nonlinearity, Schedule, Scheme, Solver, SolverConfig};
use plantbench_core::energy::ClassifyOptions;
use plantbench_core::instance::{
    build_couplings_with, coarse_grain, generate_orthogonal_patterns, generate_small_scale, CatalogueId, CouplingRule,
    EWeighting, Instance, PatternSet,
};
use plantbench_core::oracle::{brute_force, max_eigenvalue, spectral_bounds, DEFAULT_EIGEN_TOL, ENUMERATION_CAP, SPECTRUM_CAP};
use plantbench_core::{seed, Error as CoreError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::{self, Axis, AxisKind, DtPolicy, GroundTruth, InstanceSource, KSweepSpec, SweepSpec};
use crate::io::{load_instance, save_instance, sha256_file};
use crate::report::{self, ReportKind};
use crate::{Error, Result};

const SEED_MAX: u64 = i64::MAX as u64;

fn seed_arg(s: &str) -> std::result::Result<u64, String> {
    let v: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > SEED_MAX {
        return Err(format!("seeds are limited to {SEED_MAX}"));
    }
    Ok(v)
}

#[derive(Debug, Parser)]
#[command(name = "plantbench", version, about = "Planted-solution QUBO benchmarks for analog Ising solvers")]
struct Cli {
    /// Worker threads (default: PLANTBENCH_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Generate an orthogonal (Hadamard) instance.
    Gen(GenArgs),
    /// Generate one of the N = 8 catalogue instances.
    GenSmall(GenSmallArgs),
    /// Run a solver from random starts.
    Solve(SolveArgs),
    /// Exact ground state and extreme eigenvalues.
    Oracle(OracleArgs),
    /// Success-rate grid over one or two parameters.
    SweepSr(SweepArgs),
    /// Success rate across a pattern perturbation (dw, coord_delta or equidistant_p axis).
    Scan(SweepArgs),
    /// Energy histograms and measure bands over K.
    SweepK(SweepKArgs),
    /// Render an SVG from a CSV.
    Report(ReportArgs),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    Hebb,
    Pseudoinverse,
}

impl From<RuleArg> for CouplingRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Hebb => CouplingRule::Hebb,
            RuleArg::Pseudoinverse => CouplingRule::Pseudoinverse,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub w0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub dw: f64,
    #[arg(long, default_value_t = 0, value_parser = seed_arg)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "hebb")]
    pub rule: RuleArg,
    /// Floor couplings to multiples of this step.
    #[arg(long)]
    pub coarse: Option<f64>,
    /// Store the coupling matrix even above N = 64.
    #[arg(long)]
    pub dense: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingArg {
    /// Instance (e): heaviest weight on the last pattern.
    LastHeaviest,
    /// Instance (e): plain `w0 + m dw` ladder.
    Literal,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenSmallArgs {
    /// a, b, b*, c, d, e or f.
    #[arg(long)]
    pub id: String,
    #[arg(long, value_enum, default_value = "last-heaviest")]
    pub weighting: WeightingArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Class1,
    Class2,
    Class3,
    Tbm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityArg {
    Tanh,
    Sign,
    IdentityClip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Euler,
    Symplectic,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "class1")]
    pub solver: SolverKind,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Set alpha to this multiple of the largest coupling eigenvalue.
    #[arg(long)]
    pub alpha_over_lambda: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Ramp alpha linearly from this value over --ramp-steps.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_from: Option<f64>,
    /// Ramp beta linearly from this value over --ramp-steps.
    #[arg(long, allow_hyphen_values = true)]
    pub beta_from: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub ramp_steps: usize,
    /// Velocity coefficient of class III; negative values damp.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub xi0: f64,
    /// Steps over which the pump ramps from 0 to 2 (default: --max-steps).
    #[arg(long)]
    pub pump_steps: Option<usize>,
    /// Default: tanh, sign for tbm.
    #[arg(long, value_enum)]
    pub nonlinearity: Option<NonlinearityArg>,
    /// Position window of the second-order classes (tbm default 1).
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub steady_tol: f64,
    #[arg(long, default_value_t = 0.5)]
    pub init_amplitude: f64,
    #[arg(long, value_enum, default_value = "euler")]
    pub scheme: SchemeArg,
}

impl SolverArgs {
    fn schedule(&self, to: f64, from: Option<f64>) -> Schedule {
        match from {
            Some(from) => Schedule::Ramp {
                from,
                to,
                over_steps: self.ramp_steps,
            },
            None => Schedule::Constant(to),
        }
    }

    pub fn config(&self) -> Result<SolverConfig> {
        let ramped = self.alpha_from.is_some() || self.beta_from.is_some();
        if ramped && self.solver == SolverKind::Class1 {
            return Err(Error::Usage("ramped coefficients need --solver class2 or class3".into()));
        }
        let mut cfg = match self.solver {
            SolverKind::Tbm => SolverConfig::tbm(self.delta, self.xi0),
            _ => SolverConfig::default(),
        };
        cfg.class = match self.solver {
            SolverKind::Class1 => DynamicsClass::I,
            SolverKind::Class2 => DynamicsClass::II,
            SolverKind::Class3 => DynamicsClass::III,
            SolverKind::Tbm => DynamicsClass::Tbm,
        };
        cfg.alpha = self.schedule(self.alpha, self.alpha_from);
        cfg.beta = self.schedule(self.beta, self.beta_from);
        cfg.gamma = Schedule::Constant(self.gamma);
        cfg.tbm.p = Schedule::Ramp {
            from: 0.0,
            to: 2.0,
            over_steps: self.pump_steps.unwrap_or(self.max_steps),
        };
        if let Some(nl) = self.nonlinearity {
            cfg.nonlinearity = match nl {
                NonlinearityArg::Tanh => Nonlinearity::Tanh,
                NonlinearityArg::Sign => Nonlinearity::Sign,
                NonlinearityArg::IdentityClip => Nonlinearity::IdentityClip,
            };
        }
        if self.window.is_some() {
            cfg.window = self.window;
        }
        cfg.dt = self.dt;
        cfg.max_steps = self.max_steps;
        cfg.steady_tol = self.steady_tol;
        cfg.init_amplitude = self.init_amplitude;
        cfg.scheme = match self.scheme {
            SchemeArg::Euler => Scheme::ForwardEuler,
            SchemeArg::Symplectic => Scheme::SymplecticEuler,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, default_value_t = 0, value_parser = seed_arg)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Include the full energy multiset (N <= 16).
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundTruthArg {
    Auto,
    Oracle,
    LargestWeight,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// `name=geom:lo:hi:n`, `name=lin:lo:hi:n` or `name=v1,v2,...`; give
    /// one or two. Names: alpha, alpha_over_lambda, beta, delta, xi0,
    /// window, dw, coord_delta, equidistant_p.
    #[arg(long = "axis", required = true)]
    pub axes: Vec<String>,
    #[arg(long, default_value_t = 200)]
    pub runs: usize,
    #[arg(long, default_value_t = 0, value_parser = seed_arg)]
    pub seed: u64,
    /// `fixed`, `stable:C` or `stable:C:keep-time`.
    #[arg(long, default_value = "fixed")]
    pub dt_policy: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub ground_truth: GroundTruthArg,
    /// Largest odd mixture order checked when labelling outcomes.
    #[arg(long, default_value_t = 3)]
    pub mixed_order: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepKArgs {
    #[arg(long)]
    pub n: usize,
    /// `lo:hi`, `lo:hi:step` or `k1,k2,...`.
    #[arg(long)]
    pub k: String,
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    #[arg(long, default_value_t = 0, value_parser = seed_arg)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.001)]
    pub dw: f64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha_over_lambda: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_steps: usize,
    #[arg(long, default_value = "stable:0.5")]
    pub dt_policy: String,
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
    /// Summary CSV; histograms go to the same name with `.hist.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReportArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// heatmap, hist or measure.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Keep the regenerated files here instead of a scratch directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parses `name=geom:lo:hi:n`, `name=lin:lo:hi:n` or `name=v1,v2,...`.
pub fn parse_axis(s: &str) -> Result<Axis> {
    let bad = |msg: &str| Error::Usage(format!("axis `{s}`: {msg}"));
    let (name, spec) = s.split_once('=').ok_or_else(|| bad("expected name=values"))?;
    let kind = AxisKind::from_name(name.trim()).ok_or_else(|| bad("unknown axis name"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(&format!("`{t}` is not a number")));
    let values = if let Some(rest) = spec.strip_prefix("geom:").or_else(|| spec.strip_prefix("lin:")) {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected lo:hi:n"));
        }
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| bad("point count must be an integer"))?;
        if spec.starts_with("geom:") {
            if !(lo > 0.0 && hi > 0.0) {
                return Err(bad("geometric grids need positive bounds"));
            }
            bench::geomspace(lo, hi, n)
        } else {
            bench::linspace(lo, hi, n)
        }
    } else {
        let list = spec.strip_prefix("list:").unwrap_or(spec);
        list.split(',').map(num).collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad("needs at least one finite value"));
    }
    Ok(Axis::new(kind, values))
}

pub fn parse_dt_policy(s: &str) -> Result<DtPolicy> {
    let bad = || Error::Usage(format!("dt policy `{s}`: expected fixed, stable:C or stable:C:keep-time"));
    if s == "fixed" {
        return Ok(DtPolicy::Fixed);
    }
    let rest = s.strip_prefix("stable:").ok_or_else(bad)?;
    let (c, keep_time) = match rest.split_once(':') {
        Some((c, "keep-time")) => (c, true),
        Some(_) => return Err(bad()),
        None => (rest, false),
    };
    let c: f64 = c.parse().map_err(|_| bad())?;
    if !(c > 0.0) {
        return Err(bad());
    }
    Ok(DtPolicy::Stable { c, keep_time })
}

/// Parses `lo:hi`, `lo:hi:step` or a comma list of K values.
pub fn parse_k_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Usage(format!("K range `{s}`: expected lo:hi, lo:hi:step or k1,k2,..."));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let ks: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [lo, hi] => (num(lo)?, num(hi)?, 1),
            [lo, hi, step] => (num(lo)?, num(hi)?, num(step)?),
            _ => return Err(bad()),
        };
        if step == 0 || lo > hi {
            return Err(bad());
        }
        (lo..=hi).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if ks.is_empty() || ks.contains(&0) {
        return Err(bad());
    }
    Ok(ks)
}

#[derive(Debug, Default)]
struct Files {
    inputs: Vec<PathBuf>,
    /// Deterministic outputs; the first one names the manifest.
    outputs: Vec<PathBuf>,
    /// Outputs that carry timings and are not compared on replay.
    sidecars: Vec<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FileDigest {
    path: PathBuf,
    sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    tool: String,
    version: String,
    threads: usize,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    sidecars: Vec<PathBuf>,
    command: Command,
}

fn manifest_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".manifest.toml");
    PathBuf::from(s)
}

fn sidecar_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".meta.toml");
    PathBuf::from(s)
}

fn hist_path(out: &Path) -> PathBuf {
    out.with_extension("hist.csv")
}

fn absolute(p: &mut PathBuf) -> Result<()> {
    *p = std::path::absolute(&*p).map_err(|e| Error::io(p.clone(), e))?;
    Ok(())
}

fn redirect(p: &mut PathBuf, dir: &Path) {
    let name = p.file_name().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));
    *p = dir.join(name);
}

impl Command {
    fn paths_mut(&mut self) -> (Vec<&mut PathBuf>, Vec<&mut PathBuf>) {
        match self {
            Command::Gen(a) => (vec![], vec![&mut a.out]),
            Command::GenSmall(a) => (vec![], a.out.iter_mut().collect()),
            Command::Solve(a) => (vec![&mut a.instance], vec![&mut a.out]),
            Command::Oracle(a) => (vec![&mut a.instance], a.out.iter_mut().collect()),
            Command::SweepSr(a) | Command::Scan(a) => (vec![&mut a.instance], vec![&mut a.out]),
            Command::SweepK(a) => (vec![], vec![&mut a.out]),
            Command::Report(a) => (vec![&mut a.input], vec![&mut a.out]),
            Command::Replay(a) => (vec![&mut a.manifest], a.out_dir.iter_mut().collect()),
        }
    }
}

fn instance_summary(inst: &Instance, out: &mut (dyn Write + Send)) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "label: {}", inst.label);
    let _ = writeln!(s, "n: {}", inst.n);
    if let Some(ps) = inst.patterns() {
        let _ = writeln!(s, "k: {}", ps.k());
        let _ = writeln!(s, "w0: {}  dw: {}", ps.w0(), ps.dw());
        if ps.k() <= 32 {
            let w: Vec<String> = ps.weights().iter().map(|w| format!("{w}")).collect();
            let _ = writeln!(s, "weights: {}", w.join(" "));
        }
    }
    if let Some(dj) = inst.coarse_grain {
        let _ = writeln!(s, "coarse-grained with step {dj}");
    }
    if let Some(sp) = &inst.spectrum {
        let _ = writeln!(s, "planted energies: e_min {}  e_max {}", sp.e_min, sp.e_max);
        if sp.energies.len() <= 32 {
            for (m, e) in sp.energies.iter().enumerate() {
                let _ = writeln!(s, "  pattern {}: {e}", m + 1);
            }
        }
    }
    out.write_all(s.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn say(out: &mut (dyn Write + Send), text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

fn cmd_gen(a: &GenArgs, out: &mut (dyn Write + Send)) -> Result<Files> {
    let base = generate_orthogonal_patterns(a.n, a.k, a.seed)?;
    let ps = PatternSet::new(base.patterns().to_vec(), a.w0, a.dw)?.with_origin(base.origin().clone());
    let mut inst = build_couplings_with(&ps, a.rule.into())?;
    if let Some(dj) = a.coarse {
        inst = coarse_grain(&inst, dj)?;
    }
    inst.label = format!("n{}-k{}", a.n, a.k);
    inst.seed = a.seed;
    // Post-hoc check of the generator: the normalized overlap matrix must be
    // the identity.
    let q = ps.overlap_matrix();
    let k = ps.k();
    let identity = (0..k).all(|i| (0..k).all(|j| q[i * k + j] == if i == j { 1.0 } else { 0.0 }));
    if !identity {
        return Err(Error::Validation("generated patterns are not orthogonal".into()));
    }
    save_instance(&inst, &a.out, a.dense)?;
    instance_summary(&inst, out)?;
    say(out, "overlap matrix: identity, verified")?;
    say(out, &format!("wrote {}", a.out.display()))?;
    Ok(Files {
        outputs: vec![a.out.clone()],
        ..Files::default()
    })
}

fn cmd_gen_small(a: &GenSmallArgs, out: &mut (dyn Write + Send)) -> Result<Files> {
    let id: CatalogueId = a.id.parse().map_err(|_| Error::Usage(format!("unknown catalogue id `{}`", a.id)))?;
    let weighting = match a.weighting {
        WeightingArg::LastHeaviest => EWeighting::LastHeaviest,
        WeightingArg::Literal => EWeighting::Literal,
    };
    let inst = generate_small_scale(id, weighting);
    let d: Vec<String> = id.distances().iter().map(|d| d.to_string()).collect();
    say(out, &format!("instance ({id})"))?;
    say(out, &format!("distances: ({})", d.join(", ")))?;
    say(out, &format!("dw: {}", id.dw()))?;
    instance_summary(&inst, out)?;
    let mut files = Files::default();
    if let Some(p) = &a.out {
        save_instance(&inst, p, false)?;
        say(out, &format!("wrote {}", p.display()))?;
        files.outputs.push(p.clone());
    }
    Ok(files)
}

fn with_alpha_over_lambda(inst: &Instance, sa: &SolverArgs, mut cfg: SolverConfig) -> Result<SolverConfig> {
    if let Some(r) = sa.alpha_over_lambda {
        if sa.alpha_from.is_some() {
            return Err(Error::Usage("--alpha-over-lambda and --alpha-from are exclusive".into()));
        }
        cfg.alpha = Schedule::Constant(r * max_eigenvalue(inst, DEFAULT_EIGEN_TOL)?);
    }
    Ok(cfg)
}

fn cmd_solve(a: &SolveArgs, out: &mut (dyn Write + Send)) -> Result<Files> {
    if a.runs == 0 {
        return Err(Error::Usage("--runs must be at least 1".into()));
    }
    let inst = load_instance(&a.instance)?;
    let cfg = with_alpha_over_lambda(&inst, &a.solver, a.solver.config()?)?;
    let solver = Solver::new(&inst, cfg)?;
    let rows: Vec<Result<[String; 5]>> = (0..a.runs)
        .into_par_iter()
        .map(|r| {
            let s = seed::derive(a.seed, 0, r as u64);
            match solver.solve(s) {
                Ok(o) => Ok([
                    s.to_string(),
                    format!("{}", o.final_energy),
                    o.label.map_or_else(|| "spurious".to_string(), |l| l.to_string()),
                    o.steps_used.to_string(),
                    o.converged.to_string(),
                ]),
                Err(CoreError::Diverged { step }) => {
                    Ok([s.to_string(), String::new(), "diverged".into(), step.to_string(), "false".into()])
                }
                Err(e) => Err(e.into()),
            }
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "energy", "label", "steps", "converged"])?;
    let mut converged = 0;
    for row in rows {
        let row = row?;
        converged += (row[4] == "true") as usize;
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Validation(e.to_string()))?;
    bench::write_bytes(&a.out, &bytes)?;
    say(out, &format!("{} runs, {converged} converged; wrote {}", a.runs, a.out.display()))?;
    Ok(Files {
        inputs: vec![a.instance.clone()],
        outputs: vec![a.out.clone()],
        ..Files::default()
    })
}

#[derive(Serialize)]
struct OracleReport {
    label: String,
    n: usize,
    lambda_min: f64,
    lambda_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degeneracy: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_is_heaviest_pattern: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_multiset: Option<Vec<f64>>,
}

fn spins_string(x: &[i8]) -> String {
    x.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

fn cmd_oracle(a: &OracleArgs, out: &mut (dyn Write + Send)) -> Result<Files> {
    let inst = load_instance(&a.instance)?;
    if a.full && inst.n > SPECTRUM_CAP {
        return Err(CoreError::TooLarge { n: inst.n, cap: SPECTRUM_CAP }.into());
    }
    let (lo, hi) = spectral_bounds(&inst.coupling, DEFAULT_EIGEN_TOL)?;
    let mut rep = OracleReport {
        label: inst.label.clone(),
        n: inst.n,
        lambda_min: lo,
        lambda_max: hi,
        ground_energy: None,
        ground_state: None,
        degeneracy: None,
        ground_is_heaviest_pattern: None,
        energy_multiset: None,
    };
    say(out, &format!("lambda_min {lo}  lambda_max {hi}"))?;
    if inst.n <= ENUMERATION_CAP {
        let r = brute_force(&inst, a.full)?;
        say(out, &format!("ground energy {}  degeneracy {}", r.ground_energy, r.degeneracy))?;
        say(out, &format!("ground state {}", spins_string(&r.ground_state)))?;
        if let Some(ps) = inst.patterns() {
            let h = r.is_ground(ps.pattern(ps.heaviest()));
            say(out, &format!("heaviest pattern ({}) is a ground state: {h}", ps.heaviest() + 1))?;
            rep.ground_is_heaviest_pattern = Some(h);
        }
        rep.ground_energy = Some(r.ground_energy);
        rep.ground_state = Some(spins_string(&r.ground_state));
        rep.degeneracy = Some(r.degeneracy);
        rep.energy_multiset = r.energy_multiset;
    } else {
        say(out, &format!("n > {ENUMERATION_CAP}: exhaustive search skipped"))?;
    }
    let mut files = Files {
        inputs: vec![a.instance.clone()],
        ..Files::default()
    };
    if let Some(p) = &a.out {
        let text = toml::to_string(&rep).map_err(|e| Error::Validation(e.to_string()))?;
        bench::write_bytes(p, text.as_bytes())?;
        files.outputs.push(p.clone());
    }
    Ok(files)
}

fn sweep_spec(a: &SweepArgs, scan: bool) -> Result<SweepSpec> {
    let inst = load_instance(&a.instance)?;
    let axes = a.axes.iter().map(|s| parse_axis(s)).collect::<Result<Vec<_>>>()?;
    if axes.iter().any(|x| x.kind == AxisKind::K) {
        return Err(Error::Usage("the k axis belongs to sweep-k".into()));
    }
    if scan && !axes.iter().any(|x| x.kind.is_scan()) {
        return Err(Error::Usage("scan needs a dw, coord_delta or equidistant_p axis".into()));
    }
    let mut spec = SweepSpec::new(InstanceSource::Fixed(inst), a.solver.config()?, axes, a.runs, a.seed);
    spec.dt_policy = parse_dt_policy(&a.dt_policy)?;
    spec.alpha_over_lambda = a.solver.alpha_over_lambda;
    spec.ground_truth = match a.ground_truth {
        GroundTruthArg::Auto => GroundTruth::Auto,
        GroundTruthArg::Oracle => GroundTruth::Oracle,
        GroundTruthArg::LargestWeight => GroundTruth::LargestWeight,
    };
    spec.classify = ClassifyOptions {
        mixed_order: a.mixed_order,
        ..ClassifyOptions::default()
    };
    Ok(spec)
}

fn cmd_sweep(a: &SweepArgs, scan: bool, out: &mut (dyn Write + Send)) -> Result<Files> {
    let spec = sweep_spec(a, scan)?;
    let result = bench::sweep_sr(&spec)?;
    bench::write_bytes(&a.out, &bench::sweep_csv(&result)?)?;
    let meta = sidecar_path(&a.out);
    bench::write_bytes(&meta, bench::sweep_meta(&result)?.as_bytes())?;
    let sr1 = result.points.iter().filter(|p| p.sr == 1.0).count();
    say(
        out,
        &format!(
            "{} points x {} runs; max sr {}; {sr1} points at sr = 1; wrote {}",
            result.points.len(),
            result.runs_per_point,
            result.max_sr(),
            a.out.display()
        ),
    )?;
    Ok(Files {
        inputs: vec![a.instance.clone()],
        outputs: vec![a.out.clone()],
        sidecars: vec![meta],
    })
}

fn cmd_sweep_k(a: &SweepKArgs, out: &mut (dyn Write + Send)) -> Result<Files> {
    let mut spec = KSweepSpec::new(a.n, parse_k_range(&a.k)?, a.runs, a.seed);
    if let Some(&k) = spec.ks.iter().find(|&&k| k > a.n) {
        return Err(Error::Usage(format!("K = {k} exceeds N = {}", a.n)));
    }
    spec.dw = a.dw;
    spec.alpha_over_lambda = a.alpha_over_lambda;
    spec.solver.max_steps = a.max_steps;
    spec.dt_policy = parse_dt_policy(&a.dt_policy)?;
    spec.n_bins = a.bins;
    let result = bench::sweep_k(&spec)?;
    let hist = hist_path(&a.out);
    bench::write_bytes(&a.out, &bench::k_summary_csv(&result)?)?;
    bench::write_bytes(&hist, &bench::k_histogram_csv(&result)?)?;
    let meta = sidecar_path(&a.out);
    bench::write_bytes(&meta, bench::sweep_meta(&result.sweep)?.as_bytes())?;
    for r in &result.records {
        let p = &r.point;
        let pm = (p.count("planted") + p.count("mirror")) as f64 / p.n_runs as f64;
        let (mean, skew) = r.stats.map_or((f64::NAN, f64::NAN), |s| (s.mean, s.skewness));
        let peaks = r.histogram.as_ref().map_or(0, |h| h.peak_count());
        say(out, &format!("K {:>5}  planted/mirror {pm:.3}  mean {mean:.4}  skewness {skew:.3}  peaks {peaks}", r.k))?;
    }
    say(out, &format!("wrote {} and {}", a.out.display(), hist.display()))?;
    Ok(Files {
        inputs: vec![],
        outputs: vec![a.out.clone(), hist],
        sidecars: vec![meta],
    })
}

fn cmd_report(a: &ReportArgs, out: &mut (dyn Write + Send)) -> Result<Files> {
    let kind: ReportKind = a.kind.parse()?;
    let text = std::fs::read_to_string(&a.input).map_err(|e| Error::io(&a.input, e))?;
    let svg = report::render(kind, &text).map_err(|e| match e {
        Error::Validation(msg) => Error::format(&a.input, msg),
        other => other,
    })?;
    bench::write_bytes(&a.out, svg.as_bytes())?;
    say(out, &format!("wrote {}", a.out.display()))?;
    Ok(Files {
        inputs: vec![a.input.clone()],
        outputs: vec![a.out.clone()],
        ..Files::default()
    })
}

fn execute(cmd: &Command, out: &mut (dyn Write + Send)) -> Result<Files> {
    match cmd {
        Command::Gen(a) => cmd_gen(a, out),
        Command::GenSmall(a) => cmd_gen_small(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::SweepSr(a) => cmd_sweep(a, false, out),
        Command::Scan(a) => cmd_sweep(a, true, out),
        Command::SweepK(a) => cmd_sweep_k(a, out),
        Command::Report(a) => cmd_report(a, out),
        Command::Replay(a) => cmd_replay(a, out),
    }
}

fn digests(paths: &[PathBuf]) -> Result<Vec<FileDigest>> {
    paths
        .iter()
        .map(|p| {
            Ok(FileDigest {
                path: p.clone(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

fn write_manifest(cmd: &Command, files: &Files) -> Result<()> {
    let Some(primary) = files.outputs.first() else {
        return Ok(());
    };
    let m = Manifest {
        tool: "plantbench".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        threads: rayon::current_num_threads(),
        inputs: digests(&files.inputs)?,
        outputs: digests(&files.outputs)?,
        sidecars: files.sidecars.clone(),
        command: cmd.clone(),
    };
    let text = toml::to_string(&m).map_err(|e| Error::Validation(format!("cannot serialize manifest: {e}")))?;
    bench::write_bytes(&manifest_path(primary), text.as_bytes())
}

fn cmd_replay(a: &ReplayArgs, out: &mut (dyn Write + Send)) -> Result<Files> {
    let text = std::fs::read_to_string(&a.manifest).map_err(|e| Error::io(&a.manifest, e))?;
    let m: Manifest = toml::from_str(&text).map_err(|e| Error::format(&a.manifest, e.to_string()))?;
    if matches!(m.command, Command::Replay(_)) {
        return Err(Error::format(&a.manifest, "a manifest cannot replay another replay"));
    }
    if m.version != env!("CARGO_PKG_VERSION") {
        say(out, &format!("note: manifest written by version {}", m.version))?;
    }
    for d in &m.inputs {
        if sha256_file(&d.path)? != d.sha256 {
            return Err(Error::Validation(format!("input {} changed since the manifest was written", d.path.display())));
        }
    }
    let scratch;
    let dir = match &a.out_dir {
        Some(d) => {
            std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
            d.clone()
        }
        None => {
            scratch = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
            scratch.path().to_path_buf()
        }
    };
    let mut cmd = m.command.clone();
    for p in cmd.paths_mut().1 {
        redirect(p, &dir);
    }
    let mut sink = Vec::new();
    let files = execute(&cmd, &mut sink)?;
    if files.outputs.len() != m.outputs.len() {
        return Err(Error::Validation("replay produced a different set of outputs".into()));
    }
    let mut mismatched = 0;
    for (new, old) in files.outputs.iter().zip(&m.outputs) {
        let ok = sha256_file(new)? == old.sha256;
        mismatched += !ok as usize;
        say(out, &format!("{} {}", if ok { "match" } else { "MISMATCH" }, old.path.display()))?;
    }
    if mismatched > 0 {
        return Err(Error::Validation(format!("{mismatched} output(s) differ from the manifest")));
    }
    say(out, &format!("replay reproduced {} output(s)", files.outputs.len()))?;
    Ok(Files::default())
}

fn thread_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("PLANTBENCH_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("PLANTBENCH_THREADS=`{v}` is not a thread count"))),
        Err(_) => Ok(0),
    }
}

/// Parses `args` (program name first) and runs the command, writing
/// progress to `out`.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send)) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(e.to_string()))?;
    let threads = thread_count(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {threads} threads: {e}")))?;
    let mut cmd = cli.command;
    let (inputs, outputs) = cmd.paths_mut();
    for p in inputs.into_iter().chain(outputs) {
        absolute(p)?;
    }
    pool.install(|| {
        let files = execute(&cmd, out)?;
        write_manifest(&cmd, &files)
    })
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    // Help and version go through clap directly so they exit with 0.
    if let Err(e) = Cli::try_parse_from(&args) {
        let _ = e.print();
        return e.exit_code();
    }
    match run(args, &mut std::io::stdout()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
