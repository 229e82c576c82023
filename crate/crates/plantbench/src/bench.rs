//! Parameter sweeps over solver and instance parameters.
//!
//! Every run gets its seed from `(base_seed, point, run)`, runs execute on
//! the current rayon pool, and results are reduced in index order, so the
//! output does not depend on the thread count.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use plantbench_core::dynamics::{DynamicsClass, RunOutcome, Schedule, Solver, SolverConfig};
use plantbench_core::energy::{measure_bins, ClassifyOptions, MeasureCounts, PlantedSpectrum, DEFAULT_FRACTIONS};
use plantbench_core::instance::{
    build_couplings, build_couplings_with, coarse_grain, coordinate_scan_edits, equidistant_scan_edits,
    generate_orthogonal_patterns, perturb_patterns, Instance, PatternSet,
};
use plantbench_core::oracle::{brute_force, spectral_bounds, SpectrumReport, DEFAULT_EIGEN_TOL, ENUMERATION_CAP};
use plantbench_core::{seed, Error as CoreError, Spins};
use rayon::prelude::*;
use serde::Serialize;

use crate::io::sha256_hex;
use crate::{Error, Result};

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    Alpha,
    /// `alpha` in units of `lambda_max`.
    AlphaOverLambda,
    Beta,
    TbmDelta,
    TbmXi0,
    Window,
    /// Weight ladder step of the instance's pattern set.
    Dw,
    /// Perturbation of pattern 1 at its first shared-sign coordinate.
    CoordinateDelta,
    /// Shift `p` of the equidistant-set scan.
    EquidistantP,
    /// Number of planted orthogonal patterns.
    K,
}

impl AxisKind {
    pub const ALL: [AxisKind; 10] = [
        AxisKind::Alpha,
        AxisKind::AlphaOverLambda,
        AxisKind::Beta,
        AxisKind::TbmDelta,
        AxisKind::TbmXi0,
        AxisKind::Window,
        AxisKind::Dw,
        AxisKind::CoordinateDelta,
        AxisKind::EquidistantP,
        AxisKind::K,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxisKind::Alpha => "alpha",
            AxisKind::AlphaOverLambda => "alpha_over_lambda",
            AxisKind::Beta => "beta",
            AxisKind::TbmDelta => "delta",
            AxisKind::TbmXi0 => "xi0",
            AxisKind::Window => "window",
            AxisKind::Dw => "dw",
            AxisKind::CoordinateDelta => "coord_delta",
            AxisKind::EquidistantP => "equidistant_p",
            AxisKind::K => "k",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        let s = s.replace('-', "_");
        Self::ALL.into_iter().find(|a| a.name() == s)
    }

    fn changes_instance(self) -> bool {
        matches!(self, AxisKind::Dw | AxisKind::CoordinateDelta | AxisKind::EquidistantP | AxisKind::K)
    }

    /// True for the perturbation axes of a transition scan.
    pub fn is_scan(self) -> bool {
        matches!(self, AxisKind::Dw | AxisKind::CoordinateDelta | AxisKind::EquidistantP)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(kind: AxisKind, values: Vec<f64>) -> Self {
        Self { kind, values }
    }
}

/// `n` points from `lo` to `hi` inclusive, evenly spaced.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` points from `lo` to `hi` inclusive, evenly spaced in log scale.
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Fixed(Instance),
    /// Hadamard patterns; `K` must come from an axis.
    Orthogonal { n: usize, dw: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    /// Use the template's `dt` and `max_steps` unchanged.
    Fixed,
    /// `dt = min(dt0, c / (|alpha| + |beta| rho))` with `rho` the spectral
    /// radius of `J`. With `keep_time` the step budget grows so that
    /// `dt * max_steps` stays at the template's value.
    Stable { c: f64, keep_time: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTruth {
    /// Brute force up to the enumeration cap, largest weight above it.
    Auto,
    Oracle,
    LargestWeight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub instance: InstanceSource,
    pub solver: SolverConfig,
    /// One or two axes; the first varies slowest.
    pub axes: Vec<Axis>,
    pub runs_per_point: usize,
    pub base_seed: u64,
    pub ground_truth: GroundTruth,
    pub dt_policy: DtPolicy,
    /// `alpha = r * lambda_max` when no alpha axis is present.
    pub alpha_over_lambda: Option<f64>,
    pub fractions: Vec<f64>,
    pub classify: ClassifyOptions,
    pub keep_energies: bool,
    pub keep_states: bool,
}

impl SweepSpec {
    pub fn new(instance: InstanceSource, solver: SolverConfig, axes: Vec<Axis>, runs_per_point: usize, base_seed: u64) -> Self {
        Self {
            instance,
            solver,
            axes,
            runs_per_point,
            base_seed,
            ground_truth: GroundTruth::Auto,
            dt_policy: DtPolicy::Fixed,
            alpha_over_lambda: None,
            fractions: DEFAULT_FRACTIONS.to_vec(),
            classify: ClassifyOptions::default(),
            keep_energies: false,
            keep_states: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Usage("a sweep needs one or two axes".into()));
        }
        if self.axes.iter().any(|a| a.values.is_empty()) {
            return Err(Error::Usage("axes must not be empty".into()));
        }
        if self.axes.len() == 2 && self.axes[0].kind == self.axes[1].kind {
            return Err(Error::Usage("the two axes must differ".into()));
        }
        if self.runs_per_point == 0 {
            return Err(Error::Usage("runs per point must be at least 1".into()));
        }
        if let DtPolicy::Stable { c, .. } = self.dt_policy {
            if !(c > 0.0) {
                return Err(Error::Usage("stable dt factor must be positive".into()));
            }
        }
        self.solver.validate()?;
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of point `p`.
    pub fn coords(&self, p: usize) -> Vec<f64> {
        let mut rem = p;
        let mut out = vec![0.0; self.axes.len()];
        for (d, axis) in self.axes.iter().enumerate().rev() {
            out[d] = axis.values[rem % axis.values.len()];
            rem /= axis.values.len();
        }
        out
    }

    /// SHA-256 over a canonical description of the spec. Couplings enter as
    /// raw bits.
    pub fn hash(&self) -> String {
        let mut s = String::new();
        match &self.instance {
            InstanceSource::Fixed(inst) => {
                let _ = write!(s, "fixed:{}:{}:{:?}:{:?};", inst.label, inst.n, inst.rule, inst.coarse_grain);
                for v in inst.coupling.as_slice() {
                    let _ = write!(s, "{:016x}", v.to_bits());
                }
                if let Some(ps) = inst.patterns() {
                    let _ = write!(s, ";{ps:?}");
                }
            }
            other => {
                let _ = write!(s, "{other:?}");
            }
        }
        let _ = write!(
            s,
            "|{:?}|{:?}|{}|{}|{:?}|{:?}|{:?}|{:?}|{:?}|{}|{}",
            self.solver,
            self.axes,
            self.runs_per_point,
            self.base_seed,
            self.ground_truth,
            self.dt_policy,
            self.alpha_over_lambda,
            self.fractions,
            self.classify,
            self.keep_energies,
            self.keep_states
        );
        sha256_hex(s.as_bytes())
    }
}

/// Outcome categories counted per point, in CSV column order. Runs on
/// instances without planted patterns count as spurious.
pub const LABEL_KINDS: [&str; 7] = ["planted", "mirror", "mixed", "spurious", "below", "above", "diverged"];

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub coords: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub dt: f64,
    pub max_steps: usize,
    pub lambda_max: Option<f64>,
    pub e_min: Option<f64>,
    pub e_max: Option<f64>,
    pub ground_energy: Option<f64>,
    pub n_runs: usize,
    pub hits: usize,
    pub sr: f64,
    pub converged: usize,
    /// Aligned with [`LABEL_KINDS`].
    pub label_counts: [usize; 7],
    /// Outcomes whose energy undercuts the exact ground energy.
    pub oracle_violations: usize,
    /// Band counts of the non-diverged outcomes.
    pub measure: Option<MeasureCounts>,
    pub energies: Option<Vec<f64>>,
    pub states: Option<Vec<Spins>>,
}

impl PointResult {
    pub fn count(&self, kind: &str) -> usize {
        LABEL_KINDS.iter().position(|&k| k == kind).map_or(0, |i| self.label_counts[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<Axis>,
    pub fractions: Vec<f64>,
    pub points: Vec<PointResult>,
    pub spec_hash: String,
    pub base_seed: u64,
    pub runs_per_point: usize,
    pub wall_time_s: f64,
    pub threads: usize,
}

impl SweepResult {
    pub fn max_sr(&self) -> f64 {
        self.points.iter().map(|p| p.sr).fold(0.0, f64::max)
    }
}

enum Truth {
    Oracle(SpectrumReport),
    Pattern(Spins),
    None,
}

impl Truth {
    fn hit(&self, x: &[i8]) -> bool {
        match self {
            Truth::Oracle(r) => r.is_ground(x),
            Truth::Pattern(p) => {
                let h = plantbench_core::hamming(x, p);
                h == 0 || h == x.len()
            }
            Truth::None => false,
        }
    }
}

struct PointCtx {
    coords: Vec<f64>,
    inst: Instance,
    cfg: SolverConfig,
    lambda_max: Option<f64>,
    truth: Truth,
}

fn rebuild(inst: &Instance, ps: &PatternSet) -> Result<Instance> {
    let mut out = build_couplings_with(ps, inst.rule)?;
    if let Some(dj) = inst.coarse_grain {
        out = coarse_grain(&out, dj)?;
    }
    out.label = inst.label.clone();
    out.seed = inst.seed;
    Ok(out)
}

fn point_instance(spec: &SweepSpec, coords: &[f64]) -> Result<Instance> {
    let get = |kind: AxisKind| spec.axes.iter().position(|a| a.kind == kind).map(|i| coords[i]);
    let mut inst = match &spec.instance {
        InstanceSource::Fixed(inst) => inst.clone(),
        InstanceSource::Orthogonal { n, dw, seed } => {
            let k = get(AxisKind::K).ok_or_else(|| Error::Usage("orthogonal sweeps need a `k` axis".into()))?;
            if k < 1.0 || k.fract() != 0.0 {
                return Err(Error::Usage(format!("k must be a positive integer, got {k}")));
            }
            let ps = generate_orthogonal_patterns(*n, k as usize, *seed)?.with_dw(*dw)?;
            let mut inst = build_couplings(&ps);
            inst.label = format!("n{n}-k{k}");
            inst.seed = *seed;
            inst
        }
    };
    if !spec.axes.iter().any(|a| a.kind.changes_instance() && a.kind != AxisKind::K) {
        return Ok(inst);
    }
    let mut ps = inst
        .patterns()
        .cloned()
        .ok_or_else(|| Error::Usage("perturbation axes need an instance with planted patterns".into()))?;
    if let Some(dw) = get(AxisKind::Dw) {
        ps = ps.with_dw(dw)?;
    }
    if let Some(d) = get(AxisKind::CoordinateDelta) {
        ps = perturb_patterns(&ps, &coordinate_scan_edits(&ps, d)?)?;
    }
    if let Some(p) = get(AxisKind::EquidistantP) {
        ps = perturb_patterns(&ps, &equidistant_scan_edits(&ps, p)?)?;
    }
    inst = rebuild(&inst, &ps)?;
    Ok(inst)
}

fn schedule_bound(s: &Schedule) -> f64 {
    match s {
        Schedule::Constant(v) => v.abs(),
        Schedule::Ramp { from, to, .. } => from.abs().max(to.abs()),
        Schedule::Table(t) => t.iter().fold(0.0, |m, v| m.max(v.abs())),
    }
}

fn point_ctx(spec: &SweepSpec, p: usize) -> Result<PointCtx> {
    let coords = spec.coords(p);
    let get = |kind: AxisKind| spec.axes.iter().position(|a| a.kind == kind).map(|i| coords[i]);
    let inst = point_instance(spec, &coords)?;
    let mut cfg = spec.solver.clone();

    let first_order = matches!(cfg.class, DynamicsClass::I | DynamicsClass::II);
    let needs_bounds = get(AxisKind::AlphaOverLambda).is_some()
        || (get(AxisKind::Alpha).is_none() && spec.alpha_over_lambda.is_some())
        || (first_order && matches!(spec.dt_policy, DtPolicy::Stable { .. }));
    let bounds = if needs_bounds {
        Some(spectral_bounds(&inst.coupling, DEFAULT_EIGEN_TOL)?)
    } else {
        None
    };
    let lambda_max = bounds.map(|b| b.1);

    if let Some(a) = get(AxisKind::Alpha) {
        cfg.alpha = Schedule::Constant(a);
    } else if let Some(r) = get(AxisKind::AlphaOverLambda).or(spec.alpha_over_lambda) {
        cfg.alpha = Schedule::Constant(r * lambda_max.expect("bounds computed"));
    }
    if let Some(b) = get(AxisKind::Beta) {
        cfg.beta = Schedule::Constant(b);
    }
    if let Some(d) = get(AxisKind::TbmDelta) {
        cfg.tbm.delta = d;
    }
    if let Some(x) = get(AxisKind::TbmXi0) {
        cfg.tbm.xi0 = x;
    }
    if let Some(w) = get(AxisKind::Window) {
        cfg.window = Some(w);
    }
    if let (DtPolicy::Stable { c, keep_time }, true, Some((lo, hi))) = (spec.dt_policy, first_order, bounds) {
        let rho = lo.abs().max(hi.abs());
        let rate = schedule_bound(&cfg.alpha) + schedule_bound(&cfg.beta) * rho;
        if rate > 0.0 {
            let dt = cfg.dt.min(c / rate);
            if keep_time && dt < cfg.dt {
                cfg.max_steps = (cfg.max_steps as f64 * cfg.dt / dt).ceil() as usize;
            }
            cfg.dt = dt;
        }
    }

    let truth = match (spec.ground_truth, inst.n <= ENUMERATION_CAP) {
        (GroundTruth::Oracle, false) => {
            return Err(Error::Core(CoreError::TooLarge { n: inst.n, cap: ENUMERATION_CAP }));
        }
        (GroundTruth::Oracle, true) | (GroundTruth::Auto, true) => Truth::Oracle(brute_force(&inst, false)?),
        (GroundTruth::LargestWeight, _) | (GroundTruth::Auto, false) => match inst.patterns() {
            Some(ps) => Truth::Pattern(ps.pattern(ps.heaviest()).to_vec()),
            None => Truth::None,
        },
    };
    Ok(PointCtx {
        coords,
        inst,
        cfg,
        lambda_max,
        truth,
    })
}

struct RunRecord {
    outcome: Option<RunOutcome>,
    hit: bool,
}

/// Runs every point of `spec` on the current rayon pool.
pub fn sweep_sr(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let start = Instant::now();
    let n_points = spec.n_points();
    let ctxs: Vec<PointCtx> = (0..n_points)
        .into_par_iter()
        .map(|p| point_ctx(spec, p))
        .collect::<Result<_>>()?;
    let solvers: Vec<Solver<'_>> = ctxs
        .par_iter()
        .map(|c| Solver::with_classifier_options(&c.inst, c.cfg.clone(), spec.classify))
        .collect::<std::result::Result<_, _>>()?;
    let runs = spec.runs_per_point;
    let records: Vec<RunRecord> = (0..n_points * runs)
        .into_par_iter()
        .map(|idx| {
            let (p, r) = (idx / runs, idx % runs);
            let s = seed::derive(spec.base_seed, p as u64, r as u64);
            match solvers[p].solve(s) {
                Ok(out) => Ok(RunRecord {
                    hit: ctxs[p].truth.hit(&out.final_spins),
                    outcome: Some(out),
                }),
                Err(CoreError::Diverged { .. }) => Ok(RunRecord { outcome: None, hit: false }),
                Err(e) => Err(Error::Core(e)),
            }
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(n_points);
    for (p, ctx) in ctxs.iter().enumerate() {
        points.push(aggregate(spec, ctx, &records[p * runs..(p + 1) * runs]));
    }
    Ok(SweepResult {
        axes: spec.axes.clone(),
        fractions: normalized_fractions(&spec.fractions),
        points,
        spec_hash: spec.hash(),
        base_seed: spec.base_seed,
        runs_per_point: runs,
        wall_time_s: start.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
    })
}

fn normalized_fractions(f: &[f64]) -> Vec<f64> {
    let mut f = f.to_vec();
    if f.last() != Some(&1.0) {
        f.push(1.0);
    }
    f
}

fn aggregate(spec: &SweepSpec, ctx: &PointCtx, records: &[RunRecord]) -> PointResult {
    let mut label_counts = [0usize; 7];
    let mut hits = 0;
    let mut converged = 0;
    let mut violations = 0;
    let mut energies = Vec::with_capacity(records.len());
    let mut states = Vec::new();
    let ground = match &ctx.truth {
        Truth::Oracle(r) => Some(r.ground_energy),
        _ => None,
    };
    for rec in records {
        let Some(out) = &rec.outcome else {
            label_counts[6] += 1;
            continue;
        };
        hits += rec.hit as usize;
        converged += out.converged as usize;
        let kind = out.label.as_ref().map_or("spurious", |l| l.kind());
        let i = LABEL_KINDS.iter().position(|&k| k == kind).expect("known label kind");
        label_counts[i] += 1;
        if let Some(g) = ground {
            if out.final_energy < g - 1e-9 * (1.0 + g.abs()) {
                violations += 1;
            }
        }
        energies.push(out.final_energy);
        if spec.keep_states {
            states.push(out.final_spins.clone());
        }
    }
    let spectrum: Option<&PlantedSpectrum> = ctx.inst.spectrum.as_ref();
    let measure = spectrum.and_then(|s| measure_bins(s, &energies, &spec.fractions).ok());
    let n = records.len();
    PointResult {
        coords: ctx.coords.clone(),
        alpha: ctx.cfg.alpha.value(usize::MAX),
        beta: ctx.cfg.beta.value(usize::MAX),
        dt: ctx.cfg.dt,
        max_steps: ctx.cfg.max_steps,
        lambda_max: ctx.lambda_max,
        e_min: spectrum.map(|s| s.e_min),
        e_max: spectrum.map(|s| s.e_max),
        ground_energy: ground,
        n_runs: n,
        hits,
        sr: hits as f64 / n as f64,
        converged,
        label_counts,
        oracle_violations: violations,
        measure,
        energies: spec.keep_energies.then_some(energies),
        states: spec.keep_states.then_some(states),
    }
}

/// Settings of a K sweep over orthogonal instances.
#[derive(Debug, Clone, PartialEq)]
pub struct KSweepSpec {
    pub n: usize,
    pub ks: Vec<usize>,
    pub dw: f64,
    pub instance_seed: u64,
    pub base_seed: u64,
    pub runs_per_k: usize,
    pub solver: SolverConfig,
    pub alpha_over_lambda: f64,
    pub dt_policy: DtPolicy,
    pub n_bins: usize,
    pub keep_states: bool,
}

impl KSweepSpec {
    /// Class I at `alpha = lambda_max / 2`, `dw = 0.001`, stable `dt` with
    /// up to 20000 steps.
    pub fn new(n: usize, ks: Vec<usize>, runs_per_k: usize, seed: u64) -> Self {
        Self {
            n,
            ks,
            dw: 0.001,
            instance_seed: seed,
            base_seed: seed,
            runs_per_k,
            solver: SolverConfig {
                max_steps: 20_000,
                ..SolverConfig::default()
            },
            alpha_over_lambda: 0.5,
            dt_policy: DtPolicy::Stable { c: 0.5, keep_time: false },
            n_bins: 64,
            keep_states: false,
        }
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        let mut s = SweepSpec::new(
            InstanceSource::Orthogonal {
                n: self.n,
                dw: self.dw,
                seed: self.instance_seed,
            },
            self.solver.clone(),
            vec![Axis::new(AxisKind::K, self.ks.iter().map(|&k| k as f64).collect())],
            self.runs_per_k,
            self.base_seed,
        );
        s.ground_truth = GroundTruth::LargestWeight;
        s.dt_policy = self.dt_policy;
        s.alpha_over_lambda = Some(self.alpha_over_lambda);
        s.keep_energies = true;
        s.keep_states = self.keep_states;
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KRecord {
    pub k: usize,
    pub point: PointResult,
    pub stats: Option<EnergyStats>,
    pub histogram: Option<HistogramReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSweepResult {
    pub sweep: SweepResult,
    pub records: Vec<KRecord>,
}

pub fn sweep_k(spec: &KSweepSpec) -> Result<KSweepResult> {
    let sweep = sweep_sr(&spec.sweep_spec())?;
    let records = sweep
        .points
        .iter()
        .zip(&spec.ks)
        .map(|(p, &k)| {
            let e = p.energies.as_deref().unwrap_or(&[]);
            let planted = match (p.e_min, p.e_max) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            };
            KRecord {
                k,
                point: p.clone(),
                stats: EnergyStats::of(e),
                histogram: histogram(e, spec.n_bins, planted).ok(),
            }
        })
        .collect();
    Ok(KSweepResult { sweep, records })
}

/// Moments of a sample of energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    /// Population skewness; zero for a constant sample.
    pub skewness: f64,
    /// Fraction of the sample within `mean +- 2 std`.
    pub within_2sigma: f64,
}

impl EnergyStats {
    pub fn of(e: &[f64]) -> Option<Self> {
        if e.is_empty() {
            return None;
        }
        let n = e.len() as f64;
        if e.iter().all(|&x| x == e[0]) {
            // Summation would leave rounding noise in the spread.
            return Some(Self { count: e.len(), mean: e[0], std: 0.0, skewness: 0.0, within_2sigma: 1.0 });
        }
        let mean = e.iter().sum::<f64>() / n;
        let m2 = e.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m3 = e.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        let std = m2.sqrt();
        let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
        let within = e.iter().filter(|&&x| (x - mean).abs() <= 2.0 * std).count() as f64 / n;
        Some(Self {
            count: e.len(),
            mean,
            std,
            skewness,
            within_2sigma: within,
        })
    }
}

/// Shift inside the logarithm of the plotted density.
pub const LOG_SHIFT: f64 = 0.00003;

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramReport {
    /// `n_bins + 1` edges over the found range.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Counts as fractions of the total, smoothed by a Gaussian kernel one
    /// bin wide.
    pub smoothed: Vec<f64>,
    /// `ln(smoothed + LOG_SHIFT)`.
    pub log_shifted: Vec<f64>,
    pub found_min: f64,
    pub found_max: f64,
    pub planted: Option<(f64, f64)>,
    /// True when every energy was equal and all mass sits in one bin.
    pub degenerate: bool,
}

impl HistogramReport {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn bin_width(&self) -> f64 {
        (self.found_max - self.found_min) / self.counts.len() as f64
    }

    /// Number of modes of the smoothed histogram: local maxima that hold at
    /// least 2% of the total and rise at least 25% above the deepest valley
    /// separating them from a higher peak.
    pub fn peak_count(&self) -> usize {
        if self.degenerate {
            return 1;
        }
        peaks(&self.smoothed).len()
    }
}

fn peaks(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let top = y.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for i in 0..n {
        let left = if i == 0 { f64::NEG_INFINITY } else { y[i - 1] };
        let right = if i + 1 == n { f64::NEG_INFINITY } else { y[i + 1] };
        // Plateaus count once, at their left end.
        if !(y[i] > left && y[i] >= right) || y[i] < 0.02 * top.max(f64::MIN_POSITIVE) {
            continue;
        }
        // Prominence: the higher of the valley floors separating this peak
        // from a higher one. Sides that reach the edge first do not count;
        // the global maximum is measured from the global minimum.
        let mut floor: Option<f64> = None;
        for dir in [-1isize, 1] {
            let mut j = i as isize + dir;
            let mut low = y[i];
            while j >= 0 && (j as usize) < n && y[j as usize] <= y[i] {
                low = low.min(y[j as usize]);
                j += dir;
            }
            if j >= 0 && (j as usize) < n {
                floor = Some(floor.map_or(low, |f: f64| f.max(low)));
            }
        }
        let floor = floor.unwrap_or_else(|| y.iter().copied().fold(f64::INFINITY, f64::min));
        let base = y[i] - floor;
        if base >= 0.25 * y[i] {
            out.push(i);
        }
    }
    out
}

/// Histogram of found energies over `[min, max]` of the sample.
pub fn histogram(energies: &[f64], n_bins: usize, planted: Option<(f64, f64)>) -> Result<HistogramReport> {
    if energies.is_empty() {
        return Err(Error::Validation("histogram of an empty sample".into()));
    }
    if n_bins == 0 {
        return Err(Error::Usage("histogram needs at least one bin".into()));
    }
    let lo = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total = energies.len() as f64;
    if !(hi > lo) {
        let frac = 1.0;
        return Ok(HistogramReport {
            edges: vec![lo, hi],
            counts: vec![energies.len()],
            smoothed: vec![frac],
            log_shifted: vec![(frac + LOG_SHIFT).ln()],
            found_min: lo,
            found_max: hi,
            planted,
            degenerate: true,
        });
    }
    let width = (hi - lo) / n_bins as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0usize; n_bins];
    for &e in energies {
        let b = (((e - lo) / width) as usize).min(n_bins - 1);
        counts[b] += 1;
    }
    let smoothed = smooth(&counts, total);
    let log_shifted = smoothed.iter().map(|v| (v + LOG_SHIFT).ln()).collect();
    Ok(HistogramReport {
        edges,
        counts,
        smoothed,
        log_shifted,
        found_min: lo,
        found_max: hi,
        planted,
        degenerate: false,
    })
}

/// Gaussian smoothing with sigma = 1 bin, truncated at 4 sigma and
/// renormalized at the edges so each input bin keeps its mass.
fn smooth(counts: &[usize], total: f64) -> Vec<f64> {
    let n = counts.len();
    let kernel: Vec<f64> = (-4i32..=4).map(|d| (-0.5 * (d * d) as f64).exp()).collect();
    let mut out = vec![0.0; n];
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut norm = 0.0;
        for (o, w) in (-4i32..=4).zip(&kernel) {
            let j = i as i32 + o;
            if j >= 0 && (j as usize) < n {
                norm += w;
            }
        }
        let mass = c as f64 / total;
        for (o, w) in (-4i32..=4).zip(&kernel) {
            let j = i as i32 + o;
            if j >= 0 && (j as usize) < n {
                out[j as usize] += mass * w / norm;
            }
        }
    }
    out
}

/// One cluster of found states between two valleys of the histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub e_lo: f64,
    pub e_hi: f64,
    /// Share of all runs in this cluster.
    pub measure: f64,
    /// Mean pairwise distance, each pair taken up to mirror symmetry.
    pub mean_hamming: f64,
}

/// Splits the found states at the minima between histogram modes.
pub fn clusters(report: &HistogramReport, energies: &[f64], states: &[Spins]) -> Vec<Cluster> {
    let pk = peaks(&report.smoothed);
    let mut cuts = vec![report.found_min];
    for w in pk.windows(2) {
        let (a, b) = (w[0], w[1]);
        let valley = (a..=b)
            .min_by(|&i, &j| report.smoothed[i].total_cmp(&report.smoothed[j]))
            .unwrap_or(a);
        cuts.push(report.edges[valley] + 0.5 * report.bin_width());
    }
    cuts.push(report.found_max);
    let total = energies.len() as f64;
    let mut out = Vec::new();
    for c in cuts.windows(2) {
        let (lo, hi) = (c[0], c[1]);
        let last = hi == report.found_max;
        let members: Vec<&Spins> = energies
            .iter()
            .zip(states)
            .filter(|(&e, _)| e >= lo && (e < hi || (last && e <= hi)))
            .map(|(_, s)| s)
            .collect();
        // Pairwise distances over at most 200 members keep this cheap.
        let sample: Vec<&Spins> = members.iter().take(200).copied().collect();
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for i in 0..sample.len() {
            for j in i + 1..sample.len() {
                let h = plantbench_core::hamming(sample[i], sample[j]);
                sum += h.min(sample[i].len() - h) as f64;
                pairs += 1;
            }
        }
        out.push(Cluster {
            e_lo: lo,
            e_hi: hi,
            measure: members.len() as f64 / total,
            mean_hamming: if pairs > 0 { sum / pairs as f64 } else { 0.0 },
        });
    }
    out
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn band_header(f: f64) -> String {
    format!("band_{f}")
}

/// CSV columns of a sweep: `point`, one `axis_<name>` per axis, then the
/// per-point statistics, label counts and measure bands.
pub fn sweep_csv(result: &SweepResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = vec!["point".into()];
    header.extend(result.axes.iter().map(|a| format!("axis_{}", a.kind.name())));
    header.extend(
        [
            "alpha", "beta", "dt", "max_steps", "lambda_max", "e_min", "e_max", "ground_energy", "runs", "hits", "sr",
            "converged",
        ]
        .map(String::from),
    );
    header.extend(LABEL_KINDS.iter().map(|s| s.to_string()));
    header.push("oracle_violations".into());
    header.extend(result.fractions.iter().map(|&f| band_header(f)));
    header.extend(["measure_below".to_string(), "measure_above".to_string()]);
    w.write_record(&header)?;
    for (i, p) in result.points.iter().enumerate() {
        let mut row: Vec<String> = vec![i.to_string()];
        row.extend(p.coords.iter().map(|c| format!("{c}")));
        row.extend([
            format!("{}", p.alpha),
            format!("{}", p.beta),
            format!("{}", p.dt),
            p.max_steps.to_string(),
            fmt_opt(p.lambda_max),
            fmt_opt(p.e_min),
            fmt_opt(p.e_max),
            fmt_opt(p.ground_energy),
            p.n_runs.to_string(),
            p.hits.to_string(),
            format!("{}", p.sr),
            p.converged.to_string(),
        ]);
        row.extend(p.label_counts.iter().map(|c| c.to_string()));
        row.push(p.oracle_violations.to_string());
        match &p.measure {
            Some(m) => {
                row.extend(m.counts.iter().map(|c| c.to_string()));
                row.extend([m.below.to_string(), m.above.to_string()]);
            }
            None => row.extend(std::iter::repeat_n(String::new(), result.fractions.len() + 2)),
        }
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Validation(e.to_string()))
}

/// Per-K summary: statistics, label counts and measure bands.
pub fn k_summary_csv(result: &KSweepResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = [
        "k", "lambda_max", "alpha", "dt", "max_steps", "runs", "e_min", "e_max", "mean", "std", "skewness",
        "within_2sigma", "hits", "converged", "peaks",
    ]
    .map(String::from)
    .to_vec();
    header.extend(LABEL_KINDS.iter().map(|s| s.to_string()));
    header.extend(result.sweep.fractions.iter().map(|&f| band_header(f)));
    header.extend(["measure_below".to_string(), "measure_above".to_string()]);
    w.write_record(&header)?;
    for r in &result.records {
        let p = &r.point;
        let mut row = vec![
            r.k.to_string(),
            fmt_opt(p.lambda_max),
            format!("{}", p.alpha),
            format!("{}", p.dt),
            p.max_steps.to_string(),
            p.n_runs.to_string(),
            fmt_opt(p.e_min),
            fmt_opt(p.e_max),
            fmt_opt(r.stats.map(|s| s.mean)),
            fmt_opt(r.stats.map(|s| s.std)),
            fmt_opt(r.stats.map(|s| s.skewness)),
            fmt_opt(r.stats.map(|s| s.within_2sigma)),
            p.hits.to_string(),
            p.converged.to_string(),
            r.histogram.as_ref().map(|h| h.peak_count().to_string()).unwrap_or_default(),
        ];
        row.extend(p.label_counts.iter().map(|c| c.to_string()));
        match &p.measure {
            Some(m) => {
                row.extend(m.counts.iter().map(|c| c.to_string()));
                row.extend([m.below.to_string(), m.above.to_string()]);
            }
            None => row.extend(std::iter::repeat_n(String::new(), result.sweep.fractions.len() + 2)),
        }
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Validation(e.to_string()))
}

/// Long-format histograms: one row per `(k, bin)`.
pub fn k_histogram_csv(result: &KSweepResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "bin", "lo", "hi", "count", "smoothed", "log_shifted", "e_min", "e_max"])?;
    for r in &result.records {
        let Some(h) = &r.histogram else { continue };
        let (pmin, pmax) = h.planted.map_or((None, None), |(a, b)| (Some(a), Some(b)));
        for b in 0..h.counts.len() {
            w.write_record([
                r.k.to_string(),
                b.to_string(),
                format!("{}", h.edges[b]),
                format!("{}", h.edges[b + 1]),
                h.counts[b].to_string(),
                format!("{}", h.smoothed[b]),
                format!("{}", h.log_shifted[b]),
                fmt_opt(pmin),
                fmt_opt(pmax),
            ])?;
        }
    }
    w.into_inner().map_err(|e| Error::Validation(e.to_string()))
}

/// Metadata written next to sweep outputs.
#[derive(Debug, Serialize)]
pub struct SweepMeta<'a> {
    pub tool: &'a str,
    pub version: &'a str,
    pub spec_hash: &'a str,
    pub base_seed: String,
    pub runs_per_point: usize,
    pub points: usize,
    pub axes: Vec<String>,
    pub threads: usize,
    pub wall_time_s: f64,
    pub seed_rule: &'a str,
}

pub fn sweep_meta(result: &SweepResult) -> Result<String> {
    let meta = SweepMeta {
        tool: "plantbench",
        version: env!("CARGO_PKG_VERSION"),
        spec_hash: &result.spec_hash,
        base_seed: result.base_seed.to_string(),
        runs_per_point: result.runs_per_point,
        points: result.points.len(),
        axes: result
            .axes
            .iter()
            .map(|a| format!("{} ({} values)", a.kind.name(), a.values.len()))
            .collect(),
        threads: result.threads,
        wall_time_s: result.wall_time_s,
        seed_rule: "run seed = splitmix64 chain of (base_seed, point, run)",
    };
    toml::to_string(&meta).map_err(|e| Error::Validation(e.to_string()))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
