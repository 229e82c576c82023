//! Continuous relaxation solvers.
//!
//! First-order dynamics (classes I and II):
//! `dx/dt = -alpha x + beta J phi(x)`.
//! Second-order dynamics (class III):
//! `d2x/dt2 = gamma dx/dt - alpha x + beta J phi(x)`; negative `gamma` damps.
//! The bifurcation machine is class III with `alpha = delta (delta - p)`,
//! `beta = delta xi0`, `gamma = 0` and a sign nonlinearity.
//!
//! All runs are fixed-step and deterministic. The final state is `sign(x)`
//! with `sign(0) = +1`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::energy::{coupling_energy, ClassifyOptions, Classifier, OutcomeLabel};
use crate::instance::Instance;
use crate::{seed, spin_of, Error, Result, Spins};

/// A coefficient as a function of the step index.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant(f64),
    /// Linear from `from` at step 0 to `to` at `over_steps`, constant after.
    Ramp { from: f64, to: f64, over_steps: usize },
    /// Explicit per-step values; the last one holds afterwards.
    Table(Vec<f64>),
}

impl Schedule {
    #[inline]
    pub fn value(&self, step: usize) -> f64 {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::Ramp { from, to, over_steps } => {
                if step >= *over_steps {
                    *to
                } else {
                    from + (to - from) * (step as f64 / *over_steps as f64)
                }
            }
            Schedule::Table(t) => t[step.min(t.len() - 1)],
        }
    }

    /// True once the value no longer changes.
    #[inline]
    pub fn settled(&self, step: usize) -> bool {
        match self {
            Schedule::Constant(_) => true,
            Schedule::Ramp { over_steps, .. } => step >= *over_steps,
            Schedule::Table(t) => step + 1 >= t.len(),
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Schedule::Constant(v) => Some(*v),
            _ => None,
        }
    }

    /// Multiplies every value by `c`.
    pub fn scaled(&self, c: f64) -> Schedule {
        match self {
            Schedule::Constant(v) => Schedule::Constant(v * c),
            Schedule::Ramp { from, to, over_steps } => Schedule::Ramp {
                from: from * c,
                to: to * c,
                over_steps: *over_steps,
            },
            Schedule::Table(t) => Schedule::Table(t.iter().map(|v| v * c).collect()),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = match self {
            Schedule::Constant(v) => v.is_finite(),
            Schedule::Ramp { from, to, over_steps } => from.is_finite() && to.is_finite() && *over_steps > 0,
            Schedule::Table(t) => !t.is_empty() && t.iter().all(|v| v.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!("schedule `{name}` is empty or non-finite")))
        }
    }
}

impl From<f64> for Schedule {
    fn from(v: f64) -> Self {
        Schedule::Constant(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DynamicsClass {
    #[default]
    I,
    II,
    III,
    Tbm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Nonlinearity {
    #[default]
    Tanh,
    /// `sign(x)` with `sign(0) = +1`.
    Sign,
    /// `x` clipped to `[-1, 1]`.
    IdentityClip,
}

impl Nonlinearity {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Nonlinearity::Tanh => libm::tanh(x),
            Nonlinearity::Sign => {
                if x < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
            Nonlinearity::IdentityClip => x.clamp(-1.0, 1.0),
        }
    }
}

/// Update order of the second-order integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `x' = x + dt v`, `v' = v + dt a(x)`, both from the old state.
    #[default]
    ForwardEuler,
    /// `v' = v + dt a(x)`, then `x' = x + dt v'`.
    SymplecticEuler,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TbmParams {
    pub delta: f64,
    pub xi0: f64,
    /// Pump `p(step)`, by default `min(2 step / N_t, 2)` with `N_t = 1000`.
    pub p: Schedule,
}

impl Default for TbmParams {
    fn default() -> Self {
        Self {
            delta: 1.0,
            xi0: 1.0,
            p: Schedule::Ramp {
                from: 0.0,
                to: 2.0,
                over_steps: 1000,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub class: DynamicsClass,
    pub alpha: Schedule,
    pub beta: Schedule,
    pub gamma: Schedule,
    pub tbm: TbmParams,
    pub nonlinearity: Nonlinearity,
    /// Half-width of the box outside which positions are clamped and
    /// velocities zeroed (second-order classes only).
    pub window: Option<f64>,
    pub dt: f64,
    pub max_steps: usize,
    /// A run is steady when `max |dx| < steady_tol * dt` after every
    /// schedule has settled (second-order classes also require
    /// `max |dv| < steady_tol * dt`).
    pub steady_tol: f64,
    pub init_amplitude: f64,
    pub seed: u64,
    pub scheme: Scheme,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            class: DynamicsClass::I,
            alpha: Schedule::Constant(1.0),
            beta: Schedule::Constant(1.0),
            gamma: Schedule::Constant(0.0),
            tbm: TbmParams::default(),
            nonlinearity: Nonlinearity::Tanh,
            window: None,
            dt: 0.1,
            max_steps: 1000,
            steady_tol: 1e-9,
            init_amplitude: 0.5,
            seed: 0,
            scheme: Scheme::ForwardEuler,
        }
    }
}

impl SolverConfig {
    /// Class I with constant `alpha` and `beta`.
    pub fn class1(alpha: f64, beta: f64) -> Self {
        Self {
            alpha: alpha.into(),
            beta: beta.into(),
            ..Self::default()
        }
    }

    /// Bifurcation machine with a sign nonlinearity, window 1 and the pump
    /// ramping over `max_steps`.
    pub fn tbm(delta: f64, xi0: f64) -> Self {
        Self {
            class: DynamicsClass::Tbm,
            tbm: TbmParams {
                delta,
                xi0,
                ..TbmParams::default()
            },
            nonlinearity: Nonlinearity::Sign,
            window: Some(1.0),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter("dt must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter("max_steps must be at least 1".into()));
        }
        if !(self.steady_tol >= 0.0) {
            return Err(Error::InvalidParameter("steady_tol must be non-negative".into()));
        }
        if !(self.init_amplitude > 0.0 && self.init_amplitude.is_finite()) {
            return Err(Error::InvalidParameter("init_amplitude must be positive".into()));
        }
        if let Some(w) = self.window {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter("derivative window must be positive".into()));
            }
        }
        self.alpha.validate("alpha")?;
        self.beta.validate("beta")?;
        self.gamma.validate("gamma")?;
        if self.class == DynamicsClass::Tbm {
            self.tbm.p.validate("p")?;
            if !(self.tbm.delta > 0.0 && self.tbm.xi0 > 0.0) {
                return Err(Error::InvalidParameter("delta and xi0 must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub final_spins: Spins,
    pub final_x: Vec<f64>,
    pub final_energy: f64,
    pub steps_used: usize,
    pub converged: bool,
    /// Present when the instance carries planted patterns.
    pub label: Option<OutcomeLabel>,
    pub seed: u64,
}

/// Positions above this magnitude abort a run.
pub const DIVERGENCE_BOUND: f64 = 1e6;

/// `n` independent uniform draws from `[-a, a]`.
pub fn random_initial(n: usize, a: f64, seed: u64) -> Result<Vec<f64>> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter("initial amplitude must be positive".into()));
    }
    let mut rng = seed::rng(seed);
    Ok((0..n).map(|_| rng.random_range(-a..=a)).collect())
}

/// Called after every step with the step count so far and the positions.
pub type Observer<'a> = &'a mut dyn FnMut(usize, &[f64]);

/// A solver bound to one instance, with its classifier built once.
#[derive(Debug, Clone)]
pub struct Solver<'a> {
    inst: &'a Instance,
    cfg: SolverConfig,
    classifier: Option<Classifier>,
}

impl<'a> Solver<'a> {
    pub fn new(inst: &'a Instance, cfg: SolverConfig) -> Result<Self> {
        Self::with_classifier_options(inst, cfg, ClassifyOptions::default())
    }

    pub fn with_classifier_options(inst: &'a Instance, cfg: SolverConfig, opts: ClassifyOptions) -> Result<Self> {
        cfg.validate()?;
        let classifier = Classifier::for_instance(inst, opts)?;
        Ok(Self { inst, cfg, classifier })
    }

    /// Skips classification; outcomes carry no label.
    pub fn unlabeled(inst: &'a Instance, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            inst,
            cfg,
            classifier: None,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn classifier(&self) -> Option<&Classifier> {
        self.classifier.as_ref()
    }

    /// One run from `random_initial(n, init_amplitude, seed)` with zero
    /// initial velocity.
    pub fn solve(&self, seed: u64) -> Result<RunOutcome> {
        let x0 = random_initial(self.inst.n, self.cfg.init_amplitude, seed)?;
        let mut out = self.run(&x0, None, None)?;
        out.seed = seed;
        Ok(out)
    }

    /// Runs the configured class from `x0` (and `v0` for second-order
    /// classes, zero if absent).
    pub fn run(&self, x0: &[f64], v0: Option<&[f64]>, observer: Option<Observer<'_>>) -> Result<RunOutcome> {
        let n = self.inst.n;
        check_vec(x0, n)?;
        if let Some(v) = v0 {
            check_vec(v, n)?;
        }
        let cfg = &self.cfg;
        let (x, steps, converged) = match cfg.class {
            DynamicsClass::I | DynamicsClass::II => {
                let coeffs = |s: usize| (cfg.alpha.value(s), cfg.beta.value(s), 0.0);
                let settled = |s: usize| cfg.alpha.settled(s) && cfg.beta.settled(s);
                self.first_order(x0, coeffs, settled, observer)?
            }
            DynamicsClass::III => {
                let coeffs = |s: usize| (cfg.alpha.value(s), cfg.beta.value(s), cfg.gamma.value(s));
                let settled = |s: usize| cfg.alpha.settled(s) && cfg.beta.settled(s) && cfg.gamma.settled(s);
                self.second_order(x0, v0, coeffs, settled, observer)?
            }
            DynamicsClass::Tbm => {
                let t = &cfg.tbm;
                let beta = t.delta * t.xi0;
                let coeffs = |s: usize| (t.delta * (t.delta - t.p.value(s)), beta, 0.0);
                let settled = |s: usize| t.p.settled(s);
                self.second_order(x0, v0, coeffs, settled, observer)?
            }
        };
        let final_spins: Spins = x.iter().map(|&v| spin_of(v)).collect();
        let final_energy = coupling_energy(&self.inst.coupling, &final_spins);
        let label = self.classifier.as_ref().map(|c| c.classify(&final_spins, final_energy));
        Ok(RunOutcome {
            final_spins,
            final_x: x,
            final_energy,
            steps_used: steps,
            converged,
            label,
            seed: cfg.seed,
        })
    }

    fn first_order(
        &self,
        x0: &[f64],
        coeffs: impl Fn(usize) -> (f64, f64, f64),
        settled: impl Fn(usize) -> bool,
        mut observer: Option<Observer<'_>>,
    ) -> Result<(Vec<f64>, usize, bool)> {
        let n = self.inst.n;
        let cfg = &self.cfg;
        let dt = cfg.dt;
        let nl = cfg.nonlinearity;
        let mut x = x0.to_vec();
        let mut phi = vec![0.0; n];
        let mut h = vec![0.0; n];
        let threshold = cfg.steady_tol * dt;
        for step in 0..cfg.max_steps {
            let (a, b, _) = coeffs(step);
            for (p, &xi) in phi.iter_mut().zip(&x) {
                *p = nl.apply(xi);
            }
            self.inst.coupling.apply(&phi, &mut h);
            let mut max_dx = 0.0f64;
            let mut finite = true;
            let mut max_abs = 0.0f64;
            for (xi, &hi) in x.iter_mut().zip(&h) {
                let xn = *xi + dt * (-a * *xi + b * hi);
                finite &= xn.is_finite();
                max_dx = max_dx.max((xn - *xi).abs());
                max_abs = max_abs.max(xn.abs());
                *xi = xn;
            }
            if let Some(obs) = observer.as_mut() {
                obs(step + 1, &x);
            }
            if !finite || max_abs > DIVERGENCE_BOUND {
                return Err(Error::Diverged { step: step + 1 });
            }
            if max_dx < threshold && settled(step) {
                return Ok((x, step + 1, true));
            }
        }
        Ok((x, cfg.max_steps, false))
    }

    fn second_order(
        &self,
        x0: &[f64],
        v0: Option<&[f64]>,
        coeffs: impl Fn(usize) -> (f64, f64, f64),
        settled: impl Fn(usize) -> bool,
        mut observer: Option<Observer<'_>>,
    ) -> Result<(Vec<f64>, usize, bool)> {
        let n = self.inst.n;
        let cfg = &self.cfg;
        let dt = cfg.dt;
        let nl = cfg.nonlinearity;
        let window = cfg.window;
        let mut x = x0.to_vec();
        let mut v = v0.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; n]);
        let mut phi = vec![0.0; n];
        let mut h = vec![0.0; n];
        let threshold = cfg.steady_tol * dt;
        for step in 0..cfg.max_steps {
            let (a, b, g) = coeffs(step);
            for (p, &xi) in phi.iter_mut().zip(&x) {
                *p = nl.apply(xi);
            }
            self.inst.coupling.apply(&phi, &mut h);
            let mut max_dx = 0.0f64;
            let mut finite = true;
            let mut max_abs = 0.0f64;
            for i in 0..n {
                let acc = g * v[i] - a * x[i] + b * h[i];
                let (mut xn, mut vn) = match cfg.scheme {
                    Scheme::ForwardEuler => (x[i] + dt * v[i], v[i] + dt * acc),
                    Scheme::SymplecticEuler => {
                        let vn = v[i] + dt * acc;
                        (x[i] + dt * vn, vn)
                    }
                };
                if let Some(w) = window {
                    if xn.abs() > w {
                        xn = if xn < 0.0 { -w } else { w };
                        vn = 0.0;
                    }
                }
                finite &= xn.is_finite() && vn.is_finite();
                // A still start has dx = 0 on its first forward step, so the
                // velocity change counts toward steadiness too.
                max_dx = max_dx.max((xn - x[i]).abs()).max((vn - v[i]).abs());
                max_abs = max_abs.max(xn.abs());
                x[i] = xn;
                v[i] = vn;
            }
            if let Some(obs) = observer.as_mut() {
                obs(step + 1, &x);
            }
            if !finite || max_abs > DIVERGENCE_BOUND {
                return Err(Error::Diverged { step: step + 1 });
            }
            if max_dx < threshold && settled(step) {
                return Ok((x, step + 1, true));
            }
        }
        Ok((x, cfg.max_steps, false))
    }
}

fn check_vec(v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("initial state must be finite".into()));
    }
    Ok(())
}

fn with_class(cfg: &SolverConfig, class: DynamicsClass) -> SolverConfig {
    let mut c = cfg.clone();
    c.class = class;
    c
}

/// Class I: constant `alpha` and `beta`.
pub fn run_class1(inst: &Instance, cfg: &SolverConfig, x0: &[f64]) -> Result<RunOutcome> {
    if cfg.alpha.constant().is_none() || cfg.beta.constant().is_none() {
        return Err(Error::InvalidParameter("class I needs constant alpha and beta".into()));
    }
    Solver::new(inst, with_class(cfg, DynamicsClass::I))?.run(x0, None, None)
}

/// Class II: `alpha` and `beta` follow their schedules.
pub fn run_class2(inst: &Instance, cfg: &SolverConfig, x0: &[f64]) -> Result<RunOutcome> {
    Solver::new(inst, with_class(cfg, DynamicsClass::II))?.run(x0, None, None)
}

/// Class III: second order with signed `gamma`.
pub fn run_class3(inst: &Instance, cfg: &SolverConfig, x0: &[f64], v0: Option<&[f64]>) -> Result<RunOutcome> {
    Solver::new(inst, with_class(cfg, DynamicsClass::III))?.run(x0, v0, None)
}

/// Bifurcation machine with the pump schedule in `cfg.tbm`.
pub fn run_tbm(inst: &Instance, cfg: &SolverConfig, x0: &[f64], v0: Option<&[f64]>) -> Result<RunOutcome> {
    Solver::new(inst, with_class(cfg, DynamicsClass::Tbm))?.run(x0, v0, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_small_scale, CatalogueId, Coupling, EWeighting};

    fn zero(n: usize) -> Instance {
        Instance::external(Coupling::zeros(n), "zero")
    }

    fn pair() -> Instance {
        Instance::external(Coupling::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(), "pair")
    }

    #[test]
    fn pure_decay_ends_in_all_plus() {
        let mut cfg = SolverConfig::class1(1.0, 1.0);
        cfg.max_steps = 100_000;
        let out = run_class1(&zero(4), &cfg, &[0.3, -0.2, 0.1, -0.4]).unwrap();
        assert!(out.converged);
        assert!(out.final_x.iter().all(|x| x.abs() < 1e-6));
        // x decays geometrically but never reaches exact zero, so signs are
        // kept; only exact zeros map to +1.
        assert_eq!(out.final_spins, vec![1, -1, 1, -1]);
        let out = run_class1(&zero(3), &cfg, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(out.final_spins, vec![1, 1, 1]);
        assert_eq!(out.steps_used, 1);
    }

    #[test]
    fn two_spin_fixed_point() {
        let mut cfg = SolverConfig::class1(0.5, 1.0);
        cfg.max_steps = 100_000;
        let out = run_class1(&pair(), &cfg, &[0.3, 0.3]).unwrap();
        assert!(out.converged);
        assert_eq!(out.final_spins, vec![1, 1]);
        assert_eq!(out.final_energy, -1.0);
        // Fixed point solves 0.5 x = tanh(x).
        let x = out.final_x[0];
        assert!((0.5 * x - libm::tanh(x)).abs() < 1e-6);
        assert!((x - 1.915_008_048_9).abs() < 1e-6);
    }

    #[test]
    fn constant_schedules_reproduce_class1() {
        let inst = generate_small_scale(CatalogueId::A, EWeighting::default());
        let cfg = SolverConfig::class1(3.0, 1.0);
        let x0 = random_initial(8, 0.5, 9).unwrap();
        assert_eq!(run_class1(&inst, &cfg, &x0).unwrap(), run_class2(&inst, &cfg, &x0).unwrap());
    }

    #[test]
    fn zero_field_freezes_the_state() {
        let mut cfg = SolverConfig::class1(0.0, 1.0);
        cfg.max_steps = 10;
        let x0 = [0.2, -0.1, 0.05];
        let out = run_class2(&zero(3), &cfg, &x0).unwrap();
        assert_eq!(out.final_x, x0.to_vec());
        assert!(out.converged);
    }

    #[test]
    fn damped_oscillator_decays() {
        let cfg = SolverConfig {
            alpha: 1.0.into(),
            beta: 0.0.into(),
            gamma: (-1.0).into(),
            max_steps: 20_000,
            ..SolverConfig::default()
        };
        let out = run_class3(&zero(2), &cfg, &[0.4, -0.3], None).unwrap();
        assert!(out.converged);
        assert!(out.final_x.iter().all(|x| x.abs() < 1e-6));
    }

    #[test]
    fn undamped_oscillator_never_settles() {
        let cfg = SolverConfig {
            alpha: 1.0.into(),
            beta: 0.0.into(),
            gamma: 0.0.into(),
            max_steps: 5000,
            scheme: Scheme::SymplecticEuler,
            ..SolverConfig::default()
        };
        let out = run_class3(&zero(1), &cfg, &[0.5], None).unwrap();
        assert!(!out.converged);
        assert_eq!(out.steps_used, 5000);
    }

    #[test]
    fn class3_mapping_reproduces_tbm() {
        let inst = generate_small_scale(CatalogueId::C, EWeighting::default());
        let (delta, xi0) = (4.25, 0.7);
        let tbm = SolverConfig::tbm(delta, xi0);
        let table = (0..=tbm.max_steps).map(|s| delta * (delta - tbm.tbm.p.value(s))).collect();
        let c3 = SolverConfig {
            alpha: Schedule::Table(table),
            beta: (delta * xi0).into(),
            gamma: 0.0.into(),
            ..tbm.clone()
        };
        for scheme in [Scheme::ForwardEuler, Scheme::SymplecticEuler] {
            let (mut a, mut b) = (tbm.clone(), c3.clone());
            a.scheme = scheme;
            b.scheme = scheme;
            let x0 = random_initial(8, 0.5, 3).unwrap();
            let (mut ta, mut tb) = (Vec::new(), Vec::new());
            Solver::new(&inst, a).unwrap().run(&x0, None, Some(&mut |_, x: &[f64]| ta.push(x.to_vec()))).unwrap();
            let mut b = b;
            b.class = DynamicsClass::III;
            Solver::new(&inst, b).unwrap().run(&x0, None, Some(&mut |_, x: &[f64]| tb.push(x.to_vec()))).unwrap();
            assert_eq!(ta, tb);
        }
    }

    #[test]
    fn uncoupled_bifurcation_keeps_signs() {
        // Small delta: the pump passes delta before the restoring phase can
        // swing x through zero.
        let cfg = SolverConfig::tbm(0.1, 1.0);
        let out = run_tbm(&zero(5), &cfg, &[0.1; 5], None).unwrap();
        assert_eq!(out.final_spins, vec![1; 5]);
        assert!(out.final_x.iter().all(|&x| x > 0.0 && x <= 1.0));
    }

    #[test]
    fn window_clamps_positions() {
        let inst = generate_small_scale(CatalogueId::C, EWeighting::default());
        let mut cfg = SolverConfig::tbm(4.0, 1.0);
        cfg.window = Some(0.5);
        let mut max = 0.0f64;
        Solver::new(&inst, cfg)
            .unwrap()
            .run(&[0.1; 8], None, Some(&mut |_, x: &[f64]| max = x.iter().fold(max, |m, v| m.max(v.abs()))))
            .unwrap();
        assert!(max <= 0.5);
    }

    #[test]
    fn divergence_is_reported() {
        let cfg = SolverConfig::class1(-5.0, 0.0);
        let err = run_class1(&zero(2), &cfg, &[0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
    }

    #[test]
    fn random_initial_bounds_and_determinism() {
        let a = random_initial(1000, 0.5, 42).unwrap();
        assert!(a.iter().all(|x| x.abs() <= 0.5));
        assert_eq!(a, random_initial(1000, 0.5, 42).unwrap());
        assert_ne!(a, random_initial(1000, 0.5, 43).unwrap());
        assert!(random_initial(3, 0.0, 1).is_err());
    }

    #[test]
    fn random_initial_mean_is_zero() {
        let n = 100_000;
        let a = 0.5;
        let x = random_initial(n, a, 7).unwrap();
        let mean: f64 = x.iter().sum::<f64>() / n as f64;
        let sigma = a / 3f64.sqrt();
        assert!(mean.abs() < 3.0 * sigma / (n as f64).sqrt());
    }

    #[test]
    fn ramp_schedule_values() {
        let s = Schedule::Ramp {
            from: 0.0,
            to: 2.0,
            over_steps: 1000,
        };
        assert_eq!(s.value(0), 0.0);
        assert_eq!(s.value(500), 1.0);
        assert_eq!(s.value(1000), 2.0);
        assert_eq!(s.value(5000), 2.0);
        assert!(!s.settled(999));
        assert!(s.settled(1000));
        let t = Schedule::Table(vec![1.0, 2.0]);
        assert_eq!(t.value(7), 2.0);
        assert!(t.settled(1));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        cfg.dt = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SolverConfig::default();
        cfg.max_steps = 0;
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig {
            alpha: Schedule::Ramp {
                from: 0.0,
                to: 1.0,
                over_steps: 10,
            },
            ..SolverConfig::default()
        };
        assert!(run_class1(&zero(2), &cfg, &[0.1, 0.1]).is_err());
        assert!(run_class1(&zero(2), &SolverConfig::default(), &[0.1]).is_err());
    }
}
