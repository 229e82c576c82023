//! Exact enumeration for small instances and dominant-eigenvalue estimates.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::energy::coupling_energy;
use crate::instance::{Coupling, Instance};
use crate::{linalg, seed, Error, Result, Spins};

/// Largest `N` accepted by [`brute_force`].
pub const ENUMERATION_CAP: usize = 24;
/// Largest `N` for which the full energy multiset is kept.
pub const SPECTRUM_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// A minimizing state with `x_1 = +1`.
    pub ground_state: Spins,
    /// Every minimizing state with `x_1 = +1`, in enumeration order.
    pub ground_states: Vec<Spins>,
    pub ground_energy: f64,
    /// Sorted energies of the `2^(N-1)` states with `x_1 = +1`.
    pub energy_multiset: Option<Vec<f64>>,
    /// Number of minimizing states over all `2^N` states (always even).
    pub degeneracy: usize,
}

impl SpectrumReport {
    /// True when `x` or its mirror is a ground state.
    pub fn is_ground(&self, x: &[i8]) -> bool {
        let flip = x.first().is_some_and(|&s| s < 0);
        self.ground_states
            .iter()
            .any(|g| g.iter().zip(x).all(|(&a, &b)| if flip { a == -b } else { a == b }))
    }
}

fn state_of(bits: u32, n: usize) -> Spins {
    (0..n)
        .map(|i| if i > 0 && bits >> (i - 1) & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// Exhaustive minimum over all states with `x_1 = +1` by Gray-code
/// enumeration with incremental local fields. Candidate minima are
/// re-evaluated directly, and states within `1e-9 (1 + |E|)` of the minimum
/// count as degenerate.
pub fn brute_force(inst: &Instance, full_spectrum: bool) -> Result<SpectrumReport> {
    let n = inst.n;
    if n > ENUMERATION_CAP {
        return Err(Error::TooLarge { n, cap: ENUMERATION_CAP });
    }
    if full_spectrum && n > SPECTRUM_CAP {
        return Err(Error::TooLarge { n, cap: SPECTRUM_CAP });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty instance".into()));
    }
    let j = &inst.coupling;
    let free = n - 1;
    let total: u64 = 1 << free;

    let mut x = vec![1.0f64; n];
    let mut h: Vec<f64> = (0..n).map(|i| j.row(i).iter().sum()).collect();
    let mut e = coupling_energy(j, &vec![1i8; n]);
    let mut bits: u32 = 0;

    let mut multiset = if full_spectrum { Some(Vec::with_capacity(total as usize)) } else { None };
    // Candidates within a loose window of the running minimum; the window
    // absorbs drift of the incremental energy.
    let slack = |e: f64| 1e-7 * (1.0 + e.abs());
    let mut best = e;
    let mut candidates: Vec<(u32, f64)> = vec![(0, e)];

    for step in 1..total {
        if let Some(m) = multiset.as_mut() {
            m.push(e);
        }
        let k = step.trailing_zeros() as usize + 1;
        let xk = x[k];
        e += 2.0 * xk * h[k];
        let row = j.row(k);
        for (hi, &jik) in h.iter_mut().zip(row) {
            *hi -= 2.0 * jik * xk;
        }
        x[k] = -xk;
        bits ^= 1 << (k - 1);
        if e < best - slack(best) {
            best = e;
            candidates.retain(|&(_, ce)| ce <= best + slack(best));
        }
        if e <= best + slack(best) {
            best = best.min(e);
            candidates.push((bits, e));
        }
    }
    if let Some(m) = multiset.as_mut() {
        m.push(e);
    }

    let exact: Vec<(Spins, f64)> = candidates
        .iter()
        .map(|&(b, _)| {
            let s = state_of(b, n);
            let ex = coupling_energy(j, &s);
            (s, ex)
        })
        .collect();
    let ground_energy = exact.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * (1.0 + ground_energy.abs());
    let ground_states: Vec<Spins> = exact
        .into_iter()
        .filter(|(_, ex)| *ex <= ground_energy + tol)
        .map(|(s, _)| s)
        .collect();
    let energy_multiset = multiset.map(|mut m| {
        m.sort_by(f64::total_cmp);
        m
    });
    Ok(SpectrumReport {
        ground_state: ground_states[0].clone(),
        degeneracy: 2 * ground_states.len(),
        ground_states,
        ground_energy,
        energy_multiset,
    })
}

/// Default relative tolerance for eigenvalue estimates.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;
const ITERATION_CAP: usize = 100_000;
const START_SEED: u64 = 0x5EED;

/// Result of a power-iteration run.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantEigen {
    pub value: f64,
    /// Unit-norm eigenvector estimate.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `||J v - value v||`.
    pub residual: f64,
    /// Diagonal shift that was applied during iteration.
    pub shift: f64,
    /// Seed of the start vector.
    pub start_seed: u64,
}

enum Power {
    Converged(DominantEigen),
    Stalled,
}

/// Power iteration on `scale * J + shift * I`. The returned value is the
/// Rayleigh quotient of that shifted operator.
fn power(j: &Coupling, scale: f64, shift: f64, tol: f64, start_seed: u64) -> Result<Power> {
    let n = j.n();
    let mut rng = seed::rng(start_seed);
    let mut v: Vec<f64> = (0..n).map(|_| 1.0 + 0.25 * (rng.random::<f64>() - 0.5)).collect();
    let nv = linalg::norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut w = vec![0.0; n];
    let mut rho_prev = f64::NAN;
    let mut best = f64::INFINITY;
    let mut flat_windows = 0;
    let mut window_best = f64::INFINITY;
    let mut window_rho = f64::NAN;
    let mut residual = f64::INFINITY;
    for it in 1..=ITERATION_CAP {
        j.apply(&v, &mut w);
        for (wi, &vi) in w.iter_mut().zip(&v) {
            *wi = scale * *wi + shift * vi;
        }
        let rho = linalg::dot(&v, &w);
        let mut r2 = 0.0;
        for (&wi, &vi) in w.iter().zip(&v) {
            let d = wi - rho * vi;
            r2 += d * d;
        }
        residual = libm::sqrt(r2);
        let nw = linalg::norm(&w);
        if nw == 0.0 {
            return Ok(Power::Converged(DominantEigen {
                value: 0.0,
                vector: v,
                iterations: it,
                residual: 0.0,
                shift,
                start_seed,
            }));
        }
        let scale_ref = rho.abs().max(f64::MIN_POSITIVE);
        // The Rayleigh quotient error is about residual^2 / gap, so the
        // residual bound is tighter than sqrt(tol) to cover small gaps.
        if residual <= libm::pow(tol, 0.7) * scale_ref && (rho - rho_prev).abs() <= tol * scale_ref {
            return Ok(Power::Converged(DominantEigen {
                value: rho,
                vector: v,
                iterations: it,
                residual,
                shift,
                start_seed,
            }));
        }
        rho_prev = rho;
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
        window_best = window_best.min(residual);
        if it % 1000 == 0 {
            // Stalled means the residual stopped falling for three windows
            // in a row while the quotient stood still, as with two
            // eigenvalues of equal magnitude and opposite sign. A start
            // vector dominated by the runner-up of a close cluster also
            // raises the residual for a while, but the quotient keeps moving.
            if window_best < 0.999 * best {
                best = window_best;
                flat_windows = 0;
            } else if (rho - window_rho).abs() <= libm::sqrt(tol) * scale_ref {
                flat_windows += 1;
            } else {
                flat_windows = 0;
            }
            if flat_windows >= 3 {
                // Converged as far as rounding allows counts as converged.
                if residual <= libm::sqrt(tol) * scale_ref && (rho - window_rho).abs() <= tol * scale_ref {
                    return Ok(Power::Converged(DominantEigen {
                        value: rho,
                        vector: v,
                        iterations: it,
                        residual,
                        shift,
                        start_seed,
                    }));
                }
                return Ok(Power::Stalled);
            }
            window_rho = rho;
            window_best = f64::INFINITY;
        }
    }
    Err(Error::NoConvergence {
        iterations: ITERATION_CAP,
        residual,
    })
}

/// Largest algebraic eigenvalue of `scale * J` with its eigenvector.
///
/// Plain power iteration runs first. If it settles on a negative eigenvalue
/// the operator is shifted by that magnitude and iterated again; if it
/// stalls (two eigenvalues of equal magnitude and opposite sign) the shift
/// is the Gershgorin bound instead.
fn top_eigen(j: &Coupling, scale: f64, tol: f64) -> Result<DominantEigen> {
    let shifted = |shift: f64| -> Result<DominantEigen> {
        match power(j, scale, shift, tol, START_SEED)? {
            Power::Converged(mut d) => {
                d.value -= shift;
                d.residual = residual_of(j, scale, &d.vector, d.value);
                Ok(d)
            }
            Power::Stalled => match power(j, scale, shift, tol, seed::mix64(START_SEED))? {
                Power::Converged(mut d) => {
                    d.value -= shift;
                    Ok(d)
                }
                Power::Stalled => Err(Error::NoConvergence {
                    iterations: ITERATION_CAP,
                    residual: f64::NAN,
                }),
            },
        }
    };
    match power(j, scale, 0.0, tol, START_SEED)? {
        Power::Converged(d) if d.value >= 0.0 => Ok(d),
        Power::Converged(d) => shifted(-d.value),
        Power::Stalled => shifted(j.gershgorin_bound()),
    }
}

fn residual_of(j: &Coupling, scale: f64, v: &[f64], value: f64) -> f64 {
    let mut w = vec![0.0; v.len()];
    j.apply(v, &mut w);
    let mut r2 = 0.0;
    for (&wi, &vi) in w.iter().zip(v) {
        let d = scale * wi - value * vi;
        r2 += d * d;
    }
    libm::sqrt(r2)
}

/// Largest eigenvalue and its eigenvector.
pub fn dominant_eigenpair(inst: &Instance, tol: f64) -> Result<DominantEigen> {
    check_tol(tol)?;
    top_eigen(&inst.coupling, 1.0, tol)
}

/// Largest eigenvalue `lambda_max` of the coupling matrix.
pub fn max_eigenvalue(inst: &Instance, tol: f64) -> Result<f64> {
    dominant_eigenpair(inst, tol).map(|d| d.value)
}

/// `(lambda_min, lambda_max)` of a coupling matrix.
pub fn spectral_bounds(j: &Coupling, tol: f64) -> Result<(f64, f64)> {
    check_tol(tol)?;
    let hi = top_eigen(j, 1.0, tol)?.value;
    let lo = -top_eigen(j, -1.0, tol)?.value;
    Ok((lo, hi))
}

/// Spectral radius `max(|lambda_min|, |lambda_max|)`.
pub fn spectral_radius(j: &Coupling, tol: f64) -> Result<f64> {
    let (lo, hi) = spectral_bounds(j, tol)?;
    Ok(lo.abs().max(hi.abs()))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("eigenvalue tolerance must lie in (0, 1)".into()))
    }
}
