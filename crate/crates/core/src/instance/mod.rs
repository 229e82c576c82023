//! Planted pattern sets and the coupling matrices built from them.

mod catalogue;
mod hadamard;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::energy::{planted_spectrum, PlantedSpectrum};
use crate::{linalg, Error, Result, Spins};

pub use catalogue::{generate_small_scale, small_scale_patterns, CatalogueId, EWeighting};
pub use hadamard::{generate_orthogonal_patterns, sylvester_entry};

/// Default base weight of every planted pattern.
pub const DEFAULT_W0: f64 = 1.0;

/// Where a pattern set came from. Lets large sets be stored as a seed.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternOrigin {
    /// Rows of a seeded Sylvester-Hadamard matrix.
    Hadamard { seed: u64 },
    /// A fixed small-scale catalogue entry.
    Catalogue(CatalogueId),
    /// Supplied by the caller.
    Explicit,
}

/// `K` binary patterns of length `N` with one weight each.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet {
    n: usize,
    patterns: Vec<Spins>,
    weights: Vec<f64>,
    w0: f64,
    dw: f64,
    explicit_weights: bool,
    perturbations: Option<Vec<Vec<f64>>>,
    origin: PatternOrigin,
}

impl PatternSet {
    /// Pattern set with the weight ladder `w0 + m * dw`, `m = 1..=K`.
    pub fn new(patterns: Vec<Spins>, w0: f64, dw: f64) -> Result<Self> {
        let k = patterns.len();
        let weights = (1..=k).map(|m| w0 + m as f64 * dw).collect();
        Self::build(patterns, w0, dw, weights, false)
    }

    /// Pattern set whose weights override the ladder (`dw` is kept as
    /// metadata only).
    pub fn with_weights(patterns: Vec<Spins>, w0: f64, dw: f64, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != patterns.len() {
            return Err(Error::DimensionMismatch {
                expected: patterns.len(),
                found: weights.len(),
            });
        }
        Self::build(patterns, w0, dw, weights, true)
    }

    fn build(patterns: Vec<Spins>, w0: f64, dw: f64, weights: Vec<f64>, explicit: bool) -> Result<Self> {
        let n = patterns.first().map(Vec::len).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidParameter("pattern set needs at least one non-empty pattern".into()));
        }
        for p in &patterns {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.len() });
            }
            check_binary(p)?;
        }
        if !w0.is_finite() || !dw.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be finite".into()));
        }
        Ok(Self {
            n,
            patterns,
            weights,
            w0,
            dw,
            explicit_weights: explicit,
            perturbations: None,
            origin: PatternOrigin::Explicit,
        })
    }

    pub fn with_origin(mut self, origin: PatternOrigin) -> Self {
        self.origin = origin;
        self
    }

    /// Replaces the perturbation table; all-zero tables are normalized to `None`.
    pub fn with_perturbations(mut self, perturbations: Option<Vec<Vec<f64>>>) -> Result<Self> {
        if let Some(table) = &perturbations {
            if table.len() != self.k() {
                return Err(Error::DimensionMismatch { expected: self.k(), found: table.len() });
            }
            for row in table {
                if row.len() != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, found: row.len() });
                }
                if row.iter().any(|d| !d.is_finite()) {
                    return Err(Error::InvalidParameter("perturbations must be finite".into()));
                }
            }
        }
        self.perturbations = perturbations.filter(|t| t.iter().flatten().any(|&d| d != 0.0));
        Ok(self)
    }

    /// Same patterns and perturbations with a new weight ladder step.
    pub fn with_dw(&self, dw: f64) -> Result<Self> {
        let mut out = Self::new(self.patterns.clone(), self.w0, dw)?
            .with_perturbations(self.perturbations.clone())?;
        out.origin = self.origin.clone();
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.patterns.len()
    }

    pub fn patterns(&self) -> &[Spins] {
        &self.patterns
    }

    /// Pattern `m`, zero-based.
    pub fn pattern(&self, m: usize) -> &[i8] {
        &self.patterns[m]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn dw(&self) -> f64 {
        self.dw
    }

    pub fn has_explicit_weights(&self) -> bool {
        self.explicit_weights
    }

    pub fn perturbations(&self) -> Option<&[Vec<f64>]> {
        self.perturbations.as_deref()
    }

    pub fn origin(&self) -> &PatternOrigin {
        &self.origin
    }

    /// Perturbed value `xi + dxi` of pattern `m` at coordinate `i`.
    #[inline]
    pub fn value(&self, m: usize, i: usize) -> f64 {
        let base = self.patterns[m][i] as f64;
        match &self.perturbations {
            Some(t) => base + t[m][i],
            None => base,
        }
    }

    /// Binary projection of the perturbed patterns. A coordinate pushed
    /// exactly to zero keeps its original sign.
    pub fn effective_patterns(&self) -> Vec<Spins> {
        match &self.perturbations {
            None => self.patterns.clone(),
            Some(_) => (0..self.k())
                .map(|m| {
                    (0..self.n)
                        .map(|i| {
                            let v = self.value(m, i);
                            if v > 0.0 {
                                1
                            } else if v < 0.0 {
                                -1
                            } else {
                                self.patterns[m][i]
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Overlap matrix `Q[mu][nu] = (1/N) sum_i xi_i^mu xi_i^nu`, row-major `K x K`.
    pub fn overlap_matrix(&self) -> Vec<f64> {
        let k = self.k();
        let mut q = vec![0.0; k * k];
        for a in 0..k {
            for b in a..k {
                let s: i64 = self.patterns[a]
                    .iter()
                    .zip(&self.patterns[b])
                    .map(|(&x, &y)| (x as i64) * (y as i64))
                    .sum();
                let v = s as f64 / self.n as f64;
                q[a * k + b] = v;
                q[b * k + a] = v;
            }
        }
        q
    }

    /// True when the unperturbed patterns are mutually orthogonal.
    pub fn is_orthogonal(&self) -> bool {
        let k = self.k();
        (0..k).all(|a| {
            (a + 1..k).all(|b| {
                self.patterns[a]
                    .iter()
                    .zip(&self.patterns[b])
                    .map(|(&x, &y)| (x as i64) * (y as i64))
                    .sum::<i64>()
                    == 0
            })
        })
    }

    /// Index (zero-based) of the pattern with the largest weight; the first
    /// one wins ties.
    pub fn heaviest(&self) -> usize {
        let mut best = 0;
        for (m, &w) in self.weights.iter().enumerate() {
            if w > self.weights[best] {
                best = m;
            }
        }
        best
    }

    /// Hamming distance between patterns `a` and `b` (zero-based).
    pub fn distance(&self, a: usize, b: usize) -> usize {
        crate::hamming(&self.patterns[a], &self.patterns[b])
    }
}

fn check_binary(x: &[i8]) -> Result<()> {
    match x.iter().position(|&s| s != 1 && s != -1) {
        Some(index) => Err(Error::NonBinarySpin { index, value: x[index] }),
        None => Ok(()),
    }
}

pub(crate) fn check_spins(x: &[i8], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    check_binary(x)
}

/// Symmetric, zero-diagonal `N x N` coupling matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    n: usize,
    data: Vec<f64>,
}

impl Coupling {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Validates symmetry (exact), zero diagonal and finiteness.
    pub fn from_dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::NonZeroDiagonal { i });
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                if j > i && v != data[j * n + i] {
                    return Err(Error::Asymmetric { i, j });
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::from_dense(n, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets `J[i][j]` and `J[j][i]`; ignores the diagonal.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        if i != j {
            self.data[i * self.n + j] = v;
            self.data[j * self.n + i] = v;
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_offdiag_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Gershgorin bound: largest absolute row sum, which bounds every
    /// eigenvalue in magnitude.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `out = J v`.
    #[inline]
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        linalg::matvec(&self.data, self.n, v, out);
    }
}

/// How the coupling matrix is assembled from patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingRule {
    /// `J = sum_m w_m (xi^m + dxi^m)(xi^m + dxi^m)^T`, diagonal removed.
    #[default]
    Hebb,
    /// `J = Xi^T D^{1/2} Q^{-1} D^{1/2} Xi` with `D = diag(w)`; equals
    /// [`CouplingRule::Hebb`] when the overlap matrix is the identity.
    Pseudoinverse,
}

/// Provenance of an instance's couplings.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Patterns(PatternSet),
    External,
}

/// A QUBO instance: couplings plus whatever is known about the planted
/// solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub coupling: Coupling,
    pub source: Source,
    pub spectrum: Option<PlantedSpectrum>,
    pub seed: u64,
    pub label: String,
    pub rule: CouplingRule,
    /// Quantization step if the couplings were coarse-grained.
    pub coarse_grain: Option<f64>,
}

impl Instance {
    /// Wraps a validated coupling matrix with no planted information.
    pub fn external(coupling: Coupling, label: impl Into<String>) -> Self {
        Self {
            n: coupling.n(),
            coupling,
            source: Source::External,
            spectrum: None,
            seed: 0,
            label: label.into(),
            rule: CouplingRule::Hebb,
            coarse_grain: None,
        }
    }

    pub fn patterns(&self) -> Option<&PatternSet> {
        match &self.source {
            Source::Patterns(ps) => Some(ps),
            Source::External => None,
        }
    }
}

fn default_label(ps: &PatternSet) -> String {
    match ps.origin() {
        PatternOrigin::Catalogue(id) => format!("catalogue-{}", id.as_str()),
        _ => format!("n{}-k{}", ps.n(), ps.k()),
    }
}

/// Builds the weighted Hebbian coupling matrix of `ps`.
pub fn build_couplings(ps: &PatternSet) -> Instance {
    let n = ps.n();
    let mut coupling = Coupling::zeros(n);
    // Row-wise perturbed pattern values, laid out per coordinate for a
    // contiguous inner loop over patterns.
    let k = ps.k();
    let mut cols = vec![0.0; n * k];
    for m in 0..k {
        for i in 0..n {
            cols[i * k + m] = ps.value(m, i);
        }
    }
    let weighted: Vec<f64> = (0..n * k).map(|idx| cols[idx] * ps.weights()[idx % k]).collect();
    for i in 0..n {
        let wi = &weighted[i * k..(i + 1) * k];
        for j in i + 1..n {
            let v = linalg::dot(wi, &cols[j * k..(j + 1) * k]);
            coupling.set(i, j, v);
        }
    }
    finish(ps.clone(), coupling, CouplingRule::Hebb)
}

/// Builds couplings with an explicit rule.
pub fn build_couplings_with(ps: &PatternSet, rule: CouplingRule) -> Result<Instance> {
    match rule {
        CouplingRule::Hebb => Ok(build_couplings(ps)),
        CouplingRule::Pseudoinverse => {
            let n = ps.n();
            let k = ps.k();
            let q = ps.overlap_matrix();
            let qinv = linalg::invert(&q, k)?;
            let sq: Vec<f64> = ps.weights().iter().map(|&w| libm::sqrt(w.abs())).collect();
            // M = D^{1/2} Q^{-1} D^{1/2}
            let mut mid = vec![0.0; k * k];
            for a in 0..k {
                for b in 0..k {
                    mid[a * k + b] = sq[a] * qinv[a * k + b] * sq[b];
                }
            }
            let mut coupling = Coupling::zeros(n);
            for i in 0..n {
                for j in i + 1..n {
                    let mut s = 0.0;
                    for a in 0..k {
                        let xa = ps.value(a, i);
                        for b in 0..k {
                            s += xa * mid[a * k + b] * ps.value(b, j);
                        }
                    }
                    coupling.set(i, j, s);
                }
            }
            Ok(finish(ps.clone(), coupling, CouplingRule::Pseudoinverse))
        }
    }
}

fn finish(ps: PatternSet, coupling: Coupling, rule: CouplingRule) -> Instance {
    let seed = match ps.origin() {
        PatternOrigin::Hadamard { seed } => *seed,
        _ => 0,
    };
    let mut inst = Instance {
        n: ps.n(),
        coupling,
        label: default_label(&ps),
        source: Source::External,
        spectrum: None,
        seed,
        rule,
        coarse_grain: None,
    };
    inst.spectrum = Some(planted_spectrum(&ps, &inst));
    inst.source = Source::Patterns(ps);
    inst
}

/// Returns a copy of `ps` with the listed `(pattern, coordinate, delta)`
/// perturbations set (indices zero-based). Unlisted entries keep their
/// current value.
pub fn perturb_patterns(ps: &PatternSet, edits: &[(usize, usize, f64)]) -> Result<PatternSet> {
    let mut table = ps
        .perturbations()
        .map(<[Vec<f64>]>::to_vec)
        .unwrap_or_else(|| vec![vec![0.0; ps.n()]; ps.k()]);
    for &(m, i, d) in edits {
        if m >= ps.k() {
            return Err(Error::IndexOutOfRange { what: "pattern", index: m, len: ps.k() });
        }
        if i >= ps.n() {
            return Err(Error::IndexOutOfRange { what: "coordinate", index: i, len: ps.n() });
        }
        table[m][i] = d;
    }
    ps.clone().with_perturbations(Some(table))
}

/// First coordinate at which every pattern has the same sign.
pub fn shared_sign_coordinate(ps: &PatternSet) -> Option<usize> {
    (0..ps.n()).find(|&i| ps.patterns().iter().all(|p| p[i] == ps.pattern(0)[i]))
}

/// Edit list for the single-coordinate scan: pattern 0 at the first
/// shared-sign coordinate, moved by `delta` (`-2` flips it).
pub fn coordinate_scan_edits(ps: &PatternSet, delta: f64) -> Result<Vec<(usize, usize, f64)>> {
    let i = shared_sign_coordinate(ps)
        .ok_or_else(|| Error::InvalidParameter("no coordinate shares a sign across patterns".into()))?;
    Ok(vec![(0, i, delta * ps.pattern(0)[i] as f64)])
}

/// Edit list for the equidistant-set scan: at the first coordinate where
/// patterns 0 and 1 read `+1` and pattern 2 reads `-1`, shift them by
/// `0.2 p`, `0.2 p` and `0.1 p`.
pub fn equidistant_scan_edits(ps: &PatternSet, p: f64) -> Result<Vec<(usize, usize, f64)>> {
    if ps.k() < 3 {
        return Err(Error::InvalidParameter("equidistant scan needs at least three patterns".into()));
    }
    let i = (0..ps.n())
        .find(|&i| ps.pattern(0)[i] == 1 && ps.pattern(1)[i] == 1 && ps.pattern(2)[i] == -1)
        .ok_or_else(|| Error::InvalidParameter("no coordinate with sign profile (+, +, -)".into()))?;
    Ok(vec![(0, i, 0.2 * p), (1, i, 0.2 * p), (2, i, 0.1 * p)])
}

/// Replaces every off-diagonal coupling by `floor(J / delta_j)`.
pub fn coarse_grain(inst: &Instance, delta_j: f64) -> Result<Instance> {
    if !(delta_j > 0.0) || !delta_j.is_finite() {
        return Err(Error::InvalidParameter(format!("coarse-graining step must be positive, got {delta_j}")));
    }
    if inst.coarse_grain.is_some() {
        return Err(Error::InvalidParameter("instance is already coarse-grained".into()));
    }
    let n = inst.n;
    let mut coupling = Coupling::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            coupling.set(i, j, libm::floor(inst.coupling.get(i, j) / delta_j));
        }
    }
    let mut out = inst.clone();
    out.coupling = coupling;
    out.coarse_grain = Some(delta_j);
    if let Source::Patterns(ps) = &inst.source {
        out.spectrum = Some(planted_spectrum(ps, &out));
    }
    Ok(out)
}
