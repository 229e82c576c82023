//! Energies, the planted spectrum, outcome classification and symmetry
//! transforms.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{check_spins, Coupling, Instance, PatternSet, Source};
use crate::{Error, Result, Spins};

pub use crate::mirror;

/// `E(x) = -sum_{i<j} J_ij x_i x_j` without input validation.
pub fn coupling_energy(j: &Coupling, x: &[i8]) -> f64 {
    let n = j.n();
    let mut e = 0.0;
    for i in 0..n {
        let row = j.row(i);
        let mut h = 0.0;
        for k in i + 1..n {
            h += row[k] * x[k] as f64;
        }
        e += x[i] as f64 * h;
    }
    -e
}

/// QUBO energy of a spin vector.
pub fn qubo_energy(inst: &Instance, x: &[i8]) -> Result<f64> {
    check_spins(x, inst.n)?;
    Ok(coupling_energy(&inst.coupling, x))
}

/// Energy of a signed pattern combination, kept alongside the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedEnergy {
    /// Zero-based pattern indices, ascending.
    pub members: Vec<usize>,
    /// Sign of each member; the first is always `+1`.
    pub signs: Vec<i8>,
    pub energy: f64,
}

/// Energies of the planted patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpectrum {
    /// Direct evaluation, one per pattern in pattern order.
    pub energies: Vec<f64>,
    pub e_min: f64,
    pub e_max: f64,
    /// Analytic values, present for orthogonal unperturbed sets.
    pub closed_form: Option<Vec<f64>>,
    pub mixed_energies: Option<Vec<MixedEnergy>>,
}

impl PlantedSpectrum {
    /// Index of the lowest-energy planted pattern (first on ties).
    pub fn ground_index(&self) -> usize {
        let mut best = 0;
        for (m, &e) in self.energies.iter().enumerate() {
            if e < self.energies[best] {
                best = m;
            }
        }
        best
    }

    pub fn range(&self) -> f64 {
        self.e_max - self.e_min
    }

    /// Midpoint of `[e_min, e_max]`.
    pub fn mean(&self) -> f64 {
        0.5 * (self.e_min + self.e_max)
    }
}

/// Analytic planted energies `-(w_m N^2 - N sum_k w_k) / 2`, valid for
/// orthogonal patterns without perturbations.
pub fn closed_form_energies(ps: &PatternSet) -> Option<Vec<f64>> {
    if ps.perturbations().is_some() || !ps.is_orthogonal() {
        return None;
    }
    let n = ps.n() as f64;
    let total: f64 = ps.weights().iter().sum();
    Some(ps.weights().iter().map(|&w| -(w * n * n - n * total) / 2.0).collect())
}

/// Planted spectrum of `ps` on the couplings of `inst`. Perturbed sets use
/// their binary projection.
pub fn planted_spectrum(ps: &PatternSet, inst: &Instance) -> PlantedSpectrum {
    let energies: Vec<f64> = ps
        .effective_patterns()
        .iter()
        .map(|p| coupling_energy(&inst.coupling, p))
        .collect();
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let e_max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let closed_form = if inst.coarse_grain.is_none() { closed_form_energies(ps) } else { None };
    PlantedSpectrum {
        energies,
        e_min,
        e_max,
        closed_form,
        mixed_energies: None,
    }
}

/// Energies of all sign variants of every three-pattern mixture.
pub fn mixed_energies(ps: &PatternSet, inst: &Instance) -> Vec<MixedEnergy> {
    let pats = ps.effective_patterns();
    let mut out = Vec::new();
    for_each_mixture(&pats, 3, |members, signs, x| {
        out.push(MixedEnergy {
            members: members.to_vec(),
            signs: signs.to_vec(),
            energy: coupling_energy(&inst.coupling, x),
        });
    });
    out
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut c: u128 = 1;
    for i in 0..r {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Calls `f` with every odd mixture `sign(xi^a + s_b xi^b + ...)` of exactly
/// `order` patterns, first sign fixed to `+1`.
fn for_each_mixture(pats: &[Spins], order: usize, mut f: impl FnMut(&[usize], &[i8], &[i8])) {
    let k = pats.len();
    if order > k || order == 0 {
        return;
    }
    let n = pats[0].len();
    let mut idx: Vec<usize> = (0..order).collect();
    let mut x = vec![0i8; n];
    let mut signs = vec![1i8; order];
    loop {
        for mask in 0..(1u32 << (order - 1)) {
            for (b, s) in signs.iter_mut().enumerate().skip(1) {
                *s = if mask >> (b - 1) & 1 == 1 { -1 } else { 1 };
            }
            for (i, xi) in x.iter_mut().enumerate() {
                let sum: i32 = idx.iter().zip(&signs).map(|(&m, &s)| (pats[m][i] * s) as i32).sum();
                *xi = if sum < 0 { -1 } else { 1 };
            }
            f(&idx, &signs, &x);
        }
        // Advance to the next combination.
        let mut i = order;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if idx[i] < k - order + i {
                idx[i] += 1;
                for j in i + 1..order {
                    idx[j] = idx[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return;
        }
    }
}

/// What a final state is.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    /// Exact match to pattern `m` (zero-based).
    Planted(usize),
    /// Exact match to `-xi^m`.
    Mirror(usize),
    /// Exact match to a signed odd mixture or its mirror. Indices are
    /// zero-based; the first sign is `+1`.
    Mixed { members: Vec<usize>, signs: Vec<i8> },
    Spurious,
}

/// Position of an energy relative to the planted range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeFlag {
    Inside,
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeLabel {
    pub category: Category,
    /// `None` when no planted spectrum is known.
    pub range: Option<RangeFlag>,
    /// Distance to the nearest planted pattern or its mirror.
    pub hamming_to_nearest_planted: usize,
}

impl OutcomeLabel {
    /// True for an out-of-range state that is not planted, mirror or mixed.
    pub fn is_out_of_range(&self) -> bool {
        matches!(self.range, Some(RangeFlag::Below | RangeFlag::Above))
    }

    /// Coarse category used as a count key: `planted`, `mirror`, `mixed`,
    /// `below`, `above` or `spurious`.
    pub fn kind(&self) -> &'static str {
        match (&self.category, self.range) {
            (Category::Planted(_), _) => "planted",
            (Category::Mirror(_), _) => "mirror",
            (Category::Mixed { .. }, _) => "mixed",
            (Category::Spurious, Some(RangeFlag::Below)) => "below",
            (Category::Spurious, Some(RangeFlag::Above)) => "above",
            (Category::Spurious, _) => "spurious",
        }
    }

    /// Pattern index (zero-based) for planted and mirror outcomes.
    pub fn pattern(&self) -> Option<usize> {
        match self.category {
            Category::Planted(m) | Category::Mirror(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for OutcomeLabel {
    /// Short form: `planted:3`, `mirror:3`, `mixed:1+2-3`, `spurious`,
    /// `below`, `above`. Pattern numbers are one-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.category {
            Category::Planted(m) => write!(f, "planted:{}", m + 1),
            Category::Mirror(m) => write!(f, "mirror:{}", m + 1),
            Category::Mixed { members, signs } => {
                f.write_str("mixed:")?;
                for (i, (&m, &s)) in members.iter().zip(signs).enumerate() {
                    if i > 0 {
                        f.write_str(if s < 0 { "-" } else { "+" })?;
                    }
                    write!(f, "{}", m + 1)?;
                }
                Ok(())
            }
            Category::Spurious => f.write_str(self.kind()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Largest odd mixture order checked (1 disables mixtures).
    pub mixed_order: usize,
    /// Mixture checks are skipped entirely when the number of pattern
    /// combinations exceeds this.
    pub mixed_cap: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            mixed_order: 3,
            mixed_cap: 20_000,
        }
    }
}

/// Packs a spin vector into bits after canonicalizing its first spin to `+1`.
fn canonical_key(x: &[i8]) -> Vec<u64> {
    let flip = x.first().is_some_and(|&s| s < 0);
    let mut key = vec![0u64; x.len().div_ceil(64)];
    for (i, &s) in x.iter().enumerate() {
        if (s < 0) != flip {
            key[i / 64] |= 1 << (i % 64);
        }
    }
    key
}

/// Precomputed lookup for classifying many outcomes against one pattern set.
#[derive(Debug, Clone)]
pub struct Classifier {
    patterns: Vec<Spins>,
    e_min: Option<f64>,
    e_max: Option<f64>,
    mixtures: BTreeMap<Vec<u64>, (Vec<usize>, Vec<i8>)>,
    mixed_skipped: bool,
}

impl Classifier {
    pub fn new(ps: &PatternSet, spectrum: Option<&PlantedSpectrum>, opts: ClassifyOptions) -> Result<Self> {
        if opts.mixed_order % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "mixture order must be odd, got {}",
                opts.mixed_order
            )));
        }
        let patterns = ps.effective_patterns();
        let k = patterns.len();
        let combos: u128 = (3..=opts.mixed_order).step_by(2).map(|r| binomial(k, r)).sum();
        let mixed_skipped = combos > opts.mixed_cap as u128;
        let mut mixtures = BTreeMap::new();
        if !mixed_skipped {
            for order in (3..=opts.mixed_order).step_by(2) {
                for_each_mixture(&patterns, order, |members, signs, x| {
                    mixtures
                        .entry(canonical_key(x))
                        .or_insert_with(|| (members.to_vec(), signs.to_vec()));
                });
            }
        }
        Ok(Self {
            patterns,
            e_min: spectrum.map(|s| s.e_min),
            e_max: spectrum.map(|s| s.e_max),
            mixtures,
            mixed_skipped,
        })
    }

    /// Classifier built from an instance's own patterns and spectrum; `None`
    /// for external instances.
    pub fn for_instance(inst: &Instance, opts: ClassifyOptions) -> Result<Option<Self>> {
        match &inst.source {
            Source::Patterns(ps) => Self::new(ps, inst.spectrum.as_ref(), opts).map(Some),
            Source::External => Ok(None),
        }
    }

    /// True when the mixture table was too large and mixtures are never
    /// reported.
    pub fn mixed_skipped(&self) -> bool {
        self.mixed_skipped
    }

    pub fn classify(&self, x: &[i8], energy: f64) -> OutcomeLabel {
        let n = x.len();
        let mut nearest = n;
        let mut category = None;
        for (m, p) in self.patterns.iter().enumerate() {
            let h = crate::hamming(x, p);
            if h == 0 {
                category.get_or_insert(Category::Planted(m));
            } else if h == n {
                category.get_or_insert(Category::Mirror(m));
            }
            nearest = nearest.min(h).min(n - h);
        }
        let category = category.unwrap_or_else(|| match self.mixtures.get(&canonical_key(x)) {
            Some((members, signs)) => Category::Mixed {
                members: members.clone(),
                signs: signs.clone(),
            },
            None => Category::Spurious,
        });
        let range = match (self.e_min, self.e_max) {
            (Some(lo), Some(hi)) => {
                let tol = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
                Some(if energy < lo - tol {
                    RangeFlag::Below
                } else if energy > hi + tol {
                    RangeFlag::Above
                } else {
                    RangeFlag::Inside
                })
            }
            _ => None,
        };
        OutcomeLabel {
            category,
            range,
            hamming_to_nearest_planted: nearest,
        }
    }
}

/// One-shot classification; builds a [`Classifier`] for a single state.
pub fn classify_outcome(
    ps: &PatternSet,
    spectrum: &PlantedSpectrum,
    x: &[i8],
    energy: f64,
    mixed_order: usize,
) -> Result<OutcomeLabel> {
    check_spins(x, ps.n())?;
    let opts = ClassifyOptions {
        mixed_order,
        ..ClassifyOptions::default()
    };
    Ok(Classifier::new(ps, Some(spectrum), opts)?.classify(x, energy))
}

/// The default band fractions `1/16, 1/8, 1/4, 1/2, 3/4, 1`.
pub const DEFAULT_FRACTIONS: [f64; 6] = [1.0 / 16.0, 1.0 / 8.0, 0.25, 0.5, 0.75, 1.0];

/// Counts per band of the planted range. Band `b` holds energies with
/// `fractions[b-1] <= (E - e_min) / (e_max - e_min) < fractions[b]`; the top
/// edge `e_max` itself goes into the last band.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureCounts {
    pub fractions: Vec<f64>,
    pub counts: Vec<usize>,
    pub below: usize,
    pub above: usize,
}

impl MeasureCounts {
    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.below + self.above
    }
}

pub fn measure_bins(spectrum: &PlantedSpectrum, energies: &[f64], fractions: &[f64]) -> Result<MeasureCounts> {
    let range = spectrum.range();
    if !(range > 0.0) {
        return Err(Error::DegenerateSpectrum);
    }
    let mut fr: Vec<f64> = fractions.to_vec();
    if fr.iter().any(|&f| !(f > 0.0 && f <= 1.0)) || fr.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "band fractions must be strictly ascending within (0, 1]".into(),
        ));
    }
    if fr.last() != Some(&1.0) {
        fr.push(1.0);
    }
    let tol = 1e-9;
    let mut counts = vec![0; fr.len()];
    let (mut below, mut above) = (0, 0);
    for &e in energies {
        let t = (e - spectrum.e_min) / range;
        if t < -tol {
            below += 1;
        } else if t > 1.0 + tol {
            above += 1;
        } else {
            let b = fr.iter().position(|&f| t < f).unwrap_or(fr.len() - 1);
            counts[b] += 1;
        }
    }
    Ok(MeasureCounts {
        fractions: fr,
        counts,
        below,
        above,
    })
}

/// Applies `x_i -> s_i x_i` with `s_i = -1` on `flip_set`. Couplings become
/// `s_i s_j J_ij`; planted patterns are flipped on the same coordinates so
/// the planted spectrum is unchanged.
pub fn gauge_transform(inst: &Instance, flip_set: &[usize]) -> Result<Instance> {
    let n = inst.n;
    let mut s = vec![1.0f64; n];
    for &i in flip_set {
        if i >= n {
            return Err(Error::IndexOutOfRange {
                what: "spin",
                index: i,
                len: n,
            });
        }
        s[i] = -1.0;
    }
    let mut coupling = Coupling::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            coupling.set(i, j, s[i] * s[j] * inst.coupling.get(i, j));
        }
    }
    let mut out = inst.clone();
    out.coupling = coupling;
    if let Source::Patterns(ps) = &inst.source {
        let patterns: Vec<Spins> = ps
            .patterns()
            .iter()
            .map(|p| p.iter().zip(&s).map(|(&x, &g)| x * g as i8).collect())
            .collect();
        let perturbations = ps.perturbations().map(|t| {
            t.iter()
                .map(|row| row.iter().zip(&s).map(|(&d, &g)| d * g).collect())
                .collect()
        });
        let rebuilt = if ps.has_explicit_weights() {
            PatternSet::with_weights(patterns, ps.w0(), ps.dw(), ps.weights().to_vec())?
        } else {
            PatternSet::new(patterns, ps.w0(), ps.dw())?
        };
        let rebuilt = rebuilt.with_perturbations(perturbations)?;
        out.spectrum = Some(planted_spectrum(&rebuilt, &out));
        out.source = Source::Patterns(rebuilt);
        out.label = gauge_label(&inst.label, flip_set);
    }
    Ok(out)
}

fn gauge_label(base: &str, flip_set: &[usize]) -> String {
    if flip_set.is_empty() {
        return base.into();
    }
    let mut s = String::from(base);
    s.push_str("-gauge");
    for i in flip_set {
        s.push_str(&format!("-{i}"));
    }
    s
}
