//! The fixed N = 8 instances, each defined by the Hamming distances between
//! its planted patterns.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{build_couplings, Instance, PatternOrigin, PatternSet, DEFAULT_W0};
use crate::{Error, Spins};

const N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatalogueId {
    A,
    B,
    BStar,
    C,
    D,
    E,
    F,
}

/// How the negative step of instance (e) is turned into weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EWeighting {
    /// `w0 + m * |dw|`: the last pattern is the heaviest.
    #[default]
    LastHeaviest,
    /// `w0 + m * dw` with the signed step: the first pattern is the heaviest.
    Literal,
}

impl CatalogueId {
    pub const ALL: [CatalogueId; 7] = [
        CatalogueId::A,
        CatalogueId::B,
        CatalogueId::BStar,
        CatalogueId::C,
        CatalogueId::D,
        CatalogueId::E,
        CatalogueId::F,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogueId::A => "a",
            CatalogueId::B => "b",
            CatalogueId::BStar => "b*",
            CatalogueId::C => "c",
            CatalogueId::D => "d",
            CatalogueId::E => "e",
            CatalogueId::F => "f",
        }
    }

    /// Pairwise distances. For three patterns the order is
    /// `(d12, d23, d13)`; for (f) all six pairs in the order
    /// `d12, d13, d14, d23, d24, d34`.
    pub fn distances(self) -> &'static [usize] {
        match self {
            CatalogueId::A => &[1, 3, 4],
            CatalogueId::B => &[4, 3, 3],
            CatalogueId::BStar => &[2, 4, 2],
            CatalogueId::C => &[3, 3, 4],
            CatalogueId::D => &[4, 4, 2],
            CatalogueId::E => &[4, 1, 3],
            CatalogueId::F => &[4, 4, 4, 4, 4, 4],
        }
    }

    pub fn dw(self) -> f64 {
        match self {
            CatalogueId::BStar => 0.3,
            CatalogueId::E => -0.13,
            _ => 0.1,
        }
    }

    pub fn k(self) -> usize {
        match self {
            CatalogueId::F => 4,
            _ => 3,
        }
    }

    /// Full symmetric distance matrix, row-major `k x k`.
    fn distance_matrix(self) -> Vec<usize> {
        let k = self.k();
        let mut d = vec![0; k * k];
        let mut put = |a: usize, b: usize, v: usize| {
            d[a * k + b] = v;
            d[b * k + a] = v;
        };
        let t = self.distances();
        if k == 3 {
            put(0, 1, t[0]);
            put(1, 2, t[1]);
            put(0, 2, t[2]);
        } else {
            let mut it = t.iter();
            for a in 0..k {
                for b in a + 1..k {
                    put(a, b, *it.next().unwrap());
                }
            }
        }
        d
    }
}

impl fmt::Display for CatalogueId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogueId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "a" => CatalogueId::A,
            "b" => CatalogueId::B,
            "b*" | "bstar" | "b-star" => CatalogueId::BStar,
            "c" => CatalogueId::C,
            "d" => CatalogueId::D,
            "e" => CatalogueId::E,
            "f" => CatalogueId::F,
            _ => return Err(Error::UnknownCatalogueId(s.into())),
        })
    }
}

/// Advances `idx` to the next `r`-combination of `0..n` in lexicographic
/// order; returns false after the last one.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if idx[i] < n - r + i {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn flips_to_pattern(flips: &[usize]) -> Spins {
    let mut p = vec![1i8; N];
    for &i in flips {
        p[i] = -1;
    }
    p
}

/// Realizes the distance matrix with pattern 1 fixed to all `+1` and each
/// later pattern taking the lexicographically smallest flip set that fits.
fn realize(id: CatalogueId) -> Vec<Spins> {
    let k = id.k();
    let d = id.distance_matrix();
    let mut out: Vec<Spins> = vec![vec![1; N]];
    for m in 1..k {
        let r = d[m];
        let mut idx: Vec<usize> = (0..r).collect();
        loop {
            let cand = flips_to_pattern(&idx);
            if (1..m).all(|j| crate::hamming(&cand, &out[j]) == d[j * k + m]) {
                out.push(cand);
                break;
            }
            // The catalogue tuples are all realizable at N = 8.
            assert!(next_combination(&mut idx, N), "distance tuple for {id} is not realizable");
        }
    }
    out
}

/// Pattern set of a catalogue entry.
pub fn small_scale_patterns(id: CatalogueId, e_weighting: EWeighting) -> PatternSet {
    let patterns = realize(id);
    let dw = id.dw();
    let set = match (id, e_weighting) {
        (CatalogueId::E, EWeighting::LastHeaviest) => {
            let weights = (1..=id.k()).map(|m| DEFAULT_W0 + m as f64 * dw.abs()).collect();
            PatternSet::with_weights(patterns, DEFAULT_W0, dw, weights)
        }
        _ => PatternSet::new(patterns, DEFAULT_W0, dw),
    };
    set.expect("catalogue patterns are valid").with_origin(PatternOrigin::Catalogue(id))
}

/// The N = 8 catalogue instance `id`.
pub fn generate_small_scale(id: CatalogueId, e_weighting: EWeighting) -> Instance {
    build_couplings(&small_scale_patterns(id, e_weighting))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(ps: &PatternSet) -> Vec<usize> {
        if ps.k() == 3 {
            vec![ps.distance(0, 1), ps.distance(1, 2), ps.distance(0, 2)]
        } else {
            let mut v = Vec::new();
            for a in 0..ps.k() {
                for b in a + 1..ps.k() {
                    v.push(ps.distance(a, b));
                }
            }
            v
        }
    }

    #[test]
    fn every_id_realizes_its_distances() {
        for id in CatalogueId::ALL {
            let ps = small_scale_patterns(id, EWeighting::default());
            assert_eq!(tuple(&ps), id.distances(), "{id}");
            assert!(ps.pattern(0).iter().all(|&s| s == 1));
            assert_eq!(ps.dw(), id.dw());
        }
    }

    #[test]
    fn distances_obey_triangle_inequality_and_stay_below_five() {
        for id in CatalogueId::ALL {
            let ps = small_scale_patterns(id, EWeighting::default());
            for a in 0..ps.k() {
                for b in 0..ps.k() {
                    assert!(ps.distance(a, b) < 5);
                    for c in 0..ps.k() {
                        assert!(ps.distance(a, c) <= ps.distance(a, b) + ps.distance(b, c));
                    }
                }
            }
        }
    }

    #[test]
    fn known_flip_sets() {
        let c = small_scale_patterns(CatalogueId::C, EWeighting::default());
        assert_eq!(c.pattern(1), &[-1, -1, -1, 1, 1, 1, 1, 1]);
        assert_eq!(c.pattern(2), &[-1, -1, 1, -1, -1, 1, 1, 1]);
    }

    #[test]
    fn e_weighting_modes() {
        let last = small_scale_patterns(CatalogueId::E, EWeighting::LastHeaviest);
        assert_eq!(last.heaviest(), 2);
        assert!(last.has_explicit_weights());
        let lit = small_scale_patterns(CatalogueId::E, EWeighting::Literal);
        assert_eq!(lit.heaviest(), 0);
        assert!((lit.weights()[2] - 0.61).abs() < 1e-12);
    }

    #[test]
    fn parse_ids() {
        for id in CatalogueId::ALL {
            assert_eq!(id.as_str().parse::<CatalogueId>().unwrap(), id);
        }
        assert!(matches!("g".parse::<CatalogueId>(), Err(Error::UnknownCatalogueId(_))));
    }

    #[test]
    fn combinations_in_lex_order() {
        let mut idx = vec![0, 1];
        let mut seen = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            seen.push(idx.clone());
        }
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }
}
