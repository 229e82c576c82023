use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{PatternOrigin, PatternSet, DEFAULT_W0};
use crate::{seed, Error, Result};

/// Entry `(r, c)` of the Sylvester-Hadamard matrix: `(-1)^popcount(r & c)`.
#[inline]
pub fn sylvester_entry(r: usize, c: usize) -> i8 {
    if (r & c).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `k` mutually orthogonal patterns of length `n`: distinct Sylvester rows
/// picked by a seeded shuffle, a shared column permutation, and a random
/// sign per pattern. Weights follow `1 + m * dw` with `dw = 0` until
/// changed via [`PatternSet::with_dw`].
pub fn generate_orthogonal_patterns(n: usize, k: usize, seed: u64) -> Result<PatternSet> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::UnsupportedDimension { n });
    }
    if k == 0 || k > n {
        return Err(Error::Capacity { n, k });
    }
    let mut rng = seed::rng(seed);
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut rng);
    rows.truncate(k);
    let mut cols: Vec<usize> = (0..n).collect();
    cols.shuffle(&mut rng);
    let patterns = rows
        .iter()
        .map(|&r| {
            let s: i8 = if rng.random::<bool>() { 1 } else { -1 };
            cols.iter().map(|&c| s * sylvester_entry(r, c)).collect()
        })
        .collect();
    Ok(PatternSet::new(patterns, DEFAULT_W0, 0.0)?.with_origin(PatternOrigin::Hadamard { seed }))
}
