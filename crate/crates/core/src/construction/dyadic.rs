//! Consecutive-difference index and the dyadic pigeonhole decomposition.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::set::GroupedSet;

/// Ranks of consecutive differences. Differences are taken in the set's
/// monoid, so multiplicative sets index consecutive ratios.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceIndex {
    /// Distinct consecutive differences, increasing.
    pub h: Vec<Scalar>,
    /// 1-based rank of each gap's difference in `h`.
    pub ranks: Vec<usize>,
    /// `fiber_count[l - 1]` gaps have rank `l`.
    pub fiber_count: Vec<usize>,
    /// `t -> {l : 2^t <= fiber_count(l) < 2^(t+1)}`.
    pub dyadic_classes: BTreeMap<u32, Vec<usize>>,
}

impl DifferenceIndex {
    /// `Σ_j i(j)`, a lower bound for `|A+A−A|`.
    pub fn rank_sum(&self) -> u64 {
        self.ranks.iter().map(|&r| r as u64).sum()
    }

    pub fn rank_of(&self, d: &Scalar) -> Option<usize> {
        self.h.binary_search(d).ok().map(|i| i + 1)
    }
}

pub fn difference_index(a: &GroupedSet) -> Result<DifferenceIndex> {
    if a.len() < 2 {
        return Err(Error::TooSmall { needed: 2, got: a.len() });
    }
    let g = a.monoid();
    let gaps: Vec<Scalar> = a.elements().windows(2).map(|w| g.diff(&w[1], &w[0])).collect();
    let mut h = gaps.clone();
    h.sort_unstable();
    h.dedup();
    let ranks: Vec<usize> = gaps.iter().map(|d| h.binary_search(d).expect("present") + 1).collect();
    let mut fiber_count = vec![0usize; h.len()];
    for &r in &ranks {
        fiber_count[r - 1] += 1;
    }
    let mut dyadic_classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (l, &c) in fiber_count.iter().enumerate() {
        dyadic_classes.entry(c.ilog2()).or_default().push(l + 1);
    }
    Ok(DifferenceIndex { h, ranks, fiber_count, dyadic_classes })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicDecomposition {
    pub n: usize,
    pub t: u32,
    /// `L = 2^t`.
    pub l: u64,
    pub m: usize,
    pub h_prime: Vec<Scalar>,
    /// `(h, A_h)` for `h` in `h_prime`, with `A_h` in increasing order.
    pub fibers: Vec<(Scalar, Vec<Scalar>)>,
    pub rank_sum: u64,
}

impl DyadicDecomposition {
    /// `L·m >= N / (3 log₂ N)`, checked as `N^(3Lm) >= 2^N`.
    pub fn satisfies_size_bound(&self) -> bool {
        if self.n < 2 {
            return true;
        }
        let exp = 3 * self.l * self.m as u64;
        let lhs = BigUint::from(self.n).pow(exp as u32);
        lhs >= BigUint::from(1u32) << self.n
    }

    /// `L <= |A_h| <= 2L` for every fiber.
    pub fn fibers_balanced(&self) -> bool {
        self.fibers
            .iter()
            .all(|(_, f)| self.l <= f.len() as u64 && f.len() as u64 <= 2 * self.l)
    }

    /// `L·m²/2`, certified to lower-bound `|A+A−A|` via `Σ_j i(j)`.
    pub fn certified_bound(&self) -> Scalar {
        Scalar::new(self.l * (self.m as u64).pow(2), 2u32)
    }
}

/// Minimum size for which the decomposition is produced.
pub const MIN_PIGEONHOLE_SIZE: usize = 8;

pub fn dyadic_pigeonhole(a: &GroupedSet) -> Result<DyadicDecomposition> {
    if a.len() < MIN_PIGEONHOLE_SIZE {
        return Err(Error::TooSmall { needed: MIN_PIGEONHOLE_SIZE, got: a.len() });
    }
    dyadic_pigeonhole_unchecked(a)
}

/// The decomposition without the size guard; needs `|A| >= 2`.
pub fn dyadic_pigeonhole_unchecked(a: &GroupedSet) -> Result<DyadicDecomposition> {
    let index = difference_index(a)?;
    // Largest 2^t·|I_t|, smallest t on ties.
    let (&t, ranks) = index
        .dyadic_classes
        .iter()
        .rev()
        .max_by_key(|(t, ls)| (1u64 << **t) * ls.len() as u64)
        .expect("at least one gap");
    let h_prime: Vec<Scalar> = ranks.iter().map(|&l| index.h[l - 1].clone()).collect();
    let g = a.monoid();
    let mut fibers: Vec<(Scalar, Vec<Scalar>)> = h_prime.iter().map(|h| (h.clone(), Vec::new())).collect();
    for (j, w) in a.elements().windows(2).enumerate() {
        if let Ok(pos) = ranks.binary_search(&index.ranks[j]) {
            debug_assert_eq!(g.diff(&w[1], &w[0]), fibers[pos].0);
            fibers[pos].1.push(w[0].clone());
        }
    }
    Ok(DyadicDecomposition {
        n: a.len(),
        t,
        l: 1 << t,
        m: h_prime.len(),
        h_prime,
        fibers,
        rank_sum: index.rank_sum(),
    })
}
