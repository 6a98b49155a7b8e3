//! Witnesses for `2^k A − (2^k − 1) A` on k-convex sets.
//!
//! A witness at gap `i` of a sequence `s` is `s_i + w`, where `w` is a
//! witness one level down on the difference sequence whose values stay
//! below `s_{i+1} − s_i`. Representations over the differences are
//! rewritten over `s` with `Δs_j = s_{j+1} − s_j`.

use crate::construction::certificate::{Interval, WitnessBatch, WitnessCertificate};
use crate::convexity::{convexity_order, difference_sequence};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::set::{GroupedSet, Monoid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Every gap lifts the witnesses of all earlier differences.
    #[default]
    Prefix,
    /// Gaps in the upper half lift witnesses built on the lower half of the
    /// differences only.
    HalfSplit,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(Strategy::Prefix),
            "half-split" => Ok(Strategy::HalfSplit),
            other => Err(Error::InvalidArgument(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Signed representation by indices into the sequence of its level.
#[derive(Debug, Clone)]
struct Rep {
    value: Scalar,
    plus: Vec<usize>,
    minus: Vec<usize>,
}

impl Rep {
    /// `s_i + w` where `w` is over the differences of `s`.
    fn lift(seq: &[Scalar], i: usize, w: &Rep) -> Rep {
        let mut plus = Vec::with_capacity(2 * w.plus.len());
        let mut minus = Vec::with_capacity(2 * w.plus.len());
        plus.push(i);
        plus.extend(w.plus.iter().map(|&p| p + 1));
        plus.extend(w.minus.iter().copied());
        minus.extend(w.plus.iter().copied());
        minus.extend(w.minus.iter().map(|&q| q + 1));
        Rep { value: &seq[i] + &w.value, plus, minus }
    }
}

/// Witnesses grouped by gap, for the prefix strategy: the witnesses of gap
/// `i` use the difference witnesses from gaps `0..i-1`, which only involve
/// differences `0..i`.
fn prefix_by_gap(seq: &[Scalar], k: usize) -> Vec<Vec<Rep>> {
    let gaps = seq.len().saturating_sub(1);
    let diffs = difference_sequence(seq);
    if k == 1 {
        return (0..gaps)
            .map(|i| {
                (0..i)
                    .map(|j| Rep { value: &seq[i] + &diffs[j], plus: vec![i, j + 1], minus: vec![j] })
                    .collect()
            })
            .collect();
    }
    let child = prefix_by_gap(&diffs, k - 1);
    (0..gaps)
        .map(|i| {
            child
                .iter()
                .take(i.saturating_sub(1))
                .flatten()
                .map(|w| Rep::lift(seq, i, w))
                .collect()
        })
        .collect()
}

/// Witnesses for the half-split strategy on a sequence of length `2^l − 1`.
fn half_split_by_gap(seq: &[Scalar], k: usize) -> Vec<Vec<Rep>> {
    let gaps = seq.len().saturating_sub(1);
    let half = seq.len().div_ceil(2); // 2^(l-1)
    let diffs = difference_sequence(seq);
    let mut out = vec![Vec::new(); gaps];
    if seq.len() < 3 {
        return out;
    }
    if k == 1 {
        for (i, slot) in out.iter_mut().enumerate().skip(half - 1) {
            *slot = (0..half - 1)
                .map(|j| Rep { value: &seq[i] + &diffs[j], plus: vec![i, j + 1], minus: vec![j] })
                .collect();
        }
        return out;
    }
    let lower: Vec<Scalar> = diffs[..half - 1].to_vec();
    let child: Vec<Rep> = half_split_by_gap(&lower, k - 1).into_iter().flatten().collect();
    for (i, slot) in out.iter_mut().enumerate().skip(half - 1) {
        *slot = child.iter().map(|w| Rep::lift(seq, i, w)).collect();
    }
    out
}

/// Largest `2^l − 1` not exceeding `n`.
pub fn truncated_size(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    (1usize << (n + 1).ilog2()) - 1
}

/// `N^(k+1) / 2^(k²)`.
pub fn theorem3_bound(n: usize, k: usize) -> Scalar {
    Scalar::from(n).pow((k + 1) as i32) / Scalar::integer(2).pow((k * k) as i32)
}

pub fn theorem3_witnesses(a: &GroupedSet, k: usize) -> Result<WitnessBatch> {
    theorem3_witnesses_with(a, k, Strategy::Prefix)
}

pub fn theorem3_witnesses_with(a: &GroupedSet, k: usize, strategy: Strategy) -> Result<WitnessBatch> {
    if a.monoid() != Monoid::Additive {
        return Err(Error::MonoidMismatch { left: a.monoid().name(), right: Monoid::Additive.name() });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if a.len() < 3 {
        return Err(Error::TooSmall { needed: 3, got: a.len() });
    }
    let order = convexity_order(a).order;
    if order < k {
        return Err(Error::NotKConvex { required: k, found: order });
    }
    let truncated = a.prefix(truncated_size(a.len()));
    let seq = truncated.elements();
    let by_gap = match strategy {
        Strategy::Prefix => prefix_by_gap(seq, k),
        Strategy::HalfSplit => half_split_by_gap(seq, k),
    };
    let mut certificates = Vec::new();
    for (i, reps) in by_gap.into_iter().enumerate() {
        let interval = Interval::open(seq[i].clone(), seq[i + 1].clone());
        for r in reps {
            if !interval.contains(&r.value) {
                return Err(Error::SqueezeViolated { detail: format!("{} is not in {interval}", r.value) });
            }
            certificates.push(WitnessCertificate {
                value: r.value,
                plus_part: r.plus.iter().map(|&p| seq[p].clone()).collect(),
                minus_part: r.minus.iter().map(|&q| seq[q].clone()).collect(),
                interval: interval.clone(),
            });
        }
    }
    certificates.sort_by(|x, y| x.value.cmp(&y.value));
    Ok(WitnessBatch {
        engine: match strategy {
            Strategy::Prefix => "theorem3".into(),
            Strategy::HalfSplit => "theorem3-half-split".into(),
        },
        k,
        map: "identity".into(),
        input: truncated.clone(),
        ground: truncated.clone(),
        claimed_count_bound: theorem3_bound(truncated.len(), k),
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn powers(k: u32, n: i64) -> GroupedSet {
        GroupedSet::additive((1..=n).map(|i| i.pow(k)))
    }

    fn check_sound(batch: &WitnessBatch, oracle: &GroupedSet) {
        assert!(batch.verify_all().is_empty());
        assert!(batch.values_distinct());
        assert!(batch.intervals_disjoint());
        assert!(batch.values().is_subset(oracle));
        let (lo, hi) = (batch.ground.min().unwrap(), batch.ground.max().unwrap());
        assert!(batch.certificates.iter().all(|c| lo < &c.value && &c.value < hi));
    }

    #[test]
    fn truncation_sizes() {
        assert_eq!(truncated_size(15), 15);
        assert_eq!(truncated_size(16), 15);
        assert_eq!(truncated_size(30), 15);
        assert_eq!(truncated_size(31), 31);
        assert_eq!(truncated_size(3), 3);
        assert_eq!(truncated_size(1), 1);
    }

    #[test]
    fn squares_k1() {
        let a = powers(2, 7);
        let b = theorem3_witnesses(&a, 1).unwrap();
        assert_eq!(b.len(), 15);
        assert_eq!(b.claimed_count_bound, Scalar::new(49, 2));
        check_sound(&b, &a.iterated(2, 1).unwrap());
    }

    #[test]
    fn cubes_k2() {
        let a = powers(3, 15);
        let oracle = a.iterated(4, 3).unwrap();
        let b = theorem3_witnesses(&a, 2).unwrap();
        assert_eq!(b.len(), 286);
        assert!(b.meets_claim());
        check_sound(&b, &oracle);
        let literal = theorem3_witnesses_with(&a, 2, Strategy::HalfSplit).unwrap();
        assert_eq!(literal.len(), 63);
        check_sound(&literal, &oracle);
    }

    #[test]
    fn non_convex_input_is_rejected() {
        let ap = GroupedSet::additive(1..=15);
        assert_eq!(theorem3_witnesses(&ap, 2).unwrap_err(), Error::NotKConvex { required: 2, found: 0 });
        assert!(matches!(theorem3_witnesses(&powers(2, 2), 1), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn truncates_to_prefix() {
        let b = theorem3_witnesses(&powers(3, 20), 2).unwrap();
        assert_eq!(b.input.len(), 15);
        assert_eq!(b.input.max(), Some(&Scalar::integer(3375)));
    }
}
