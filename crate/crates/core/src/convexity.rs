//! Convexity order of finite sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::set::GroupedSet;

/// `(a_{i+1} - a_i)` in index order.
pub fn forward_differences(a: &GroupedSet) -> Result<Vec<Scalar>> {
    if a.len() < 2 {
        return Err(Error::TooSmall { needed: 2, got: a.len() });
    }
    Ok(difference_sequence(a.elements()))
}

pub fn difference_sequence(xs: &[Scalar]) -> Vec<Scalar> {
    xs.windows(2).map(|w| &w[1] - &w[0]).collect()
}

/// +1 strictly increasing, -1 strictly decreasing, 0 otherwise or when
/// fewer than two terms remain.
pub fn monotone_direction(xs: &[Scalar]) -> i8 {
    if xs.len() < 2 {
        return 0;
    }
    if xs.windows(2).all(|w| w[0] < w[1]) {
        1
    } else if xs.windows(2).all(|w| w[0] > w[1]) {
        -1
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// Largest `k` such that difference levels `1..=k` are strictly increasing.
    pub order: usize,
    /// Direction of the difference sequence at levels `1, 2, …` while at
    /// least two terms remain; 0 where the level is not strictly monotone.
    pub direction_profile: Vec<i8>,
}

impl ConvexityReport {
    /// Levels `1..=k` all strictly monotone, in either direction.
    pub fn monotone_through(&self, k: usize) -> bool {
        self.direction_profile.len() >= k && self.direction_profile[..k].iter().all(|&d| d != 0)
    }
}

pub fn convexity_order(a: &GroupedSet) -> ConvexityReport {
    convexity_order_of(a.elements())
}

pub fn convexity_order_of(xs: &[Scalar]) -> ConvexityReport {
    let mut profile = Vec::new();
    let mut level = difference_sequence(xs);
    while level.len() >= 2 {
        profile.push(monotone_direction(&level));
        level = difference_sequence(&level);
    }
    let order = profile.iter().take_while(|&&d| d == 1).count();
    ConvexityReport { order, direction_profile: profile }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::integer(x)).collect()
    }

    #[test]
    fn differences() {
        let d = forward_differences(&GroupedSet::additive([1, 4, 9, 16])).unwrap();
        assert_eq!(d, ints(&[3, 5, 7]));
        assert_eq!(forward_differences(&GroupedSet::additive([1, 2, 3])).unwrap(), ints(&[1, 1]));
        assert_eq!(forward_differences(&GroupedSet::additive([2, 4, 8, 16])).unwrap(), ints(&[2, 4, 8]));
        assert_eq!(
            forward_differences(&GroupedSet::additive([5])),
            Err(Error::TooSmall { needed: 2, got: 1 })
        );
    }

    #[test]
    fn orders() {
        let squares = GroupedSet::additive((1..=10).map(|n: i64| n * n));
        assert_eq!(convexity_order(&squares).order, 1);
        let cubes = GroupedSet::additive((1..=10).map(|n: i64| n * n * n));
        assert_eq!(convexity_order(&cubes).order, 2);
        for n in 3..=20u32 {
            let g = GroupedSet::additive((1..=n).map(|i| 1i64 << i));
            assert_eq!(convexity_order(&g).order, n as usize - 2);
        }
        assert_eq!(convexity_order(&GroupedSet::additive([1, 2, 3, 4])).order, 0);
    }

    #[test]
    fn mixed_profile() {
        // differences 10, 15, 17, 18, 20: second level 5, 2, 1, 2
        let r = convexity_order(&GroupedSet::additive([0, 10, 25, 42, 60, 80]));
        assert_eq!(r.order, 1);
        assert_eq!(r.direction_profile, vec![1, 0, 1, 0]);
        assert!(!r.monotone_through(2));
        let r = convexity_order(&GroupedSet::additive([0, 10, 25, 42, 60]));
        assert_eq!(r.direction_profile, vec![1, -1, 1]);
        assert!(r.monotone_through(3));
    }
}
