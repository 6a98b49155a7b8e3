//! Iterated fibers `A_{h₁,…,h_k}`.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::set::GroupedSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub steps: Vec<Scalar>,
    pub members: Vec<Scalar>,
    /// Lower and upper halves of `members`, see [`halves`].
    pub split: Option<(Vec<Scalar>, Vec<Scalar>)>,
}

/// Elements whose successor in `members` is `a ∘ h`.
pub fn fiber(members: &[Scalar], h: &Scalar, a: &GroupedSet) -> Vec<Scalar> {
    let g = a.monoid();
    members
        .windows(2)
        .filter(|w| g.op(&w[0], h) == w[1])
        .map(|w| w[0].clone())
        .collect()
}

pub fn refine(a: &GroupedSet, steps: &[Scalar]) -> Refinement {
    let mut members = a.elements().to_vec();
    for h in steps {
        members = fiber(&members, h, a);
    }
    let split = (!members.is_empty()).then(|| halves(&members));
    Refinement { steps: steps.to_vec(), members, split }
}

/// Splits at `⌈N/2⌉`; for odd `N` the middle element lies in both halves.
pub fn halves<T: Clone>(xs: &[T]) -> (Vec<T>, Vec<T>) {
    let mid = xs.len().div_ceil(2);
    let upper_start = if xs.len() % 2 == 1 { mid - 1 } else { mid };
    (xs[..mid].to_vec(), xs[upper_start..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::integer(x)).collect()
    }

    #[test]
    fn examples() {
        let a = GroupedSet::additive(1..=8);
        let one = Scalar::integer(1);
        assert_eq!(refine(&a, std::slice::from_ref(&one)).members, ints(&[1, 2, 3, 4, 5, 6, 7]));
        assert_eq!(refine(&a, &[one.clone(), one.clone()]).members, ints(&[1, 2, 3, 4, 5, 6]));

        let b = GroupedSet::additive([1, 2, 4, 5]);
        assert_eq!(refine(&b, std::slice::from_ref(&one)).members, ints(&[1, 4]));
        assert_eq!(refine(&b, &[one.clone(), Scalar::integer(3)]).members, ints(&[1]));
        assert!(refine(&b, &[Scalar::integer(7)]).members.is_empty());
    }

    #[test]
    fn split_halves() {
        assert_eq!(halves(&[1, 2, 3, 4, 5]), (vec![1, 2, 3], vec![3, 4, 5]));
        assert_eq!(halves(&[1, 2, 3, 4]), (vec![1, 2], vec![3, 4]));
        assert_eq!(halves(&[1]), (vec![1], vec![1]));
    }
}
