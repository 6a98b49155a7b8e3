//! Witness certificates, their independent verifier, and batches.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::scalar::Scalar;
use crate::set::{GroupedSet, Monoid};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn open(lo: Scalar, hi: Scalar) -> Self {
        Interval { lo, hi, lo_closed: false, hi_closed: false }
    }

    /// From `start` (excluded) to `end` (included), in either order.
    pub fn from_start_to(start: Scalar, end: Scalar) -> Self {
        if start <= end {
            Interval { lo: start, hi: end, lo_closed: false, hi_closed: true }
        } else {
            Interval { lo: end, hi: start, lo_closed: true, hi_closed: false }
        }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }

    /// No common point.
    pub fn disjoint(&self, other: &Interval) -> bool {
        let before = |a: &Interval, b: &Interval| a.hi < b.lo || (a.hi == b.lo && !(a.hi_closed && b.lo_closed));
        before(self, other) || before(other, self)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

/// One element of `2^k X − (2^k − 1) X` with its signed representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub value: Scalar,
    pub plus_part: Vec<Scalar>,
    pub minus_part: Vec<Scalar>,
    pub interval: Interval,
}

/// The clause a certificate fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    Arity { plus: usize, minus: usize, expected_plus: usize, expected_minus: usize },
    NotInGround(Scalar),
    ValueMismatch { computed: Scalar, claimed: Scalar },
    OutsideInterval,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Arity { plus, minus, expected_plus, expected_minus } => {
                write!(f, "arity: {plus}/{minus}, expected {expected_plus}/{expected_minus}")
            }
            Clause::NotInGround(x) => write!(f, "ground: {x} not in the ground set"),
            Clause::ValueMismatch { computed, claimed } => {
                write!(f, "value-mismatch: parts give {computed}, certificate says {claimed}")
            }
            Clause::OutsideInterval => f.write_str("interval: value outside its interval"),
        }
    }
}

/// Checks arity, membership of all parts in `ground`, the value, and the
/// interval.
pub fn verify_certificate(c: &WitnessCertificate, ground: &GroupedSet, k: usize) -> Result<(), Clause> {
    let expected_plus = 1usize << k;
    if c.plus_part.len() != expected_plus || c.minus_part.len() != expected_plus - 1 {
        return Err(Clause::Arity {
            plus: c.plus_part.len(),
            minus: c.minus_part.len(),
            expected_plus,
            expected_minus: expected_plus - 1,
        });
    }
    if let Some(x) = c.plus_part.iter().chain(&c.minus_part).find(|x| !ground.contains(x)) {
        return Err(Clause::NotInGround((*x).clone()));
    }
    let computed = match ground.monoid() {
        Monoid::Additive => {
            c.plus_part.iter().cloned().sum::<Scalar>() - c.minus_part.iter().cloned().sum::<Scalar>()
        }
        Monoid::Multiplicative => {
            c.plus_part.iter().cloned().product::<Scalar>() / c.minus_part.iter().cloned().product::<Scalar>()
        }
    };
    if computed != c.value {
        return Err(Clause::ValueMismatch { computed, claimed: c.value.clone() });
    }
    if !c.interval.contains(&c.value) {
        return Err(Clause::OutsideInterval);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessBatch {
    pub engine: String,
    pub k: usize,
    pub map: String,
    /// Input set, after truncation where the engine truncates.
    pub input: GroupedSet,
    /// Set the certificate parts are drawn from (`A`, or the carriers of `f(A)`).
    pub ground: GroupedSet,
    pub claimed_count_bound: Scalar,
    /// Certificates in increasing order of value.
    pub certificates: Vec<WitnessCertificate>,
}

impl WitnessBatch {
    pub fn len(&self) -> usize {
        self.certificates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certificates.is_empty()
    }

    pub fn distinct_count(&self) -> usize {
        let mut values: Vec<&Scalar> = self.certificates.iter().map(|c| &c.value).collect();
        values.sort_unstable();
        values.dedup();
        values.len()
    }

    pub fn values_distinct(&self) -> bool {
        self.distinct_count() == self.certificates.len()
    }

    pub fn values(&self) -> GroupedSet {
        let v = self.certificates.iter().map(|c| c.value.clone()).collect();
        GroupedSet::new(v, self.ground.monoid()).expect("values of a valid batch")
    }

    /// Distinct intervals never overlap.
    pub fn intervals_disjoint(&self) -> bool {
        let mut intervals: Vec<&Interval> = self.certificates.iter().map(|c| &c.interval).collect();
        intervals.sort_by(|a, b| (&a.lo, &a.hi, a.lo_closed, a.hi_closed).cmp(&(&b.lo, &b.hi, b.lo_closed, b.hi_closed)));
        intervals.dedup();
        intervals.windows(2).all(|w| w[0].disjoint(w[1]))
    }

    /// Failing certificates with their clause.
    pub fn verify_all(&self) -> Vec<(usize, Clause)> {
        self.certificates
            .iter()
            .enumerate()
            .filter_map(|(i, c)| verify_certificate(c, &self.ground, self.k).err().map(|e| (i, e)))
            .collect()
    }

    pub fn meets_claim(&self) -> bool {
        Scalar::from(self.distinct_count()) >= self.claimed_count_bound
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("batches serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// SHA-256 of the JSON rendering, hex encoded.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_json().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::integer(n)
    }

    fn sample() -> (WitnessCertificate, GroupedSet) {
        let ground = GroupedSet::additive([1, 4, 9, 16]);
        let c = WitnessCertificate {
            value: s(12),
            plus_part: vec![s(9), s(4)],
            minus_part: vec![s(1)],
            interval: Interval::open(s(9), s(16)),
        };
        (c, ground)
    }

    #[test]
    fn verifier_clauses() {
        let (c, ground) = sample();
        assert_eq!(verify_certificate(&c, &ground, 1), Ok(()));

        let mut bad = c.clone();
        bad.value = s(13);
        assert!(matches!(verify_certificate(&bad, &ground, 1), Err(Clause::ValueMismatch { .. })));

        let mut bad = c.clone();
        bad.plus_part.pop();
        assert!(matches!(verify_certificate(&bad, &ground, 1), Err(Clause::Arity { .. })));

        let mut bad = c.clone();
        bad.plus_part[1] = s(5);
        bad.value = s(13);
        assert_eq!(verify_certificate(&bad, &ground, 1), Err(Clause::NotInGround(s(5))));

        let mut bad = c;
        bad.interval = Interval::open(s(0), s(12));
        assert_eq!(verify_certificate(&bad, &ground, 1), Err(Clause::OutsideInterval));
    }

    #[test]
    fn multiplicative_verification() {
        let ground = GroupedSet::multiplicative([2, 3, 5]).unwrap();
        let c = WitnessCertificate {
            value: Scalar::new(15, 2),
            plus_part: vec![s(3), s(5)],
            minus_part: vec![s(2)],
            interval: Interval::from_start_to(s(5), s(8)),
        };
        assert_eq!(verify_certificate(&c, &ground, 1), Ok(()));
    }

    #[test]
    fn intervals() {
        let a = Interval::from_start_to(s(1), s(3));
        let b = Interval::from_start_to(s(3), s(5));
        assert!(a.disjoint(&b));
        assert!(a.contains(&s(3)) && !a.contains(&s(1)));
        let c = Interval::from_start_to(s(3), s(1));
        assert!(c.contains(&s(1)) && !c.contains(&s(3)));
        assert_eq!(c.to_string(), "[1, 3)");
        assert!(!a.disjoint(&Interval::open(s(2), s(4))));
        assert!(Interval::open(s(1), s(2)).disjoint(&Interval::open(s(2), s(3))));
    }

    #[test]
    fn batch_json_roundtrip() {
        let (c, ground) = sample();
        let batch = WitnessBatch {
            engine: "theorem3".into(),
            k: 1,
            map: "identity".into(),
            input: ground.clone(),
            ground,
            claimed_count_bound: Scalar::new(49, 2),
            certificates: vec![c],
        };
        let json = batch.to_json();
        assert!(json.contains("\"49/2\""));
        assert_eq!(WitnessBatch::from_json(&json).unwrap(), batch);
        assert_eq!(batch.digest().len(), 64);
        assert!(!batch.meets_claim());
    }
}
