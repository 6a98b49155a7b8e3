//! Built-in set families.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::set::GroupedSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// `{n^k : 1 ≤ n ≤ N}`.
    Powers(u32),
    /// `{r^n : 1 ≤ n ≤ N}`, `r > 1`.
    Geometric(Scalar),
    /// `{1 + (n − 1) d : 1 ≤ n ≤ N}`, `d > 0`.
    Ap(Scalar),
    /// Integer sets of convexity order at least `k`, from positive random
    /// increments at difference level `k + 1`.
    RandomConvex(usize),
}

impl Family {
    pub fn generate(&self, n: usize, seed: u64) -> Result<GroupedSet> {
        if n == 0 {
            return Err(Error::InvalidArgument("family size must be at least 1".into()));
        }
        let elements: Vec<Scalar> = match self {
            Family::Powers(k) => (1..=n).map(|i| Scalar::from(i).pow(*k as i32)).collect(),
            Family::Geometric(r) => (1..=n).map(|i| r.pow(i as i32)).collect(),
            Family::Ap(d) => (0..n).map(|i| Scalar::one() + d * Scalar::from(i)).collect(),
            Family::RandomConvex(k) => random_convex(*k, n, seed),
        };
        GroupedSet::new(elements, crate::set::Monoid::Additive)
    }
}

fn random_convex(k: usize, n: usize, seed: u64) -> Vec<Scalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level: Vec<i64> = (0..n.saturating_sub(k + 1)).map(|_| rng.gen_range(1..=10)).collect();
    for depth in (0..=k).rev() {
        let start: i64 = if depth == 0 { 1 } else { rng.gen_range(1..=10) };
        let mut next = Vec::with_capacity(level.len() + 1);
        next.push(start);
        for d in &level {
            next.push(next.last().unwrap() + d);
        }
        level = next;
    }
    level.truncate(n);
    level.into_iter().map(Scalar::from).collect()
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Powers(k) => write!(f, "powers:{k}"),
            Family::Geometric(r) => write!(f, "geometric:{r}"),
            Family::Ap(d) => write!(f, "ap:{d}"),
            Family::RandomConvex(k) => write!(f, "random-convex:{k}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `powers:K`, `geometric:R`, `ap:D` or `random-convex:K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadFamily(s.to_string());
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        let arg = arg.trim();
        match name.trim() {
            "powers" => match arg.parse::<u32>() {
                Ok(k) if k >= 1 => Ok(Family::Powers(k)),
                _ => Err(bad()),
            },
            "geometric" => match arg.parse::<Scalar>() {
                Ok(r) if r > Scalar::one() => Ok(Family::Geometric(r)),
                _ => Err(bad()),
            },
            "ap" => match arg.parse::<Scalar>() {
                Ok(d) if d.is_positive() => Ok(Family::Ap(d)),
                _ => Err(bad()),
            },
            "random-convex" => arg.parse::<usize>().map(Family::RandomConvex).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::convexity_order;

    #[test]
    fn examples() {
        let p: Family = "powers:3".parse().unwrap();
        assert_eq!(p.generate(5, 0).unwrap(), GroupedSet::additive([1, 8, 27, 64, 125]));
        let ap: Family = "ap:2".parse().unwrap();
        assert_eq!(ap.generate(4, 0).unwrap(), GroupedSet::additive([1, 3, 5, 7]));
        let g: Family = "geometric:2".parse().unwrap();
        assert_eq!(g.generate(4, 0).unwrap(), GroupedSet::additive([2, 4, 8, 16]));
        assert_eq!(p.to_string(), "powers:3");
    }

    #[test]
    fn random_convex_has_order() {
        for seed in 0..50 {
            for k in 1..=4 {
                let a = Family::RandomConvex(k).generate(12, seed).unwrap();
                assert_eq!(a.len(), 12);
                assert!(convexity_order(&a).order >= k);
            }
        }
        let f = Family::RandomConvex(2);
        assert_eq!(f.generate(10, 7).unwrap(), f.generate(10, 7).unwrap());
        assert_ne!(f.generate(10, 7).unwrap(), f.generate(10, 8).unwrap());
    }

    #[test]
    fn bad_families() {
        for s in ["powers:0", "geometric:1", "ap:-1", "cosine:2", "powers"] {
            assert!(matches!(s.parse::<Family>(), Err(Error::BadFamily(_))));
        }
    }
}
