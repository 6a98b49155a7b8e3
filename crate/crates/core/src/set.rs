//! Finite ordered sets in the additive or multiplicative monoid and their
//! iterated sum, product and quotient sets.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::merge;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monoid {
    Additive,
    Multiplicative,
}

impl Monoid {
    pub fn name(self) -> &'static str {
        match self {
            Monoid::Additive => "additive",
            Monoid::Multiplicative => "multiplicative",
        }
    }

    pub fn op(self, x: &Scalar, y: &Scalar) -> Scalar {
        match self {
            Monoid::Additive => x + y,
            Monoid::Multiplicative => x * y,
        }
    }

    pub fn inverse(self, x: &Scalar) -> Scalar {
        match self {
            Monoid::Additive => -x,
            Monoid::Multiplicative => x.recip(),
        }
    }

    pub fn identity(self) -> Scalar {
        match self {
            Monoid::Additive => Scalar::zero(),
            Monoid::Multiplicative => Scalar::one(),
        }
    }

    /// `x ∘ y⁻¹`: the difference (or ratio) of two elements.
    pub fn diff(self, x: &Scalar, y: &Scalar) -> Scalar {
        match self {
            Monoid::Additive => x - y,
            Monoid::Multiplicative => x / y,
        }
    }

    /// Folds `plus ∘ minus⁻¹` over two multisets.
    pub fn signed_fold<'a>(
        self,
        plus: impl IntoIterator<Item = &'a Scalar>,
        minus: impl IntoIterator<Item = &'a Scalar>,
    ) -> Scalar {
        match self {
            Monoid::Additive => {
                let p: Scalar = plus.into_iter().sum();
                let m: Scalar = minus.into_iter().sum();
                p - m
            }
            Monoid::Multiplicative => {
                let p: Scalar = plus.into_iter().product();
                let m: Scalar = minus.into_iter().product();
                p / m
            }
        }
    }

    fn admits(self, x: &Scalar) -> bool {
        self == Monoid::Additive || x.is_positive()
    }
}

impl fmt::Display for Monoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Monoid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "additive" => Ok(Monoid::Additive),
            "multiplicative" => Ok(Monoid::Multiplicative),
            other => Err(Error::InvalidArgument(format!("unknown monoid `{other}`"))),
        }
    }
}

/// Runtime limits for set enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub cap: usize,
}

impl Limits {
    pub const DEFAULT_CAP: usize = 50_000_000;
    pub const CAP_ENV: &'static str = "ITERSUM_ELEMENT_CAP";

    pub fn with_cap(cap: usize) -> Self {
        Limits { cap }
    }

    /// Default limits, with the cap overridable through `ITERSUM_ELEMENT_CAP`.
    pub fn from_env() -> Self {
        let cap = std::env::var(Self::CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(Self::DEFAULT_CAP);
        Limits { cap }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits { cap: Self::DEFAULT_CAP }
    }
}

/// A strictly increasing finite sequence of scalars tagged with its monoid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct GroupedSet {
    elements: Vec<Scalar>,
    monoid: Monoid,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    monoid: Monoid,
    elements: Vec<Scalar>,
}

impl TryFrom<RawSet> for GroupedSet {
    type Error = Error;

    fn try_from(raw: RawSet) -> Result<Self> {
        GroupedSet::new(raw.elements, raw.monoid)
    }
}

impl From<GroupedSet> for RawSet {
    fn from(set: GroupedSet) -> Self {
        RawSet { monoid: set.monoid, elements: set.elements }
    }
}

impl GroupedSet {
    /// Sorts and deduplicates `elements`. Multiplicative sets must be positive.
    pub fn new(mut elements: Vec<Scalar>, monoid: Monoid) -> Result<Self> {
        if let Some(bad) = elements.iter().find(|x| !monoid.admits(x)) {
            return Err(Error::InvalidSet(format!(
                "multiplicative sets must be positive, found {bad}"
            )));
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(GroupedSet { elements, monoid })
    }

    pub fn additive<T: Into<Scalar>>(items: impl IntoIterator<Item = T>) -> Self {
        Self::new(items.into_iter().map(Into::into).collect(), Monoid::Additive)
            .expect("additive sets have no element constraint")
    }

    pub fn multiplicative<T: Into<Scalar>>(items: impl IntoIterator<Item = T>) -> Result<Self> {
        Self::new(items.into_iter().map(Into::into).collect(), Monoid::Multiplicative)
    }

    pub(crate) fn from_sorted(elements: Vec<Scalar>, monoid: Monoid) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        GroupedSet { elements, monoid }
    }

    pub fn elements(&self) -> &[Scalar] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Scalar> {
        self.elements
    }

    pub fn monoid(&self) -> Monoid {
        self.monoid
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn min(&self) -> Option<&Scalar> {
        self.elements.first()
    }

    pub fn max(&self) -> Option<&Scalar> {
        self.elements.last()
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn is_subset(&self, other: &GroupedSet) -> bool {
        self.elements.iter().all(|x| other.contains(x))
    }

    /// Same elements under another monoid tag.
    pub fn retag(&self, monoid: Monoid) -> Result<Self> {
        Self::new(self.elements.clone(), monoid)
    }

    /// The first `n` elements.
    pub fn prefix(&self, n: usize) -> Self {
        GroupedSet::from_sorted(self.elements[..n.min(self.len())].to_vec(), self.monoid)
    }

    pub fn combine(&self, other: &GroupedSet) -> Result<GroupedSet> {
        self.combine_with(other, Limits::default())
    }

    /// `{x ∘ y : x ∈ self, y ∈ other}`.
    pub fn combine_with(&self, other: &GroupedSet, limits: Limits) -> Result<GroupedSet> {
        if self.monoid != other.monoid {
            return Err(Error::MonoidMismatch {
                left: self.monoid.name(),
                right: other.monoid.name(),
            });
        }
        if self.is_empty() || other.is_empty() {
            return Ok(GroupedSet::from_sorted(Vec::new(), self.monoid));
        }
        // Keep the longer operand outside so runs are short and numerous.
        let (xs, ys) = if self.len() >= other.len() {
            (&self.elements, &other.elements)
        } else {
            (&other.elements, &self.elements)
        };
        let out = match self.monoid {
            Monoid::Additive => additive_sumset(xs, ys, limits.cap)?,
            Monoid::Multiplicative => product_set(xs, ys, limits.cap)?,
        };
        Ok(GroupedSet::from_sorted(out, self.monoid))
    }

    /// Elementwise inverse: `{-x}` or `{1/x}`.
    pub fn invert(&self) -> GroupedSet {
        let elements = self.elements.iter().rev().map(|x| self.monoid.inverse(x)).collect();
        GroupedSet::from_sorted(elements, self.monoid)
    }

    pub fn iterated(&self, m: usize, n: usize) -> Result<GroupedSet> {
        self.iterated_with(m, n, Limits::default())
    }

    /// `m·A − n·A` (additive) or `A^(m) / A^(n)` (multiplicative).
    ///
    /// Stages alternate `∘A` and `∘A⁻¹`, deduplicating after each, so every
    /// intermediate set stays within the value range of the final one.
    pub fn iterated_with(&self, m: usize, n: usize, limits: Limits) -> Result<GroupedSet> {
        if m == 0 {
            return Err(Error::InvalidArgument("iterated_combine requires m >= 1".into()));
        }
        if self.len() > limits.cap {
            return Err(Error::CapExceeded { cap: limits.cap });
        }
        let inverse = self.invert();
        let (mut plus, mut minus) = (m - 1, n);
        let mut acc = self.clone();
        let mut take_minus = true;
        while plus + minus > 0 {
            let use_minus = minus > 0 && (take_minus || plus == 0);
            let rhs = if use_minus {
                minus -= 1;
                &inverse
            } else {
                plus -= 1;
                self
            };
            acc = acc.combine_with(rhs, limits)?;
            take_minus = !use_minus;
        }
        Ok(acc)
    }

    pub fn iterated_cardinality(&self, m: usize, n: usize) -> Result<usize> {
        self.iterated_cardinality_with(m, n, Limits::default())
    }

    /// `|m·A − n·A|` without materializing the last stage, which is counted
    /// by a streaming merge. The cap applies to the stored stages only.
    pub fn iterated_cardinality_with(&self, m: usize, n: usize, limits: Limits) -> Result<usize> {
        if m == 0 {
            return Err(Error::InvalidArgument("iterated_combine requires m >= 1".into()));
        }
        if m + n == 1 {
            return Ok(self.len());
        }
        let (base, last) = if n > 0 {
            (self.iterated_with(m, n - 1, limits)?, self.invert())
        } else {
            (self.iterated_with(m - 1, 0, limits)?, self.clone())
        };
        Ok(count_combination(base.elements(), last.elements(), self.monoid))
    }

    /// `{x + c}`; additive sets only.
    pub fn translate(&self, c: &Scalar) -> Result<GroupedSet> {
        if self.monoid != Monoid::Additive {
            return Err(Error::MonoidMismatch {
                left: self.monoid.name(),
                right: Monoid::Additive.name(),
            });
        }
        Ok(GroupedSet::from_sorted(self.elements.iter().map(|x| x + c).collect(), self.monoid))
    }

    /// `{c·x}`.
    pub fn dilate(&self, c: &Scalar) -> Result<GroupedSet> {
        if c.is_zero() {
            return Err(Error::ZeroDilation);
        }
        let mut elements: Vec<Scalar> = self.elements.iter().map(|x| x * c).collect();
        if c.is_negative() {
            elements.reverse();
        }
        if let Some(bad) = elements.iter().find(|x| !self.monoid.admits(x)) {
            return Err(Error::InvalidSet(format!(
                "dilation leaves the multiplicative domain at {bad}"
            )));
        }
        Ok(GroupedSet::from_sorted(elements, self.monoid))
    }

    /// Renders in the set text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("#monoid: {}\n", self.monoid);
        for x in &self.elements {
            out.push_str(&x.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the set text format: one `p` or `p/q` per line with an
    /// optional `#monoid:` header. Other `#` lines and blank lines are skipped.
    pub fn parse_text(text: &str) -> Result<GroupedSet> {
        let mut monoid = Monoid::Additive;
        let mut elements = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(tag) = rest.trim().strip_prefix("monoid:") {
                    monoid = tag.parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("unknown monoid `{}`", tag.trim()),
                    })?;
                }
                continue;
            }
            let x: Scalar = line.parse().map_err(|e: crate::scalar::ParseScalarError| Error::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            elements.push(x);
        }
        GroupedSet::new(elements, monoid)
    }
}

impl fmt::Display for GroupedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

const I64_HEADROOM: u64 = 1 << 61;

fn to_small_ints(items: &[Scalar], d: &BigInt) -> Option<Vec<i64>> {
    items
        .iter()
        .map(|x| {
            let v = x.scaled_numerator(d).to_i64()?;
            (v.unsigned_abs() < I64_HEADROOM).then_some(v)
        })
        .collect()
}

fn additive_sumset(xs: &[Scalar], ys: &[Scalar], cap: usize) -> Result<Vec<Scalar>> {
    let d = Scalar::common_denominator(xs.iter().chain(ys));
    if let (Some(xi), Some(yi)) = (to_small_ints(xs, &d), to_small_ints(ys, &d)) {
        let sums = merge::sumset_i64(&xi, &yi, cap)?;
        return Ok(sums.into_iter().map(|v| Scalar::new(v, d.clone())).collect());
    }
    merge::combine_runs(xs, ys, cap, |x, y| x + y)
}

/// Positive rational with 64-bit parts, ordered by value.
#[derive(Clone, Copy, PartialEq, Eq)]
struct SmallFrac {
    n: u64,
    d: u64,
}

impl Ord for SmallFrac {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n as u128 * other.d as u128).cmp(&(other.n as u128 * self.d as u128))
    }
}

impl PartialOrd for SmallFrac {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn to_small_fracs(items: &[Scalar]) -> Option<Vec<SmallFrac>> {
    items
        .iter()
        .map(|x| {
            let n = x.numer().to_u64()?;
            let d = x.denom().to_u64()?;
            (n < 1 << 32 && d < 1 << 32).then_some(SmallFrac { n, d })
        })
        .collect()
}

fn product_set(xs: &[Scalar], ys: &[Scalar], cap: usize) -> Result<Vec<Scalar>> {
    if let (Some(xf), Some(yf)) = (to_small_fracs(xs), to_small_fracs(ys)) {
        let out = merge::combine_runs(&xf, &yf, cap, |a, b| {
            let n = a.n * b.n;
            let d = a.d * b.d;
            let g = n.gcd(&d);
            SmallFrac { n: n / g, d: d / g }
        })?;
        return Ok(out.into_iter().map(|f| Scalar::new(f.n, f.d)).collect());
    }
    merge::combine_runs(xs, ys, cap, |x, y| x * y)
}

fn count_combination(xs: &[Scalar], ys: &[Scalar], monoid: Monoid) -> usize {
    match monoid {
        Monoid::Additive => {
            let d = Scalar::common_denominator(xs.iter().chain(ys));
            if let (Some(xi), Some(yi)) = (to_small_ints(xs, &d), to_small_ints(ys, &d)) {
                return merge::count_sumset_i64(&xi, &yi);
            }
            let xi: Vec<BigInt> = xs.iter().map(|x| x.scaled_numerator(&d)).collect();
            let yi: Vec<BigInt> = ys.iter().map(|y| y.scaled_numerator(&d)).collect();
            merge::count_combine(&xi, &yi, |x, y| x + y)
        }
        Monoid::Multiplicative => {
            if let (Some(xf), Some(yf)) = (to_small_fracs(xs), to_small_fracs(ys)) {
                return merge::count_combine(&xf, &yf, |a, b| SmallFrac { n: a.n * b.n, d: a.d * b.d });
            }
            merge::count_combine(xs, ys, |x, y| x * y)
        }
    }
}

/// Cardinality helper used by reports: `|A ∘ A|`.
pub fn doubling(a: &GroupedSet, limits: Limits) -> Result<usize> {
    Ok(a.combine_with(a, limits)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn add(v: &[i64]) -> GroupedSet {
        GroupedSet::additive(v.iter().copied())
    }

    fn mul(v: &[i64]) -> GroupedSet {
        GroupedSet::multiplicative(v.iter().copied()).unwrap()
    }

    fn ints(s: &GroupedSet) -> Vec<String> {
        s.elements().iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn combine_examples() {
        assert_eq!(add(&[1, 2]).combine(&add(&[1, 2])).unwrap(), add(&[2, 3, 4]));
        let y = add(&[-3, 5, 9]);
        assert_eq!(add(&[0]).combine(&y).unwrap(), y);
        assert_eq!(add(&[1, 2, 4]).combine(&add(&[1, 2, 4])).unwrap(), add(&[2, 3, 4, 5, 6, 8]));
    }

    #[test]
    fn combine_rejects_mixed_monoids() {
        let err = add(&[1]).combine(&mul(&[1])).unwrap_err();
        assert!(matches!(err, Error::MonoidMismatch { .. }));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(add(&[1, 3]).invert(), add(&[-3, -1]));
        let inv = mul(&[2, 4]).invert();
        assert_eq!(ints(&inv), vec!["1/4", "1/2"]);
        let x = add(&[-2, 0, 7]);
        assert_eq!(x.invert().invert(), x);
    }

    #[test]
    fn iterated_examples() {
        assert_eq!(add(&[0, 1]).iterated(2, 1).unwrap(), add(&[-1, 0, 1, 2]));
        let a = add(&[3, 10, 11]);
        assert_eq!(a.iterated(1, 0).unwrap(), a);
        let g = mul(&[2, 4, 8]).iterated(2, 1).unwrap();
        assert_eq!(ints(&g), vec!["1/2", "1", "2", "4", "8", "16", "32"]);
        assert!(add(&[1]).iterated(0, 1).is_err());
    }

    #[test]
    fn iterated_cap() {
        let a = add(&[0, 1, 10, 100, 1000]);
        assert_eq!(a.iterated_with(3, 3, Limits::with_cap(20)), Err(Error::CapExceeded { cap: 20 }));
    }

    #[test]
    fn rational_elements_combine_exactly() {
        let a = GroupedSet::additive([Scalar::new(1, 2), Scalar::new(1, 3)]);
        let s = a.combine(&a).unwrap();
        assert_eq!(ints(&s), vec!["2/3", "5/6", "1"]);
        let m = GroupedSet::multiplicative([Scalar::new(2, 3), Scalar::new(3, 2)]).unwrap();
        assert_eq!(ints(&m.iterated(1, 1).unwrap()), vec!["4/9", "1", "9/4"]);
    }

    #[test]
    fn huge_elements_use_generic_path() {
        let big = Scalar::integer(BigInt::from(2).pow(200u32));
        let a = GroupedSet::additive([Scalar::one(), big.clone()]);
        let s = a.combine(&a).unwrap();
        assert_eq!(s.len(), 3);
        let m = GroupedSet::multiplicative([Scalar::integer(3), big]).unwrap();
        assert_eq!(m.iterated(1, 1).unwrap().len(), 3);
    }

    #[test]
    fn translate_and_dilate() {
        assert_eq!(add(&[1, 2, 3]).translate(&Scalar::one()).unwrap(), add(&[2, 3, 4]));
        assert_eq!(add(&[1, 2]).dilate(&Scalar::integer(-1)).unwrap(), add(&[-2, -1]));
        let a = add(&[-4, 9]);
        assert_eq!(a.dilate(&Scalar::one()).unwrap(), a);
        assert_eq!(a.dilate(&Scalar::zero()), Err(Error::ZeroDilation));
        assert!(mul(&[2]).translate(&Scalar::one()).is_err());
        assert!(mul(&[2]).dilate(&Scalar::integer(-1)).is_err());
    }

    #[test]
    fn multiplicative_requires_positive() {
        assert!(GroupedSet::multiplicative([0]).is_err());
        assert!(GroupedSet::multiplicative([-1]).is_err());
    }

    #[test]
    fn text_format() {
        let s = GroupedSet::new(vec![Scalar::new(1, 2), Scalar::integer(3)], Monoid::Multiplicative).unwrap();
        let text = s.to_text();
        assert_eq!(text, "#monoid: multiplicative\n1/2\n3\n");
        assert_eq!(GroupedSet::parse_text(&text).unwrap(), s);
        assert_eq!(GroupedSet::parse_text("3\n1\n\n2\n").unwrap(), add(&[1, 2, 3]));
        let err = GroupedSet::parse_text("1\nx\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, msg: "invalid rational literal `x`".into() });
        assert!(GroupedSet::parse_text("#monoid: cyclic\n1\n").is_err());
    }

    #[test]
    fn cardinality_matches_materialized_sets() {
        let cases = [
            add(&[1, 4, 9, 16, 25]),
            GroupedSet::additive((1..=12).map(|n| Scalar::integer(1) * Scalar::integer(2).pow(n * 6))),
            GroupedSet::additive([Scalar::new(1, 3), Scalar::new(1, 2), Scalar::integer(7)]),
            mul(&[2, 3, 5, 7, 11]),
            GroupedSet::multiplicative((1..=9).map(|n| Scalar::integer(3).pow(n * 5))).unwrap(),
        ];
        for a in &cases {
            for (m, n) in [(1, 0), (2, 0), (2, 1), (3, 2), (1, 3)] {
                assert_eq!(a.iterated_cardinality(m, n).unwrap(), a.iterated(m, n).unwrap().len());
            }
        }
    }
}
