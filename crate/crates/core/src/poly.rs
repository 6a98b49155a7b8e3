//! Dense univariate polynomials over the rationals, with Sturm-sequence
//! real root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::scalar::Scalar;

/// Coefficients low-to-high, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Scalar::integer(c)).collect())
    }

    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); degree + 1];
        coeffs[degree] = Scalar::one();
        Polynomial { coeffs }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Scalar::integer(i as i64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// `p(x + h)` by Horner's rule on polynomials.
    pub fn shift(&self, h: &Scalar) -> Self {
        let lin = Polynomial::new(vec![h.clone(), Scalar::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::default(), |acc, c| acc.mul(&lin).add(&Polynomial::constant(c.clone())))
    }

    /// `p(x + h) − p(x)`.
    pub fn forward_difference(&self, h: &Scalar) -> Self {
        self.shift(h).sub(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Scalar::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::integer(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::default();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Scalar::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = &rem[shift + i] - &factor * c;
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(Scalar::is_zero) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }

    pub fn sign_at(&self, x: &Scalar) -> i8 {
        self.eval(x).signum()
    }

    /// Cauchy bound: every real root has absolute value below it.
    pub fn root_bound(&self) -> Scalar {
        if self.degree().unwrap_or(0) == 0 {
            return Scalar::one();
        }
        let lead = self.leading().abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_default();
        Scalar::one() + m
    }

    /// Real roots, each in a disjoint half-open interval `(lo, hi]` of width
    /// at most `width`, ordered left to right.
    pub fn isolate_real_roots(&self, width: &Scalar) -> Vec<(Scalar, Scalar)> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let sturm = SturmChain::new(self);
        let b = self.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            let count = sturm.count_roots(&lo, &hi);
            if count == 0 {
                continue;
            }
            if count == 1 && &(&hi - &lo) <= width {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / Scalar::integer(2);
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
        out.sort();
        out
    }

    /// Number of distinct real roots in `(lo, hi]`.
    pub fn count_roots(&self, lo: &Scalar, hi: &Scalar) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        SturmChain::new(self).count_roots(lo, hi)
    }
}

/// Sturm sequence of the squarefree part.
pub struct SturmChain {
    chain: Vec<Polynomial>,
}

impl SturmChain {
    pub fn new(p: &Polynomial) -> Self {
        let p0 = p.squarefree();
        let mut chain = vec![p0.clone(), p0.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&Scalar::integer(-1)));
        }
        SturmChain { chain }
    }

    fn variations(&self, x: &Scalar) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }

    /// Distinct roots in `(lo, hi]`.
    pub fn count_roots(&self, lo: &Scalar, hi: &Scalar) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

/// Closed subintervals of `[lo, hi]` on which none of `polys` vanishes,
/// separated from every isolated root by a margin. Sorted widest first.
pub fn root_free_intervals(polys: &[Polynomial], lo: &Scalar, hi: &Scalar) -> Vec<(Scalar, Scalar)> {
    let span = hi - lo;
    let width = &span / Scalar::integer(1 << 12);
    let mut cuts: Vec<(Scalar, Scalar)> = polys
        .iter()
        .filter(|p| !p.is_zero())
        .flat_map(|p| p.isolate_real_roots(&width))
        .filter(|(a, b)| b >= lo && a <= hi)
        .collect();
    cuts.sort();
    let mut pieces = Vec::new();
    let mut cursor = lo.clone();
    let mut cursor_open = false;
    for (a, b) in cuts {
        if a > cursor {
            pieces.push((cursor.clone(), a.clone(), cursor_open));
        }
        if b > cursor || (b == cursor && !cursor_open) {
            cursor = b;
            cursor_open = true;
        }
    }
    if hi > &cursor {
        pieces.push((cursor, hi.clone(), cursor_open));
    }
    let mut out: Vec<(Scalar, Scalar)> = pieces
        .into_iter()
        .map(|(a, b, left_open)| {
            // Roots may sit on an open left end; step inside by a margin.
            let margin = (&b - &a) / Scalar::integer(8);
            let a = if left_open { &a + &margin } else { a };
            let b = if &b < hi { &b - &margin } else { b };
            (a, b)
        })
        .filter(|(a, b)| a < b)
        .filter(|(a, b)| polys.iter().all(|p| p.is_zero() || (p.count_roots(a, b) == 0 && !p.eval(a).is_zero())))
        .collect();
    out.sort_by(|x, y| (&y.1 - &y.0).cmp(&(&x.1 - &x.0)).then_with(|| x.0.cmp(&y.0)));
    out
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "poly: {}", if parts.is_empty() { "0".to_string() } else { parts.join(",") })
    }
}

/// `n!` as a scalar.
pub fn factorial(n: usize) -> Scalar {
    Scalar::integer((1..=n as u64).fold(BigInt::one(), |acc, i| acc * i))
}

/// Sign of the polynomial on an interval on which it has no roots.
pub fn constant_sign(p: &Polynomial, lo: &Scalar, hi: &Scalar) -> Option<i8> {
    if p.is_zero() || p.count_roots(lo, hi) > 0 || p.eval(lo).is_zero() {
        return None;
    }
    let s = p.sign_at(lo);
    debug_assert_eq!(s, p.sign_at(hi));
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::integer(n)
    }

    #[test]
    fn eval_and_derivative() {
        let p = Polynomial::from_ints(&[0, 0, 1]);
        assert_eq!(p.eval(&s(-2)), s(4));
        assert_eq!(p.derivative(), Polynomial::from_ints(&[0, 2]));
        assert_eq!(Polynomial::from_ints(&[5]).derivative(), Polynomial::default());
    }

    #[test]
    fn shift_and_difference() {
        // (x+1)^2 - x^2 = 2x + 1
        let sq = Polynomial::monomial(2);
        assert_eq!(sq.forward_difference(&s(1)), Polynomial::from_ints(&[1, 2]));
        // double difference of x^3 with unit steps is 6x + 6
        let cube = Polynomial::monomial(3);
        let d2 = cube.forward_difference(&s(1)).forward_difference(&s(1));
        assert_eq!(d2, Polynomial::from_ints(&[6, 6]));
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)^2 (x+2)
        let p = Polynomial::from_ints(&[2, -3, 0, 1]);
        let (q, r) = p.div_rem(&Polynomial::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(q, Polynomial::from_ints(&[-2, 1, 1]));
        assert_eq!(p.squarefree(), Polynomial::from_ints(&[-2, 1, 1]));
    }

    #[test]
    fn sturm_counts_and_isolation() {
        // x^2 - 2
        let p = Polynomial::from_ints(&[-2, 0, 1]);
        assert_eq!(p.count_roots(&s(-10), &s(10)), 2);
        assert_eq!(p.count_roots(&s(0), &s(10)), 1);
        let roots = p.isolate_real_roots(&Scalar::new(1, 16));
        assert_eq!(roots.len(), 2);
        for (lo, hi) in &roots {
            assert!(hi - lo <= Scalar::new(1, 16));
            assert!(p.sign_at(lo) != p.sign_at(hi) || p.eval(hi).is_zero());
        }
        // x^3 - 3x has roots -sqrt3, 0, sqrt3; derivative roots ±1
        let q = Polynomial::from_ints(&[0, -3, 0, 1]);
        assert_eq!(q.isolate_real_roots(&Scalar::new(1, 8)).len(), 3);
        assert_eq!(q.derivative().isolate_real_roots(&Scalar::new(1, 8)).len(), 2);
        // repeated root counted once
        let r = Polynomial::from_ints(&[1, -2, 1]);
        assert_eq!(r.count_roots(&s(-5), &s(5)), 1);
    }

    #[test]
    fn root_free_pieces_avoid_roots() {
        let q = Polynomial::from_ints(&[0, -3, 0, 1]);
        let polys = vec![q.derivative(), q.derivative().derivative()];
        let pieces = root_free_intervals(&polys, &s(-4), &s(4));
        assert!(!pieces.is_empty());
        for (a, b) in &pieces {
            for p in &polys {
                assert!(constant_sign(p, a, b).is_some());
            }
        }
        // roots at -1, 0, 1 split [-4, 4] into four pieces
        assert_eq!(pieces.len(), 4);
    }
}
