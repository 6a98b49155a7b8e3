//! Certified rational enclosures of `ln`, `exp` and rational powers.
//!
//! Every routine returns an interval `[lo, hi]` with rational endpoints that
//! is guaranteed to contain the true real value.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Enclosure {
    pub fn point(x: Scalar) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// True when the width is below `2^-bits`.
    pub fn is_tighter_than(&self, bits: u32) -> bool {
        self.width() < Scalar::new(1, BigInt::one() << bits as usize)
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    /// `Some(Less)` / `Some(Greater)` when the enclosures are disjoint.
    pub fn separated(&self, other: &Enclosure) -> Option<std::cmp::Ordering> {
        if self.hi < other.lo {
            Some(std::cmp::Ordering::Less)
        } else if other.hi < self.lo {
            Some(std::cmp::Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi {
            Some(std::cmp::Ordering::Equal)
        } else {
            None
        }
    }

    /// Midpoint, used for diagnostic output only.
    pub fn midpoint(&self) -> Scalar {
        (&self.lo + &self.hi) / Scalar::integer(2)
    }
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn pow2(e: i64) -> Scalar {
    if e >= 0 {
        Scalar::integer(BigInt::one() << e as usize)
    } else {
        Scalar::new(1, BigInt::one() << (-e) as usize)
    }
}

/// floor(log2 |x|) approximated from bit lengths (may be off by one).
fn magnitude(x: &Scalar) -> i64 {
    x.numer().bits() as i64 - x.denom().bits() as i64
}

/// Rounds to `bits` significant bits, down (`up = false`) or up.
fn round_rel(x: &Scalar, bits: u32, up: bool) -> Scalar {
    if x.is_zero() {
        return x.clone();
    }
    let grid = pow2(magnitude(x) - bits as i64);
    let q = x / &grid;
    let k = if up { q.ceil() } else { q.floor() };
    Scalar::integer(k) * grid
}

/// `atanh(p/q)` scaled by `2^w`, for `0 <= p/q <= 1/3`, as `[s, s + err]`.
fn atanh_fixed(p: &BigInt, q: &BigInt, w: u32) -> (BigInt, BigInt) {
    let scale = BigInt::one() << w as usize;
    let p2 = p * p;
    let q2 = q * q;
    let mut t = (&scale * p) / q;
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    while !t.is_zero() {
        sum += &t / BigInt::from(2 * i + 1);
        t = (&t * &p2) / &q2;
        i += 1;
    }
    // floor errors: at most i + 1 per power and 1 per quotient; tail bounded
    // by (i + 2) * 9/8.
    let err = BigInt::from(4 * i + 4);
    (sum, err)
}

fn atanh_enclosure(y: &Scalar, w: u32) -> Enclosure {
    let neg = y.is_negative();
    let a = y.abs();
    let (s, err) = atanh_fixed(a.numer(), a.denom(), w);
    let scale = BigInt::one() << w as usize;
    let lo = Scalar::new(s.clone(), scale.clone());
    let hi = Scalar::new(s + err, scale);
    if neg {
        Enclosure::new(-hi, -lo)
    } else {
        Enclosure::new(lo, hi)
    }
}

/// Encloses `ln 2` to about `w` bits.
pub fn ln2(w: u32) -> Enclosure {
    let a = atanh_enclosure(&Scalar::new(1, 3), w);
    Enclosure::new(&a.lo * Scalar::integer(2), &a.hi * Scalar::integer(2))
}

/// Encloses `ln x` for `x > 0`, with width below `2^-bits`.
pub fn ln(x: &Scalar, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "ln of a non-positive value");
    if x == &Scalar::one() {
        return Enclosure::point(Scalar::zero());
    }
    let e = magnitude(x);
    let m = x / pow2(e);
    // m lies in (1/2, 2); y in (-1/3, 1/3).
    let y = (&m - Scalar::one()) / (&m + Scalar::one());
    let guard = 40 + (e.unsigned_abs() + 1).ilog2() + 1;
    let w = bits + guard;
    let at = atanh_enclosure(&y, w);
    let two = Scalar::integer(2);
    let lnm = Enclosure::new(&at.lo * &two, &at.hi * &two);
    let l2 = ln2(w);
    let es = Scalar::integer(e);
    let scaled = if e >= 0 {
        Enclosure::new(&l2.lo * &es, &l2.hi * &es)
    } else {
        Enclosure::new(&l2.hi * &es, &l2.lo * &es)
    };
    let out = scaled.add(&lnm);
    Enclosure::new(round_rel(&out.lo, w, false), round_rel(&out.hi, w, true))
}

/// `exp(r)` for `|r| <= 1/2` by Taylor series with a remainder bound.
fn exp_small(r: &Scalar, w: u32) -> Enclosure {
    let p = r.numer().clone();
    let q = r.denom().clone();
    // Enough terms that |r|^K / K! < 2^-(w+2).
    let mut k: u64 = 1;
    let mut bound_bits = 0.0f64;
    while bound_bits < (w + 4) as f64 {
        k += 1;
        bound_bits += 1.0 + (k as f64).log2();
    }
    // sum_{i<k} p^i q^(k-1-i) (k-1)!/i!  over  q^(k-1) (k-1)!
    let mut num = BigInt::zero();
    let mut fact_ratio = BigInt::one();
    let mut p_pow = BigInt::one();
    let mut q_pows: Vec<BigInt> = Vec::with_capacity(k as usize);
    q_pows.push(BigInt::one());
    for _ in 1..k {
        let next = q_pows.last().unwrap() * &q;
        q_pows.push(next);
    }
    let mut p_pows = Vec::with_capacity(k as usize);
    for _ in 0..k {
        p_pows.push(p_pow.clone());
        p_pow *= &p;
    }
    // (k-1)!/i! accumulates from the top term down.
    for i in (0..k).rev() {
        num += &p_pows[i as usize] * &q_pows[(k - 1 - i) as usize] * &fact_ratio;
        fact_ratio *= BigInt::from(i.max(1));
    }
    let kfact: BigInt = (1..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    let den = &q_pows[(k - 1) as usize] * &kfact;
    let partial = Scalar::new(num, den);
    let tail = Scalar::new(1, BigInt::one() << (w + 2) as usize);
    Enclosure::new(round_rel(&(&partial - &tail), w, false), round_rel(&(&partial + &tail), w, true))
}

/// Encloses `exp x`, with width below `2^-bits`.
pub fn exp(x: &Scalar, bits: u32) -> Enclosure {
    if x.is_zero() {
        return Enclosure::point(Scalar::one());
    }
    let mut s: u32 = 0;
    let half = Scalar::new(1, 2);
    while (x.abs() / pow2(s as i64)) > half {
        s += 1;
    }
    // Result magnitude up to e^|x|; squaring doubles relative error s times.
    let size_bits = (x.abs().to_f64() * std::f64::consts::LOG2_E).ceil().max(0.0) as u32;
    let w = bits + size_bits + 2 * s + 40;
    let r = x / pow2(s as i64);
    let mut enc = exp_small(&r, w);
    for _ in 0..s {
        enc = Enclosure::new(
            round_rel(&(&enc.lo * &enc.lo), w, false),
            round_rel(&(&enc.hi * &enc.hi), w, true),
        );
    }
    enc
}

/// Encloses `x^(p/q)` for `x > 0`, `q >= 1`, with width below `2^-bits`.
pub fn rational_power(x: &Scalar, exponent: &Scalar, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "rational power of a non-positive value");
    let p = exponent.numer().to_i32().expect("exponent numerator fits i32");
    let q = exponent.denom().to_u32().expect("exponent denominator fits u32");
    let base = x.pow(p.abs());
    if q == 1 {
        let v = if p < 0 { base.recip() } else { base };
        return Enclosure::point(v);
    }
    let big_p = base.numer().to_biguint().expect("positive");
    let big_q = base.denom().to_biguint().expect("positive");
    let mut w = bits + 8;
    loop {
        // (P Q^(q-1) 2^(qw))^(1/q) / (Q 2^w)
        let radicand: BigUint = (&big_p * big_q.pow(q - 1)) << (q as usize * w as usize);
        let r = radicand.nth_root(q);
        let exact = r.pow(q) == radicand;
        let den = BigInt::from(big_q.clone()) << w as usize;
        let lo = Scalar::new(BigInt::from(r.clone()), den.clone());
        let hi = if exact {
            lo.clone()
        } else {
            Scalar::new(BigInt::from(r + 1u32), den)
        };
        let enc = if p < 0 {
            if lo.is_zero() {
                w *= 2;
                continue;
            }
            Enclosure::new(hi.recip(), lo.recip())
        } else {
            Enclosure::new(lo, hi)
        };
        if enc.is_tighter_than(bits) {
            return enc;
        }
        w *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn near(e: &Enclosure, v: f64, tol: f64) -> bool {
        (e.lo.to_f64() - v).abs() < tol && (e.hi.to_f64() - v).abs() < tol
    }

    #[test]
    fn ln_of_eight() {
        let e = ln(&Scalar::integer(8), 20);
        assert!(e.is_tighter_than(20));
        assert!(e.lo < Scalar::new(20795, 10000) && e.hi > Scalar::new(20794, 10000));
        assert!(near(&e, 8f64.ln(), 1e-6));
    }

    #[test]
    fn ln_small_and_large_arguments() {
        for (x, v) in [(Scalar::new(1, 1000), (0.001f64).ln()), (Scalar::integer(123456789), 123456789f64.ln())] {
            let e = ln(&x, 60);
            assert!(e.is_tighter_than(60));
            assert!(near(&e, v, 1e-9));
        }
        assert_eq!(ln(&Scalar::one(), 10), Enclosure::point(Scalar::zero()));
    }

    #[test]
    fn ln_high_precision_brackets_ln2() {
        // ln 2 = 0.693147180559945309417232121458176568...
        let e = ln(&Scalar::integer(2), 200);
        assert!(e.is_tighter_than(200));
        let lo: Scalar = "0.69314718055994530941723212145817656".parse().unwrap();
        let hi: Scalar = "0.69314718055994530941723212145817658".parse().unwrap();
        assert!(e.lo > lo && e.hi < hi);
    }

    #[test]
    fn exp_values() {
        let e = exp(&Scalar::one(), 64);
        assert!(e.is_tighter_than(64));
        assert!(near(&e, std::f64::consts::E, 1e-12));
        let e = exp(&Scalar::integer(-5), 40);
        assert!(near(&e, (-5f64).exp(), 1e-12));
        let e = exp(&Scalar::integer(20), 10);
        assert!(e.is_tighter_than(10));
        assert!(near(&e, 20f64.exp(), 1e-3));
    }

    #[test]
    fn exp_ln_roundtrip_brackets_identity() {
        let x = Scalar::new(7, 3);
        let l = ln(&x, 80);
        let lo = exp(&l.lo, 80).lo;
        let hi = exp(&l.hi, 80).hi;
        assert!(lo <= x && x <= hi);
    }

    #[test]
    fn rational_powers() {
        let e = rational_power(&Scalar::integer(4), &Scalar::new(5, 2), 30);
        assert_eq!(e, Enclosure::point(Scalar::integer(32)));
        let e = rational_power(&Scalar::integer(2), &Scalar::new(1, 2), 50);
        assert!(e.is_tighter_than(50));
        assert!(near(&e, 2f64.sqrt(), 1e-14));
        let e = rational_power(&Scalar::integer(3), &Scalar::new(-3, 2), 40);
        assert!(near(&e, 3f64.powf(-1.5), 1e-12));
        assert_eq!(rational_power(&Scalar::integer(3), &Scalar::integer(-2), 8), Enclosure::point(Scalar::new(1, 9)));
    }
}
