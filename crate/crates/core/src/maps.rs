//! Symbolic convex maps `f`, their forward differences `Δ_{h₁,…,h_j} f`, and
//! the grid check that each `Δ_{h₁,…,h_j} f` is strictly monotone.
//!
//! Every map has a *ground* monoid (how points are shifted) and, when exact,
//! a *value carrier* (how values combine). Log-type maps never evaluate a
//! logarithm on a counting path: `log x` is carried as `x` in the
//! multiplicative monoid, and `log(1 + eˣ)` is carried as `1 + a` with
//! ground carrier `a = eˣ`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::enclosure::{self, Enclosure};
use crate::error::{Error, Result};
use crate::poly::{self, Polynomial};
use crate::scalar::Scalar;
use crate::set::{GroupedSet, Monoid};

pub const DEFAULT_START_BITS: u32 = 128;
pub const DEFAULT_MAX_BITS: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MapKind {
    Polynomial(Polynomial),
    IntegerPower(u32),
    /// `x^alpha` for rational `alpha`; `bits` is the default working precision.
    RealPower { alpha: Scalar, bits: u32 },
    Log,
    /// `log(1 + eˣ)`, evaluated on ground carriers `a = eˣ`.
    ShiftedLogExp,
}

/// Closed interval of admissible ground carriers; `None` is unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Domain {
    pub lo: Option<Scalar>,
    pub hi: Option<Scalar>,
}

impl Domain {
    pub fn everywhere() -> Self {
        Domain::default()
    }

    pub fn between(lo: Scalar, hi: Scalar) -> Self {
        Domain { lo: Some(lo), hi: Some(hi) }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo <= x) && self.hi.as_ref().is_none_or(|hi| x <= hi)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            Some(lo) => write!(f, "{lo}")?,
            None => f.write_str("-inf")?,
        }
        f.write_str("..")?;
        match &self.hi {
            Some(hi) => write!(f, "{hi}"),
            None => f.write_str("inf"),
        }
    }
}

/// A value of `f`: exact scalar in the value carrier, or a certified
/// enclosure of the real value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    Exact(Scalar),
    Enclosed(Enclosure),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConvexMap {
    pub kind: MapKind,
    pub domain: Domain,
}

impl ConvexMap {
    pub fn polynomial(coeffs: Vec<Scalar>) -> Result<Self> {
        let p = Polynomial::new(coeffs);
        if p.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidArgument("polynomial maps need degree >= 1".into()));
        }
        Ok(ConvexMap { kind: MapKind::Polynomial(p), domain: Domain::everywhere() })
    }

    pub fn power(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument("integer power needs k >= 2".into()));
        }
        Ok(ConvexMap { kind: MapKind::IntegerPower(k), domain: Domain::everywhere() })
    }

    pub fn real_power(alpha: Scalar, bits: u32) -> Self {
        ConvexMap {
            kind: MapKind::RealPower { alpha, bits },
            domain: Domain { lo: Some(Scalar::zero()), hi: None },
        }
    }

    pub fn log() -> Self {
        ConvexMap { kind: MapKind::Log, domain: Domain { lo: Some(Scalar::zero()), hi: None } }
    }

    pub fn shifted_log_exp() -> Self {
        ConvexMap {
            kind: MapKind::ShiftedLogExp,
            domain: Domain { lo: Some(Scalar::zero()), hi: None },
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// Polynomial form, for `Polynomial` and `IntegerPower`.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        match &self.kind {
            MapKind::Polynomial(p) => Some(p.clone()),
            MapKind::IntegerPower(k) => Some(Polynomial::monomial(*k as usize)),
            _ => None,
        }
    }

    /// Monoid in which ground points are shifted.
    pub fn ground_monoid(&self) -> Monoid {
        match self.kind {
            MapKind::ShiftedLogExp => Monoid::Multiplicative,
            _ => Monoid::Additive,
        }
    }

    /// Monoid of exact value carriers; `None` for inexact maps.
    pub fn value_monoid(&self) -> Option<Monoid> {
        match self.kind {
            MapKind::Polynomial(_) | MapKind::IntegerPower(_) => Some(Monoid::Additive),
            MapKind::Log | MapKind::ShiftedLogExp => Some(Monoid::Multiplicative),
            MapKind::RealPower { .. } => None,
        }
    }

    fn requires_positive(&self) -> bool {
        !matches!(self.kind, MapKind::Polynomial(_) | MapKind::IntegerPower(_))
    }

    pub fn check_point(&self, x: &Scalar) -> Result<()> {
        if !self.domain.contains(x) || (self.requires_positive() && !x.is_positive()) {
            return Err(Error::DomainViolation { value: x.clone(), domain: self.domain.to_string() });
        }
        Ok(())
    }

    /// Exact value carrier of `f` at ground carrier `x`.
    pub fn carrier(&self, x: &Scalar) -> Option<Scalar> {
        match &self.kind {
            MapKind::Polynomial(p) => Some(p.eval(x)),
            MapKind::IntegerPower(k) => Some(x.pow(*k as i32)),
            MapKind::Log => Some(x.clone()),
            MapKind::ShiftedLogExp => Some(Scalar::one() + x),
            MapKind::RealPower { .. } => None,
        }
    }

    /// Certified enclosure of the real value `f(x)` at ground carrier `x`.
    pub fn enclose(&self, x: &Scalar, bits: u32) -> Enclosure {
        match &self.kind {
            MapKind::Polynomial(_) | MapKind::IntegerPower(_) => {
                Enclosure::point(self.carrier(x).expect("exact"))
            }
            MapKind::RealPower { alpha, .. } => enclosure::rational_power(x, alpha, bits),
            MapKind::Log => enclosure::ln(x, bits),
            MapKind::ShiftedLogExp => enclosure::ln(&(Scalar::one() + x), bits),
        }
    }

    /// Evaluates `f` at the real point `x` (not a carrier).
    ///
    /// Polynomial maps are exact; the others return an enclosure of width
    /// below `2^-bits`.
    pub fn evaluate(&self, x: &Scalar, bits: u32) -> Result<Evaluation> {
        match &self.kind {
            MapKind::Polynomial(_) | MapKind::IntegerPower(_) => {
                self.check_point(x)?;
                Ok(Evaluation::Exact(self.carrier(x).expect("exact")))
            }
            MapKind::RealPower { .. } | MapKind::Log => {
                self.check_point(x)?;
                Ok(Evaluation::Enclosed(self.enclose(x, bits)))
            }
            MapKind::ShiftedLogExp => {
                // log(1 + e^x) is increasing in e^x, so enclose e^x first.
                let e = enclosure::exp(x, bits + 4);
                let lo = enclosure::ln(&(Scalar::one() + &e.lo), bits + 2).lo;
                let hi = enclosure::ln(&(Scalar::one() + &e.hi), bits + 2).hi;
                let out = Enclosure::new(lo, hi);
                if !out.is_tighter_than(bits) {
                    return Err(Error::PrecisionExhausted { bits });
                }
                Ok(Evaluation::Enclosed(out))
            }
        }
    }

    /// `f(A)` as a set of value carriers.
    pub fn map_set(&self, a: &GroupedSet) -> Result<GroupedSet> {
        let value_monoid = self
            .value_monoid()
            .ok_or_else(|| Error::InexactValues(self.to_string()))?;
        if a.is_empty() {
            return GroupedSet::new(Vec::new(), value_monoid);
        }
        for x in a.elements() {
            self.check_point(x)?;
        }
        let (lo, hi) = (a.min().unwrap(), a.max().unwrap());
        if lo < hi {
            self.monotone_direction(lo, hi)?;
        }
        let values = a.elements().iter().map(|x| self.carrier(x).expect("exact")).collect();
        GroupedSet::new(values, value_monoid)
    }

    /// Direction (+1 / -1) of `f` on `[lo, hi]`, or `NotMonotone`.
    pub fn monotone_direction(&self, lo: &Scalar, hi: &Scalar) -> Result<i8> {
        match &self.kind {
            MapKind::Log | MapKind::ShiftedLogExp => Ok(1),
            MapKind::RealPower { alpha, .. } => match alpha.signum() {
                0 => Err(Error::NotMonotone { lo: lo.clone(), hi: hi.clone() }),
                s => Ok(s),
            },
            MapKind::Polynomial(_) | MapKind::IntegerPower(_) => {
                let d = self.as_polynomial().expect("polynomial").derivative();
                let pieces = poly::root_free_intervals(std::slice::from_ref(&d), lo, hi);
                let signs: Vec<i8> = pieces.iter().map(|(a, _)| d.sign_at(a)).collect();
                match signs.first() {
                    Some(&s) if signs.iter().all(|&t| t == s) => Ok(s),
                    _ => Err(Error::NotMonotone { lo: lo.clone(), hi: hi.clone() }),
                }
            }
        }
    }

    /// Signs of `f′, …, f⁽ⁿ⁾` on the ground-carrier interval `[lo, hi]`,
    /// certified non-vanishing; fails with `NotKConvexFunction` otherwise.
    pub fn derivative_signs(&self, n: usize, lo: &Scalar, hi: &Scalar) -> Result<Vec<i8>> {
        let fail = |order: usize| Error::NotKConvexFunction {
            k: n.saturating_sub(1),
            detail: format!("derivative {order} vanishes on [{lo}, {hi}]"),
        };
        match &self.kind {
            MapKind::Polynomial(_) | MapKind::IntegerPower(_) => {
                let p = self.as_polynomial().expect("polynomial");
                (1..=n)
                    .map(|j| poly::constant_sign(&p.nth_derivative(j), lo, hi).ok_or_else(|| fail(j)))
                    .collect()
            }
            MapKind::Log => {
                if !lo.is_positive() {
                    return Err(fail(1));
                }
                // f^(j) = (-1)^(j-1) (j-1)! x^-j
                Ok((1..=n).map(|j| if j % 2 == 1 { 1 } else { -1 }).collect())
            }
            MapKind::RealPower { alpha, .. } => {
                if !lo.is_positive() {
                    return Err(fail(1));
                }
                // f^(j) = alpha (alpha-1) ... (alpha-j+1) x^(alpha-j)
                let mut sign = 1i8;
                let mut out = Vec::with_capacity(n);
                for j in 1..=n {
                    let factor = alpha - Scalar::integer(j as i64 - 1);
                    if factor.is_zero() {
                        return Err(fail(j));
                    }
                    sign *= factor.signum();
                    out.push(sign);
                }
                Ok(out)
            }
            MapKind::ShiftedLogExp => {
                if !lo.is_positive() {
                    return Err(fail(1));
                }
                // With s = a/(1+a): f' = s and d/dx P(s) = P'(s) s (1 - s).
                let logistic = Polynomial::from_ints(&[0, 1, -1]);
                let s_lo = lo / (Scalar::one() + lo);
                let s_hi = hi / (Scalar::one() + hi);
                let mut p = Polynomial::from_ints(&[0, 1]);
                let mut out = Vec::with_capacity(n);
                for j in 1..=n {
                    out.push(poly::constant_sign(&p, &s_lo, &s_hi).ok_or_else(|| fail(j))?);
                    p = p.derivative().mul(&logistic);
                }
                Ok(out)
            }
        }
    }

    /// `Δ_h f`.
    pub fn delta(&self, h: &Scalar) -> Result<DeltaMap> {
        DeltaMap::new(self.clone(), Vec::new())?.delta(h)
    }
}

impl fmt::Display for ConvexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::Polynomial(p) => write!(f, "{p}")?,
            MapKind::IntegerPower(k) => write!(f, "power: {k}")?,
            MapKind::RealPower { alpha, bits } => write!(f, "real-power: {}@{bits}bits", decimal_or_ratio(alpha))?,
            MapKind::Log => f.write_str("log")?,
            MapKind::ShiftedLogExp => f.write_str("shifted-log-exp")?,
        }
        write!(f, "; domain: {}", self.domain)
    }
}

fn decimal_or_ratio(x: &Scalar) -> String {
    // Terminating decimals render as decimals so `2.5` survives a round trip.
    let mut d = x.denom().clone();
    let mut digits = 0u32;
    let ten = num_bigint::BigInt::from(10);
    let one = num_bigint::BigInt::from(1);
    while d != one && digits < 40 {
        if (&d % 2u32) == 0u32.into() {
            d /= 2u32;
        } else if (&d % 5u32) == 0u32.into() {
            d /= 5u32;
        } else {
            return x.to_string();
        }
        digits += 1;
    }
    if d != one {
        return x.to_string();
    }
    let scaled = (x * Scalar::integer(ten.pow(digits))).numer().clone();
    if digits == 0 {
        return scaled.to_string();
    }
    let neg = scaled.sign() == num_bigint::Sign::Minus;
    let s = scaled.magnitude().to_string();
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

impl FromStr for ConvexMap {
    type Err = Error;

    /// Parses `key: value` records separated by newlines or `;`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 1, msg };
        let mut map: Option<ConvexMap> = None;
        let mut domain: Option<Domain> = None;
        for part in s.split(['\n', ';']).map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = match part.split_once(':') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (part, ""),
            };
            match key {
                "poly" => {
                    let coeffs = value
                        .split(',')
                        .map(|c| c.trim().parse::<Scalar>().map_err(|e| bad(e.to_string())))
                        .collect::<Result<Vec<_>>>()?;
                    map = Some(ConvexMap::polynomial(coeffs)?);
                }
                "power" => {
                    let k: u32 = value.parse().map_err(|_| bad(format!("bad power `{value}`")))?;
                    map = Some(ConvexMap::power(k)?);
                }
                "real-power" => {
                    let (alpha, bits) = match value.split_once('@') {
                        Some((a, b)) => {
                            let b = b.trim().trim_end_matches("bits");
                            (a.trim(), b.parse().map_err(|_| bad(format!("bad precision `{b}`")))?)
                        }
                        None => (value, DEFAULT_START_BITS),
                    };
                    let alpha: Scalar = alpha.parse().map_err(|e: crate::scalar::ParseScalarError| bad(e.to_string()))?;
                    map = Some(ConvexMap::real_power(alpha, bits));
                }
                "log" => map = Some(ConvexMap::log()),
                "shifted-log-exp" => map = Some(ConvexMap::shifted_log_exp()),
                "domain" => {
                    let (lo, hi) = value
                        .split_once("..")
                        .ok_or_else(|| bad(format!("bad domain `{value}`")))?;
                    let bound = |t: &str| -> Result<Option<Scalar>> {
                        match t.trim() {
                            "-inf" | "inf" | "+inf" | "" => Ok(None),
                            v => v.parse().map(Some).map_err(|e: crate::scalar::ParseScalarError| bad(e.to_string())),
                        }
                    };
                    domain = Some(Domain { lo: bound(lo)?, hi: bound(hi)? });
                }
                other => return Err(bad(format!("unknown map field `{other}`"))),
            }
        }
        let map = map.ok_or_else(|| bad("missing map kind".into()))?;
        Ok(match domain {
            Some(d) => map.with_domain(d),
            None => map,
        })
    }
}

/// `Δ_{h₁,…,h_j} f`, as a composable handle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaMap {
    base: ConvexMap,
    steps: Vec<Scalar>,
    domain: Domain,
}

impl DeltaMap {
    pub fn new(base: ConvexMap, steps: Vec<Scalar>) -> Result<Self> {
        let mut d = DeltaMap { domain: base.domain.clone(), base, steps: Vec::new() };
        for h in steps {
            d = d.delta(&h)?;
        }
        Ok(d)
    }

    pub fn base(&self) -> &ConvexMap {
        &self.base
    }

    pub fn steps(&self) -> &[Scalar] {
        &self.steps
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// One more difference; the domain shrinks to `[lo, hi − h]`.
    pub fn delta(&self, h: &Scalar) -> Result<DeltaMap> {
        let g = self.base.ground_monoid();
        let valid = match g {
            Monoid::Additive => h.is_positive(),
            Monoid::Multiplicative => h > &Scalar::one(),
        };
        if !valid {
            return Err(Error::InvalidArgument(format!("step {h} must be a positive shift")));
        }
        let hi = self.domain.hi.as_ref().map(|hi| g.diff(hi, h));
        if let (Some(lo), Some(hi)) = (&self.domain.lo, &hi) {
            if hi <= lo {
                return Err(Error::EmptyDomain { shift: h.clone() });
            }
        }
        let mut steps = self.steps.clone();
        steps.push(h.clone());
        Ok(DeltaMap { base: self.base.clone(), steps, domain: Domain { lo: self.domain.lo.clone(), hi } })
    }

    /// Points `x ∘ Σ_S h` with their signs: `+` when `|steps| − |S|` is even.
    pub fn expansion(&self, x: &Scalar) -> (Vec<Scalar>, Vec<Scalar>) {
        let g = self.base.ground_monoid();
        let k = self.steps.len();
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for mask in 0u64..(1 << k) {
            let point = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .fold(x.clone(), |acc, i| g.op(&acc, &self.steps[i]));
            if (k - mask.count_ones() as usize).is_multiple_of(2) {
                plus.push(point);
            } else {
                minus.push(point);
            }
        }
        (plus, minus)
    }

    /// Exact value carrier of `Δ f(x)`.
    pub fn carrier(&self, x: &Scalar) -> Option<Scalar> {
        let vm = self.base.value_monoid()?;
        let (plus, minus) = self.expansion(x);
        let p: Vec<Scalar> = plus.iter().map(|y| self.base.carrier(y)).collect::<Option<_>>()?;
        let m: Vec<Scalar> = minus.iter().map(|y| self.base.carrier(y)).collect::<Option<_>>()?;
        Some(vm.signed_fold(&p, &m))
    }

    /// Enclosure of the real value `Δ f(x)`.
    pub fn enclose(&self, x: &Scalar, bits: u32) -> Enclosure {
        let (plus, minus) = self.expansion(x);
        let extra = self.steps.len() as u32 + 2;
        let zero = Enclosure::point(Scalar::zero());
        let p = plus.iter().fold(zero.clone(), |acc, y| acc.add(&self.base.enclose(y, bits + extra)));
        let m = minus.iter().fold(zero, |acc, y| acc.add(&self.base.enclose(y, bits + extra)));
        p.sub(&m)
    }

    /// Exact polynomial form for polynomial bases.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        let p = self.base.as_polynomial()?;
        Some(self.steps.iter().fold(p, |acc, h| acc.forward_difference(h)))
    }

    pub fn check_point(&self, x: &Scalar) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::DomainViolation { value: x.clone(), domain: self.domain.to_string() });
        }
        self.base.check_point(x)
    }

    /// Evaluates at ground carrier `x`: exact when the base is exact.
    pub fn evaluate(&self, x: &Scalar, bits: u32) -> Result<Evaluation> {
        self.check_point(x)?;
        Ok(match self.carrier(x) {
            Some(v) => Evaluation::Exact(v),
            None => Evaluation::Enclosed(self.enclose(x, bits)),
        })
    }

    /// Compares `Δ f(x)` and `Δ f(y)` exactly, refining enclosures for
    /// inexact maps from `start` up to `max` bits.
    pub fn compare(&self, x: &Scalar, y: &Scalar, start: u32, max: u32) -> Result<Ordering> {
        if let (Some(a), Some(b)) = (self.carrier(x), self.carrier(y)) {
            return Ok(a.cmp(&b));
        }
        if x == y {
            return Ok(Ordering::Equal);
        }
        let mut bits = start;
        loop {
            if let Some(o) = self.enclose(x, bits).separated(&self.enclose(y, bits)) {
                return Ok(o);
            }
            if bits >= max {
                return Err(Error::PrecisionExhausted { bits: max });
            }
            bits = (bits * 2).min(max);
        }
    }
}

/// Outcome of a strict-monotonicity check at one difference level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCheck {
    /// Number of differences taken (0 = f itself).
    pub level: usize,
    pub steps: Vec<Scalar>,
    /// +1 increasing, -1 decreasing, 0 when the check failed.
    pub direction: i8,
}

/// First failure: the grid points where strict monotonicity breaks, two
/// equal values or three points with a change of direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub level: usize,
    pub points: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityCheck {
    pub passed: bool,
    pub levels: Vec<LevelCheck>,
    pub violation: Option<Violation>,
}

/// Direction of the sequence `values(grid)` or the violating points.
fn grid_direction(
    delta: &DeltaMap,
    grid: &[Scalar],
    start: u32,
    max: u32,
) -> Result<std::result::Result<i8, Vec<Scalar>>> {
    let exact: Option<Vec<Scalar>> = match delta.as_polynomial() {
        Some(p) => Some(grid.iter().map(|x| p.eval(x)).collect()),
        None => grid.iter().map(|x| delta.carrier(x)).collect(),
    };
    let mut dir = 0i8;
    for i in 1..grid.len() {
        let order = match &exact {
            Some(v) => v[i - 1].cmp(&v[i]),
            None => delta.compare(&grid[i - 1], &grid[i], start, max)?,
        };
        let step = match order {
            Ordering::Less => 1,
            Ordering::Greater => -1,
            Ordering::Equal => return Ok(Err(vec![grid[i - 1].clone(), grid[i].clone()])),
        };
        if dir != 0 && step != dir {
            return Ok(Err(vec![grid[i - 2].clone(), grid[i - 1].clone(), grid[i].clone()]));
        }
        dir = step;
    }
    Ok(Ok(if dir == 0 { 1 } else { dir }))
}

/// Verifies that `f` and `Δ_{h₁,…,h_j} f` for every prefix of `steps` are
/// strictly monotone on `grid`.
pub fn function_convexity_check(
    f: &ConvexMap,
    k: usize,
    grid: &GroupedSet,
    steps: &[Scalar],
) -> Result<ConvexityCheck> {
    function_convexity_check_with(f, k, grid, steps, DEFAULT_START_BITS, DEFAULT_MAX_BITS)
}

pub fn function_convexity_check_with(
    f: &ConvexMap,
    k: usize,
    grid: &GroupedSet,
    steps: &[Scalar],
    start_bits: u32,
    max_bits: u32,
) -> Result<ConvexityCheck> {
    if steps.len() > k {
        return Err(Error::InvalidArgument(format!(
            "{} steps exceed convexity level {k}",
            steps.len()
        )));
    }
    let mut delta = DeltaMap::new(f.clone(), Vec::new())?;
    let mut levels = Vec::new();
    for level in 0..=steps.len() {
        if level > 0 {
            delta = delta.delta(&steps[level - 1])?;
        }
        for x in grid.elements() {
            delta.check_point(x)?;
        }
        match grid_direction(&delta, grid.elements(), start_bits, max_bits)? {
            Ok(direction) => levels.push(LevelCheck { level, steps: steps[..level].to_vec(), direction }),
            Err(points) => {
                levels.push(LevelCheck { level, steps: steps[..level].to_vec(), direction: 0 });
                return Ok(ConvexityCheck { passed: false, levels, violation: Some(Violation { level, points }) });
            }
        }
    }
    Ok(ConvexityCheck { passed: true, levels, violation: None })
}

/// Largest root-free interval inside `[lo, hi]` for `f′, …, f⁽ⁿ⁾` of a
/// polynomial map.
pub fn root_free_interval(f: &ConvexMap, n: usize, lo: &Scalar, hi: &Scalar) -> Option<(Scalar, Scalar)> {
    let p = f.as_polynomial()?;
    let derivs: Vec<Polynomial> = (1..=n).map(|j| p.nth_derivative(j)).filter(|d| !d.is_zero()).collect();
    poly::root_free_intervals(&derivs, lo, hi).into_iter().next()
}

/// Integer number of bits in `x`'s integer part, used for diagnostics.
pub fn integer_bits(x: &Scalar) -> u64 {
    x.floor().to_i64().map(|v| 64 - v.unsigned_abs().leading_zeros() as u64).unwrap_or(64)
}
