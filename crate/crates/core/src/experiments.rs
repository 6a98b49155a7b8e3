//! Reproduction harness: an independent oracle, bound checks and growth
//! reports with CSV and JSON output.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::construction::theorem3::{theorem3_bound, theorem3_witnesses, truncated_size};
use crate::construction::theorem4::theorem4_witnesses;
use crate::construction::WitnessBatch;
use crate::convexity::convexity_order;
use crate::enclosure;
use crate::error::{Error, Result};
use crate::families::Family;
use crate::maps::ConvexMap;
use crate::poly::{self, Polynomial};
use crate::scalar::Scalar;
use crate::set::{GroupedSet, Limits, Monoid};

/// `m·A − n·A` by direct enumeration of signed tuples, one summand at a
/// time, into an ordered set. Shares no code with the fold in `set`.
pub fn oracle_iterated(a: &GroupedSet, m: usize, n: usize, limits: Limits) -> Result<GroupedSet> {
    if m == 0 {
        return Err(Error::InvalidArgument("oracle requires m >= 1".into()));
    }
    if let Some(out) = oracle_i128(a, m, n, limits.cap)? {
        return GroupedSet::new(out.into_iter().map(Scalar::from).collect(), a.monoid());
    }
    let mon = a.monoid();
    let mut acc: BTreeSet<Scalar> = BTreeSet::from([mon.identity()]);
    let signs = std::iter::repeat_n(false, n).chain(std::iter::repeat_n(true, m));
    for positive in signs {
        let mut next = BTreeSet::new();
        for s in &acc {
            for x in a.elements() {
                let y = if positive { mon.op(s, x) } else { mon.op(s, &mon.inverse(x)) };
                next.insert(y);
            }
            if next.len() > limits.cap {
                return Err(Error::CapExceeded { cap: limits.cap });
            }
        }
        acc = next;
    }
    GroupedSet::new(acc.into_iter().collect(), mon)
}

fn oracle_i128(a: &GroupedSet, m: usize, n: usize, cap: usize) -> Result<Option<BTreeSet<i128>>> {
    if a.monoid() != Monoid::Additive || !a.elements().iter().all(Scalar::is_integer) {
        return Ok(None);
    }
    let Some(xs) = a.elements().iter().map(|x| x.numer().to_i128()).collect::<Option<Vec<i128>>>() else {
        return Ok(None);
    };
    if xs.iter().any(|x| x.unsigned_abs() >= 1 << 100) || m + n > 1 << 20 {
        return Ok(None);
    }
    let mut acc: BTreeSet<i128> = BTreeSet::from([0]);
    for step in 0..m + n {
        let sign = if step < n { -1 } else { 1 };
        let mut next = BTreeSet::new();
        for s in &acc {
            for x in &xs {
                next.insert(s + sign * x);
            }
            if next.len() > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
        acc = next;
    }
    Ok(Some(acc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
    ExpectedFailure,
    TooSmall,
    CapExceeded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::ReportOnly => "report-only",
            Verdict::ExpectedFailure => "expected-failure",
            Verdict::TooSmall => "too-small",
            Verdict::CapExceeded => "cap-exceeded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub map: String,
    #[serde(rename = "|A+A|")]
    pub sumset: Option<usize>,
    #[serde(rename = "|A+A-A|")]
    pub tripling: Option<usize>,
    #[serde(rename = "|AA/A|")]
    pub quotient: Option<usize>,
    pub measured: Option<usize>,
    pub bound: Option<String>,
    pub ratio: Option<f64>,
    pub verdict: Verdict,
    pub witnesses: Option<usize>,
    pub formula: Option<String>,
    pub digest: Option<String>,
    pub note: Option<String>,
}

impl ReportRow {
    pub fn new(family: &str, n: usize, k: usize, map: &str) -> Self {
        ReportRow {
            family: family.to_string(),
            n,
            k,
            map: map.to_string(),
            sumset: None,
            tripling: None,
            quotient: None,
            measured: None,
            bound: None,
            ratio: None,
            verdict: Verdict::ReportOnly,
            witnesses: None,
            formula: None,
            digest: None,
            note: None,
        }
    }

    fn add_note(&mut self, note: impl Into<String>) {
        let note = note.into();
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {note}"),
            None => note,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub check: String,
    pub rows: Vec<ReportRow>,
    /// Least-squares slope of `log measured` against `log N`.
    pub slope: Option<f64>,
    pub notes: Vec<String>,
}

pub const CSV_HEADER: &str = "family,N,k,map,|A+A|,|A+A-A|,|AA/A|,measured,bound,ratio,verdict";

impl ExperimentReport {
    pub fn new(check: &str) -> Self {
        ExperimentReport { check: check.to_string(), rows: Vec::new(), slope: None, notes: Vec::new() }
    }

    /// No row failed.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: &Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fields = [
                csv_field(&r.family),
                r.n.to_string(),
                r.k.to_string(),
                csv_field(&r.map),
                opt(&r.sumset),
                opt(&r.tripling),
                opt(&r.quotient),
                opt(&r.measured),
                r.bound.clone().unwrap_or_default(),
                r.ratio.map(|x| format!("{x:.4}")).unwrap_or_default(),
                r.verdict.to_string(),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Fits the slope over rows with a measurement.
    pub fn fit_slope(&mut self) {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| r.measured.filter(|&m| m > 0 && r.n > 1).map(|m| ((r.n as f64).ln(), (m as f64).ln())))
            .collect();
        self.slope = fit_slope(&pts);
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Least-squares slope; `None` with fewer than two distinct abscissae.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn ratio(measured: usize, bound: &Scalar) -> Option<f64> {
    (!bound.is_zero()).then(|| measured as f64 / bound.to_f64())
}

/// `count >= N^(3/2) / (log₂ N)^(3/2)`, decided exactly.
pub fn meets_threefold_bound(count: usize, n: usize) -> bool {
    if n <= 1 {
        return true;
    }
    let c2 = Scalar::from(count).pow(2);
    let n3 = Scalar::from(n).pow(3);
    if n.is_power_of_two() {
        let l = Scalar::from(n.ilog2());
        return c2 * l.pow(3) >= n3;
    }
    // log₂ N is irrational here, so the enclosures separate eventually.
    let two = Scalar::integer(2);
    let mut bits = 64;
    loop {
        let ln_n = enclosure::ln(&Scalar::from(n), bits);
        let ln_2 = enclosure::ln(&two, bits);
        let lo = &ln_n.lo / &ln_2.hi;
        let hi = &ln_n.hi / &ln_2.lo;
        if &c2 * lo.pow(3) >= n3 {
            return true;
        }
        if &c2 * hi.pow(3) < n3 {
            return false;
        }
        bits *= 2;
    }
}

pub fn threefold_bound_f64(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let n = n as f64;
    n.powf(1.5) / n.log2().powf(1.5)
}

/// `|A+A−A|` and, for positive sets, `|AA/A|`.
fn tripling_counts(a: &GroupedSet, limits: Limits) -> Result<(usize, Option<usize>)> {
    let add = a.retag(Monoid::Additive)?.iterated_cardinality_with(2, 1, limits)?;
    let mul = match a.retag(Monoid::Multiplicative) {
        Ok(m) => Some(m.iterated_cardinality_with(2, 1, limits)?),
        Err(_) => None,
    };
    Ok((add, mul))
}

fn batch_sound(batch: &WitnessBatch) -> std::result::Result<(), String> {
    if let Some((i, clause)) = batch.verify_all().into_iter().next() {
        return Err(format!("certificate {i} fails {clause}"));
    }
    if !batch.values_distinct() {
        return Err("certificate values repeat".into());
    }
    if !batch.intervals_disjoint() {
        return Err("branch intervals overlap".into());
    }
    Ok(())
}

/// Oracle membership is checked when `|A| <= 15` and `k <= 3`.
pub const THEOREM3_ORACLE_MAX: usize = 15;

pub fn check_theorem3(family: &Family, sizes: &[usize], k: usize, seed: u64, limits: Limits) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("theorem3");
    report.notes.push(format!(
        "measured = |{}A - {}A| on the truncated prefix; bound = N_trunc^{}/2^{}",
        1usize << k,
        (1usize << k) - 1,
        k + 1,
        k * k
    ));
    for &n in sizes {
        let a = family.generate(n, seed)?;
        report.rows.push(theorem3_row(&family.to_string(), &a, k, limits)?);
    }
    report.fit_slope();
    Ok(report)
}

pub fn theorem3_row(label: &str, a: &GroupedSet, k: usize, limits: Limits) -> Result<ReportRow> {
    let mut row = ReportRow::new(label, a.len(), k, "identity");
    row.formula = Some(format!("N_trunc^{} / 2^{}", k + 1, k * k));
    let order = convexity_order(a).order;
    if order < k {
        row.verdict = Verdict::ExpectedFailure;
        row.add_note(format!("not {k}-convex (order {order})"));
        return Ok(row);
    }
    let batch = match theorem3_witnesses(a, k) {
        Ok(b) => b,
        Err(Error::TooSmall { .. }) => {
            row.verdict = Verdict::TooSmall;
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    let t = &batch.input;
    let bound = theorem3_bound(truncated_size(a.len()), k);
    row.bound = Some(bound.to_string());
    row.witnesses = Some(batch.distinct_count());
    row.digest = Some(batch.digest());
    row.sumset = Some(t.iterated_cardinality_with(2, 0, limits)?);
    row.tripling = Some(t.iterated_cardinality_with(2, 1, limits)?);
    let (m, nn) = (1usize << k, (1usize << k) - 1);
    let measured = match t.iterated_cardinality_with(m, nn, limits) {
        Ok(c) => c,
        Err(Error::CapExceeded { .. }) => {
            row.add_note("cardinality over cap; witness count used");
            batch.distinct_count()
        }
        Err(e) => return Err(e),
    };
    row.measured = Some(measured);
    row.ratio = ratio(measured, &bound);
    let mut ok = Scalar::from(measured) >= bound;
    if let Err(why) = batch_sound(&batch) {
        row.add_note(why);
        ok = false;
    }
    if t.len() <= THEOREM3_ORACLE_MAX && k <= 3 {
        let oracle = oracle_iterated(t, m, nn, limits)?;
        if !batch.values().is_subset(&oracle) {
            row.add_note("witness outside the oracle set");
            ok = false;
        }
    }
    if !batch.meets_claim() {
        row.add_note(format!("witness count {} below bound", batch.distinct_count()));
    }
    row.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    Ok(row)
}

/// Sizes up to which convex-map batches are checked against enumeration.
fn theorem4_oracle_feasible(n: usize, k: usize) -> bool {
    (k == 1 && n <= 64) || (k == 2 && n <= 24)
}

pub fn check_theorem4(label: &str, a: &GroupedSet, f: &ConvexMap, k: usize, limits: Limits) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("theorem4");
    let mut row = ReportRow::new(label, a.len(), k, &f.to_string());
    let (tripling, _) = tripling_counts(&a.retag(f.ground_monoid())?, limits)?;
    row.tripling = Some(tripling);
    report.notes.push(format!("K = |A+A-A|/|A| = {}", Scalar::new(tripling as u64, a.len().max(1) as u64)));
    let batch = match theorem4_witnesses(a, f, k) {
        Ok(b) => b,
        Err(Error::TooSmall { needed, got }) => {
            row.verdict = Verdict::TooSmall;
            row.add_note(format!("needs |A| >= {needed}, got {got}"));
            report.rows.push(row);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let count = batch.distinct_count();
    row.measured = Some(count);
    row.witnesses = Some(count);
    row.digest = Some(batch.digest());
    let mut ok = true;
    if let Err(why) = batch_sound(&batch) {
        row.add_note(why);
        ok = false;
    }
    if theorem4_oracle_feasible(a.len(), k) {
        let (m, n) = (1usize << k, (1usize << k) - 1);
        let oracle = batch.ground.iterated_with(m, n, limits)?;
        if !batch.values().is_subset(&oracle) {
            row.add_note("witness outside the oracle set");
            ok = false;
        }
    }
    if k == 1 {
        let bound = &batch.claimed_count_bound;
        row.bound = Some(bound.to_string());
        row.formula = Some("m L^2 / 2".into());
        row.ratio = ratio(count, bound);
        ok &= batch.meets_claim();
        row.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    } else {
        let n = a.len() as f64;
        let eps = (k + 1) as f64 - (count as f64).ln() / n.ln();
        row.add_note(format!("count = N^({} - {eps:.4})", k + 1));
        row.verdict = if ok { Verdict::ReportOnly } else { Verdict::Fail };
    }
    report.rows.push(row);
    Ok(report)
}

/// `|X|^q <= N^(q+p)` for `δ = p/q`.
fn small_doubling(doubled: usize, n: usize, delta: &Scalar) -> bool {
    let p = delta.numer().to_u32().expect("small delta");
    let q = delta.denom().to_u32().expect("small delta");
    BigUint::from(doubled).pow(q) <= BigUint::from(n).pow(q + p)
}

/// Points of `a` in the root-free piece of `f′, …, f^(k)` holding the most
/// points.
pub fn root_free_subset(a: &GroupedSet, f: &Polynomial, k: usize) -> GroupedSet {
    let (Some(lo), Some(hi)) = (a.min(), a.max()) else {
        return a.clone();
    };
    if lo == hi {
        return a.clone();
    }
    let derivs: Vec<Polynomial> = (1..=k).map(|j| f.nth_derivative(j)).filter(|d| !d.is_zero()).collect();
    let pieces = poly::root_free_intervals(&derivs, lo, hi);
    let best = pieces
        .iter()
        .map(|(l, h)| a.elements().iter().filter(|x| l <= *x && *x <= h).cloned().collect::<Vec<_>>())
        .max_by_key(|v| v.len())
        .unwrap_or_default();
    GroupedSet::new(best, a.monoid()).expect("subset of a valid set")
}

/// Growth under small doubling, on one set. `poly` replaces `x^k` in part 3.
pub fn check_corollary(
    part: u8,
    label: &str,
    a: &GroupedSet,
    k: usize,
    delta: &Scalar,
    poly: Option<&Polynomial>,
    limits: Limits,
) -> Result<ExperimentReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if delta.is_negative() {
        return Err(Error::InvalidArgument("delta must be non-negative".into()));
    }
    let n = a.len();
    let (m, nn) = (1usize << (k - 1), (1usize << (k - 1)) - 1);
    let mut report = ExperimentReport::new(&format!("corollary{part}"));
    let mut row = ReportRow::new(label, n, k, "");
    match part {
        1 => {
            let add = a.retag(Monoid::Additive)?;
            let doubled = add.iterated_cardinality_with(2, 0, limits)?;
            row.sumset = Some(doubled);
            if !small_doubling(doubled, n, delta) {
                return Err(Error::HypothesisViolated { detail: format!("|A+A| = {doubled} > {n}^(1+{delta})") });
            }
            row.map = "log".into();
            let mul = a.retag(Monoid::Multiplicative)?;
            let measured = mul.iterated_cardinality_with(m, nn, limits)?;
            row.measured = Some(measured);
            if k == 2 {
                row.quotient = Some(measured);
            }
        }
        2 => {
            let mul = a.retag(Monoid::Multiplicative)?;
            let doubled = mul.iterated_cardinality_with(2, 0, limits)?;
            if !small_doubling(doubled, n, delta) {
                return Err(Error::HypothesisViolated { detail: format!("|AA| = {doubled} > {n}^(1+{delta})") });
            }
            row.map = "shifted-log-exp".into();
            let shifted = ConvexMap::shifted_log_exp().map_set(&mul)?;
            row.measured = Some(shifted.iterated_cardinality_with(m, nn, limits)?);
            row.add_note(format!("|AA| = {doubled}; measured on A+1"));
        }
        3 => {
            let add = a.retag(Monoid::Additive)?;
            let f = match poly {
                Some(p) => p.clone(),
                None => Polynomial::monomial(k),
            };
            if f.degree() != Some(k) {
                return Err(Error::InvalidArgument(format!("part 3 needs a degree-{k} polynomial")));
            }
            let sub = root_free_subset(&add, &f, k);
            if sub.len() < n {
                row.add_note(format!("restricted to {} points avoiding derivative roots", sub.len()));
            }
            let map = ConvexMap { kind: crate::maps::MapKind::Polynomial(f), domain: Default::default() };
            row.map = map.to_string();
            let image = map.map_set(&sub)?;
            row.measured = Some(image.iterated_cardinality_with(m, nn, limits)?);
        }
        _ => return Err(Error::InvalidArgument(format!("corollary part {part} does not exist"))),
    }
    let measured = row.measured.unwrap_or(0);
    let bound = Scalar::from(n).pow(k as i32);
    row.bound = Some(bound.to_string());
    row.formula = Some(format!("N^{k}"));
    row.ratio = ratio(measured, &bound);
    if n > 1 && measured > 0 {
        let eps = k as f64 - (measured as f64).ln() / (n as f64).ln();
        row.add_note(format!("epsilon = {eps:.4}"));
    }
    report.rows.push(row);
    Ok(report)
}

/// The same check across a family, with the fitted growth slope.
pub fn corollary_trend(
    part: u8,
    family: &Family,
    sizes: &[usize],
    k: usize,
    delta: &Scalar,
    seed: u64,
    limits: Limits,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(&format!("corollary{part}"));
    for &n in sizes {
        let a = family.generate(n, seed)?;
        let r = check_corollary(part, &family.to_string(), &a, k, delta, None, limits)?;
        report.rows.extend(r.rows);
    }
    report.fit_slope();
    Ok(report)
}

/// Both sides of the three-fold inequality. With `assert`, the bound with
/// constant 1 decides the verdict.
pub fn check_threefold(label: &str, a: &GroupedSet, assert: bool, limits: Limits) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("threefold");
    report.rows.push(threefold_row(label, a, assert, limits)?);
    Ok(report)
}

pub fn threefold_row(label: &str, a: &GroupedSet, assert: bool, limits: Limits) -> Result<ReportRow> {
    let n = a.len();
    let mut row = ReportRow::new(label, n, 1, "identity");
    let (add, mul) = tripling_counts(a, limits)?;
    row.tripling = Some(add);
    row.quotient = mul;
    let best = add.max(mul.unwrap_or(0));
    row.measured = Some(best);
    let bound = threefold_bound_f64(n);
    row.bound = Some(format!("{bound:.4}"));
    row.formula = Some("N^(3/2) / (log2 N)^(3/2)".into());
    row.ratio = (bound > 0.0).then(|| best as f64 / bound);
    let meets = meets_threefold_bound(best, n);
    row.verdict = match (assert, meets) {
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
        (false, _) => Verdict::ReportOnly,
    };
    if bound > 0.0 {
        row.add_note(format!("ratio |A+A-A| = {:.4}", add as f64 / bound));
        if let Some(q) = mul {
            row.add_note(format!("ratio |AA/A| = {:.4}", q as f64 / bound));
        }
    }
    if !meets {
        row.add_note("below the constant-1 bound");
    }
    Ok(row)
}

pub fn threefold_family(family: &Family, sizes: &[usize], assert: bool, seed: u64, limits: Limits) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("threefold");
    for &n in sizes {
        let a = family.generate(n, seed)?;
        report.rows.push(threefold_row(&family.to_string(), &a, assert, limits)?);
    }
    if let Some(min) = report.rows.iter().filter_map(|r| r.ratio).min_by(f64::total_cmp) {
        report.notes.push(format!("minimum ratio {min:.4}"));
    }
    Ok(report)
}

/// `|2^k A − (2^k − 1) A|` over a grid of `(k, N)` with per-`k` slopes.
pub fn growth_report(family: &Family, ks: &[usize], sizes: &[usize], seed: u64, limits: Limits) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("growth");
    let mut slopes = Vec::new();
    for &k in ks {
        let mut pts = Vec::new();
        for &n in sizes {
            let a = family.generate(n, seed)?;
            let mut row = ReportRow::new(&family.to_string(), n, k, "identity");
            let bound = theorem3_bound(n, k);
            row.bound = Some(bound.to_string());
            row.formula = Some(format!("N^{} / 2^{}; predicted exponent {}", k + 1, k * k, k + 1));
            match a.iterated_cardinality_with(1 << k, (1 << k) - 1, limits) {
                Ok(c) => {
                    row.measured = Some(c);
                    row.ratio = ratio(c, &bound);
                    if n > 1 && c > 0 {
                        pts.push(((n as f64).ln(), (c as f64).ln()));
                    }
                }
                Err(Error::CapExceeded { cap }) => {
                    row.verdict = Verdict::CapExceeded;
                    row.add_note(format!("cap {cap} exceeded"));
                }
                Err(e) => return Err(e),
            }
            report.rows.push(row);
        }
        if let Some(s) = fit_slope(&pts) {
            report.notes.push(format!("slope k={k}: {s:.4}"));
            slopes.push(s);
        }
    }
    if slopes.len() == 1 {
        report.slope = Some(slopes[0]);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> GroupedSet {
        GroupedSet::additive(v.iter().copied())
    }

    #[test]
    fn oracle_examples() {
        let l = Limits::default();
        assert_eq!(oracle_iterated(&ints(&[0, 1]), 2, 1, l).unwrap(), ints(&[-1, 0, 1, 2]));
        let golden = ints(&[-7, -4, -2, -1, 1, 4, 6, 7, 9, 12, 14, 17]);
        assert_eq!(oracle_iterated(&ints(&[1, 4, 9]), 2, 1, l).unwrap(), golden);
        let a = ints(&[3, 5, 11]);
        assert_eq!(oracle_iterated(&a, 1, 0, l).unwrap(), a);
        let g = GroupedSet::multiplicative([2, 4, 8]).unwrap();
        assert_eq!(oracle_iterated(&g, 2, 1, l).unwrap(), g.iterated(2, 1).unwrap());
        let r = GroupedSet::additive([Scalar::new(1, 2), Scalar::new(2, 3)]);
        assert_eq!(oracle_iterated(&r, 2, 2, l).unwrap(), r.iterated(2, 2).unwrap());
        assert_eq!(oracle_iterated(&ints(&[0, 1, 5]), 3, 3, Limits::with_cap(10)), Err(Error::CapExceeded { cap: 10 }));
    }

    #[test]
    fn threefold_examples() {
        let l = Limits::default();
        let ap = GroupedSet::additive(1..=64);
        let r = check_threefold("ap", &ap, true, l).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.tripling, Some(190));
        assert!((190.0 / threefold_bound_f64(64) - 5.4539).abs() < 1e-3);
        assert!(row.note.as_deref().unwrap().contains("ratio |A+A-A| = 5.4539"));
        assert_eq!(row.verdict, Verdict::Pass);

        let gp = GroupedSet::additive((1..=64).map(|i| Scalar::integer(2).pow(i)));
        let r = check_threefold("gp", &gp, true, l).unwrap();
        assert_eq!(r.rows[0].quotient, Some(190));
        assert!(r.passed());

        let one = check_threefold("one", &ints(&[5]), true, l).unwrap();
        assert_eq!(one.rows[0].verdict, Verdict::Pass);
    }

    #[test]
    fn threefold_bound_is_exact() {
        // 16^1.5 / 4^1.5 = 8
        assert!(meets_threefold_bound(8, 16));
        assert!(!meets_threefold_bound(7, 16));
        // 10^1.5 / log2(10)^1.5 = 5.2404...
        assert!(meets_threefold_bound(6, 10));
        assert!(!meets_threefold_bound(5, 10));
    }

    #[test]
    fn theorem3_rows() {
        let l = Limits::default();
        let r = check_theorem3(&Family::Powers(3), &[15], 2, 0, l).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.verdict, Verdict::Pass);
        assert_eq!(row.bound.as_deref(), Some("3375/16"));
        assert!(row.measured.unwrap() >= 211);
        let ap = check_theorem3(&Family::Ap(Scalar::one()), &[8], 1, 0, l).unwrap();
        assert_eq!(ap.rows[0].verdict, Verdict::ExpectedFailure);
        assert!(ap.passed());
    }

    #[test]
    fn theorem4_rows() {
        let l = Limits::default();
        let sq = ConvexMap::power(2).unwrap();
        let r = check_theorem4("ap", &GroupedSet::additive(1..=16), &sq, 1, l).unwrap();
        assert_eq!(r.rows[0].verdict, Verdict::Pass);
        assert_eq!(r.rows[0].bound.as_deref(), Some("32"));
        let small = check_theorem4("ap", &GroupedSet::additive(1..=20), &sq, 2, l).unwrap();
        assert_eq!(small.rows[0].verdict, Verdict::TooSmall);
    }

    #[test]
    fn corollary_examples() {
        let l = Limits::default();
        let half = Scalar::new(1, 2);
        let ap = GroupedSet::additive(1..=8);
        let r = check_corollary(1, "ap", &ap, 2, &half, None, l).unwrap();
        assert_eq!(r.rows[0].sumset, Some(15));
        assert_eq!(r.rows[0].quotient, Some(ap.retag(Monoid::Multiplicative).unwrap().iterated(2, 1).unwrap().len()));
        assert!(matches!(
            check_corollary(1, "ap", &ap, 2, &Scalar::zero(), None, l),
            Err(Error::HypothesisViolated { .. })
        ));

        let gp = GroupedSet::additive((1..=10).map(|i| Scalar::integer(2).pow(i)));
        let r = check_corollary(2, "gp", &gp, 2, &half, None, l).unwrap();
        let shifted = GroupedSet::multiplicative((1..=10).map(|i| Scalar::integer(2).pow(i) + Scalar::one())).unwrap();
        assert_eq!(r.rows[0].measured, Some(shifted.iterated(2, 1).unwrap().len()));

        let r = check_corollary(3, "ap", &GroupedSet::additive(1..=12), 2, &half, None, l).unwrap();
        let squares = GroupedSet::additive((1..=12).map(|i: i64| i * i));
        assert_eq!(r.rows[0].measured, Some(squares.iterated(2, 1).unwrap().len()));
    }

    #[test]
    fn corollary_part3_avoids_roots() {
        let l = Limits::default();
        // f = x^2 - 10x: f' vanishes at 5, so the larger side survives
        let f = Polynomial::from_ints(&[0, -10, 1]);
        let a = GroupedSet::additive(1..=12);
        let r = check_corollary(3, "ap", &a, 2, &Scalar::one(), Some(&f), l).unwrap();
        let sub = root_free_subset(&a, &f, 2);
        assert_eq!(sub, GroupedSet::additive(6..=12));
        assert!(r.rows[0].note.as_deref().unwrap().contains("7 points"));
    }

    #[test]
    fn growth_slopes() {
        let l = Limits::default();
        let r = growth_report(&Family::Powers(3), &[2], &[7, 15, 31], 0, l).unwrap();
        let s = r.slope.unwrap();
        assert!((2.5..=3.2).contains(&s), "slope {s}");
        let ap = growth_report(&Family::Ap(Scalar::one()), &[1], &[16, 32, 64, 128], 0, l).unwrap();
        assert!((ap.slope.unwrap() - 1.0).abs() < 0.05);
        assert!(growth_report(&Family::Ap(Scalar::one()), &[1], &[], 0, l).unwrap().rows.is_empty());
    }

    #[test]
    fn csv_layout() {
        let r = check_threefold("ap", &GroupedSet::additive(1..=16), true, Limits::default()).unwrap();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("ap,16,1,identity,,46,741,741,8.0000,92.6250,pass"));
        assert!(r.to_json().contains("\"|A+A-A|\": 46"));
    }
}
