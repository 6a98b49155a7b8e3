//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines print in order and uncaptured.

use std::process::ExitCode;
use std::time::Instant;

use itersum::construction::{dyadic_pigeonhole, theorem3_witnesses, theorem4_witnesses, WitnessBatch};
use itersum::experiments::{check_theorem3, corollary_trend, growth_report, meets_threefold_bound, oracle_iterated, threefold_family};
use itersum::families::Family;
use itersum::maps::{function_convexity_check, ConvexMap, Domain};
use itersum::poly::{self, Polynomial};
use itersum::{GroupedSet, Limits, Monoid, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s(n: i64) -> Scalar {
    Scalar::integer(n)
}

fn sound(b: &WitnessBatch, oracle: &GroupedSet, floor: usize) -> Result<(), String> {
    let bad = b.verify_all();
    ensure(bad.is_empty(), || format!("{} certificates fail verification", bad.len()))?;
    ensure(b.values_distinct(), || "duplicate values".into())?;
    ensure(b.distinct_count() >= floor, || format!("{} distinct values, need {floor}", b.distinct_count()))?;
    ensure(b.values().is_subset(oracle), || "value outside the oracle set".into())
}

fn criterion1() -> Outcome {
    let l = Limits::default();
    let cubes = GroupedSet::additive((1..=15i64).map(|n| n.pow(3)));
    let b = theorem3_witnesses(&cubes, 2).map_err(|e| e.to_string())?;
    sound(&b, &oracle_iterated(&cubes, 4, 3, l).map_err(|e| e.to_string())?, 211)?;
    let gp = GroupedSet::additive((1..=15).map(|n| s(2).pow(n)));
    let g = theorem3_witnesses(&gp, 3).map_err(|e| e.to_string())?;
    sound(&g, &oracle_iterated(&gp, 8, 7, l).map_err(|e| e.to_string())?, 99)?;
    Ok(format!("cubes k=2: {} values (>= 211); 2^n k=3: {} values (>= 99)", b.distinct_count(), g.distinct_count()))
}

fn criterion2() -> Outcome {
    let cubes = GroupedSet::additive((1..=31i64).map(|n| n.pow(3)));
    let c = cubes.iterated_cardinality(4, 3).map_err(|e| e.to_string())?;
    let bound = Scalar::new(31i64.pow(3), 16);
    ensure(s(c as i64) >= bound, || format!("|4A-3A| = {c} < {bound}"))?;
    Ok(format!("|4A-3A| = {c} >= 31^3/16 = {:.1}", bound.to_f64()))
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, range: i64) -> GroupedSet {
    let mut pool: Vec<i64> = (0..range).collect();
    pool.shuffle(rng);
    GroupedSet::additive(pool.into_iter().take(n))
}

fn criterion3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sizes = Vec::new();
    for case in 0..200 {
        let n = rng.gen_range(8..=256);
        let range = [2 * n as i64, 8 * n as i64, 1 << 14][case % 3];
        let a = random_set(&mut rng, n, range);
        let d = dyadic_pigeonhole(&a).map_err(|e| format!("case {case}: {e}"))?;
        ensure(d.satisfies_size_bound(), || format!("case {case}: L*m too small"))?;
        ensure(d.fibers_balanced(), || format!("case {case}: fiber sizes outside [L, 2L]"))?;
        let c = a.iterated_cardinality(2, 1).map_err(|e| e.to_string())?;
        ensure(s(c as i64) >= d.certified_bound(), || format!("case {case}: |A+A-A| = {c} < L m^2 / 2"))?;
        sizes.push(n);
    }
    Ok(format!("200 sets, sizes {}..{}", sizes.iter().min().unwrap(), sizes.iter().max().unwrap()))
}

fn criterion4() -> Outcome {
    let a = GroupedSet::additive(1..=16);
    let sq = ConvexMap::power(2).unwrap();
    let b = theorem4_witnesses(&a, &sq, 1).map_err(|e| e.to_string())?;
    ensure(b.claimed_count_bound == s(32), || format!("bound {}", b.claimed_count_bound))?;
    let fa = sq.map_set(&a).map_err(|e| e.to_string())?;
    sound(&b, &fa.iterated(2, 1).map_err(|e| e.to_string())?, 32)?;

    let g = GroupedSet::multiplicative(2..=17).unwrap();
    let lb = theorem4_witnesses(&g, &ConvexMap::log(), 1).map_err(|e| e.to_string())?;
    let floor = lb.claimed_count_bound.ceil().try_into().unwrap_or(usize::MAX);
    sound(&lb, &g.iterated(2, 1).map_err(|e| e.to_string())?, floor)?;
    Ok(format!(
        "x^2: {} values (>= 32); log: {} values (>= {})",
        b.distinct_count(),
        lb.distinct_count(),
        lb.claimed_count_bound
    ))
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (lo, hi) = (s(-20), s(20));
    let mut checks = 0;
    for case in 0..100 {
        let mut coeffs: Vec<i64> = (0..6).map(|_| rng.gen_range(-9..=9)).collect();
        coeffs.push(*[-3, -2, -1, 1, 2, 3].choose(&mut rng).unwrap());
        let p = Polynomial::from_ints(&coeffs);
        let derivs: Vec<Polynomial> = (1..=4).map(|j| p.nth_derivative(j)).collect();
        let (a, b) = poly::root_free_intervals(&derivs, &lo, &hi)
            .into_iter()
            .max_by(|x, y| (&x.1 - &x.0).cmp(&(&y.1 - &y.0)))
            .ok_or_else(|| format!("case {case}: no root-free interval"))?;
        // snap inward to a coarse grid so the points stay short
        let q = Scalar::integer(64);
        let a = Scalar::from_rational((&a * &q).into_rational().ceil()) / &q;
        let b = Scalar::from_rational((&b * &q).into_rational().floor()) / &q;
        ensure(a < b, || format!("case {case}: root-free interval too narrow"))?;
        let width = &b - &a;
        let f = ConvexMap::polynomial(p.coeffs().to_vec()).unwrap().with_domain(Domain::between(a.clone(), b.clone()));
        for _ in 0..20 {
            // steps summing to at most half the interval
            let steps: Vec<Scalar> = (0..3).map(|_| &width * Scalar::new(rng.gen_range(1..=100), 600)).collect();
            let span = &width - steps.iter().fold(Scalar::zero(), |acc, h| acc + h);
            let grid = GroupedSet::additive((0..50).map(|i| &a + &span * Scalar::new(i, 49)));
            let r = function_convexity_check(&f, 3, &grid, &steps).map_err(|e| format!("case {case}: {e}"))?;
            ensure(r.passed, || format!("case {case}: violation {:?}", r.violation))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} grid checks, 0 violations"))
}

fn random_instance(rng: &mut ChaCha8Rng) -> GroupedSet {
    let n = rng.gen_range(1..=12);
    if rng.gen_bool(0.5) {
        let range = rng.gen_range(n as i64..=40);
        let a = random_set(rng, n, range);
        let shift = Scalar::new(rng.gen_range(-20..=20), rng.gen_range(1..=3));
        a.translate(&shift).unwrap()
    } else {
        let items: Vec<Scalar> = (0..n).map(|_| Scalar::new(rng.gen_range(1..=12), rng.gen_range(1..=4))).collect();
        GroupedSet::new(items, Monoid::Multiplicative).unwrap()
    }
}

fn criterion6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let l = Limits::default();
    let mut by_monoid = [0usize; 2];
    for case in 0..500 {
        let a = random_instance(&mut rng);
        let total = rng.gen_range(1..=7);
        let m = rng.gen_range(1..=total);
        let n = total - m;
        let fast = a.iterated_with(m, n, l).map_err(|e| format!("case {case}: {e}"))?;
        let slow = oracle_iterated(&a, m, n, l).map_err(|e| format!("case {case}: {e}"))?;
        ensure(fast == slow, || format!("case {case}: {m}A-{n}A differs on {a}"))?;
        let count = a.iterated_cardinality_with(m, n, l).map_err(|e| e.to_string())?;
        ensure(count == slow.len(), || format!("case {case}: count {count} != {}", slow.len()))?;
        by_monoid[(a.monoid() == Monoid::Multiplicative) as usize] += 1;
    }
    Ok(format!("500 instances ({} additive, {} multiplicative)", by_monoid[0], by_monoid[1]))
}

fn criterion7() -> Outcome {
    let l = Limits::default();
    let sizes = [16, 32, 64, 128, 256];
    let mut worst = f64::INFINITY;
    for fam in [Family::Ap(Scalar::one()), Family::Geometric(s(2))] {
        let r = threefold_family(&fam, &sizes, true, 0, l).map_err(|e| e.to_string())?;
        for row in &r.rows {
            let best = row.measured.unwrap_or(0);
            ensure(meets_threefold_bound(best, row.n), || format!("{fam} N={}: {best} below bound", row.n))?;
            worst = worst.min(row.ratio.unwrap_or(f64::INFINITY));
        }
        ensure(r.passed(), || format!("{fam}: failing row"))?;
    }
    Ok(format!("AP and GP at N = 16..256, minimum ratio {worst:.3}"))
}

fn criterion8() -> Outcome {
    let r = corollary_trend(1, &Family::Ap(Scalar::one()), &[8, 16, 32], 2, &Scalar::new(1, 2), 0, Limits::default())
        .map_err(|e| e.to_string())?;
    let slope = r.slope.ok_or("no slope")?;
    let counts: Vec<String> = r.rows.iter().map(|row| format!("{}", row.measured.unwrap_or(0))).collect();
    ensure(slope >= 1.5, || format!("slope {slope:.4} < 1.5"))?;
    Ok(format!("|AA/A| = {} at N = 8, 16, 32; slope {slope:.4} >= 1.5", counts.join(", ")))
}

fn criterion9() -> Outcome {
    let l = Limits::default();
    let fam = Family::RandomConvex(2);
    let runs: Vec<(String, String, String)> = (0..2)
        .map(|_| {
            let t3 = check_theorem3(&fam, &[15, 31], 2, 42, l).unwrap();
            let g = growth_report(&fam, &[1, 2], &[8, 16], 42, l).unwrap();
            let b = theorem3_witnesses(&fam.generate(15, 42).unwrap(), 2).unwrap();
            (t3.to_json() + &t3.to_csv(), g.to_csv(), b.to_json())
        })
        .collect();
    ensure(runs[0] == runs[1], || "reports differ between identical runs".into())?;
    let batch = WitnessBatch::from_json(&runs[0].2).map_err(|e| e.to_string())?;
    ensure(batch.to_json() == runs[0].2, || "witness batch does not round-trip".into())?;

    let families = [
        Family::Powers(3),
        Family::Geometric(Scalar::new(3, 2)),
        Family::Ap(Scalar::new(1, 3)),
        Family::RandomConvex(3),
    ];
    let mut files = 0;
    for fam in &families {
        for n in [1, 7, 40] {
            let a = fam.generate(n, 9).unwrap();
            for set in [a.clone(), a.retag(Monoid::Multiplicative).unwrap()] {
                let text = set.to_text();
                let back = GroupedSet::parse_text(&text).map_err(|e| e.to_string())?;
                ensure(back == set && back.to_text() == text, || format!("{fam} N={n} does not round-trip"))?;
                files += 1;
            }
        }
    }
    Ok(format!("byte-identical reports; {files} set files round-trip"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("convex-set witnesses at desk scale", criterion1),
        ("exact size of 4A - 3A for cubes", criterion2),
        ("dyadic pigeonhole invariants", criterion3),
        ("convex-map witnesses at k = 1", criterion4),
        ("difference monotonicity of degree-6 polynomials", criterion5),
        ("oracle equivalence", criterion6),
        ("three-fold inequality on AP and GP", criterion7),
        ("quotient set growth trend", criterion8),
        ("determinism and round-trip", criterion9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
