//! Witnesses for `2^k f(A) − (2^k − 1) f(A)` when `f` is k-convex.
//!
//! Each level runs the dyadic pigeonhole on its point set. For `k = 1` every
//! fiber `A_h` yields `f(x_i) + Δ_h f(x_j)` for sources `x_j` on the side of
//! `x_i` where `|Δ_h f|` is smaller. For `k ≥ 2` a fiber is split in halves;
//! each target `x_i` recurses on the source half with the map
//! `g = f(x_i) + Δ_h f`, and the `g`-representations are rewritten over `f`.

use crate::construction::certificate::{Interval, WitnessBatch, WitnessCertificate};
use crate::construction::dyadic::dyadic_pigeonhole_unchecked;
use crate::construction::refine::halves;
use crate::error::{Error, Result};
use crate::maps::ConvexMap;
use crate::scalar::Scalar;
use crate::set::{GroupedSet, Monoid};

/// `f` with nested layers `g(x) = g'(anchor) ∘ (g'(x ∘ h) ∘ g'(x)⁻¹)`.
struct LayeredMap<'a> {
    base: &'a ConvexMap,
    ground: Monoid,
    values: Monoid,
    layers: Vec<(Scalar, Scalar)>,
}

impl LayeredMap<'_> {
    fn eval(&self, x: &Scalar) -> Scalar {
        self.eval_at(x, self.layers.len())
    }

    fn eval_at(&self, x: &Scalar, depth: usize) -> Scalar {
        if depth == 0 {
            return self.base.carrier(x).expect("exact map");
        }
        let (anchor, h) = &self.layers[depth - 1];
        let shifted = self.ground.op(x, h);
        let step = self.values.diff(&self.eval_at(&shifted, depth - 1), &self.eval_at(x, depth - 1));
        self.values.op(&self.eval_at(anchor, depth - 1), &step)
    }

    fn push(&mut self, anchor: Scalar, h: Scalar) {
        self.layers.push((anchor, h));
    }

    fn pop(&mut self) {
        self.layers.pop();
    }

    fn value_of(&self, plus: &[Scalar], minus: &[Scalar]) -> Scalar {
        let p: Vec<Scalar> = plus.iter().map(|x| self.eval(x)).collect();
        let m: Vec<Scalar> = minus.iter().map(|x| self.eval(x)).collect();
        self.values.signed_fold(&p, &m)
    }
}

/// Points with signs, relative to the map of the level that produced them.
struct Rep {
    plus: Vec<Scalar>,
    minus: Vec<Scalar>,
}

struct Branch {
    interval: Interval,
    reps: Vec<Rep>,
}

struct Level {
    branches: Vec<Branch>,
    bound: Scalar,
}

fn direction(values: &[Scalar]) -> Option<i8> {
    if values.len() < 2 {
        return Some(1);
    }
    if values.windows(2).all(|w| w[0] < w[1]) {
        Some(1)
    } else if values.windows(2).all(|w| w[0] > w[1]) {
        Some(-1)
    } else {
        None
    }
}

fn not_convex(k: usize, detail: String) -> Error {
    Error::NotKConvexFunction { k, detail }
}

fn run(map: &mut LayeredMap<'_>, points: &[Scalar], k: usize) -> Result<Level> {
    let empty = Level { branches: Vec::new(), bound: Scalar::zero() };
    if points.len() < 2 {
        return Ok(empty);
    }
    let set = GroupedSet::new(points.to_vec(), map.ground)?;
    let dec = dyadic_pigeonhole_unchecked(&set)?;
    let images: Vec<Scalar> = points.iter().map(|x| map.eval(x)).collect();
    let f_dir = direction(&images)
        .ok_or_else(|| not_convex(k, format!("not strictly monotone on {}", set)))?;
    let g = map.ground;
    let vm = map.values;
    let mut branches = Vec::new();
    let mut bound = Scalar::zero();
    for (h, fiber) in &dec.fibers {
        let deltas: Vec<Scalar> = fiber.iter().map(|x| vm.diff(&map.eval(&g.op(x, h)), &map.eval(x))).collect();
        let d_dir = direction(&deltas)
            .ok_or_else(|| not_convex(k, format!("difference with step {h} is not strictly monotone")))?;
        // Sources sit where |Δ_h f| is smaller.
        let low_sources = f_dir == d_dir;
        let n = fiber.len();
        if k == 1 {
            for i in 0..n {
                let start = map.eval(&fiber[i]);
                let interval = Interval::from_start_to(start, map.eval(&g.op(&fiber[i], h)));
                let sources = if low_sources { 0..i + 1 } else { i..n };
                let reps = sources
                    .map(|j| Rep {
                        plus: vec![fiber[i].clone(), g.op(&fiber[j], h)],
                        minus: vec![fiber[j].clone()],
                    })
                    .collect();
                branches.push(Branch { interval, reps });
            }
        } else {
            let (lower, upper) = halves(fiber);
            let (sources, targets) = if low_sources { (lower, upper) } else { (upper, lower) };
            for x in &targets {
                let interval = Interval::from_start_to(map.eval(x), map.eval(&g.op(x, h)));
                map.push(x.clone(), h.clone());
                let child = run(map, &sources, k - 1);
                map.pop();
                let child = child?;
                bound = bound + child.bound;
                // g(p) = f(x) + f(p∘h) − f(p), and |P| − |Q| = 1.
                let reps = child
                    .branches
                    .into_iter()
                    .flat_map(|b| b.reps)
                    .map(|r| {
                        let mut plus = Vec::with_capacity(2 * r.plus.len());
                        plus.push(x.clone());
                        plus.extend(r.plus.iter().map(|p| g.op(p, h)));
                        plus.extend(r.minus.iter().cloned());
                        let mut minus: Vec<Scalar> = r.plus;
                        minus.extend(r.minus.iter().map(|q| g.op(q, h)));
                        Rep { plus, minus }
                    })
                    .collect();
                branches.push(Branch { interval, reps });
            }
        }
    }
    if k == 1 {
        bound = Scalar::new(dec.m as u64 * dec.l * dec.l, 2u32);
    }
    for b in &branches {
        for r in &b.reps {
            let v = map.value_of(&r.plus, &r.minus);
            if !b.interval.contains(&v) {
                return Err(Error::SqueezeViolated { detail: format!("{v} is not in {}", b.interval) });
            }
        }
    }
    Ok(Level { branches, bound })
}

pub fn theorem4_witnesses(a: &GroupedSet, f: &ConvexMap, k: usize) -> Result<WitnessBatch> {
    let vm = f.value_monoid().ok_or_else(|| Error::InexactValues(f.to_string()))?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if a.len() <= 10 * k {
        return Err(Error::TooSmall { needed: 10 * k + 1, got: a.len() });
    }
    let ground = f.ground_monoid();
    let points = a.retag(ground)?;
    for x in points.elements() {
        f.check_point(x)?;
    }
    let mut map = LayeredMap { base: f, ground, values: vm, layers: Vec::new() };
    let level = run(&mut map, points.elements(), k)?;
    let carrier = |x: &Scalar| f.carrier(x).expect("exact map");
    let mut certificates = Vec::new();
    for b in level.branches {
        for r in b.reps {
            let mut plus: Vec<Scalar> = r.plus.iter().map(carrier).collect();
            let mut minus: Vec<Scalar> = r.minus.iter().map(carrier).collect();
            plus.sort_unstable();
            minus.sort_unstable();
            let value = vm.signed_fold(&plus, &minus);
            certificates.push(WitnessCertificate { value, plus_part: plus, minus_part: minus, interval: b.interval.clone() });
        }
    }
    certificates.sort_by(|x, y| x.value.cmp(&y.value));
    Ok(WitnessBatch {
        engine: "theorem4".into(),
        k,
        map: f.to_string(),
        input: points.clone(),
        ground: f.map_set(&points)?,
        claimed_count_bound: level.bound,
        certificates,
    })
}
