//! Squeeze inequalities placing a constructed value between two
//! consecutive images.

use crate::construction::certificate::Interval;
use crate::error::{Error, Result};
use crate::maps::ConvexMap;
use crate::scalar::Scalar;
use crate::set::Monoid;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Squeeze {
    pub value: Scalar,
    pub interval: Interval,
}

/// `f(a_i) ∘ (f(a_j + h) ∘ f(a_j)⁻¹)` must lie strictly past `f(a_i)` and no
/// further than `f(a_i + h)`; values are carriers in `monoid`.
pub fn squeeze_values(
    monoid: Monoid,
    f_ai: &Scalar,
    f_ai_h: &Scalar,
    f_aj: &Scalar,
    f_aj_h: &Scalar,
) -> Result<Squeeze> {
    let value = monoid.op(f_ai, &monoid.diff(f_aj_h, f_aj));
    let interval = Interval::from_start_to(f_ai.clone(), f_ai_h.clone());
    if f_ai == f_ai_h || !interval.contains(&value) {
        return Err(Error::SqueezeViolated {
            detail: format!("{value} is not in {interval}"),
        });
    }
    Ok(Squeeze { value, interval })
}

/// The squeeze for `f` at ground points `a_i`, `a_j` and step `h`.
pub fn squeeze_check(f: &ConvexMap, a_i: &Scalar, a_j: &Scalar, h: &Scalar) -> Result<Squeeze> {
    let vm = f.value_monoid().ok_or_else(|| Error::InexactValues(f.to_string()))?;
    let g = f.ground_monoid();
    let (ai_h, aj_h) = (g.op(a_i, h), g.op(a_j, h));
    for x in [a_i, a_j, &ai_h, &aj_h] {
        f.check_point(x)?;
    }
    let c = |x: &Scalar| f.carrier(x).expect("exact map");
    squeeze_values(vm, &c(a_i), &c(&ai_h), &c(a_j), &c(&aj_h))
}

/// Sequence form: `a_i < a_i + d < a_{i+1}` for a smaller gap `d`.
pub fn squeeze_sequence(a_i: &Scalar, a_next: &Scalar, d: &Scalar) -> Result<Squeeze> {
    let value = a_i + d;
    let interval = Interval::open(a_i.clone(), a_next.clone());
    if !interval.contains(&value) {
        return Err(Error::SqueezeViolated { detail: format!("{value} is not in {interval}") });
    }
    Ok(Squeeze { value, interval })
}
