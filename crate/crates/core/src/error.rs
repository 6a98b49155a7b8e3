use thiserror::Error;

use crate::scalar::Scalar;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("monoid mismatch: {left} vs {right}")]
    MonoidMismatch {
        left: &'static str,
        right: &'static str,
    },
    #[error("element cap of {cap} exceeded")]
    CapExceeded { cap: usize },
    #[error("dilation by zero")]
    ZeroDilation,
    #[error("set too small: need at least {needed} elements, got {got}")]
    TooSmall { needed: usize, got: usize },
    #[error("{value} lies outside the domain {domain}")]
    DomainViolation { value: Scalar, domain: String },
    #[error("could not separate values below {bits} bits of precision")]
    PrecisionExhausted { bits: u32 },
    #[error("map is not strictly monotone on [{lo}, {hi}]")]
    NotMonotone { lo: Scalar, hi: Scalar },
    #[error("empty domain after shifting by {shift}")]
    EmptyDomain { shift: Scalar },
    #[error("sequence is not {required}-convex (certified order {found})")]
    NotKConvex { required: usize, found: usize },
    #[error("map is not {k}-convex: {detail}")]
    NotKConvexFunction { k: usize, detail: String },
    #[error("squeeze inequality violated: {detail}")]
    SqueezeViolated { detail: String },
    #[error("hypothesis violated: {detail}")]
    HypothesisViolated { detail: String },
    #[error("map {0} has no exact value carrier")]
    InexactValues(String),
    #[error("invalid monoid invariant: {0}")]
    InvalidSet(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown family `{0}`")]
    BadFamily(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
