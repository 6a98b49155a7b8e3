//! Exact iterated sumsets and product sets, higher convexity, and witness
//! engines that construct many distinct elements of `2^k A - (2^k - 1) A`.

// Errors carry the offending scalars; they are not on hot paths.
#![allow(clippy::result_large_err)]

pub mod construction;
pub mod convexity;
pub mod enclosure;
pub mod error;
pub mod experiments;
pub mod families;
pub mod maps;
pub mod merge;
pub mod poly;
pub mod scalar;
pub mod set;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use set::{GroupedSet, Limits, Monoid};
