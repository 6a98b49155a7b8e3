//! Constructive engines: dyadic pigeonhole, refinements, squeeze
//! inequalities and the witness generators.

pub mod certificate;
pub mod dyadic;
pub mod refine;
pub mod squeeze;
pub mod theorem3;
pub mod theorem4;

pub use certificate::{verify_certificate, Clause, Interval, WitnessBatch, WitnessCertificate};
pub use dyadic::{difference_index, dyadic_pigeonhole, DifferenceIndex, DyadicDecomposition};
pub use refine::{refine, Refinement};
pub use squeeze::{squeeze_check, Squeeze};
pub use theorem3::{theorem3_witnesses, theorem3_witnesses_with, Strategy};
pub use theorem4::theorem4_witnesses;
