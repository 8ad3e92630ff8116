//! Exact arithmetic kernel: rationals, rational and integer matrices,
//! Hermite and Smith normal forms, polynomial factorization over the
//! rationals, and real algebraic number fields.

pub mod matq;
pub mod matz;
pub mod numfield;
pub mod poly;
pub mod rat;

pub use matq::{kernel_of_rows, rref_in_place, FieldScalar, MatQ, VecQ};
pub use matz::{hnf, inverse_unimodular, snf, HnfResult, MatZ, SnfResult};
pub use numfield::{nf_components, NFElem, NumberField};
pub use poly::{factor_over_q, PolyQ};
pub use rat::{parse_rat, rat, rat_to_string, Int, Rat};
