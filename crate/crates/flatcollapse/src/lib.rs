//! Exact computational tools for crystallographic groups in lattice
//! coordinates: validation of group data, torsion tests, invariant
//! foliations and their leaf geometry, collapsed quotient groups,
//! rational representation invariants, and floating-point verification
//! of the metric estimates behind the collapsing picture.

pub mod cli;
pub mod collapse;
pub mod crysgroup;
pub mod error;
pub mod foliate;
pub mod ghmetric;
pub mod io;
pub mod latgeo;
pub mod ratcore;
pub mod repq;

pub use error::{Error, Result};
