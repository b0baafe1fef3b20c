//! Strata posets of hyperbolic polynomial slices.
//!
//! The crate is split along the natural layers of the problem:
//!
//! * [`comb`]: compositions, partitions, refinement orders and quotients;
//! * [`poset`]: posets generated by a facet set, the potential-poset axioms, the dual
//!   simplicial complex, face vectors and shellings;
//! * [`bounds`]: cyclic-polytope face counts and the closed-form covering bounds;
//! * [`covering`]: enumeration of potential posets and Vandermonde-covering search;
//! * [`numeric`]: numerically realized slices and the checks run against them.

pub mod bounds;
pub mod comb;
pub mod covering;
pub mod error;
pub mod numeric;
pub mod poset;

pub use comb::{Composition, Partition};
pub use error::{Error, Result};

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: &str = "1";
