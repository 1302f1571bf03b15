//! Algebraic modular forms for special quinary lattices: genus enumeration by Kneser
//! neighbours, Hecke operators in weights W_{a,b}, θ-character decomposition, and exact
//! eigenvalue/congruence analysis.

pub mod arith;
pub mod eigen;
pub mod error;
pub mod fixtures;
pub mod form;
pub mod hecke;
pub mod isometry;
pub mod linalg;
pub mod mat5;
pub mod neighbours;
pub mod poly;
pub mod reduce;
pub mod weights;

pub use error::{Error, Result};
pub use form::{GenusDescriptor, Place, QuinaryForm};

/// Versions of the algorithms whose output is cached; bump one to invalidate stale caches.
pub const ALGORITHM_VERSIONS: &[(&str, u32)] =
    &[("form", 2), ("isometry", 1), ("neighbours", 1), ("weights", 1), ("hecke", 2), ("eigen", 1)];
