//! Exact computations with non-Archimedean graded norms over `Q((t))`-type
//! fields: relative spectra of diagonalizable norms, their asymptotics on
//! toric section rings, Okounkov bodies and Chebyshev transforms, and toric
//! potentials on the projective line.

pub mod asymptotics;
pub mod error;
pub mod fixtures;
pub mod measure;
pub mod norms;
pub mod okounkov;
pub mod potential_p1;
pub mod random;
pub mod rat;
pub mod section_ring;
pub mod valuated_linalg;
pub mod valued_field;

pub use error::{Error, Result};

/// Library version, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
