//! Lattice slicing toolkit.
//!
//! Discrete Gaussian measures on lattices, theta series and their Poisson
//! summation identity, lattice points of origin-symmetric convex bodies, and
//! the search for a dual vector `y` whose hyperplane `y⊥` captures a large
//! fraction of `K ∩ Λ`.

pub mod bodies;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod gaussian;
pub mod intlin;
pub mod io;
pub mod john;
pub mod lattice;
pub mod sampler;
pub mod slicing;
pub mod suite;

pub use bodies::{Body, BodySpec, Volume};
pub use enumerate::{enumerate_in_body, grid_scan_oracle, slice_count, PointSet};
pub use error::{Error, Result};
pub use gaussian::{GaussianParam, ThetaResult};
pub use john::{john_normalize, mvee, JohnResult};
pub use lattice::{dual, gram_schmidt, integer_normal_of_span, lattice_equal, Lattice, Matrix, SpanNormal, Vector};
pub use slicing::{BoundReport, FinderConfig, SliceMethod, SliceRatio, SliceResult};

/// Version string embedded in every CLI output.
pub const VERSION: &str = concat!("latslice ", env!("CARGO_PKG_VERSION"));
