//! Hard-core packings on periodic lattices.
//!
//! The crate builds torus instances of fourteen lattices, runs the
//! sublattice-sweep probabilistic cellular automaton on them, computes
//! combinatorial density bounds and exact packing counts, and brackets the
//! critical update probability where sublattice order sets in.
//!
//! With the default `parallel` feature, class passes, enumeration subtrees,
//! scans and quadrature run on rayon. Without it the same code runs serially
//! and produces identical output.

pub mod bounds;
pub mod config;
pub mod criticality;
pub mod error;
pub mod export;
pub mod lattice;
pub mod oracle;
pub mod par;
pub mod pca;
pub mod rng;

pub use config::{Configuration, DensityReport};
pub use error::{Error, Result};
pub use lattice::{LatticeSpec, PeriodicGraph};
pub use pca::{Execution, Pressure};

/// Exact densities and bound values.
pub type Rational = num_rational::Ratio<i64>;
