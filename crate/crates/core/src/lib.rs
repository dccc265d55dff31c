//! Numerical laboratory for bound-state diving in the radial Dirac equation.
//!
//! A scalar potential well is raised through a critical coupling at which its
//! bound state reaches the continuum edge E = +1. The crate provides the
//! lattice operator, bound-state and threshold solvers, continuum waves and
//! the near-critical resonance analysis, adiabatic time propagation, and the
//! parameter studies built on top of them.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod numerics;
pub mod operator;
pub mod potential;
pub mod scattering;
pub mod spinor;
pub mod statics;
pub mod studies;
pub mod units;

pub use error::{Result, SpcError};
pub use grid::RadialGrid;
pub use operator::{assemble_operator, DiscreteOperator};
pub use potential::{potential_at, PotentialModel, Shape, Sign};
pub use spinor::{inner_product, NormKind, RadialSpinor};
