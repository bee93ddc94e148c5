//! Successive minimum spanning trees of randomly weighted complete multigraphs.
//!
//! Two independent routes to the limiting tree costs `γ_k` live here:
//!
//! * [`cascade`] / [`sim`]: the Kruskal forest cascade driven by a random edge
//!   stream, where each arriving edge joins the first forest in which it does
//!   not close a cycle.
//! * [`rho`]: the limiting giant-component curves `ρ_k(t)` from the survival
//!   fixed point of a multi-type branching process, and the cost and mass
//!   integrals built from them.
//!
//! [`bounds`] solves the occupancy ODE system behind the improved upper bound
//! on `Γ_k = γ_1 + … + γ_k` and evaluates the closed-form bounds, and
//! [`thresholds`] computes the giant-component thresholds `σ_k` by shooting
//! on the θ-substituted Sturm–Liouville problem.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the command
//! line and parallel sweeps live in the `smst` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod cascade;
pub mod dsf;
mod error;
pub mod grid;
pub mod oracle;
pub mod rho;
pub mod sim;
pub mod stream;
pub mod thresholds;

pub use error::{Error, Result};
pub use grid::GridFunction;

/// Apéry's constant `ζ(3)`, the limiting cost of the first tree.
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// Lower bound on `γ_1 + γ_2` from the jointly optimal pair of spanning
/// trees, kept as a comparison constant.
pub const MU_2: f64 = 4.170_428_8;
