// SPDX-License-Identifier: Apache-2.0

//! Heat kernels, gradient forms and functional-inequality constants on finite
//! weighted graphs.
//!
//! Finite tori stand in for boundary-free infinite lattices, and lattice
//! windows carry boundary marks together with a guard that rejects any
//! horizon at which mass or a ball would reach the boundary. Within the
//! guard every computed quantity is the exact restriction of its
//! infinite-graph counterpart.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, caching and
//! the command line live in the companion `ultracon` crate.
//!
//! Module map:
//!
//! - [`graph`]: graph model, generators, balls, the Δ(α) condition, the
//!   α-loop transform and volume growth profiling.
//! - [`semigroup`]: Laplacian, discrete and continuous heat kernels,
//!   ultracontractive norms and decay-exponent fits.
//! - [`forms`]: Γ, Γ₂, Γ̃₂ stencils and numerical search for CDE′ violations.
//! - [`inequalities`]: Dirichlet eigenvalues, Faber-Krahn, Nash, Sobolev and
//!   log-Sobolev constants, and the equivalence-chain checks.
#![no_std]
// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod fit;
pub mod forms;
pub mod graph;
pub mod inequalities;
pub mod optimize;
pub mod quad;
pub mod seed;
pub mod semigroup;

pub use error::{Error, Result};
pub use graph::{GraphFunction, GraphSpec, VertexSet, WeightedGraph};
