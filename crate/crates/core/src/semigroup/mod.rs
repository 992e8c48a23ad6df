// SPDX-License-Identifier: Apache-2.0

//! Laplacian, heat kernels and ultracontractive norms.
//!
//! `P_t = e^{tΔ}` is evaluated by uniformization. Since `Δ = P - I` with `P`
//! the transition operator,
//!
//! ```text
//! m(y) p(t,x,y) = e^{-t} Σ_{k≥0} t^k/k! p_k(x,y)
//! ```
//!
//! The series is truncated at an order whose Poisson tail is below the
//! requested tolerance, and on windows that order is checked against the
//! distance to the boundary.

mod decay;
mod kernel;
mod poisson;

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::WeightedGraph;

pub use decay::{exponent_fit, ExponentFit, FitWindow, KernelMode};
pub use kernel::{
    continuous_kernel, discrete_kernel, heat_apply, heat_apply_many, uc_norms, uc_norms_grid,
    BaseVertices, ContinuousRow, HeatKernelTable, UcNorms,
};
pub use poisson::PoissonWeights;

/// `Δf(x) = (1/m(x)) Σ_y ω_xy (f(y) - f(x))`.
pub fn laplacian(g: &WeightedGraph, f: &[f64]) -> Vec<f64> {
    debug_assert_eq!(f.len(), g.len());
    (0..g.len())
        .map(|x| {
            let fx = f[x];
            let s: f64 = g.neighbors(x).iter().map(|&(y, w)| w * (f[y] - fx)).sum();
            s / g.measure(x)
        })
        .collect()
}

/// `(Pf)(x) = Σ_y p(x,y) f(y)`.
pub fn transition_apply(g: &WeightedGraph, f: &[f64]) -> Vec<f64> {
    (0..g.len())
        .map(|x| {
            let s: f64 = g.neighbors(x).iter().map(|&(y, w)| w * f[y]).sum();
            s / g.measure(x)
        })
        .collect()
}

/// One step of a distribution row: `row'(z) = Σ_y row(y) p(y,z)`.
pub fn transition_row_step(g: &WeightedGraph, row: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; g.len()];
    for (y, &mass) in row.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let scale = mass / g.measure(y);
        for &(z, w) in g.neighbors(y) {
            next[z] += scale * w;
        }
    }
    next
}
