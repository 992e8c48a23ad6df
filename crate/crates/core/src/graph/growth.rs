// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{VertexSet, WeightedGraph};
use crate::error::{Error, Result};
use crate::fit::linear_fit;

/// `B(x, r)` and `V(x, r)`; hop distance ignores loops.
pub fn ball_volume(g: &WeightedGraph, x: usize, r: usize) -> Result<VertexSet> {
    g.check_vertex(x)?;
    let dist = g.distances_from(x);
    let members: Vec<usize> = (0..g.len()).filter(|&y| dist[y] <= r).collect();
    let volume = members.iter().map(|&y| g.measure(y)).sum();
    Ok(VertexSet { members, volume })
}

/// Volume growth around one vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub center: usize,
    /// `0..=r_max`.
    pub radii: Vec<usize>,
    pub volumes: Vec<f64>,
    /// Largest `c` with `V(x,r) >= c r^D` on `r in 1..=r_max`.
    pub c: f64,
    /// Log-log least-squares slope of `V(x,r)` against the cell radius `r + 1/2`.
    pub dimension: f64,
    /// `V(x,2r)/V(x,r)` for `1 <= r <= r_max/2`.
    pub doubling_ratios: Vec<f64>,
    pub doubling_constant: f64,
}

/// Fits `V(x,r) ~ c r^D` and the doubling constant on radii up to `r_max`.
///
/// The slope is fitted against `log(r + 1/2)`: a lattice ball of radius `r`
/// is covered by unit cells out to distance `r + 1/2`, which removes the
/// small-radius bias of a plain `log r` fit.
pub fn growth_profile(g: &WeightedGraph, x: usize, r_max: usize) -> Result<GrowthProfile> {
    g.check_vertex(x)?;
    if r_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "r_max must be >= 2, got {r_max}"
        )));
    }
    if let Some(bd) = g.boundary_distance(x) {
        if r_max >= bd {
            return Err(Error::GuardViolation(format!(
                "B({x},{r_max}) reaches the boundary at distance {bd}"
            )));
        }
    }
    let dist = g.distances_from(x);
    let mut volumes = alloc::vec![0.0; r_max + 1];
    for y in 0..g.len() {
        if dist[y] <= r_max {
            volumes[dist[y]] += g.measure(y);
        }
    }
    for r in 1..=r_max {
        volumes[r] += volumes[r - 1];
    }
    let xs: Vec<f64> = (1..=r_max).map(|r| libm::log(r as f64 + 0.5)).collect();
    let ys: Vec<f64> = (1..=r_max).map(|r| libm::log(volumes[r])).collect();
    let line = linear_fit(&xs, &ys)?;
    let dimension = line.slope;
    let c = (1..=r_max)
        .map(|r| volumes[r] / libm::pow(r as f64, dimension))
        .fold(f64::INFINITY, f64::min);
    let doubling_ratios: Vec<f64> = (1..=r_max / 2)
        .map(|r| volumes[2 * r] / volumes[r])
        .collect();
    let doubling_constant = doubling_ratios.iter().copied().fold(1.0, f64::max);
    Ok(GrowthProfile {
        center: x,
        radii: (0..=r_max).collect(),
        volumes,
        c,
        dimension,
        doubling_ratios,
        doubling_constant,
    })
}
