// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{GraphMeta, WeightedGraph};
use crate::error::{Error, Result};

const RATIO_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaAlphaScope {
    /// Every adjacent pair, loops included.
    All,
    /// Loops only.
    LoopsOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaAlphaCheck {
    pub alpha: f64,
    pub passed: bool,
    /// Pair with the smallest ratio `ω_xy / m(x)`; on failure this is the violating pair.
    pub worst_pair: Option<(usize, usize)>,
    pub worst_ratio: f64,
}

/// Checks `ω_xy >= α m(x)` for adjacent pairs in `scope`.
pub fn check_delta_alpha(
    g: &WeightedGraph,
    alpha: f64,
    scope: DeltaAlphaScope,
) -> Result<DeltaAlphaCheck> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let mut worst_pair = None;
    let mut worst_ratio = f64::INFINITY;
    for x in 0..g.len() {
        let m = g.measure(x);
        for &(y, w) in g.neighbors(x) {
            if scope == DeltaAlphaScope::LoopsOnly && y != x {
                continue;
            }
            let ratio = w / m;
            if ratio < worst_ratio {
                worst_ratio = ratio;
                worst_pair = Some((x, y));
            }
        }
        if scope == DeltaAlphaScope::LoopsOnly && g.weight(x, x) == 0.0 {
            // A missing loop violates any α > 0.
            if worst_ratio > 0.0 {
                worst_ratio = 0.0;
                worst_pair = Some((x, x));
            }
        }
    }
    let passed = worst_ratio >= alpha * (1.0 - RATIO_SLACK);
    Ok(DeltaAlphaCheck {
        alpha,
        passed,
        worst_pair,
        worst_ratio,
    })
}

/// Lazy version `G_α` of a loopless graph.
///
/// Off-diagonal weights are scaled by `1 - 2α` and every vertex gets the loop
/// `ω'_xx = 2α m(x)`, so the measure is unchanged and the new walk stays put
/// with probability exactly `2α`: `p'(x,x) = 2α`, `p'(x,y) = (1-2α) p(x,y)`.
pub fn alpha_loop_transform(g: &WeightedGraph, alpha: f64) -> Result<WeightedGraph> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1/2], got {alpha}"
        )));
    }
    if g.has_loops() {
        return Err(Error::InvalidGraph(
            "alpha-loop transform needs a loopless graph".into(),
        ));
    }
    let scale = 1.0 - 2.0 * alpha;
    let mut edges: Vec<(usize, usize, f64)> = g
        .edges()
        .into_iter()
        .map(|(x, y, w)| (x, y, scale * w))
        .collect();
    for x in 0..g.len() {
        edges.push((x, x, 2.0 * alpha * g.measure(x)));
    }
    let meta = GraphMeta {
        label: format!("{}+alpha({alpha})", g.meta().label),
        topology: g.meta().topology.clone(),
        lazy_alpha: Some(alpha),
    };
    let out = WeightedGraph::from_undirected(g.len(), &edges, g.boundary_marks(), meta.clone())?;
    Ok(out.with_meta(meta))
}
