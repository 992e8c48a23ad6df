// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{GraphMeta, Topology, WeightedGraph};
use crate::error::{Error, Result};

/// Upper bound on generated vertex counts.
const MAX_VERTICES: usize = 1 << 24;

/// Generator families for [`build_graph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    /// Cycle `Z/nZ` with unit weights, `n >= 3`.
    Cycle { n: usize },
    /// Cayley graph of `(Z/nZ)^d` with generators `±e_i`, unit weights, `n >= 3`.
    Torus { n: usize, d: usize },
    /// Box `[-l, l]^d` of `Z^d`; vertices with a coordinate of modulus `l` are boundary.
    LatticeWindow { l: usize, d: usize },
    /// `K₂` with unit weight.
    TwoPoint,
    /// Complete graph `K_n`, unit weights, `n >= 2`.
    Complete { n: usize },
    /// Undirected weighted edges. A pair may appear in both orientations only
    /// with equal weights.
    EdgeList {
        vertices: Option<usize>,
        edges: Vec<(usize, usize, f64)>,
    },
}

impl GraphSpec {
    pub fn label(&self) -> String {
        match self {
            GraphSpec::Cycle { n } => format!("cycle({n})"),
            GraphSpec::Torus { n, d } => format!("torus({n},{d})"),
            GraphSpec::LatticeWindow { l, d } => format!("lattice_window({l},{d})"),
            GraphSpec::TwoPoint => "two_point".into(),
            GraphSpec::Complete { n } => format!("complete({n})"),
            GraphSpec::EdgeList { edges, .. } => format!("edge_list({} edges)", edges.len()),
        }
    }
}

fn checked_pow(base: usize, d: usize) -> Result<usize> {
    let mut out: usize = 1;
    for _ in 0..d {
        out = out
            .checked_mul(base)
            .filter(|&v| v <= MAX_VERTICES)
            .ok_or_else(|| Error::InvalidParameter(format!("{base}^{d} vertices is too many")))?;
    }
    Ok(out)
}

fn meta(label: String, topology: Topology) -> GraphMeta {
    GraphMeta {
        label,
        topology,
        lazy_alpha: None,
    }
}

/// Materializes a generator spec.
pub fn build_graph(spec: &GraphSpec) -> Result<WeightedGraph> {
    let label = spec.label();
    match *spec {
        GraphSpec::Cycle { n } => {
            if n < 3 {
                return Err(Error::InvalidParameter(format!(
                    "cycle needs n >= 3, got {n}"
                )));
            }
            let edges: Vec<_> = (0..n).map(|x| (x, (x + 1) % n, 1.0)).collect();
            WeightedGraph::from_undirected(
                n,
                &edges,
                vec![false; n],
                meta(label, Topology::Cycle { n }),
            )
        }
        GraphSpec::Torus { n, d } => {
            if n < 3 || d == 0 {
                return Err(Error::InvalidParameter(format!(
                    "torus needs n >= 3 and d >= 1, got n={n}, d={d}"
                )));
            }
            let size = checked_pow(n, d)?;
            let mut edges = Vec::with_capacity(size * d);
            for x in 0..size {
                let mut stride = 1;
                for _ in 0..d {
                    let coord = (x / stride) % n;
                    let next = if coord + 1 == n {
                        x + stride - n * stride
                    } else {
                        x + stride
                    };
                    edges.push((x, next, 1.0));
                    stride *= n;
                }
            }
            WeightedGraph::from_undirected(
                size,
                &edges,
                vec![false; size],
                meta(label, Topology::Torus { n, d }),
            )
        }
        GraphSpec::LatticeWindow { l, d } => {
            if l == 0 || d == 0 {
                return Err(Error::InvalidParameter(format!(
                    "lattice window needs l >= 1 and d >= 1, got l={l}, d={d}"
                )));
            }
            let side = 2 * l + 1;
            let size = checked_pow(side, d)?;
            let mut edges = Vec::with_capacity(size * d);
            let mut boundary = vec![false; size];
            for (x, mark) in boundary.iter_mut().enumerate() {
                let mut stride = 1;
                for _ in 0..d {
                    let coord = (x / stride) % side;
                    if coord == 0 || coord == side - 1 {
                        *mark = true;
                    }
                    if coord + 1 < side {
                        edges.push((x, x + stride, 1.0));
                    }
                    stride *= side;
                }
            }
            WeightedGraph::from_undirected(
                size,
                &edges,
                boundary,
                meta(label, Topology::LatticeWindow { l, d }),
            )
        }
        GraphSpec::TwoPoint => WeightedGraph::from_undirected(
            2,
            &[(0, 1, 1.0)],
            vec![false; 2],
            meta(label, Topology::TwoPoint),
        ),
        GraphSpec::Complete { n } => {
            if n < 2 {
                return Err(Error::InvalidParameter(format!(
                    "complete graph needs n >= 2, got {n}"
                )));
            }
            let mut edges = Vec::new();
            for x in 0..n {
                for y in x + 1..n {
                    edges.push((x, y, 1.0));
                }
            }
            WeightedGraph::from_undirected(
                n,
                &edges,
                vec![false; n],
                meta(label, Topology::Complete { n }),
            )
        }
        GraphSpec::EdgeList {
            vertices,
            ref edges,
        } => build_explicit(vertices, edges, label),
    }
}

fn build_explicit(
    vertices: Option<usize>,
    edges: &[(usize, usize, f64)],
    label: String,
) -> Result<WeightedGraph> {
    let max_id = edges.iter().map(|&(x, y, _)| x.max(y)).max();
    let n = match (vertices, max_id) {
        (Some(n), Some(m)) if m >= n => return Err(Error::UnknownVertex(m)),
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(Error::InvalidGraph("empty edge list".into())),
    };
    // Collapse the two orientations of a pair; they must agree.
    let mut canon: Vec<(usize, usize, f64, bool)> = edges
        .iter()
        .map(|&(x, y, w)| (x.min(y), x.max(y), w, x <= y))
        .collect();
    for &(x, y, w, _) in &canon {
        if w < 0.0 || !w.is_finite() {
            return Err(Error::InvalidGraph(format!(
                "edge ({x},{y}) has invalid weight {w}"
            )));
        }
    }
    canon.sort_by_key(|a| (a.0, a.1, !a.3));
    let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(canon.len());
    let mut i = 0;
    while i < canon.len() {
        let (x, y, w, forward) = canon[i];
        let mut j = i + 1;
        while j < canon.len() && canon[j].0 == x && canon[j].1 == y {
            j += 1;
        }
        let group = &canon[i..j];
        let same_orientation = group.iter().filter(|e| e.3 == forward).count();
        if same_orientation > 1 || group.len() > 2 || (x == y && group.len() > 1) {
            return Err(Error::InvalidGraph(format!(
                "edge ({x},{y}) listed more than once"
            )));
        }
        if group.len() == 2 && group[1].2 != w {
            return Err(Error::InvalidGraph(format!(
                "asymmetric weights on ({x},{y}): {w} vs {}",
                group[1].2
            )));
        }
        merged.push((x, y, w));
        i = j;
    }
    WeightedGraph::from_undirected(n, &merged, vec![false; n], meta(label, Topology::Explicit))
}
