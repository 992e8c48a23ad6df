// SPDX-License-Identifier: Apache-2.0

//! Weighted graph model, generators, balls and volume growth.
//!
//! The vertex measure is `m(x) = Σ_y ω_xy` with a loop weight counted once,
//! and every ℓ^p norm is taken against it.

mod generators;
mod growth;
mod loops;

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generators::{build_graph, GraphSpec};
pub use growth::{ball_volume, growth_profile, GrowthProfile};
pub use loops::{alpha_loop_transform, check_delta_alpha, DeltaAlphaCheck, DeltaAlphaScope};

/// Real function on the vertices, indexed by vertex id.
pub type GraphFunction = Vec<f64>;

/// Which generator family produced a graph; drives symmetry shortcuts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Topology {
    Cycle { n: usize },
    Torus { n: usize, d: usize },
    LatticeWindow { l: usize, d: usize },
    TwoPoint,
    Complete { n: usize },
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    /// Generator name with parameters, plus any transforms applied.
    pub label: String,
    pub topology: Topology,
    /// Set when the graph came out of [`alpha_loop_transform`].
    pub lazy_alpha: Option<f64>,
}

/// Finite graph with symmetric nonnegative weights. Immutable after construction.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    adjacency: Vec<(usize, f64)>,
    measure: Vec<f64>,
    boundary: Vec<bool>,
    boundary_dist: Option<Vec<usize>>,
    connected: bool,
    meta: GraphMeta,
}

/// Distinct vertices together with their volume `V(A) = Σ_{x∈A} m(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    pub members: Vec<usize>,
    pub volume: f64,
}

impl VertexSet {
    pub fn new(g: &WeightedGraph, members: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; g.len()];
        for &x in &members {
            if x >= g.len() {
                return Err(Error::UnknownVertex(x));
            }
            if seen[x] {
                return Err(Error::InvalidParameter(alloc::format!(
                    "vertex {x} listed twice"
                )));
            }
            seen[x] = true;
        }
        let volume = members.iter().map(|&x| g.measure(x)).sum();
        Ok(Self { members, volume })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl WeightedGraph {
    /// Builds a graph from undirected edges `(x, y, ω)`, each pair listed once.
    ///
    /// Zero weights are dropped. Loops `(x, x, ω)` are allowed.
    pub(crate) fn from_undirected(
        n: usize,
        edges: &[(usize, usize, f64)],
        boundary: Vec<bool>,
        meta: GraphMeta,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut lists: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(x, y, w) in edges {
            if x >= n || y >= n {
                return Err(Error::UnknownVertex(x.max(y)));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidGraph(alloc::format!(
                    "weight of edge ({x},{y}) must be finite and nonnegative, got {w}"
                )));
            }
            if w == 0.0 {
                continue;
            }
            lists[x].push((y, w));
            if x != y {
                lists[y].push((x, w));
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut adjacency = Vec::new();
        let mut measure = Vec::with_capacity(n);
        offsets.push(0);
        for (x, mut list) in lists.into_iter().enumerate() {
            list.sort_by_key(|a| a.0);
            for pair in list.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err(Error::InvalidGraph(alloc::format!(
                        "edge ({x},{}) listed more than once",
                        pair[0].0
                    )));
                }
            }
            let m: f64 = list.iter().map(|&(_, w)| w).sum();
            if m <= 0.0 {
                return Err(Error::InvalidGraph(alloc::format!(
                    "vertex {x} is isolated"
                )));
            }
            measure.push(m);
            adjacency.extend(list);
            offsets.push(adjacency.len());
        }
        if boundary.len() != n {
            return Err(Error::InvalidGraph(
                "boundary marks have the wrong length".into(),
            ));
        }
        let mut g = Self {
            offsets,
            adjacency,
            measure,
            boundary,
            boundary_dist: None,
            connected: false,
            meta,
        };
        g.connected = g.distances_from(0).iter().all(|&d| d != usize::MAX);
        if g.boundary.iter().any(|&b| b) {
            let sources: Vec<usize> = (0..n).filter(|&x| g.boundary[x]).collect();
            g.boundary_dist = Some(g.multi_source_distances(&sources));
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn label(&self) -> &str {
        &self.meta.label
    }

    /// Neighbors of `x` with weights, sorted by vertex id; a loop appears as `(x, ω_xx)`.
    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[self.offsets[x]..self.offsets[x + 1]]
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        let list = self.neighbors(x);
        match list.binary_search_by(|probe| probe.0.cmp(&y)) {
            Ok(i) => list[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    /// `V(G) = Σ_x m(x)`.
    pub fn total_volume(&self) -> f64 {
        self.measure.iter().sum()
    }

    /// Transition probability `p(x,y) = ω_xy / m(x)`.
    pub fn transition(&self, x: usize, y: usize) -> f64 {
        self.weight(x, y) / self.measure[x]
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn has_loops(&self) -> bool {
        (0..self.len()).any(|x| self.weight(x, x) > 0.0)
    }

    pub fn is_boundary(&self, x: usize) -> bool {
        self.boundary[x]
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary_dist.is_some()
    }

    /// Hop distance from `x` to the nearest boundary-marked vertex, `None` on
    /// graphs without boundary marks. Unreachable boundaries give `usize::MAX`.
    pub fn boundary_distance(&self, x: usize) -> Option<usize> {
        self.boundary_dist.as_ref().map(|d| d[x])
    }

    /// True for generators whose automorphism group acts transitively.
    pub fn is_vertex_transitive(&self) -> bool {
        matches!(
            self.meta.topology,
            Topology::Cycle { .. }
                | Topology::Torus { .. }
                | Topology::TwoPoint
                | Topology::Complete { .. }
        )
    }

    /// The origin of a lattice window, vertex 0 otherwise.
    pub fn center(&self) -> usize {
        match self.meta.topology {
            Topology::LatticeWindow { l, d } => {
                let side = 2 * l + 1;
                let mut idx = 0;
                let mut stride = 1;
                for _ in 0..d {
                    idx += l * stride;
                    stride *= side;
                }
                idx
            }
            _ => 0,
        }
    }

    /// Integer coordinates for lattice-like generators.
    ///
    /// Tori and cycles use `0..n` per axis, windows use `-l..=l`.
    pub fn coordinates(&self, x: usize) -> Option<Vec<i64>> {
        let (side, d, shift) = match self.meta.topology {
            Topology::Cycle { n } => (n, 1, 0i64),
            Topology::Torus { n, d } => (n, d, 0),
            Topology::LatticeWindow { l, d } => (2 * l + 1, d, l as i64),
            _ => return None,
        };
        let mut rest = x;
        let mut out = Vec::with_capacity(d);
        for _ in 0..d {
            out.push((rest % side) as i64 - shift);
            rest /= side;
        }
        Some(out)
    }

    pub fn check_vertex(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(x))
        }
    }

    /// Hop distances from `x`, ignoring loops; `usize::MAX` marks unreachable vertices.
    pub fn distances_from(&self, x: usize) -> Vec<usize> {
        self.multi_source_distances(&[x])
    }

    fn multi_source_distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(y) = queue.pop_front() {
            for &(z, _) in self.neighbors(y) {
                if dist[z] == usize::MAX {
                    dist[z] = dist[y] + 1;
                    queue.push_back(z);
                }
            }
        }
        dist
    }

    /// Smallest boundary distance over the support of `f`, `None` without boundary marks.
    pub fn support_boundary_distance(&self, f: &[f64]) -> Option<usize> {
        let bd = self.boundary_dist.as_ref()?;
        Some(
            f.iter()
                .zip(bd)
                .filter(|(v, _)| **v != 0.0)
                .map(|(_, d)| *d)
                .min()
                .unwrap_or(usize::MAX),
        )
    }

    /// `⟨u⟩ = Σ_x m(x) u(x)`.
    pub fn integral(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.measure).map(|(a, m)| a * m).sum()
    }

    /// `⟨f, h⟩ = Σ_x m(x) f(x) h(x)`.
    pub fn inner(&self, f: &[f64], h: &[f64]) -> f64 {
        f.iter()
            .zip(h)
            .zip(&self.measure)
            .map(|((a, b), m)| a * b * m)
            .sum()
    }

    /// ℓ^p norm against the vertex measure; `p = f64::INFINITY` gives the sup norm.
    pub fn norm(&self, f: &[f64], p: f64) -> f64 {
        if p == f64::INFINITY {
            return f.iter().fold(0.0, |acc, v| acc.max(libm::fabs(*v)));
        }
        if p == 1.0 {
            return f
                .iter()
                .zip(&self.measure)
                .map(|(v, m)| m * libm::fabs(*v))
                .sum();
        }
        if p == 2.0 {
            return libm::sqrt(self.inner(f, f));
        }
        let s: f64 = f
            .iter()
            .zip(&self.measure)
            .map(|(v, m)| m * libm::pow(libm::fabs(*v), p))
            .sum();
        libm::pow(s, 1.0 / p)
    }

    pub(crate) fn with_meta(mut self, meta: GraphMeta) -> Self {
        self.meta = meta;
        self
    }

    /// Undirected edge list, each pair once with `x <= y`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for &(y, w) in self.neighbors(x) {
                if x <= y {
                    out.push((x, y, w));
                }
            }
        }
        out
    }

    pub(crate) fn boundary_marks(&self) -> Vec<bool> {
        self.boundary.clone()
    }

    /// Stable 64-bit fingerprint of the weights, measure layout and boundary marks.
    pub fn fingerprint(&self) -> u64 {
        let mut h = crate::seed::mix(self.len() as u64);
        for (x, y, w) in self.edges() {
            h = crate::seed::mix(h ^ x as u64);
            h = crate::seed::mix(h ^ y as u64);
            h = crate::seed::mix(h ^ w.to_bits());
        }
        for (x, b) in self.boundary.iter().enumerate() {
            if *b {
                h = crate::seed::mix(h ^ (x as u64).rotate_left(17));
            }
        }
        h
    }
}
