// SPDX-License-Identifier: Apache-2.0

//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use ultracon_core::graph::{build_graph, GraphSpec, WeightedGraph};
use ultracon_core::seed;

/// Dense edge-weight matrix, loops on the diagonal.
pub fn dense_weights(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.len();
    let mut w = DMatrix::zeros(n, n);
    for (x, y, v) in g.edges() {
        w[(x, y)] = v;
        w[(y, x)] = v;
    }
    w
}

/// `p(t,x,y) = [e^{tΔ}]_{xy} / m(y)` through a dense matrix exponential.
pub fn dense_heat(g: &WeightedGraph, t: f64) -> DMatrix<f64> {
    let n = g.len();
    let w = dense_weights(g);
    let m: Vec<f64> = (0..n).map(|x| w.row(x).sum()).collect();
    let mut lap = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            lap[(x, y)] = w[(x, y)] / m[x];
        }
        lap[(x, x)] -= 1.0;
    }
    let e = (lap * t).exp();
    DMatrix::from_fn(n, n, |x, y| e[(x, y)] / m[y])
}

/// Forms straight from the definitions, on dense matrices.
pub struct DenseForms {
    w: DMatrix<f64>,
    m: Vec<f64>,
}

impl DenseForms {
    pub fn new(g: &WeightedGraph) -> Self {
        let w = dense_weights(g);
        let m = (0..g.len()).map(|x| w.row(x).sum()).collect();
        Self { w, m }
    }

    fn n(&self) -> usize {
        self.m.len()
    }

    pub fn laplace(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|x| {
                (0..self.n())
                    .map(|y| self.w[(x, y)] * (f[y] - f[x]))
                    .sum::<f64>()
                    / self.m[x]
            })
            .collect()
    }

    pub fn gamma(&self, f: &[f64], h: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|x| {
                (0..self.n())
                    .map(|y| self.w[(x, y)] * (f[y] - f[x]) * (h[y] - h[x]))
                    .sum::<f64>()
                    / (2.0 * self.m[x])
            })
            .collect()
    }

    /// Bilinear `2Γ₂(f,h) = ΔΓ(f,h) - Γ(f,Δh) - Γ(Δf,h)` at `h = f`.
    pub fn gamma2(&self, f: &[f64]) -> Vec<f64> {
        let lf = self.laplace(f);
        let a = self.laplace(&self.gamma(f, f));
        let b = self.gamma(f, &lf);
        let c = self.gamma(&lf, f);
        (0..self.n()).map(|x| 0.5 * (a[x] - b[x] - c[x])).collect()
    }

    pub fn gamma2_tilde(&self, f: &[f64]) -> Vec<f64> {
        let g2 = self.gamma2(f);
        let gf = self.gamma(f, f);
        let ratio: Vec<f64> = gf.iter().zip(f).map(|(a, b)| a / b).collect();
        let corr = self.gamma(f, &ratio);
        g2.iter().zip(&corr).map(|(a, b)| a - b).collect()
    }
}

/// Connected graph: random spanning tree, extra edges and optional loops.
pub fn random_graph(n: usize, s: u64) -> WeightedGraph {
    let mut rng = seed::rng(s);
    let mut edges = Vec::new();
    for y in 1..n {
        let x = rng.gen_range(0..y);
        edges.push((x, y, rng.gen_range(0.2..3.0)));
    }
    for _ in 0..n {
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        if x != y
            && !edges
                .iter()
                .any(|&(a, b, _)| (a, b) == (x.min(y), x.max(y)))
        {
            edges.push((x.min(y), x.max(y), rng.gen_range(0.2..3.0)));
        }
    }
    if rng.gen_bool(0.5) {
        for x in 0..n {
            if rng.gen_bool(0.5) {
                edges.push((x, x, rng.gen_range(0.1..2.0)));
            }
        }
    }
    let g = build_graph(&GraphSpec::EdgeList {
        vertices: Some(n),
        edges,
    })
    .expect("random graph");
    assert!(g.is_connected());
    g
}

pub fn random_positive(n: usize, s: u64) -> Vec<f64> {
    let mut rng = seed::rng(s);
    (0..n).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect()
}
