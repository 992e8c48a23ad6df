// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::poisson::PoissonWeights;
use super::{transition_apply, transition_row_step};
use crate::error::{Error, Result};
use crate::graph::{Topology, WeightedGraph};

/// Continuous-time row `p(t, x, ·)` with its truncation data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousRow {
    pub t: f64,
    /// `p(t,x,y)`, normalized so that `P_t f(x) = Σ_y m(y) p(t,x,y) f(y)`.
    pub values: Vec<f64>,
    pub order: usize,
    /// Total-variation truncation error bound.
    pub tail_bound: f64,
}

/// Kernel rows from one base vertex.
///
/// `discrete[k][y] = p_k(x,y)` (row-stochastic, no measure normalization).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelTable {
    pub base: usize,
    pub discrete: Vec<Vec<f64>>,
    pub continuous: Vec<ContinuousRow>,
}

impl HeatKernelTable {
    pub fn steps(&self) -> usize {
        self.discrete.len().saturating_sub(1)
    }

    pub fn row_at(&self, t: f64) -> Option<&ContinuousRow> {
        self.continuous.iter().find(|r| r.t == t)
    }
}

fn guard_steps(g: &WeightedGraph, x: usize, steps: usize, what: &str) -> Result<()> {
    if let Some(bd) = g.boundary_distance(x) {
        if steps >= bd {
            return Err(Error::GuardViolation(format!(
                "{what}: {steps} steps from vertex {x} reach the boundary at distance {bd}"
            )));
        }
    }
    Ok(())
}

/// `p_k(x, ·)` for `k = 0..=steps` by repeated sparse row-vector products.
pub fn discrete_kernel(g: &WeightedGraph, x: usize, steps: usize) -> Result<HeatKernelTable> {
    g.check_vertex(x)?;
    guard_steps(g, x, steps, "discrete kernel")?;
    let mut row = vec![0.0; g.len()];
    row[x] = 1.0;
    let mut discrete = Vec::with_capacity(steps + 1);
    for _ in 0..steps {
        let next = transition_row_step(g, &row);
        discrete.push(row);
        row = next;
    }
    discrete.push(row);
    Ok(HeatKernelTable {
        base: x,
        discrete,
        continuous: Vec::new(),
    })
}

/// `p(t, x, ·)` for each requested time, each with tail bound `<= tol`.
pub fn continuous_kernel(
    g: &WeightedGraph,
    x: usize,
    times: &[f64],
    tol: f64,
) -> Result<HeatKernelTable> {
    g.check_vertex(x)?;
    let weights: Vec<PoissonWeights> = times
        .iter()
        .map(|&t| PoissonWeights::new(t, tol))
        .collect::<Result<_>>()?;
    let max_order = weights.iter().map(PoissonWeights::order).max().unwrap_or(0);
    guard_steps(g, x, max_order, "continuous kernel truncation order")?;
    let mut acc = vec![vec![0.0; g.len()]; times.len()];
    let mut row = vec![0.0; g.len()];
    row[x] = 1.0;
    for k in 0..=max_order {
        for (a, w) in acc.iter_mut().zip(&weights) {
            if let Some(&c) = w.weights.get(k) {
                for (ay, ry) in a.iter_mut().zip(&row) {
                    *ay += c * ry;
                }
            }
        }
        if k < max_order {
            row = transition_row_step(g, &row);
        }
    }
    let continuous = acc
        .into_iter()
        .zip(weights)
        .map(|(mut values, w)| {
            for (v, m) in values.iter_mut().zip(g.measures()) {
                *v /= m;
            }
            ContinuousRow {
                t: w.t,
                values,
                order: w.order(),
                tail_bound: w.tail_bound,
            }
        })
        .collect();
    Ok(HeatKernelTable {
        base: x,
        discrete: Vec::new(),
        continuous,
    })
}

/// `P_t f` for several times sharing the powers `P^k f`.
pub fn heat_apply_many(
    g: &WeightedGraph,
    f: &[f64],
    times: &[f64],
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    if f.len() != g.len() {
        return Err(Error::InvalidParameter(
            "function length differs from vertex count".into(),
        ));
    }
    let weights: Vec<PoissonWeights> = times
        .iter()
        .map(|&t| PoissonWeights::new(t, tol))
        .collect::<Result<_>>()?;
    let max_order = weights.iter().map(PoissonWeights::order).max().unwrap_or(0);
    if let Some(bd) = g.support_boundary_distance(f) {
        if max_order >= bd {
            return Err(Error::GuardViolation(format!(
                "heat flow of order {max_order} reaches the boundary (support at distance {bd})"
            )));
        }
    }
    let mut acc = vec![vec![0.0; g.len()]; times.len()];
    let mut power = f.to_vec();
    for k in 0..=max_order {
        for (a, w) in acc.iter_mut().zip(&weights) {
            if let Some(&c) = w.weights.get(k) {
                for (ay, py) in a.iter_mut().zip(&power) {
                    *ay += c * py;
                }
            }
        }
        if k < max_order {
            power = transition_apply(g, &power);
        }
    }
    Ok(acc)
}

/// `P_t f` by uniformization.
pub fn heat_apply(g: &WeightedGraph, f: &[f64], t: f64, tol: f64) -> Result<Vec<f64>> {
    Ok(heat_apply_many(g, f, &[t], tol)?.pop().unwrap_or_default())
}

/// Base vertices over which kernel suprema are taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BaseVertices {
    /// One vertex for vertex-transitive generators and for lattice windows
    /// (whose infinite counterpart is transitive), every vertex otherwise.
    Auto,
    All,
    List(Vec<usize>),
}

impl BaseVertices {
    pub fn resolve(&self, g: &WeightedGraph) -> Vec<usize> {
        match self {
            BaseVertices::Auto => {
                if g.is_vertex_transitive()
                    || matches!(g.meta().topology, Topology::LatticeWindow { .. })
                {
                    vec![g.center()]
                } else {
                    (0..g.len()).collect()
                }
            }
            BaseVertices::All => (0..g.len()).collect(),
            BaseVertices::List(v) => v.clone(),
        }
    }
}

/// `‖P_t‖_{1→∞}` and `‖P_t‖_{2→∞}` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcNorms {
    pub t: f64,
    /// `sup_{x,y} p(t,x,y)`.
    pub norm_1_inf: f64,
    /// `sup_x p(2t,x,x)^{1/2}`.
    pub norm_2_inf: f64,
}

/// Ultracontractive norms on a time grid; each base vertex is swept once.
pub fn uc_norms_grid(
    g: &WeightedGraph,
    times: &[f64],
    tol: f64,
    bases: &BaseVertices,
) -> Result<Vec<UcNorms>> {
    let mut all_times = Vec::with_capacity(2 * times.len());
    all_times.extend_from_slice(times);
    all_times.extend(times.iter().map(|t| 2.0 * t));
    let mut out: Vec<UcNorms> = times
        .iter()
        .map(|&t| UcNorms {
            t,
            norm_1_inf: 0.0,
            norm_2_inf: 0.0,
        })
        .collect();
    let bases = bases.resolve(g);
    if bases.is_empty() {
        return Err(Error::InvalidParameter("no base vertices".into()));
    }
    for x in bases {
        let table = continuous_kernel(g, x, &all_times, tol)?;
        let n = times.len();
        for (i, norms) in out.iter_mut().enumerate() {
            let sup = table.continuous[i]
                .values
                .iter()
                .copied()
                .fold(0.0, f64::max);
            norms.norm_1_inf = norms.norm_1_inf.max(sup);
            let diag = table.continuous[n + i].values[x].max(0.0);
            norms.norm_2_inf = norms.norm_2_inf.max(libm::sqrt(diag));
        }
    }
    Ok(out)
}

pub fn uc_norms(g: &WeightedGraph, t: f64, tol: f64, bases: &BaseVertices) -> Result<UcNorms> {
    Ok(uc_norms_grid(g, &[t], tol, bases)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{alpha_loop_transform, build_graph, GraphSpec};

    fn graph(spec: GraphSpec) -> WeightedGraph {
        build_graph(&spec).unwrap()
    }

    #[test]
    fn two_point_discrete_alternates() {
        let g = graph(GraphSpec::TwoPoint);
        let table = discrete_kernel(&g, 0, 9).unwrap();
        for (k, row) in table.discrete.iter().enumerate() {
            let expect = if k % 2 == 0 { 1.0 } else { 0.0 };
            assert_eq!(row[0], expect);
            assert_eq!(row[1], 1.0 - expect);
        }
    }

    #[test]
    fn return_probabilities() {
        let w = graph(GraphSpec::LatticeWindow { l: 20, d: 1 });
        let table = discrete_kernel(&w, w.center(), 2).unwrap();
        assert!((table.discrete[2][w.center()] - 0.5).abs() < 1e-15);
        let c8 = graph(GraphSpec::Cycle { n: 8 });
        let table = discrete_kernel(&c8, 3, 2).unwrap();
        assert!((table.discrete[2][3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn discrete_guard() {
        let w = graph(GraphSpec::LatticeWindow { l: 5, d: 2 });
        assert!(discrete_kernel(&w, w.center(), 4).is_ok());
        assert!(matches!(
            discrete_kernel(&w, w.center(), 5),
            Err(Error::GuardViolation(_))
        ));
    }

    #[test]
    fn discrete_rows_are_stochastic_and_reversible() {
        let g = alpha_loop_transform(
            &graph(GraphSpec::EdgeList {
                vertices: None,
                edges: vec![(0, 1, 2.0), (1, 2, 0.5), (2, 0, 1.5), (2, 3, 3.0)],
            }),
            0.2,
        )
        .unwrap();
        let tables: Vec<_> = (0..4).map(|x| discrete_kernel(&g, x, 6).unwrap()).collect();
        for k in 0..=6 {
            for x in 0..4 {
                let row = &tables[x].discrete[k];
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                for y in 0..4 {
                    let lhs = g.measure(x) * row[y];
                    let rhs = g.measure(y) * tables[y].discrete[k][x];
                    assert!((lhs - rhs).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn two_point_continuous_closed_form() {
        let g = graph(GraphSpec::TwoPoint);
        let times = [0.1, 1.0, 5.0];
        let table = continuous_kernel(&g, 0, &times, 1e-14).unwrap();
        for row in &table.continuous {
            let e = libm::exp(-2.0 * row.t);
            assert!((row.values[0] - 0.5 * (1.0 + e)).abs() < 1e-12);
            assert!((row.values[1] - 0.5 * (1.0 - e)).abs() < 1e-12);
            assert!(row.tail_bound <= 1e-14);
        }
    }

    #[test]
    fn short_time_is_near_identity() {
        let g = graph(GraphSpec::Cycle { n: 6 });
        for &t in &[1e-2, 1e-3, 1e-4] {
            let table = continuous_kernel(&g, 2, &[t], 1e-15).unwrap();
            let row = &table.continuous[0].values;
            let dev: f64 = (0..6)
                .map(|y| {
                    let target = if y == 2 { 1.0 } else { 0.0 };
                    (row[y] * g.measure(y) - target).abs()
                })
                .sum();
            assert!(dev <= 2.0 * t + 1e-12, "t={t} dev={dev}");
        }
    }

    #[test]
    fn continuous_rows_conserve_mass() {
        let g = graph(GraphSpec::Torus { n: 8, d: 2 });
        let table = continuous_kernel(&g, 0, &[0.5, 4.0, 20.0], 1e-13).unwrap();
        for row in &table.continuous {
            assert!(row.values.iter().all(|&v| v >= 0.0));
            let mass = g.inner(&row.values, &vec![1.0; g.len()]);
            assert!((mass - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn continuous_guard() {
        let w = graph(GraphSpec::LatticeWindow { l: 20, d: 1 });
        assert!(continuous_kernel(&w, w.center(), &[1.0], 1e-10).is_ok());
        assert!(matches!(
            continuous_kernel(&w, w.center(), &[8.0], 1e-10),
            Err(Error::GuardViolation(_))
        ));
    }

    #[test]
    fn heat_apply_matches_kernel_rows() {
        let g = graph(GraphSpec::Cycle { n: 9 });
        let mut delta = vec![0.0; 9];
        delta[4] = 1.0;
        let ptf = heat_apply(&g, &delta, 1.7, 1e-14).unwrap();
        let table = continuous_kernel(&g, 4, &[1.7], 1e-14).unwrap();
        // (P_t δ_4)(x) = m(4) p(t,x,4) = m(x) p(t,4,x) by symmetry of the kernel.
        for (&a, &p) in ptf.iter().zip(&table.continuous[0].values) {
            assert!((a - g.measure(4) * p).abs() < 1e-13);
        }
    }

    #[test]
    fn uc_norms_two_point() {
        let g = graph(GraphSpec::TwoPoint);
        let n = uc_norms(&g, 1.0, 1e-14, &BaseVertices::All).unwrap();
        assert!((n.norm_1_inf - 0.5 * (1.0 + libm::exp(-2.0))).abs() < 1e-12);
        let diag2 = 0.5 * (1.0 + libm::exp(-4.0));
        assert!((n.norm_2_inf - libm::sqrt(diag2)).abs() < 1e-12);
    }

    #[test]
    fn uc_norms_transitive_shortcut() {
        let g = alpha_loop_transform(&graph(GraphSpec::Cycle { n: 7 }), 0.25).unwrap();
        let one = uc_norms(&g, 0.8, 1e-14, &BaseVertices::List(vec![0])).unwrap();
        let other = uc_norms(&g, 0.8, 1e-14, &BaseVertices::List(vec![3])).unwrap();
        let all = uc_norms(&g, 0.8, 1e-14, &BaseVertices::All).unwrap();
        assert!((one.norm_1_inf - other.norm_1_inf).abs() < 1e-14);
        assert!((one.norm_1_inf - all.norm_1_inf).abs() < 1e-14);
        assert!((one.norm_2_inf - all.norm_2_inf).abs() < 1e-14);
    }

    #[test]
    fn uc_norm_duality() {
        let g = graph(GraphSpec::Cycle { n: 4 });
        for &t in &[0.3, 1.0, 2.5] {
            let n = uc_norms(&g, t, 1e-14, &BaseVertices::Auto).unwrap();
            let table = continuous_kernel(&g, 0, &[2.0 * t], 1e-14).unwrap();
            let diag = table.continuous[0].values[0];
            assert!((n.norm_2_inf * n.norm_2_inf - diag).abs() < 1e-13);
            let at2t = uc_norms(&g, 2.0 * t, 1e-14, &BaseVertices::Auto).unwrap();
            assert!((n.norm_2_inf * n.norm_2_inf - at2t.norm_1_inf).abs() < 1e-13);
        }
    }
}
