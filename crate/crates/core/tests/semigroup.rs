// SPDX-License-Identifier: Apache-2.0

mod common;

use proptest::prelude::*;
use ultracon_core::graph::{alpha_loop_transform, build_graph, GraphSpec};
use ultracon_core::semigroup::{
    continuous_kernel, discrete_kernel, heat_apply, uc_norms, uc_norms_grid, BaseVertices,
};

#[test]
fn four_cycle_matches_dense_exponential() {
    let g = build_graph(&GraphSpec::Cycle { n: 4 }).unwrap();
    let dense = common::dense_heat(&g, 1.0);
    let row = &continuous_kernel(&g, 0, &[1.0], 1e-14).unwrap().continuous[0];
    for y in 0..4 {
        assert!((row.values[y] - dense[(0, y)]).abs() < 1e-10);
    }
}

#[test]
fn dense_oracle_on_generators() {
    let specs = [
        GraphSpec::TwoPoint,
        GraphSpec::Cycle { n: 9 },
        GraphSpec::Complete { n: 6 },
        GraphSpec::Torus { n: 8, d: 2 },
        GraphSpec::Torus { n: 4, d: 3 },
    ];
    for spec in &specs {
        let g = build_graph(spec).unwrap();
        let lazy = alpha_loop_transform(&g, 0.25).unwrap();
        for h in [&g, &lazy] {
            for t in [0.2, 3.0, 11.0] {
                let dense = common::dense_heat(h, t);
                let row = &continuous_kernel(h, 1, &[t], 1e-13).unwrap().continuous[0];
                for y in 0..h.len() {
                    assert!((row.values[y] - dense[(1, y)]).abs() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn discrete_semigroup_property() {
    let g = common::random_graph(30, 5);
    let (k, j) = (7, 5);
    let tables: Vec<_> = (0..g.len())
        .map(|x| discrete_kernel(&g, x, k + j).unwrap())
        .collect();
    for x in [0, 11] {
        for z in 0..g.len() {
            let composed: f64 = (0..g.len())
                .map(|y| tables[x].discrete[k][y] * tables[y].discrete[j][z])
                .sum();
            assert!((composed - tables[x].discrete[k + j][z]).abs() < 1e-14);
        }
    }
}

#[test]
fn continuous_semigroup_property() {
    let g = common::random_graph(25, 8);
    let (t, s) = (0.7, 1.9);
    let rows: Vec<_> = (0..g.len())
        .map(|x| continuous_kernel(&g, x, &[t, s, t + s], 1e-13).unwrap())
        .collect();
    for x in [0, 3] {
        for z in 0..g.len() {
            let composed: f64 = (0..g.len())
                .map(|y| {
                    g.measure(y) * rows[x].continuous[0].values[y] * rows[y].continuous[1].values[z]
                })
                .sum();
            assert!((composed - rows[x].continuous[2].values[z]).abs() < 1e-8);
        }
    }
}

#[test]
fn four_cycle_duality() {
    let g = build_graph(&GraphSpec::Cycle { n: 4 }).unwrap();
    for t in [0.1, 0.8, 3.0] {
        let n = uc_norms(&g, t, 1e-13, &BaseVertices::All).unwrap();
        let diag = continuous_kernel(&g, 0, &[2.0 * t], 1e-13)
            .unwrap()
            .continuous[0]
            .values[0];
        assert!((n.norm_2_inf * n.norm_2_inf - diag).abs() < 1e-12);
    }
}

#[test]
fn transitive_shortcut_on_torus() {
    let g = alpha_loop_transform(
        &build_graph(&GraphSpec::Torus { n: 6, d: 2 }).unwrap(),
        0.25,
    )
    .unwrap();
    let times = [0.5, 2.0, 9.0];
    let auto = uc_norms_grid(&g, &times, 1e-13, &BaseVertices::Auto).unwrap();
    let other = uc_norms_grid(&g, &times, 1e-13, &BaseVertices::List(vec![17])).unwrap();
    for (a, b) in auto.iter().zip(&other) {
        assert!((a.norm_1_inf - b.norm_1_inf).abs() < 1e-14);
        assert!((a.norm_2_inf - b.norm_2_inf).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_rows_reversible_and_positive(s in any::<u64>(), n in 2usize..30, t in 0.01f64..8.0) {
        let g = common::random_graph(n, s);
        let a = continuous_kernel(&g, 0, &[t], 1e-13).unwrap();
        let y = n - 1;
        let b = continuous_kernel(&g, y, &[t], 1e-13).unwrap();
        let (ra, rb) = (&a.continuous[0], &b.continuous[0]);
        prop_assert!(ra.values.iter().all(|&v| v >= 0.0));
        prop_assert!((ra.values[y] - rb.values[0]).abs() < 1e-12);
        let mass: f64 = (0..n).map(|z| g.measure(z) * ra.values[z]).sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heat_flow_contracts(s in any::<u64>(), n in 2usize..30, t in 0.01f64..8.0) {
        let g = common::random_graph(n, s);
        let f = common::random_positive(n, s ^ 3);
        let h = heat_apply(&g, &f, t, 1e-13).unwrap();
        prop_assert!((g.norm(&h, 1.0) - g.norm(&f, 1.0)).abs() < 1e-10 * g.norm(&f, 1.0));
        for p in [2.0, 3.0, f64::INFINITY] {
            prop_assert!(g.norm(&h, p) <= g.norm(&f, p) * (1.0 + 1e-12));
        }
    }
}
