// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use proptest::prelude::*;
use ultracon::cache::{CacheStatus, KernelCache};
use ultracon::edgelist;
use ultracon_core::graph::build_graph;
use ultracon_core::GraphSpec;

fn connected_edges() -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    (3usize..9).prop_flat_map(|n| {
        let path = proptest::collection::vec(0.01f64..10.0, n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, 0.01f64..10.0), 0..6);
        (path, extra).prop_map(|(path, extra)| {
            let mut edges: Vec<_> = path
                .into_iter()
                .enumerate()
                .map(|(i, w)| (i, i + 1, w))
                .collect();
            for (x, y, w) in extra {
                if !edges
                    .iter()
                    .any(|&(a, b, _)| (a, b) == (x, y) || (a, b) == (y, x))
                {
                    edges.push((x, y, w));
                }
            }
            edges
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn edge_list_round_trip(edges in connected_edges()) {
        let g = build_graph(&GraphSpec::EdgeList { vertices: None, edges }).unwrap();
        let text = edgelist::render(&g);
        let back = build_graph(&edgelist::parse(&text, Path::new("p")).unwrap()).unwrap();
        prop_assert_eq!(back.fingerprint(), g.fingerprint());
        prop_assert_eq!(back.measures(), g.measures());
    }

    #[test]
    fn cache_is_bit_exact(edges in connected_edges(), t in 0.01f64..3.0, steps in 0usize..6) {
        let g = build_graph(&GraphSpec::EdgeList { vertices: None, edges }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cache = KernelCache::at(dir.path());
        let (cold, s) = cache.kernel(&g, 0, steps, &[t, 2.0 * t], 1e-12).unwrap();
        prop_assert_eq!(s, CacheStatus::Miss);
        let (warm, s) = cache.kernel(&g, 0, steps, &[t, 2.0 * t], 1e-12).unwrap();
        prop_assert_eq!(s, CacheStatus::Hit);
        for (a, b) in cold.continuous.iter().zip(&warm.continuous) {
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&a.values), bits(&b.values));
        }
        prop_assert_eq!(cold, warm);
    }
}
