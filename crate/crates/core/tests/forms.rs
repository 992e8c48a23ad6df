// SPDX-License-Identifier: Apache-2.0

mod common;

use proptest::prelude::*;
use ultracon_core::forms::{
    cde_residual, cde_verify, dimension_scan, energy_pair, gamma, gamma2, gamma2_pair, CdeBudget,
    Verdict,
};
use ultracon_core::graph::{alpha_loop_transform, build_graph, GraphSpec};
use ultracon_core::semigroup::laplacian;

#[test]
fn two_point_hand_values() {
    let g = build_graph(&GraphSpec::TwoPoint).unwrap();
    let f = [2.0, 1.0];
    let (g2, tilde) = gamma2_pair(&g, &f).unwrap();
    assert_eq!(g2, vec![1.0, 1.0]);
    assert_eq!(tilde, vec![1.125, 1.125]);
    let oracle = common::DenseForms::new(&g);
    assert_eq!(oracle.gamma2(&f), g2);
    assert_eq!(oracle.gamma2_tilde(&f), tilde);
}

#[test]
fn four_cycle_alternating() {
    let g = build_graph(&GraphSpec::Cycle { n: 4 }).unwrap();
    let f = [2.0, 1.0, 2.0, 1.0];
    let g2 = gamma2(&g, &f);
    let oracle = common::DenseForms::new(&g).gamma2(&f);
    for x in 0..4 {
        assert!((g2[x] - 1.0).abs() < 1e-15);
        assert!((g2[x] - oracle[x]).abs() < 1e-15);
    }
}

#[test]
fn gamma2_of_signed_functions_matches_oracle() {
    for s in 0..30 {
        let g = common::random_graph(3 + s as usize % 6, 70 + s);
        let f: Vec<f64> = common::random_positive(g.len(), s)
            .iter()
            .map(|v| v.ln())
            .collect();
        let a = gamma2(&g, &f);
        let b = common::DenseForms::new(&g).gamma2(&f);
        for x in 0..g.len() {
            assert!((a[x] - b[x]).abs() <= 1e-12 * (1.0 + b[x].abs()));
        }
    }
}

#[test]
fn lattice_d1_passes_at_4_53() {
    let w = build_graph(&GraphSpec::LatticeWindow { l: 4, d: 1 }).unwrap();
    let budget = CdeBudget {
        restarts: 40,
        ..Default::default()
    };
    let r = cde_verify(&w, w.center(), 4.53, 0.0, budget, 1).unwrap();
    assert_eq!(r.verdict, Verdict::NoViolationFound);
    assert!(r.min_residual >= -1e-8);
}

#[test]
fn radial_witness_breaks_slightly_smaller_dimension() {
    // u = -1.8·d(0,·) on Z is close to the extremal profile.
    let w = build_graph(&GraphSpec::LatticeWindow { l: 4, d: 1 }).unwrap();
    let c = w.center();
    let f: Vec<f64> = (0..w.len())
        .map(|y| {
            let d = (w.coordinates(y).unwrap()[0]).unsigned_abs() as f64;
            (-1.8 * d).exp()
        })
        .collect();
    assert!(cde_residual(&w, &f, c, 4.4, 0.0).unwrap() < -1e-6);
    assert!(cde_residual(&w, &f, c, 4.6, 0.0).unwrap() > 0.0);
}

#[test]
fn two_point_scan_is_seed_stable() {
    let g = build_graph(&GraphSpec::TwoPoint).unwrap();
    let budget = CdeBudget {
        restarts: 12,
        ..Default::default()
    };
    let a = dimension_scan(&g, 0, 0.0, (0.05, 50.0), 0.01, budget, 1).unwrap();
    let b = dimension_scan(&g, 0, 0.0, (0.05, 50.0), 0.01, budget, 2).unwrap();
    assert!(a.monotone && b.monotone);
    assert!(
        (a.hi - b.hi).abs() <= 0.02,
        "{:?} vs {:?}",
        (a.lo, a.hi),
        (b.lo, b.hi)
    );
}

#[test]
fn report_round_trip() {
    let w = build_graph(&GraphSpec::LatticeWindow { l: 3, d: 2 }).unwrap();
    let budget = CdeBudget {
        restarts: 5,
        ..Default::default()
    };
    let r = cde_verify(&w, w.center(), 0.5, 0.0, budget, 9).unwrap();
    let mut f = vec![1.0; w.len()];
    for &(y, v) in &r.witness {
        f[y] = v;
    }
    assert_eq!(
        cde_residual(&w, &f, w.center(), 0.5, 0.0).unwrap(),
        r.recomputed_residual
    );
    assert_eq!(r.verdict == Verdict::Violated, r.min_residual < -1e-8);
}

fn spec_graph(i: usize) -> ultracon_core::WeightedGraph {
    let specs = [
        GraphSpec::TwoPoint,
        GraphSpec::Cycle { n: 7 },
        GraphSpec::Complete { n: 5 },
        GraphSpec::Torus { n: 4, d: 2 },
        GraphSpec::LatticeWindow { l: 3, d: 2 },
        GraphSpec::Torus { n: 3, d: 3 },
    ];
    let g = build_graph(&specs[i % specs.len()]).unwrap();
    if i >= specs.len() {
        alpha_loop_transform(&g, 0.3).unwrap()
    } else {
        g
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_nonnegative_bilinear_symmetric(i in 0usize..12, s in any::<u64>(), c in -5.0f64..5.0) {
        let g = spec_graph(i);
        let f = common::random_positive(g.len(), s);
        let h = common::random_positive(g.len(), s ^ 1);
        let gf = gamma(&g, &f, None);
        prop_assert!(gf.iter().all(|&v| v >= 0.0));
        let fh = gamma(&g, &f, Some(&h));
        let hf = gamma(&g, &h, Some(&f));
        let shifted: Vec<f64> = f.iter().map(|v| v + c).collect();
        let gs = gamma(&g, &shifted, None);
        let combo: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a - c * b).collect();
        let lin = gamma(&g, &combo, Some(&h));
        let gh = gamma(&g, &h, None);
        for x in 0..g.len() {
            prop_assert!((fh[x] - hf[x]).abs() < 1e-13);
            prop_assert!((gs[x] - gf[x]).abs() < 1e-11 * (1.0 + gf[x]));
            prop_assert!((lin[x] - (fh[x] - c * gh[x])).abs() < 1e-11 * (1.0 + gh[x].abs() * c.abs()));
        }
    }

    #[test]
    fn integration_by_parts(s in any::<u64>(), n in 2usize..40) {
        let g = common::random_graph(n, s);
        let f: Vec<f64> = common::random_positive(n, s ^ 7).iter().map(|v| v.ln()).collect();
        let h = common::random_positive(n, s ^ 9);
        let lhs = energy_pair(&g, &f, &h);
        let rhs = -g.inner(&f, &laplacian(&g, &h));
        let bracket = g.integral(&gamma(&g, &f, Some(&h)));
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        prop_assert!((lhs - bracket).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn residual_scale_invariant(i in 0usize..12, s in any::<u64>(), lambda in 0.01f64..100.0) {
        let g = spec_graph(i);
        let x = g.center();
        let f = common::random_positive(g.len(), s);
        let scaled: Vec<f64> = f.iter().map(|v| lambda * v).collect();
        let a = cde_residual(&g, &f, x, 3.0, 0.5).unwrap();
        let b = cde_residual(&g, &scaled, x, 3.0, 0.5).unwrap();
        // 2-homogeneous: zero stays zero, sign is kept.
        prop_assert!((b - lambda * lambda * a).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn schwartz_p_power(a in 1e-4f64..1e4, b in 1e-4f64..1e4, p in 2.0001f64..12.0) {
        let lhs = (a.powf(p / 2.0) - b.powf(p / 2.0)).powi(2);
        let rhs = p * p / (4.0 * (p - 1.0)) * (a - b) * (a.powf(p - 1.0) - b.powf(p - 1.0));
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn schwartz_gamma_consequence(i in 0usize..12, s in any::<u64>(), p in 2.0001f64..8.0) {
        let g = spec_graph(i);
        let f = common::random_positive(g.len(), s);
        let half: Vec<f64> = f.iter().map(|v| v.powf(p / 2.0)).collect();
        let pm1: Vec<f64> = f.iter().map(|v| v.powf(p - 1.0)).collect();
        let lhs = gamma(&g, &half, None);
        let rhs = gamma(&g, &pm1, Some(&f));
        let k = p * p / (4.0 * (p - 1.0));
        for x in 0..g.len() {
            prop_assert!(lhs[x] <= k * rhs[x] + 1e-12 * (1.0 + rhs[x]));
        }
    }
}
