// SPDX-License-Identifier: Apache-2.0

//! Gradient forms Γ, Γ₂, Γ̃₂ and numerical search for CDE′ violations.
//!
//! ```text
//! 2Γ(f,h)(x) = (1/m(x)) Σ_y ω_xy (f(y)-f(x)) (h(y)-h(x))
//! 2Γ₂(f)     = ΔΓ(f) - 2Γ(f, Δf)
//! Γ̃₂(f)      = Γ₂(f) - Γ(f, Γ(f)/f)
//! CDE′(x,n,K):  Γ̃₂(f)(x) >= (1/n) f(x)² (Δ log f)(x)² + K Γ(f)(x)
//! ```
//!
//! CDE′ quantifies over all positive `f`, so [`cde_verify`] can only report
//! a constructive violation or that none was found within its budget.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::seed;
use crate::semigroup::laplacian;

/// Residuals below `-VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-8;

/// `Γ(f,h)` pointwise; `h = None` gives `Γ(f) = Γ(f,f)`.
pub fn gamma(g: &WeightedGraph, f: &[f64], h: Option<&[f64]>) -> Vec<f64> {
    let h = h.unwrap_or(f);
    (0..g.len())
        .map(|x| {
            let s: f64 = g
                .neighbors(x)
                .iter()
                .map(|&(y, w)| w * (f[y] - f[x]) * (h[y] - h[x]))
                .sum();
            s / (2.0 * g.measure(x))
        })
        .collect()
}

/// Dirichlet energy `⟨Γ(f,h)⟩ = Σ_x m(x) Γ(f,h)(x)`.
pub fn energy_pair(g: &WeightedGraph, f: &[f64], h: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in 0..g.len() {
        for &(y, w) in g.neighbors(x) {
            if y > x {
                s += w * (f[y] - f[x]) * (h[y] - h[x]);
            }
        }
    }
    s
}

/// `⟨Γ(f)⟩`.
pub fn energy(g: &WeightedGraph, f: &[f64]) -> f64 {
    energy_pair(g, f, f)
}

/// `Γ₂(f)` everywhere; any real `f`.
pub fn gamma2(g: &WeightedGraph, f: &[f64]) -> Vec<f64> {
    let lap_f = laplacian(g, f);
    let gam = gamma(g, f, None);
    let lap_gam = laplacian(g, &gam);
    let cross = gamma(g, f, Some(&lap_f));
    lap_gam
        .iter()
        .zip(&cross)
        .map(|(a, b)| 0.5 * (a - 2.0 * b))
        .collect()
}

/// `(Γ₂(f), Γ̃₂(f))` everywhere; `f` must be strictly positive.
pub fn gamma2_pair(g: &WeightedGraph, f: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(x) = f.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive(x));
    }
    let g2 = gamma2(g, f);
    let gam = gamma(g, f, None);
    let ratio: Vec<f64> = gam.iter().zip(f).map(|(a, b)| a / b).collect();
    let correction = gamma(g, f, Some(&ratio));
    let tilde = g2.iter().zip(&correction).map(|(a, b)| a - b).collect();
    Ok((g2, tilde))
}

/// Local evaluator of the forms at one vertex; needs only `f` on `B(x,2)`.
#[derive(Debug, Clone)]
pub struct Stencil {
    ball: Vec<usize>,
    /// Local ids of `B(x,1)`; the center has local id 0.
    inner: Vec<usize>,
    /// For each local id in `inner`, its neighbors as (local id, weight).
    nbrs: Vec<Vec<(usize, f64)>>,
    measure: Vec<f64>,
}

/// Form values at the stencil center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilValues {
    pub gamma: f64,
    pub gamma2: f64,
    pub gamma2_tilde: f64,
    pub laplace_log: f64,
}

impl Stencil {
    pub fn new(g: &WeightedGraph, x: usize) -> Result<Self> {
        g.check_vertex(x)?;
        let dist = g.distances_from(x);
        let mut ball = vec![x];
        ball.extend((0..g.len()).filter(|&y| y != x && dist[y] <= 2));
        let mut local = vec![usize::MAX; g.len()];
        for (i, &y) in ball.iter().enumerate() {
            local[y] = i;
        }
        let inner: Vec<usize> = (0..ball.len()).filter(|&i| dist[ball[i]] <= 1).collect();
        let mut nbrs = vec![Vec::new(); ball.len()];
        let mut measure = vec![0.0; ball.len()];
        for &i in &inner {
            let y = ball[i];
            measure[i] = g.measure(y);
            nbrs[i] = g.neighbors(y).iter().map(|&(z, w)| (local[z], w)).collect();
        }
        Ok(Self {
            ball,
            inner,
            nbrs,
            measure,
        })
    }

    /// Global ids of `B(x,2)`, center first.
    pub fn ball(&self) -> &[usize] {
        &self.ball
    }

    /// Evaluates at the center; `values[i]` is `f(ball[i])`, all positive.
    pub fn evaluate(&self, values: &[f64]) -> StencilValues {
        let n = self.ball.len();
        let mut lap = vec![0.0; n];
        let mut gam = vec![0.0; n];
        for &i in &self.inner {
            let fi = values[i];
            let mut l = 0.0;
            let mut q = 0.0;
            for &(j, w) in &self.nbrs[i] {
                let d = values[j] - fi;
                l += w * d;
                q += w * d * d;
            }
            lap[i] = l / self.measure[i];
            gam[i] = q / (2.0 * self.measure[i]);
        }
        let f0 = values[0];
        let m0 = self.measure[0];
        let ratio0 = gam[0] / f0;
        let ln0 = libm::log(f0);
        let (mut lap_gam, mut cross, mut corr, mut lap_log) = (0.0, 0.0, 0.0, 0.0);
        for &(j, w) in &self.nbrs[0] {
            let df = values[j] - f0;
            lap_gam += w * (gam[j] - gam[0]);
            cross += w * df * (lap[j] - lap[0]);
            corr += w * df * (gam[j] / values[j] - ratio0);
            lap_log += w * (libm::log(values[j]) - ln0);
        }
        let gamma2 = 0.5 * (lap_gam / m0 - cross / m0);
        StencilValues {
            gamma: gam[0],
            gamma2,
            gamma2_tilde: gamma2 - corr / (2.0 * m0),
            laplace_log: lap_log / m0,
        }
    }

    /// `Γ̃₂(f)(x) - (1/n) f(x)² (Δ log f)(x)² - K Γ(f)(x)`.
    pub fn residual(&self, values: &[f64], n: f64, k: f64) -> f64 {
        let v = self.evaluate(values);
        let f0 = values[0];
        v.gamma2_tilde - f0 * f0 * v.laplace_log * v.laplace_log / n - k * v.gamma
    }
}

/// CDE′ residual at `x`; `f` must be positive on `B(x,2)`.
pub fn cde_residual(g: &WeightedGraph, f: &[f64], x: usize, n: f64, k: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dimension n must be positive, got {n}"
        )));
    }
    let stencil = Stencil::new(g, x)?;
    let values: Vec<f64> = stencil.ball().iter().map(|&y| f[y]).collect();
    for (&y, &v) in stencil.ball().iter().zip(&values) {
        if !(v > 0.0) {
            return Err(Error::NonPositive(y));
        }
    }
    Ok(stencil.residual(&values, n, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdeBudget {
    pub restarts: usize,
    /// Function evaluations per local search.
    pub max_evals: usize,
    /// Log-parameters are confined to `[-bound, bound]`, i.e. `f ∈ [e^{-bound}, e^{bound}]`.
    pub bound: f64,
}

impl Default for CdeBudget {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_evals: 3000,
            bound: 6.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoViolationFound,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub vertex: usize,
    pub n: f64,
    pub k: f64,
    pub min_residual: f64,
    /// Minimizer on `B(x,2)` as (vertex, value), normalized to `f(x) = 1`.
    pub witness: Vec<(usize, f64)>,
    /// Residual recomputed from `witness` through [`cde_residual`].
    pub recomputed_residual: f64,
    pub restarts: usize,
    pub seed: u64,
    pub evaluations: usize,
    pub converged_runs: usize,
    pub verdict: Verdict,
}

fn guard_stencil(g: &WeightedGraph, x: usize) -> Result<()> {
    if let Some(bd) = g.boundary_distance(x) {
        if bd <= 2 {
            return Err(Error::GuardViolation(format!(
                "B({x},2) touches the boundary (distance {bd})"
            )));
        }
    }
    Ok(())
}

struct Search<'a> {
    stencil: &'a Stencil,
    dist: Vec<f64>,
    n: f64,
    k: f64,
    budget: CdeBudget,
}

impl Search<'_> {
    fn values(&self, u: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(u.len() + 1);
        v.push(1.0);
        v.extend(u.iter().map(|&a| libm::exp(a)));
        v
    }

    fn objective(&self, u: &[f64]) -> f64 {
        self.stencil.residual(&self.values(u), self.n, self.k)
    }

    fn run(&self, start: &[f64]) -> (Vec<f64>, f64, usize, bool) {
        let mut opts = NelderMeadOptions {
            max_evals: self.budget.max_evals,
            lower: -self.budget.bound,
            upper: self.budget.bound,
            initial_step: 0.5,
            ..Default::default()
        };
        let first = nelder_mead(|u| self.objective(u), start, &opts);
        opts.initial_step = 0.05;
        let polish = nelder_mead(|u| self.objective(u), &first.x, &opts);
        let evals = first.evals + polish.evals;
        if polish.value <= first.value {
            (polish.x, polish.value, evals, polish.converged)
        } else {
            (first.x, first.value, evals, first.converged)
        }
    }

    /// Start `r`: the first few are radial profiles `u = -c·d(x,·)`, the rest uniform noise.
    fn start(&self, r: usize, seed: u64) -> Vec<f64> {
        const SLOPES: [f64; 6] = [1.0, 2.0, 3.0, -1.0, 0.5, -0.5];
        let dim = self.dist.len();
        if r < SLOPES.len() {
            return self.dist.iter().map(|d| -SLOPES[r] * d).collect();
        }
        let scale = [0.3, 1.0, 3.0][r % 3];
        let mut rng = seed::rng(seed::child(seed, r as u64));
        (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect()
    }
}

fn verify_with_starts(
    g: &WeightedGraph,
    x: usize,
    n: f64,
    k: f64,
    budget: CdeBudget,
    seed: u64,
    extra_starts: &[Vec<f64>],
) -> Result<(CurvatureReport, Vec<f64>)> {
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dimension n must be positive, got {n}"
        )));
    }
    if budget.restarts == 0 {
        return Err(Error::InvalidParameter(
            "at least one restart is required".into(),
        ));
    }
    g.check_vertex(x)?;
    guard_stencil(g, x)?;
    let stencil = Stencil::new(g, x)?;
    let dist_all = g.distances_from(x);
    let dist: Vec<f64> = stencil.ball()[1..]
        .iter()
        .map(|&y| dist_all[y] as f64)
        .collect();
    let search = Search {
        stencil: &stencil,
        dist,
        n,
        k,
        budget,
    };
    let mut best_u = vec![0.0; stencil.ball().len() - 1];
    let mut best = search.objective(&best_u);
    let mut evaluations = 0;
    let mut converged_runs = 0;
    let starts = extra_starts
        .iter()
        .cloned()
        .chain((0..budget.restarts).map(|r| search.start(r, seed)));
    for start in starts {
        let (u, value, evals, converged) = search.run(&start);
        evaluations += evals;
        converged_runs += usize::from(converged);
        if value < best {
            best = value;
            best_u = u;
        }
    }
    let values = search.values(&best_u);
    let mut f = vec![1.0; g.len()];
    for (&y, &v) in stencil.ball().iter().zip(&values) {
        f[y] = v;
    }
    let recomputed = cde_residual(g, &f, x, n, k)?;
    let witness = stencil.ball().iter().copied().zip(values).collect();
    let verdict = if best < -VIOLATION_TOL {
        Verdict::Violated
    } else {
        Verdict::NoViolationFound
    };
    Ok((
        CurvatureReport {
            vertex: x,
            n,
            k,
            min_residual: best,
            witness,
            recomputed_residual: recomputed,
            restarts: budget.restarts,
            seed,
            evaluations,
            converged_runs,
            verdict,
        },
        best_u,
    ))
}

/// Multistart search for a positive `f` with negative CDE′ residual at `x`.
///
/// Positivity is built in through `f = e^u` with the gauge `f(x) = 1`; the
/// residual is 2-homogeneous, so the gauge loses nothing.
pub fn cde_verify(
    g: &WeightedGraph,
    x: usize,
    n: f64,
    k: f64,
    budget: CdeBudget,
    seed: u64,
) -> Result<CurvatureReport> {
    verify_with_starts(g, x, n, k, budget, seed, &[]).map(|(r, _)| r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanStep {
    pub n: f64,
    pub verdict: Verdict,
    pub min_residual: f64,
}

/// Bracket `[lo, hi]` around the smallest dimension without a found violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionScan {
    pub k: f64,
    pub lo: f64,
    pub hi: f64,
    /// No violation even at the lower end of the range.
    pub collapsed: bool,
    /// Every violation witness found stays non-violating at `hi`.
    pub monotone: bool,
    pub steps: Vec<ScanStep>,
}

/// Bisection on `n` using [`cde_verify`] verdicts.
///
/// Violation witnesses found so far seed every later search, so a witness
/// that violates at `n` is never missed at a larger `n` by accident.
pub fn dimension_scan(
    g: &WeightedGraph,
    x: usize,
    k: f64,
    n_range: (f64, f64),
    resolution: f64,
    budget: CdeBudget,
    seed: u64,
) -> Result<DimensionScan> {
    let (mut lo, mut hi) = n_range;
    if !(lo > 0.0 && hi > lo && resolution > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < n_lo < n_hi and resolution > 0, got [{lo}, {hi}] / {resolution}"
        )));
    }
    let stencil = Stencil::new(g, x)?;
    let mut steps = Vec::new();
    let mut witnesses: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut call = 0u64;
    let mut probe = |n: f64, witnesses: &mut Vec<(f64, Vec<f64>)>, steps: &mut Vec<ScanStep>| {
        let starts: Vec<Vec<f64>> = witnesses.iter().map(|(_, u)| u.clone()).collect();
        let (report, u) = verify_with_starts(g, x, n, k, budget, seed::child(seed, call), &starts)?;
        call += 1;
        steps.push(ScanStep {
            n,
            verdict: report.verdict,
            min_residual: report.min_residual,
        });
        if report.verdict == Verdict::Violated {
            witnesses.push((n, u));
        }
        Ok::<_, Error>(report.verdict)
    };

    if probe(lo, &mut witnesses, &mut steps)? == Verdict::NoViolationFound {
        return Ok(DimensionScan {
            k,
            lo,
            hi: lo,
            collapsed: true,
            monotone: true,
            steps,
        });
    }
    if probe(hi, &mut witnesses, &mut steps)? == Verdict::Violated {
        return Err(Error::InvalidParameter(format!(
            "violation found at the upper end n = {hi}; widen the range"
        )));
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        match probe(mid, &mut witnesses, &mut steps)? {
            Verdict::Violated => lo = mid,
            Verdict::NoViolationFound => hi = mid,
        }
    }
    let monotone = witnesses.iter().all(|(_, u)| {
        let mut v = vec![1.0];
        v.extend(u.iter().map(|&a| libm::exp(a)));
        stencil.residual(&v, hi, k) >= -VIOLATION_TOL
    });
    Ok(DimensionScan {
        k,
        lo,
        hi,
        collapsed: false,
        monotone,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{alpha_loop_transform, build_graph, GraphSpec};
    use crate::seed;
    use rand::Rng;

    fn graph(spec: GraphSpec) -> WeightedGraph {
        build_graph(&spec).unwrap()
    }

    fn random_positive(n: usize, s: u64) -> Vec<f64> {
        let mut rng = seed::rng(s);
        (0..n)
            .map(|_| libm::exp(rng.gen_range(-1.5..1.5)))
            .collect()
    }

    #[test]
    fn gamma_examples() {
        let c5 = graph(GraphSpec::Cycle { n: 5 });
        assert!(gamma(&c5, &[2.0; 5], None).iter().all(|&v| v == 0.0));
        let mut delta = vec![0.0; 5];
        delta[2] = 1.0;
        assert_eq!(gamma(&c5, &delta, None)[2], 0.5);

        let k2 = graph(GraphSpec::TwoPoint);
        let f = [1.0, 0.0];
        assert_eq!(gamma(&k2, &f, None), vec![0.5, 0.5]);
        assert_eq!(energy(&k2, &f), 1.0);
        assert_eq!(-k2.inner(&f, &laplacian(&k2, &f)), 1.0);
    }

    #[test]
    fn gamma_bilinear_symmetric_shift_invariant() {
        let g = alpha_loop_transform(&graph(GraphSpec::Torus { n: 4, d: 2 }), 0.1).unwrap();
        let f = random_positive(g.len(), 1);
        let h = random_positive(g.len(), 2);
        let fh = gamma(&g, &f, Some(&h));
        let hf = gamma(&g, &h, Some(&f));
        let shifted: Vec<f64> = f.iter().map(|v| v + 3.0).collect();
        let sum: Vec<f64> = f.iter().zip(&h).map(|(a, b)| 2.0 * a + b).collect();
        let lin = gamma(&g, &sum, Some(&h));
        let gf = gamma(&g, &f, Some(&h));
        let gh = gamma(&g, &h, None);
        for x in 0..g.len() {
            assert!((fh[x] - hf[x]).abs() < 1e-14);
            assert!((gamma(&g, &shifted, None)[x] - gamma(&g, &f, None)[x]).abs() < 1e-12);
            assert!((lin[x] - (2.0 * gf[x] + gh[x])).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_have_zero_gamma2() {
        let g = graph(GraphSpec::Cycle { n: 6 });
        let (g2, tilde) = gamma2_pair(&g, &[4.0; 6]).unwrap();
        assert!(g2.iter().chain(&tilde).all(|&v| v == 0.0));
    }

    #[test]
    fn stencil_matches_global_forms() {
        let g = alpha_loop_transform(&graph(GraphSpec::Torus { n: 5, d: 2 }), 0.2).unwrap();
        let f = random_positive(g.len(), 9);
        let (g2, tilde) = gamma2_pair(&g, &f).unwrap();
        let gam = gamma(&g, &f, None);
        for x in [0, 7, 13] {
            let s = Stencil::new(&g, x).unwrap();
            let local: Vec<f64> = s.ball().iter().map(|&y| f[y]).collect();
            let v = s.evaluate(&local);
            assert!((v.gamma2 - g2[x]).abs() < 1e-12);
            assert!((v.gamma2_tilde - tilde[x]).abs() < 1e-12);
            assert!((v.gamma - gam[x]).abs() < 1e-13);
        }
    }

    #[test]
    fn residual_constant_and_scaling() {
        let g = graph(GraphSpec::Cycle { n: 8 });
        assert_eq!(cde_residual(&g, &[1.0; 8], 3, 2.0, -1.0).unwrap(), 0.0);
        for s in 0..10 {
            let f = random_positive(8, s);
            let f3: Vec<f64> = f.iter().map(|v| 3.0 * v).collect();
            let a = cde_residual(&g, &f, 3, 2.5, 0.7).unwrap();
            let b = cde_residual(&g, &f3, 3, 2.5, 0.7).unwrap();
            assert!((b - 9.0 * a).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn residual_needs_positivity() {
        let g = graph(GraphSpec::Cycle { n: 8 });
        let mut f = vec![1.0; 8];
        f[5] = 0.0;
        assert_eq!(
            cde_residual(&g, &f, 3, 2.0, 0.0),
            Err(Error::NonPositive(5))
        );
        // Vertex 7 lies outside B(3,2).
        f[5] = 1.0;
        f[7] = -1.0;
        assert!(cde_residual(&g, &f, 3, 2.0, 0.0).is_ok());
        assert!(gamma2_pair(&g, &f).is_err());
    }

    #[test]
    fn slack_regime_on_two_point() {
        let g = graph(GraphSpec::TwoPoint);
        let budget = CdeBudget {
            restarts: 10,
            ..Default::default()
        };
        let r = cde_verify(&g, 0, 1000.0, -10.0, budget, 3).unwrap();
        assert_eq!(r.verdict, Verdict::NoViolationFound);
    }

    #[test]
    fn small_dimension_is_violated_on_z() {
        let w = graph(GraphSpec::LatticeWindow { l: 4, d: 1 });
        let budget = CdeBudget {
            restarts: 10,
            ..Default::default()
        };
        let r = cde_verify(&w, w.center(), 0.1, 0.0, budget, 11).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.recomputed_residual < 0.0);
        assert_eq!(r.recomputed_residual, r.min_residual);
        assert!(r.witness.iter().all(|&(_, v)| v > 0.0));
        assert_eq!(r.witness[0], (w.center(), 1.0));
    }

    #[test]
    fn verify_is_deterministic() {
        let w = graph(GraphSpec::LatticeWindow { l: 4, d: 1 });
        let budget = CdeBudget {
            restarts: 8,
            ..Default::default()
        };
        let a = cde_verify(&w, w.center(), 3.0, 0.0, budget, 5).unwrap();
        let b = cde_verify(&w, w.center(), 3.0, 0.0, budget, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn verify_guard_and_budget() {
        let w = graph(GraphSpec::LatticeWindow { l: 4, d: 1 });
        let budget = CdeBudget::default();
        assert!(matches!(
            cde_verify(&w, w.center() + 2, 4.53, 0.0, budget, 0),
            Err(Error::GuardViolation(_))
        ));
        let none = CdeBudget {
            restarts: 0,
            ..budget
        };
        assert!(cde_verify(&w, w.center(), 4.53, 0.0, none, 0).is_err());
    }

    #[test]
    fn scan_collapses_when_everything_passes() {
        let g = graph(GraphSpec::Cycle { n: 8 });
        let budget = CdeBudget {
            restarts: 6,
            ..Default::default()
        };
        let scan = dimension_scan(&g, 0, -50.0, (2.0, 10.0), 0.1, budget, 1).unwrap();
        assert!(scan.collapsed);
        assert_eq!(scan.hi, 2.0);
    }

    #[test]
    fn scan_rejects_bad_bracket() {
        let w = graph(GraphSpec::LatticeWindow { l: 4, d: 1 });
        let budget = CdeBudget {
            restarts: 6,
            ..Default::default()
        };
        assert!(dimension_scan(&w, w.center(), 0.0, (0.1, 1.0), 0.01, budget, 1).is_err());
        assert!(dimension_scan(&w, w.center(), 0.0, (2.0, 1.0), 0.01, budget, 1).is_err());
    }
}
