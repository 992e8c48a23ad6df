// SPDX-License-Identifier: Apache-2.0

//! TOML run configuration. See `configs/` for annotated examples.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ultracon_core::graph::{alpha_loop_transform, build_graph};
use ultracon_core::inequalities::{geometric_grid, ChainTag, FamilyKind, TestFunctionFamily};
use ultracon_core::semigroup::{BaseVertices, KernelMode, PoissonWeights};
use ultracon_core::{GraphSpec, WeightedGraph};

use crate::edgelist;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub graph: GraphConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    /// Directory, or `"off"`.
    pub cache: Option<String>,
    pub growth: Option<GrowthConfig>,
    pub kernels: Option<KernelConfig>,
    pub exponents: Option<ExponentConfig>,
    pub curvature: Option<CurvatureConfig>,
    pub inequalities: Option<InequalityConfig>,
    pub chains: Option<ChainConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    #[serde(flatten)]
    pub source: GraphSource,
    /// Applies the α-loop transform after construction.
    #[serde(default)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    Cycle {
        n: usize,
    },
    Torus {
        n: usize,
        d: usize,
    },
    LatticeWindow {
        l: usize,
        d: usize,
    },
    TwoPoint,
    Complete {
        n: usize,
    },
    EdgeList {
        edges: Vec<(usize, usize, f64)>,
    },
    /// Relative paths resolve against the config file's directory.
    EdgeFile {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Poisson-tail truncation bound for continuous kernels and heat flows.
    #[serde(default = "default_kernel_tol")]
    pub kernel: f64,
}

fn default_kernel_tol() -> f64 {
    1e-12
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kernel: default_kernel_tol(),
        }
    }
}

/// Explicit list, or `{ lo, hi, count }` log-spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Geometric { lo: f64, hi: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Geometric { lo, hi, count } => geometric_grid(*lo, *hi, *count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub vertex: Option<usize>,
    pub r_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    /// Base vertices; defaults to the graph's center.
    #[serde(default)]
    pub bases: Vec<usize>,
    #[serde(default)]
    pub steps: usize,
    #[serde(default)]
    pub times: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentConfig {
    #[serde(default = "both_modes")]
    pub modes: Vec<KernelMode>,
    /// `[lo, hi]` in steps.
    #[serde(default)]
    pub discrete_window: Option<[f64; 2]>,
    /// `[lo, hi]` in time.
    #[serde(default)]
    pub continuous_window: Option<[f64; 2]>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Sup base vertices; empty means automatic (one vertex on transitive graphs).
    #[serde(default)]
    pub bases: Vec<usize>,
    /// Expected exponent; turns the fit into a check.
    pub expect: Option<f64>,
    #[serde(default = "default_exponent_tol")]
    pub tolerance: f64,
}

fn both_modes() -> Vec<KernelMode> {
    vec![KernelMode::Discrete, KernelMode::Continuous]
}

fn default_samples() -> usize {
    24
}

fn default_exponent_tol() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureConfig {
    pub vertex: Option<usize>,
    pub n: f64,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
    #[serde(default = "default_bound")]
    pub bound: f64,
    /// Treat a found violation as a failed check.
    #[serde(default)]
    pub expect_no_violation: bool,
    pub scan: Option<ScanConfig>,
}

fn default_restarts() -> usize {
    50
}

fn default_max_evals() -> usize {
    3000
}

fn default_bound() -> f64 {
    6.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    /// Upper bracket required to stay at or below this value.
    pub expect_at_most: Option<f64>,
}

fn default_resolution() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityConfig {
    pub dimension: f64,
    pub eps: Grid,
    /// Defaults to the standard family.
    #[serde(default)]
    pub family: Option<Vec<FamilyKind>>,
    #[serde(default)]
    pub centers: Vec<usize>,
    /// Expected `D/4` slope of `β`; turns the fit into a check.
    pub expect_slope: Option<f64>,
    #[serde(default = "default_exponent_tol")]
    pub slope_tolerance: f64,
    pub faber_krahn: Option<FkConfig>,
    pub lsi_p: Option<LsiPConfig>,
}

impl InequalityConfig {
    pub fn family(&self, seed: u64, tol: f64) -> TestFunctionFamily {
        let mut fam = TestFunctionFamily::standard(seed);
        if let Some(kinds) = &self.family {
            fam.kinds = kinds.clone();
        }
        fam.centers = self.centers.clone();
        fam.tol = tol;
        fam
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FkConfig {
    #[serde(default = "default_fk_samples")]
    pub samples: usize,
    #[serde(default = "default_fk_size")]
    pub max_size: usize,
    /// Rerun with twice the budget and require a relative change below this.
    pub doubling_tolerance: Option<f64>,
    /// Also scan the relative variant with this `ν`.
    pub nu: Option<f64>,
}

fn default_fk_samples() -> usize {
    500
}

fn default_fk_size() -> usize {
    450
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LsiPConfig {
    pub p: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub mu: f64,
    pub times: Grid,
    pub eps: Grid,
    #[serde(default = "all_tags")]
    pub tags: Vec<ChainTag>,
    /// Family for the chains; defaults to the inequalities family, then the standard one.
    #[serde(default)]
    pub family: Option<Vec<FamilyKind>>,
}

fn all_tags() -> Vec<ChainTag> {
    ChainTag::ALL.to_vec()
}

fn guard(analysis: &str, message: impl Into<String>) -> CliError {
    CliError::Guard {
        analysis: analysis.into(),
        message: message.into(),
    }
}

fn config(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a file; relative edge-file paths are anchored at its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
        let mut cfg = Self::from_toml(&text)?;
        if let GraphSource::EdgeFile { path: p } = &mut cfg.graph.source {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn graph_spec(&self) -> Result<GraphSpec> {
        Ok(match &self.graph.source {
            GraphSource::Cycle { n } => GraphSpec::Cycle { n: *n },
            GraphSource::Torus { n, d } => GraphSpec::Torus { n: *n, d: *d },
            GraphSource::LatticeWindow { l, d } => GraphSpec::LatticeWindow { l: *l, d: *d },
            GraphSource::TwoPoint => GraphSpec::TwoPoint,
            GraphSource::Complete { n } => GraphSpec::Complete { n: *n },
            GraphSource::EdgeList { edges } => GraphSpec::EdgeList {
                vertices: None,
                edges: edges.clone(),
            },
            GraphSource::EdgeFile { path } => edgelist::load(path)?,
        })
    }

    pub fn build_graph(&self) -> Result<WeightedGraph> {
        let g = build_graph(&self.graph_spec()?).map_err(|e| config(format!("[graph]: {e}")))?;
        match self.graph.alpha {
            Some(a) => {
                alpha_loop_transform(&g, a).map_err(|e| config(format!("[graph] alpha: {e}")))
            }
            None => Ok(g),
        }
    }

    /// Every parameter and boundary-guard check, before any computation.
    pub fn validate(&self, g: &WeightedGraph) -> Result<()> {
        let tol = self.tolerances.kernel;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(config(format!(
                "[tolerances] kernel must be in (0,1), got {tol}"
            )));
        }
        let vertex = |analysis: &str, v: usize| {
            if v < g.len() {
                Ok(v)
            } else {
                Err(config(format!(
                    "[{analysis}] vertex {v} is not in the graph ({} vertices)",
                    g.len()
                )))
            }
        };
        let order = |analysis: &str, t: f64| -> Result<usize> {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config(format!(
                    "[{analysis}] times must be positive, got {t}"
                )));
            }
            PoissonWeights::new(t, tol)
                .map(|w| w.order())
                .map_err(|e| config(format!("[{analysis}] t = {t}: {e}")))
        };
        let check_reach = |analysis: &str, x: usize, reach: usize, what: &str| match g
            .boundary_distance(x)
        {
            Some(bd) if reach >= bd => Err(guard(
                analysis,
                format!("{what} from vertex {x} needs {reach} steps but the boundary is {bd} away"),
            )),
            _ => Ok(()),
        };
        let horizon = |analysis: &str, bases: &[usize], times: &[f64]| -> Result<()> {
            let mut reach = 0;
            for &t in times {
                reach = reach.max(order(analysis, t)?);
            }
            for &x in bases {
                check_reach(analysis, x, reach, "the time horizon")?;
            }
            Ok(())
        };

        if let Some(a) = self.graph.alpha {
            if !(a > 0.0 && a <= 0.5) {
                return Err(config(format!(
                    "[graph] alpha must be in (0, 1/2], got {a}"
                )));
            }
        }
        if let Some(gr) = &self.growth {
            let x = vertex("growth", gr.vertex.unwrap_or(g.center()))?;
            if gr.r_max < 2 {
                return Err(config("[growth] r_max must be at least 2"));
            }
            check_reach("growth", x, gr.r_max, "B(x, r_max)")?;
        }
        if let Some(k) = &self.kernels {
            let bases = self.kernel_bases(g);
            for &x in &bases {
                vertex("kernels", x)?;
                check_reach("kernels", x, k.steps, "the discrete kernel")?;
            }
            if let Some(times) = &k.times {
                horizon("kernels", &bases, &times.values())?;
            }
        }
        if let Some(e) = &self.exponents {
            if e.modes.is_empty() {
                return Err(config("[exponents] modes is empty"));
            }
            let bases = self.exponent_bases(g).resolve(g);
            for &x in &bases {
                vertex("exponents", x)?;
            }
            for mode in &e.modes {
                let (lo, hi) = self.window(*mode).ok_or_else(|| {
                    config(format!("[exponents] missing window for mode {mode:?}"))
                })?;
                if !(lo > 0.0 && hi > lo) {
                    return Err(config(format!("[exponents] window [{lo}, {hi}] is empty")));
                }
                match mode {
                    KernelMode::Discrete => {
                        if (hi.floor() - lo.ceil()) < 3.0 {
                            return Err(config(
                                "[exponents] discrete window needs at least 4 steps",
                            ));
                        }
                        for &x in &bases {
                            check_reach("exponents", x, hi as usize, "the discrete window")?;
                        }
                    }
                    KernelMode::Continuous => {
                        if e.samples < 4 {
                            return Err(config("[exponents] samples must be at least 4"));
                        }
                        horizon("exponents", &bases, &[hi])?;
                    }
                }
            }
        }
        if let Some(c) = &self.curvature {
            let x = vertex("curvature", c.vertex.unwrap_or(g.center()))?;
            check_reach("curvature", x, 2, "the stencil B(x,2)")?;
            if !(c.n > 0.0) || c.restarts == 0 || c.max_evals == 0 || !(c.bound > 0.0) {
                return Err(config(
                    "[curvature] needs n > 0, restarts > 0, max_evals > 0, bound > 0",
                ));
            }
            if let Some(s) = &c.scan {
                if !(s.lo > 0.0 && s.hi > s.lo && s.resolution > 0.0) {
                    return Err(config(
                        "[curvature.scan] needs 0 < lo < hi and resolution > 0",
                    ));
                }
            }
        }
        if let Some(i) = &self.inequalities {
            if !(i.dimension > 0.0) {
                return Err(config("[inequalities] dimension must be positive"));
            }
            let eps = i.eps.values();
            if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0)) {
                return Err(config(
                    "[inequalities] eps must be a nonempty positive grid",
                ));
            }
            for &c in &i.centers {
                vertex("inequalities", c)?;
            }
            if let Some(fk) = &i.faber_krahn {
                if fk.samples == 0 || fk.max_size == 0 {
                    return Err(config(
                        "[inequalities.faber_krahn] needs samples > 0 and max_size > 0",
                    ));
                }
            }
            if let Some(lp) = &i.lsi_p {
                if !(lp.p > 2.0 && lp.eps > 0.0) {
                    return Err(config("[inequalities.lsi_p] needs p > 2 and eps > 0"));
                }
            }
        }
        if let Some(ch) = &self.chains {
            if !(ch.mu > 0.0) {
                return Err(config("[chains] mu must be positive"));
            }
            let times = ch.times.values();
            let eps = ch.eps.values();
            if times.is_empty() || eps.is_empty() {
                return Err(config("[chains] times and eps must be nonempty"));
            }
            // Norms need kernels at t and 2t from every base vertex.
            let needed: Vec<f64> = times
                .iter()
                .chain(&eps)
                .flat_map(|&t| [t, 2.0 * t])
                .collect();
            horizon("chains", &BaseVertices::Auto.resolve(g), &needed)?;
            if ch.tags.is_empty() {
                return Err(config("[chains] tags is empty"));
            }
        }
        Ok(())
    }

    pub fn kernel_bases(&self, g: &WeightedGraph) -> Vec<usize> {
        match &self.kernels {
            Some(k) if !k.bases.is_empty() => k.bases.clone(),
            _ => vec![g.center()],
        }
    }

    pub fn exponent_bases(&self, _g: &WeightedGraph) -> BaseVertices {
        match &self.exponents {
            Some(e) if !e.bases.is_empty() => BaseVertices::List(e.bases.clone()),
            _ => BaseVertices::Auto,
        }
    }

    pub fn window(&self, mode: KernelMode) -> Option<(f64, f64)> {
        let e = self.exponents.as_ref()?;
        let w = match mode {
            KernelMode::Discrete => e.discrete_window,
            KernelMode::Continuous => e.continuous_window,
        }?;
        Some((w[0], w[1]))
    }
}
