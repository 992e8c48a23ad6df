// SPDX-License-Identifier: Apache-2.0

//! Runs configured analyses and collects their records.

use serde::Serialize;
use serde_json::{json, Value};
use ultracon_core::forms::{cde_verify, dimension_scan, CdeBudget, Verdict};
use ultracon_core::graph::{check_delta_alpha, growth_profile, DeltaAlphaScope};
use ultracon_core::inequalities::{
    beta_grid, beta_logfit, chain_check, faber_krahn_relative_scan, faber_krahn_scan,
    lsi_p_version_check, nash_estimate, sobolev_estimate, ChainInputs, ChainParams,
    ConstantEstimate, FamilyMember, FkScan, SamplerConfig, TestFunctionFamily,
};
use ultracon_core::semigroup::{exponent_fit, FitWindow, KernelMode};
use ultracon_core::{seed, WeightedGraph};

use crate::cache::{CacheStatus, KernelCache};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{Record, Report, Table};

/// Kernel rows are written out in full only up to this many vertices.
pub const ROW_LIMIT: usize = 256;

/// Relative agreement required when a witness is re-evaluated.
const REEVALUATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Growth,
    Kernels,
    Exponents,
    Curvature,
    Inequalities,
    Chains,
}

impl Analysis {
    pub const ALL: [Analysis; 6] = [
        Analysis::Growth,
        Analysis::Kernels,
        Analysis::Exponents,
        Analysis::Curvature,
        Analysis::Inequalities,
        Analysis::Chains,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Growth => "growth",
            Analysis::Kernels => "kernels",
            Analysis::Exponents => "exponents",
            Analysis::Curvature => "curvature",
            Analysis::Inequalities => "inequalities",
            Analysis::Chains => "chains",
        }
    }

    fn configured(self, cfg: &RunConfig) -> bool {
        match self {
            Analysis::Growth => cfg.growth.is_some(),
            Analysis::Kernels => cfg.kernels.is_some(),
            Analysis::Exponents => cfg.exponents.is_some(),
            Analysis::Curvature => cfg.curvature.is_some(),
            Analysis::Inequalities => cfg.inequalities.is_some(),
            Analysis::Chains => cfg.chains.is_some(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub no_witness: bool,
    pub cache: KernelCache,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            no_witness: false,
            cache: KernelCache::off(),
        }
    }
}

/// Cache outcomes, kept out of the records so that they stay byte-identical.
#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub cache: Vec<(usize, CacheStatus)>,
}

fn value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    opts: &'a RunOptions,
    g: &'a WeightedGraph,
    report: Report,
    stats: RunStats,
}

impl Ctx<'_> {
    fn push(
        &mut self,
        analysis: Analysis,
        operation: &str,
        params: Value,
        result: Value,
        pass: Option<bool>,
    ) {
        self.report.records.push(Record {
            analysis: analysis.name().into(),
            operation: operation.into(),
            graph: self.g.label().into(),
            seed: self.seed(analysis),
            params,
            result,
            pass,
        });
    }

    fn seed(&self, analysis: Analysis) -> u64 {
        seed::child(self.cfg.seed, analysis as u64)
    }

    fn estimate(&self, e: ConstantEstimate) -> Result<(Value, bool)> {
        let re = e.reevaluate(self.g)?;
        let ok = (re - e.value).abs() <= REEVALUATE_TOL * e.value.abs().max(1.0);
        let e = if self.opts.no_witness {
            e.without_witness()
        } else {
            e
        };
        let mut v = value(&e)?;
        v["reevaluated"] = json!(re);
        Ok((v, ok))
    }
}

/// Runs every configured analysis.
pub fn run_suite(cfg: &RunConfig, opts: &RunOptions) -> Result<(Report, RunStats)> {
    let selected: Vec<Analysis> = Analysis::ALL
        .into_iter()
        .filter(|a| a.configured(cfg))
        .collect();
    run_analyses(cfg, &selected, opts)
}

/// Runs the listed analyses; each must be configured. Guards are checked
/// before anything is computed.
pub fn run_analyses(
    cfg: &RunConfig,
    analyses: &[Analysis],
    opts: &RunOptions,
) -> Result<(Report, RunStats)> {
    for a in analyses {
        if !a.configured(cfg) {
            return Err(CliError::Config(format!(
                "no [{}] section in the configuration",
                a.name()
            )));
        }
    }
    let g = cfg.build_graph()?;
    cfg.validate(&g)?;
    let header = json!({
        "record": "header",
        "tool": "ultracon",
        "version": env!("CARGO_PKG_VERSION"),
        "graph": g.label(),
        "seed": cfg.seed,
        "analyses": analyses.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "config": value(cfg)?,
    });
    let mut ctx = Ctx {
        cfg,
        opts,
        g: &g,
        report: Report::new(header),
        stats: RunStats::default(),
    };
    graph_record(&mut ctx)?;
    let mut sorted = analyses.to_vec();
    sorted.sort();
    sorted.dedup();
    for a in sorted {
        match a {
            Analysis::Growth => growth(&mut ctx)?,
            Analysis::Kernels => kernels(&mut ctx)?,
            Analysis::Exponents => exponents(&mut ctx)?,
            Analysis::Curvature => curvature(&mut ctx)?,
            Analysis::Inequalities => inequalities(&mut ctx)?,
            Analysis::Chains => chains(&mut ctx)?,
        }
    }
    Ok((ctx.report, ctx.stats))
}

fn graph_record(ctx: &mut Ctx) -> Result<()> {
    let g = ctx.g;
    let boundary = (0..g.len()).filter(|&x| g.is_boundary(x)).count();
    let result = json!({
        "label": g.label(),
        "vertices": g.len(),
        "edges": g.edges().len(),
        "volume": g.total_volume(),
        "connected": g.is_connected(),
        "has_loops": g.has_loops(),
        "vertex_transitive": g.is_vertex_transitive(),
        "boundary_vertices": boundary,
        "center": g.center(),
        "fingerprint": format!("{:016x}", g.fingerprint()),
    });
    ctx.report.records.push(Record {
        analysis: "graph".into(),
        operation: "build".into(),
        graph: g.label().into(),
        seed: ctx.cfg.seed,
        params: value(&ctx.cfg.graph)?,
        result,
        pass: None,
    });
    if let Some(alpha) = ctx.cfg.graph.alpha {
        let check = check_delta_alpha(g, alpha, DeltaAlphaScope::LoopsOnly)?;
        let pass = check.passed;
        ctx.report.records.push(Record {
            analysis: "graph".into(),
            operation: "delta_alpha".into(),
            graph: g.label().into(),
            seed: ctx.cfg.seed,
            params: json!({ "alpha": alpha, "scope": "loops" }),
            result: value(&check)?,
            pass: Some(pass),
        });
    }
    Ok(())
}

fn growth(ctx: &mut Ctx) -> Result<()> {
    let gc = ctx.cfg.growth.clone().expect("configured");
    let x = gc.vertex.unwrap_or(ctx.g.center());
    let profile = growth_profile(ctx.g, x, gc.r_max)?;
    let mut table = Table::new(&["r", "volume", "lower_bound"]);
    for (&r, &v) in profile.radii.iter().zip(&profile.volumes) {
        table.push(
            vec![r as f64, v, profile.c * (r as f64).powf(profile.dimension)],
            true,
        );
    }
    ctx.report.tables.insert("growth".into(), table);
    ctx.push(
        Analysis::Growth,
        "growth_profile",
        json!({ "vertex": x, "r_max": gc.r_max }),
        value(&profile)?,
        None,
    );
    Ok(())
}

fn kernels(ctx: &mut Ctx) -> Result<()> {
    let kc = ctx.cfg.kernels.clone().expect("configured");
    let times = kc.times.as_ref().map(|t| t.values()).unwrap_or_default();
    let tol = ctx.cfg.tolerances.kernel;
    let g = ctx.g;
    for x in ctx.cfg.kernel_bases(g) {
        let (table, status) = ctx.opts.cache.kernel(g, x, kc.steps, &times, tol)?;
        ctx.stats.cache.push((x, status));
        let mut worst_stochastic = 0.0f64;
        let mut min_value = f64::INFINITY;
        for row in &table.discrete {
            worst_stochastic = worst_stochastic.max((row.iter().sum::<f64>() - 1.0).abs());
            min_value = row.iter().copied().fold(min_value, f64::min);
        }
        let mut mass_ok = true;
        let mut continuous = Vec::new();
        for row in &table.continuous {
            let mass = g.integral(&row.values);
            mass_ok &= (1.0 - mass).abs() <= row.tail_bound + 1e-12;
            min_value = row.values.iter().copied().fold(min_value, f64::min);
            let sup = row.values.iter().copied().fold(0.0, f64::max);
            let mut entry = json!({
                "t": row.t, "order": row.order, "tail_bound": row.tail_bound, "mass": mass, "sup": sup,
            });
            if g.len() <= ROW_LIMIT {
                entry["values"] = value(&row.values)?;
            }
            continuous.push(entry);
        }
        let mut result = json!({
            "base": x,
            "continuous": continuous,
            "max_stochastic_error": worst_stochastic,
            "min_value": min_value,
        });
        if g.len() <= ROW_LIMIT {
            result["discrete"] = value(&table.discrete)?;
        }
        let pass = mass_ok && worst_stochastic <= 1e-12 && min_value >= -1e-15;
        ctx.push(
            Analysis::Kernels,
            "heat_kernel",
            json!({ "base": x, "steps": kc.steps, "times": times, "tol": tol }),
            result,
            Some(pass),
        );
    }
    Ok(())
}

fn exponents(ctx: &mut Ctx) -> Result<()> {
    let ec = ctx.cfg.exponents.clone().expect("configured");
    let bases = ctx.cfg.exponent_bases(ctx.g);
    for &mode in &ec.modes {
        let (lo, hi) = ctx.cfg.window(mode).expect("validated");
        let window = FitWindow {
            lo,
            hi,
            samples: ec.samples,
        };
        let fit = exponent_fit(ctx.g, mode, window, ctx.cfg.tolerances.kernel, &bases)?;
        let (name, label) = match mode {
            KernelMode::Discrete => ("due-decay", "k"),
            KernelMode::Continuous => ("cue-decay", "t"),
        };
        let mut table = match mode {
            KernelMode::Discrete => Table::new(&[label, "sup_h", "sup_h_alt", "fit"]),
            KernelMode::Continuous => Table::new(&[label, "sup_p", "fit"]),
        };
        for i in 0..fit.times.len() {
            if fit.saturated[i] {
                continue;
            }
            let t = fit.times[i];
            let line = match (fit.constant, fit.exponent) {
                (Some(c), Some(a)) => c * t.powf(-a),
                _ => f64::NAN,
            };
            let row = match mode {
                KernelMode::Discrete => vec![t, fit.sup_values[i], fit.sup_values_alt[i], line],
                KernelMode::Continuous => vec![t, fit.sup_values[i], line],
            };
            table.push(row, true);
        }
        ctx.report.tables.insert(name.into(), table);
        let pass = ec.expect.map(|want| {
            fit.exponent
                .is_some_and(|a| (a - want).abs() <= ec.tolerance)
        });
        ctx.push(
            Analysis::Exponents,
            "exponent_fit",
            json!({ "mode": mode, "window": [lo, hi], "samples": ec.samples, "expect": ec.expect, "tolerance": ec.tolerance }),
            value(&fit)?,
            pass,
        );
    }
    Ok(())
}

fn curvature(ctx: &mut Ctx) -> Result<()> {
    let cc = ctx.cfg.curvature.clone().expect("configured");
    let x = cc.vertex.unwrap_or(ctx.g.center());
    let budget = CdeBudget {
        restarts: cc.restarts,
        max_evals: cc.max_evals,
        bound: cc.bound,
    };
    let seed = ctx.seed(Analysis::Curvature);
    let mut report = cde_verify(ctx.g, x, cc.n, cc.k, budget, seed)?;
    if ctx.opts.no_witness {
        report.witness.clear();
    }
    let pass = cc
        .expect_no_violation
        .then_some(report.verdict == Verdict::NoViolationFound);
    ctx.push(
        Analysis::Curvature,
        "cde_verify",
        json!({ "vertex": x, "n": cc.n, "k": cc.k, "budget": value(&budget)? }),
        value(&report)?,
        pass,
    );
    if let Some(sc) = cc.scan {
        let scan = dimension_scan(
            ctx.g,
            x,
            cc.k,
            (sc.lo, sc.hi),
            sc.resolution,
            budget,
            seed::child(seed, 1),
        )?;
        let pass = scan.monotone && sc.expect_at_most.is_none_or(|m| scan.hi <= m);
        ctx.push(
            Analysis::Curvature,
            "dimension_scan",
            json!({ "vertex": x, "k": cc.k, "range": [sc.lo, sc.hi], "resolution": sc.resolution, "expect_at_most": sc.expect_at_most }),
            value(&scan)?,
            Some(pass),
        );
    }
    Ok(())
}

fn family(
    ctx: &Ctx,
    analysis: Analysis,
    kinds: Option<&Vec<ultracon_core::inequalities::FamilyKind>>,
) -> Result<Vec<FamilyMember>> {
    let seed = ctx.seed(analysis);
    let tol = ctx.cfg.tolerances.kernel;
    let fam = match (&ctx.cfg.inequalities, kinds) {
        (_, Some(k)) => TestFunctionFamily {
            kinds: k.clone(),
            ..TestFunctionFamily::standard(seed)
        },
        (Some(ic), None) => ic.family(seed, tol),
        (None, None) => TestFunctionFamily::standard(seed),
    };
    Ok(TestFunctionFamily { seed, tol, ..fam }.generate(ctx.g)?)
}

fn fk_value(ctx: &Ctx, scan: &FkScan) -> Result<(Value, bool)> {
    let (mut v, ok) = ctx.estimate(scan.estimate.clone())?;
    v["sample_count"] = json!(scan.samples.len());
    Ok((v, ok))
}

fn inequalities(ctx: &mut Ctx) -> Result<()> {
    let ic = ctx.cfg.inequalities.clone().expect("configured");
    let g = ctx.g;
    let d = ic.dimension;
    let members = family(ctx, Analysis::Inequalities, None)?;
    let eps = ic.eps.values();
    let (profile, estimates) = beta_grid(g, &eps, &members)?;
    for est in estimates {
        let e = est.epsilon;
        let (v, ok) = ctx.estimate(est)?;
        ctx.push(
            Analysis::Inequalities,
            "beta_empirical",
            json!({ "eps": e, "members": members.len() }),
            v,
            Some(ok),
        );
    }
    let mut table = Table::new(&["eps", "beta_empirical", "fit"]);
    match beta_logfit(&profile, &eps) {
        Ok(fit) => {
            for (&e, &b) in fit.eps.iter().zip(&fit.beta) {
                table.push(vec![e, b, fit.c + fit.log_coefficient * e.ln()], false);
            }
            let pass = ic.expect_slope.map(|want| {
                !fit.degenerate && (fit.dimension_slope - want).abs() <= ic.slope_tolerance
            });
            let mut v = value(&fit)?;
            v["dimension_estimate"] = json!(fit.dimension_estimate());
            ctx.push(
                Analysis::Inequalities,
                "beta_logfit",
                json!({ "eps": eps, "expect_slope": ic.expect_slope, "tolerance": ic.slope_tolerance }),
                v,
                pass,
            );
        }
        Err(e) => {
            for &x in &eps {
                table.push(vec![x, profile.beta(x), f64::NAN], false);
            }
            ctx.push(
                Analysis::Inequalities,
                "beta_logfit",
                json!({ "eps": eps }),
                json!({ "error": e.to_string() }),
                ic.expect_slope.map(|_| false),
            );
        }
    }
    ctx.report.tables.insert("beta-vs-eps".into(), table);

    let (v, ok) = ctx.estimate(nash_estimate(g, &members, d)?)?;
    ctx.push(
        Analysis::Inequalities,
        "nash",
        json!({ "dimension": d }),
        v,
        Some(ok),
    );
    if d > 2.0 {
        let (v, ok) = ctx.estimate(sobolev_estimate(g, &members, d)?)?;
        ctx.push(
            Analysis::Inequalities,
            "sobolev",
            json!({ "dimension": d }),
            v,
            Some(ok),
        );
    }

    if let Some(fk) = &ic.faber_krahn {
        let seed = seed::child(ctx.seed(Analysis::Inequalities), 1);
        let sampler = SamplerConfig {
            samples: fk.samples,
            max_size: fk.max_size,
            ..SamplerConfig::default()
        };
        let scan = faber_krahn_scan(g, d, &sampler, seed)?;
        let (mut v, mut ok) = fk_value(ctx, &scan)?;
        if let Some(tol) = fk.doubling_tolerance {
            let doubled = SamplerConfig {
                samples: 2 * fk.samples,
                ..sampler.clone()
            };
            let again = faber_krahn_scan(g, d, &doubled, seed)?;
            let change =
                (again.estimate.value - scan.estimate.value).abs() / scan.estimate.value.abs();
            v["doubled_value"] = json!(again.estimate.value);
            v["relative_change"] = json!(change);
            ok &= change <= tol;
        }
        ctx.push(
            Analysis::Inequalities,
            "faber_krahn",
            json!({ "dimension": d, "samples": fk.samples, "max_size": fk.max_size, "doubling_tolerance": fk.doubling_tolerance }),
            v,
            Some(ok),
        );
        if let Some(nu) = fk.nu {
            let scan = faber_krahn_relative_scan(g, nu, &sampler, seed::child(seed, 1))?;
            let (v, ok) = fk_value(ctx, &scan)?;
            ctx.push(
                Analysis::Inequalities,
                "faber_krahn_relative",
                json!({ "nu": nu, "samples": fk.samples, "max_size": fk.max_size }),
                v,
                Some(ok),
            );
        }
    }

    if let Some(lp) = ic.lsi_p {
        let positive: Vec<&FamilyMember> = members
            .iter()
            .filter(|m| m.values.iter().all(|&v| v > 0.0))
            .collect();
        let mut margins = Vec::new();
        for m in &positive {
            margins.push(json!({ "member": m.label, "margin": lsi_p_version_check(g, &m.values, lp.p, lp.eps, &members)? }));
        }
        let worst = margins
            .iter()
            .filter_map(|m| m["margin"].as_f64())
            .fold(f64::INFINITY, f64::min);
        let pass = (!positive.is_empty()).then_some(worst >= -1e-12);
        ctx.push(
            Analysis::Inequalities,
            "lsi_p",
            json!({ "p": lp.p, "eps": lp.eps }),
            json!({ "checked": positive.len(), "worst_margin": if positive.is_empty() { Value::Null } else { json!(worst) }, "margins": margins }),
            pass,
        );
    }
    Ok(())
}

fn chains(ctx: &mut Ctx) -> Result<()> {
    let cc = ctx.cfg.chains.clone().expect("configured");
    let inherited = ctx.cfg.inequalities.as_ref().and_then(|i| i.family.clone());
    let kinds = cc.family.clone().or(inherited);
    let members = family(ctx, Analysis::Chains, kinds.as_ref())?;
    let params = ChainParams {
        mu: cc.mu,
        times: cc.times.values(),
        eps: cc.eps.values(),
        tol: ctx.cfg.tolerances.kernel,
        bases: ultracon_core::semigroup::BaseVertices::Auto,
    };
    let inputs = ChainInputs::measure(ctx.g, &members, &params)?;
    ctx.push(
        Analysis::Chains,
        "inputs",
        json!({ "mu": cc.mu, "times": params.times, "eps": params.eps, "members": members.len() }),
        json!({
            "c1_squared": inputs.c1_squared,
            "c2": inputs.c2,
            "uc_times": value(&inputs.uc_times)?,
            "uc_eps": value(&inputs.uc_eps)?,
            "t_star": value(&inputs.t_star)?,
        }),
        None,
    );
    for &tag in &cc.tags {
        let record = chain_check(ctx.g, tag, &inputs, &members)?;
        let pass = record.pass;
        ctx.push(
            Analysis::Chains,
            tag.label(),
            json!({ "tag": tag, "mu": cc.mu }),
            value(&record)?,
            Some(pass),
        );
    }
    Ok(())
}
