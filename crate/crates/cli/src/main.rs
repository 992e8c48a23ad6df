// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ultracon::cache::KernelCache;
use ultracon::report::TABLES;
use ultracon::{
    edgelist, emit_plotdata, run_analyses, run_suite, Analysis, CliError, Report, RunConfig,
    RunOptions,
};

/// Heat kernels, curvature and functional inequalities on weighted graphs.
///
/// Exit status: 0 when every check passes, 2 when a check fails, 1 on
/// configuration or guard errors.
#[derive(Debug, Parser)]
#[command(name = "ultracon", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for records and tables; stdout if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Drop witness payloads from records.
    #[arg(long, global = true)]
    no_witness: bool,
    /// Kernel cache directory, or `off`.
    #[arg(long, global = true, env = "ULTRACON_CACHE")]
    cache: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the graph and print its summary.
    Gen {
        /// Also write the graph as an edge list.
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Volume growth, heat kernels and decay exponents.
    Kernel,
    /// CDE′ search and dimension scan.
    Curvature,
    /// Log-Sobolev, Nash, Sobolev and Faber-Krahn estimates.
    Ineq,
    /// The four equivalence-chain checks.
    Chains,
    /// Every configured analysis.
    Suite,
    /// Run the configured analyses and write one plot table as CSV.
    Plotdata {
        /// One of cue-decay, due-decay, beta-vs-eps, growth.
        #[arg(long)]
        table: String,
    },
}

fn load(cli: &Cli) -> Result<(RunConfig, RunOptions), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    let cache = match cli.cache.as_deref().or(cfg.cache.as_deref()) {
        Some(setting) => KernelCache::from_setting(setting),
        None => KernelCache::off(),
    };
    Ok((
        cfg,
        RunOptions {
            no_witness: cli.no_witness,
            cache,
        },
    ))
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<(), CliError> {
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
            report.write_jsonl(&dir.join("records.jsonl"))?;
            for name in TABLES {
                if report.tables.get(name).is_some_and(|t| !t.rows.is_empty()) {
                    emit_plotdata(report, name, dir)?;
                }
            }
        }
        None => print!("{}", report.to_jsonl()?),
    }
    eprint!("{}", report.summary());
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let (cfg, opts) = load(cli)?;
    let only = |a: &[Analysis]| -> Result<Report, CliError> {
        let (report, stats) = run_analyses(&cfg, a, &opts)?;
        for (x, status) in stats.cache {
            eprintln!(
                "kernel cache, base {x}: {}",
                serde_json::to_string(&status)?
            );
        }
        Ok(report)
    };
    let report = match &cli.command {
        Command::Gen { edges } => {
            let g = cfg.build_graph()?;
            if let Some(path) = edges {
                std::fs::write(path, edgelist::render(&g))
                    .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
            }
            only(&[])?
        }
        Command::Kernel => {
            let wanted = [Analysis::Growth, Analysis::Kernels, Analysis::Exponents];
            let present: Vec<Analysis> = wanted
                .into_iter()
                .filter(|a| match a {
                    Analysis::Growth => cfg.growth.is_some(),
                    Analysis::Kernels => cfg.kernels.is_some(),
                    _ => cfg.exponents.is_some(),
                })
                .collect();
            if present.is_empty() {
                return Err(CliError::Config(
                    "kernel needs a [growth], [kernels] or [exponents] section".into(),
                ));
            }
            only(&present)?
        }
        Command::Curvature => only(&[Analysis::Curvature])?,
        Command::Ineq => only(&[Analysis::Inequalities])?,
        Command::Chains => only(&[Analysis::Chains])?,
        Command::Suite => {
            let (report, _) = run_suite(&cfg, &opts)?;
            report
        }
        Command::Plotdata { table } => {
            let (report, _) = run_suite(&cfg, &opts)?;
            match &cfg.out {
                Some(dir) => {
                    let path = emit_plotdata(&report, table, dir)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{}", report.table_csv(table)?),
            }
            return Ok(report.exit_code());
        }
    };
    emit(&report, &cfg)?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the configuration-error status.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
