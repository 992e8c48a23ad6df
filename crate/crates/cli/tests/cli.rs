// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ultracon"));
    c.env_remove("ULTRACON_CACHE");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn ultracon")
}

fn records(text: &str) -> Vec<serde_json::Value> {
    text.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn two_point_suite_matches_closed_form() {
    let cfg = configs().join("two_point.toml");
    let out = run(&["suite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(recs[0]["record"], "header");
    assert_eq!(recs[0]["seed"], 1);
    assert_eq!(recs[0]["config"]["graph"]["kind"], "two_point");
    for name in [
        "growth",
        "kernels",
        "exponents",
        "curvature",
        "inequalities",
        "chains",
    ] {
        assert!(recs.iter().any(|r| r["analysis"] == name), "missing {name}");
    }
    let mut rows = 0;
    for r in recs.iter().filter(|r| r["operation"] == "heat_kernel") {
        let x = r["result"]["base"].as_u64().unwrap() as usize;
        for row in r["result"]["continuous"].as_array().unwrap() {
            let t = row["t"].as_f64().unwrap();
            let v: Vec<f64> = serde_json::from_value(row["values"].clone()).unwrap();
            let same = 0.5 * (1.0 + (-2.0 * t).exp());
            for (y, &p) in v.iter().enumerate() {
                let want = if y == x { same } else { 1.0 - same };
                assert!((p - want).abs() < 1e-12, "t={t} x={x} y={y}: {p} vs {want}");
            }
            rows += 1;
        }
        let discrete: Vec<Vec<f64>> =
            serde_json::from_value(r["result"]["discrete"].clone()).unwrap();
        for (k, row) in discrete.iter().enumerate() {
            assert_eq!(row[x], if k % 2 == 0 { 1.0 } else { 0.0 });
        }
    }
    assert_eq!(rows, 10);
}

#[test]
fn guard_violation_names_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[graph]\nkind = \"lattice_window\"\nl = 11\nd = 1\n[exponents]\nmodes = [\"continuous\"]\ncontinuous_window = [1.0, 40.0]\n",
    );
    let out = run(&["suite", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("guard violation in [exponents]"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[graph]\nkind = \"cycle\"\nn = 5\nsurprise = 3\n",
    );
    assert_eq!(run(&["suite", "--config", &cfg]).status.code(), Some(1));
    assert_eq!(run(&["suite"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let cfg = write(dir.path(), "ok.toml", "[graph]\nkind = \"cycle\"\nn = 5\n");
    let out = run(&["curvature", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[curvature]"));
}

#[test]
fn failed_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[graph]\nkind = \"torus\"\nn = 16\nd = 1\nalpha = 0.25\n[curvature]\nn = 2.0\nrestarts = 6\nexpect_no_violation = true\n",
    );
    let out = run(&["curvature", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(recs.last().unwrap()["result"]["verdict"], "violated");
}

#[test]
fn records_are_deterministic() {
    let cfg = configs().join("two_point.toml");
    let a = run(&["suite", "--config", cfg.to_str().unwrap(), "--seed", "99"]);
    let b = run(&["suite", "--config", cfg.to_str().unwrap(), "--seed", "99"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["suite", "--config", cfg.to_str().unwrap(), "--seed", "98"]);
    assert_ne!(a.stdout, c.stdout);
    assert!(String::from_utf8_lossy(&a.stdout)
        .lines()
        .all(|l| l.contains("\"seed\"")));
}

#[test]
fn cache_hit_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cfg = write(
        dir.path(),
        "k.toml",
        "seed = 3\n[graph]\nkind = \"lattice_window\"\nl = 20\nd = 2\nalpha = 0.25\n[kernels]\nbases = [840, 799]\nsteps = 8\ntimes = [0.5, 1.0, 2.0]\n",
    );
    let cold = run(&["kernel", "--config", &cfg, "--cache", "off"]);
    let miss = bin()
        .args(["kernel", "--config", &cfg])
        .env("ULTRACON_CACHE", &cache)
        .output()
        .unwrap();
    let hit = run(&[
        "kernel",
        "--config",
        &cfg,
        "--cache",
        cache.to_str().unwrap(),
    ]);
    for o in [&cold, &miss, &hit] {
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    assert!(String::from_utf8_lossy(&miss.stderr).contains("miss"));
    assert!(String::from_utf8_lossy(&hit.stderr).contains("hit"));
    assert_eq!(cold.stdout, miss.stdout);
    assert_eq!(cold.stdout, hit.stdout);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 2);
}

#[test]
fn edge_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gen_cfg = write(
        dir.path(),
        "g.toml",
        "[graph]\nkind = \"cycle\"\nn = 7\nalpha = 0.2\n",
    );
    let edges = dir.path().join("c7.txt");
    let out = run(&[
        "gen",
        "--config",
        &gen_cfg,
        "--edges",
        edges.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let original = records(&String::from_utf8(out.stdout).unwrap());
    let cfg = write(
        dir.path(),
        "e.toml",
        "[graph]\nkind = \"edge_file\"\npath = \"c7.txt\"\n",
    );
    let out = run(&["gen", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let loaded = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(
        loaded[1]["result"]["fingerprint"],
        original[1]["result"]["fingerprint"]
    );
    assert_eq!(
        loaded[1]["result"]["volume"],
        original[1]["result"]["volume"]
    );
}

#[test]
fn edge_file_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.txt", "# header\n0 1 1.0\n1 2 heavy\n");
    let cfg = write(
        dir.path(),
        "e.toml",
        "[graph]\nkind = \"edge_file\"\npath = \"bad.txt\"\n",
    );
    let out = run(&["gen", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.txt:3:"), "{err}");
    let cfg = write(
        dir.path(),
        "m.toml",
        "[graph]\nkind = \"edge_file\"\npath = \"missing.txt\"\n",
    );
    assert_eq!(run(&["gen", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn plotdata_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("two_point.toml");
    let cfg = cfg.to_str().unwrap();
    let out = run(&["plotdata", "--config", cfg, "--table", "beta-vs-eps"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("# ultracon table=beta-vs-eps"));
    assert_eq!(lines.next(), Some("eps,beta_empirical,fit"));
    assert_eq!(lines.count(), 6);

    let out = run(&["plotdata", "--config", cfg, "--table", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown plot table"));

    // K2 saturates immediately: no clean decay rows, so no file either.
    let target = dir.path().join("plots");
    let out = run(&[
        "plotdata",
        "--config",
        cfg,
        "--table",
        "cue-decay",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("has no rows"));
    assert!(!target.join("cue-decay.csv").exists());
}

#[test]
fn decay_tables_are_log_log_ready() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "d.toml",
        "[graph]\nkind = \"torus\"\nn = 32\nd = 1\nalpha = 0.25\n[exponents]\ndiscrete_window = [4, 200]\ncontinuous_window = [2, 300]\nsamples = 30\n",
    );
    let out_dir = dir.path().join("o");
    let out = run(&[
        "kernel",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--no-witness",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["cue-decay", "due-decay"] {
        let text = std::fs::read_to_string(out_dir.join(format!("{name}.csv"))).unwrap();
        let body: Vec<&str> = text.lines().skip(2).collect();
        assert!(!body.is_empty());
        for line in body {
            for v in line.split(',') {
                assert!(v.parse::<f64>().unwrap() > 0.0, "{name}: {line}");
            }
        }
    }
    assert!(out_dir.join("records.jsonl").exists());
}

#[test]
fn no_witness_strips_payloads() {
    let cfg = configs().join("two_point.toml");
    let out = run(&["ineq", "--config", cfg.to_str().unwrap(), "--no-witness"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&String::from_utf8(out.stdout).unwrap());
    let nash = recs.iter().find(|r| r["operation"] == "nash").unwrap();
    assert_eq!(nash["result"]["witness"]["kind"], "omitted");
    let out = run(&["ineq", "--config", cfg.to_str().unwrap()]);
    let recs = records(&String::from_utf8(out.stdout).unwrap());
    let nash = recs.iter().find(|r| r["operation"] == "nash").unwrap();
    assert_eq!(nash["result"]["witness"]["kind"], "function");
}
