// SPDX-License-Identifier: Apache-2.0

//! On-disk cache of heat-kernel tables.
//!
//! One file per graph fingerprint and base vertex. The first line describes
//! exactly what was computed; a file is reused only when that line matches
//! the request byte for byte. Floats are stored as their IEEE-754 bit
//! patterns, so a hit returns the cold result bit for bit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use ultracon_core::semigroup::{
    continuous_kernel, discrete_kernel, ContinuousRow, HeatKernelTable,
};
use ultracon_core::WeightedGraph;

use crate::error::{CliError, Result};

const FORMAT: &str = "ultracon-kernel-cache v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheStatus {
    Off,
    Hit,
    Miss,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelCache {
    dir: Option<PathBuf>,
}

fn hex(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn unhex(s: &str) -> Option<f64> {
    u64::from_str_radix(s, 16).ok().map(f64::from_bits)
}

impl KernelCache {
    pub fn off() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: Some(dir.into()),
        }
    }

    /// `"off"` (any case) disables the cache; anything else is a directory.
    pub fn from_setting(setting: &str) -> Self {
        if setting.eq_ignore_ascii_case("off") {
            Self::off()
        } else {
            Self::at(setting)
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn header(g: &WeightedGraph, x: usize, steps: usize, times: &[f64], tol: f64) -> String {
        let times: Vec<String> = times.iter().map(|&t| hex(t)).collect();
        format!(
            "{FORMAT} fingerprint={:016x} vertices={} base={x} steps={steps} tol={} times={}",
            g.fingerprint(),
            g.len(),
            hex(tol),
            times.join(",")
        )
    }

    fn path(&self, g: &WeightedGraph, x: usize) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{:016x}-{x}.kernel", g.fingerprint())))
    }

    /// Discrete rows `0..=steps` and continuous rows at `times` from `x`.
    pub fn kernel(
        &self,
        g: &WeightedGraph,
        x: usize,
        steps: usize,
        times: &[f64],
        tol: f64,
    ) -> Result<(HeatKernelTable, CacheStatus)> {
        let Some(path) = self.path(g, x) else {
            return Ok((compute(g, x, steps, times, tol)?, CacheStatus::Off));
        };
        let header = Self::header(g, x, steps, times, tol);
        if let Ok(text) = std::fs::read_to_string(&path) {
            let mut lines = text.lines();
            if lines.next() == Some(header.as_str()) {
                let table = decode(lines, x, g.len(), steps, times.len()).ok_or_else(|| {
                    CliError::Cache {
                        path: path.clone(),
                        message: "corrupt body".into(),
                    }
                })?;
                return Ok((table, CacheStatus::Hit));
            }
        }
        let table = compute(g, x, steps, times, tol)?;
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| {
                CliError::io(format!("creating cache directory {}", dir.display()), e)
            })?;
        }
        // Write to a temporary name first so readers never see a partial file.
        let tmp = path.with_extension("kernel.tmp");
        std::fs::write(&tmp, encode(&header, &table))
            .map_err(|e| CliError::io(format!("writing {}", tmp.display()), e))?;
        std::fs::rename(&tmp, &path)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
        Ok((table, CacheStatus::Miss))
    }
}

fn compute(
    g: &WeightedGraph,
    x: usize,
    steps: usize,
    times: &[f64],
    tol: f64,
) -> Result<HeatKernelTable> {
    let mut table = discrete_kernel(g, x, steps)?;
    if !times.is_empty() {
        table.continuous = continuous_kernel(g, x, times, tol)?.continuous;
    }
    Ok(table)
}

fn encode(header: &str, table: &HeatKernelTable) -> String {
    let mut s = String::new();
    s.push_str(header);
    s.push('\n');
    for (k, row) in table.discrete.iter().enumerate() {
        let _ = write!(s, "d {k}");
        for &v in row {
            let _ = write!(s, " {}", hex(v));
        }
        s.push('\n');
    }
    for row in &table.continuous {
        let _ = write!(s, "c {} {} {}", hex(row.t), row.order, hex(row.tail_bound));
        for &v in &row.values {
            let _ = write!(s, " {}", hex(v));
        }
        s.push('\n');
    }
    s
}

fn decode<'a>(
    lines: impl Iterator<Item = &'a str>,
    base: usize,
    n: usize,
    steps: usize,
    n_times: usize,
) -> Option<HeatKernelTable> {
    let mut discrete = Vec::new();
    let mut continuous = Vec::new();
    for line in lines {
        let mut it = line.split(' ');
        match it.next()? {
            "d" => {
                let k: usize = it.next()?.parse().ok()?;
                if k != discrete.len() {
                    return None;
                }
                let row: Option<Vec<f64>> = it.map(unhex).collect();
                discrete.push(row?);
            }
            "c" => {
                let t = unhex(it.next()?)?;
                let order = it.next()?.parse().ok()?;
                let tail_bound = unhex(it.next()?)?;
                let values: Option<Vec<f64>> = it.map(unhex).collect();
                continuous.push(ContinuousRow {
                    t,
                    values: values?,
                    order,
                    tail_bound,
                });
            }
            _ => return None,
        }
    }
    let sizes_ok =
        discrete.iter().all(|r| r.len() == n) && continuous.iter().all(|r| r.values.len() == n);
    (sizes_ok && discrete.len() == steps + 1 && continuous.len() == n_times).then_some(
        HeatKernelTable {
            base,
            discrete,
            continuous,
        },
    )
}
