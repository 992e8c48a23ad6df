// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::kernel::{continuous_kernel, discrete_kernel, BaseVertices};
use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::graph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    Discrete,
    Continuous,
}

/// Time window of a decay fit.
///
/// Discrete mode uses every integer step in `[lo, hi]`; continuous mode uses
/// `samples` log-spaced times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl FitWindow {
    pub fn times(&self, mode: KernelMode) -> Vec<f64> {
        match mode {
            KernelMode::Discrete => {
                let lo = libm::ceil(self.lo) as usize;
                let hi = libm::floor(self.hi) as usize;
                (lo..=hi).map(|k| k as f64).collect()
            }
            KernelMode::Continuous => {
                if self.samples < 2 {
                    return vec![self.lo];
                }
                let a = libm::log(self.lo);
                let b = libm::log(self.hi);
                (0..self.samples)
                    .map(|i| libm::exp(a + (b - a) * i as f64 / (self.samples - 1) as f64))
                    .collect()
            }
        }
    }
}

/// Decay of the kernel supremum and its power-law fit `sup ≤ C t^{-exponent}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub mode: KernelMode,
    pub window: FitWindow,
    pub times: Vec<f64>,
    /// Discrete: `sup p_k(x,y)/m(y)`; continuous: `sup p(t,x,y)`.
    pub sup_values: Vec<f64>,
    /// Discrete: `sup p_k(x,y)/m(x)` (the other normalization); continuous: same as `sup_values`.
    pub sup_values_alt: Vec<f64>,
    /// `sup · V(G) < saturation_ratio`: the finite-graph equilibrium `1/V(G)` dominates.
    pub saturated: Vec<bool>,
    pub constant: Option<f64>,
    pub exponent: Option<f64>,
    /// Log-space residuals of the clean points.
    pub residuals: Vec<f64>,
    pub clean_points: usize,
}

/// Ratio to equilibrium below which a supremum counts as saturated.
pub const SATURATION_RATIO: f64 = 1.5;

/// Fits the decay exponent of the kernel supremum over the window.
pub fn exponent_fit(
    g: &WeightedGraph,
    mode: KernelMode,
    window: FitWindow,
    tol: f64,
    bases: &BaseVertices,
) -> Result<ExponentFit> {
    if !(window.lo > 0.0 && window.hi > window.lo) {
        return Err(Error::InvalidParameter(format!(
            "fit window [{}, {}] must be positive and nonempty",
            window.lo, window.hi
        )));
    }
    let times = window.times(mode);
    if times.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "fit window has {} points, need at least 4",
            times.len()
        )));
    }
    let bases = bases.resolve(g);
    let mut sup = vec![0.0f64; times.len()];
    let mut sup_alt = vec![0.0f64; times.len()];
    for &x in &bases {
        match mode {
            KernelMode::Discrete => {
                let steps = *times.last().unwrap() as usize;
                let table = discrete_kernel(g, x, steps)?;
                for (i, &t) in times.iter().enumerate() {
                    let row = &table.discrete[t as usize];
                    for (y, &p) in row.iter().enumerate() {
                        sup[i] = sup[i].max(p / g.measure(y));
                        sup_alt[i] = sup_alt[i].max(p / g.measure(x));
                    }
                }
            }
            KernelMode::Continuous => {
                let table = continuous_kernel(g, x, &times, tol)?;
                for (i, row) in table.continuous.iter().enumerate() {
                    let s = row.values.iter().copied().fold(0.0, f64::max);
                    sup[i] = sup[i].max(s);
                    sup_alt[i] = sup[i];
                }
            }
        }
    }
    let volume = g.total_volume();
    let saturated: Vec<bool> = sup.iter().map(|s| s * volume < SATURATION_RATIO).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&sup)
        .zip(&saturated)
        .filter(|(_, &sat)| !sat)
        .map(|((t, s), _)| (libm::log(*t), libm::log(*s)))
        .unzip();
    let clean_points = xs.len();
    let (constant, exponent, residuals) = if clean_points >= 4 {
        let line = linear_fit(&xs, &ys)?;
        (
            Some(libm::exp(line.intercept)),
            Some(-line.slope),
            line.residuals,
        )
    } else {
        (None, None, Vec::new())
    };
    Ok(ExponentFit {
        mode,
        window,
        times,
        sup_values: sup,
        sup_values_alt: sup_alt,
        saturated,
        constant,
        exponent,
        residuals,
        clean_points,
    })
}
