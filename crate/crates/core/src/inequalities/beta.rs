// SPDX-License-Identifier: Apache-2.0

//! Fits of `β(ε)` and the Davies-Simon average `M(t) = (1/t)∫₀ᵗ β`.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::quotients::LsiProfile;
use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::quad;

/// Least-squares fit `β(ε) ≈ c + b log ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub c: f64,
    /// `b`; the log-Sobolev form predicts `b = -D/4`.
    pub log_coefficient: f64,
    /// `-b`, comparable with `D/4`.
    pub dimension_slope: f64,
    pub eps: Vec<f64>,
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
    /// The family had no energy at all; the fit carries no information.
    pub degenerate: bool,
}

impl BetaFit {
    pub fn dimension_estimate(&self) -> f64 {
        4.0 * self.dimension_slope
    }
}

/// Minimum span of the `ε` grid, in decades.
pub const MIN_DECADES: f64 = 1.5;

pub fn beta_logfit(profile: &LsiProfile, eps: &[f64]) -> Result<BetaFit> {
    if eps.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "β fit needs at least 4 grid points, got {}",
            eps.len()
        )));
    }
    if let Some(e) = eps.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "ε must be positive, got {e}"
        )));
    }
    let lo = eps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eps.iter().copied().fold(0.0, f64::max);
    if libm::log10(hi / lo) < MIN_DECADES - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "ε grid spans {:.2} decades, need {MIN_DECADES}",
            libm::log10(hi / lo)
        )));
    }
    let beta: Vec<f64> = eps.iter().map(|&e| profile.beta(e)).collect();
    let logs: Vec<f64> = eps.iter().map(|&e| libm::log(e)).collect();
    let line = linear_fit(&logs, &beta)?;
    Ok(BetaFit {
        c: line.intercept,
        log_coefficient: line.slope,
        dimension_slope: -line.slope,
        eps: eps.to_vec(),
        beta,
        residuals: line.residuals,
        degenerate: profile.is_degenerate(),
    })
}

/// A `β` curve usable on all of `(0, t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BetaCurve {
    Constant(f64),
    /// `c + b log ε`.
    LogFit {
        c: f64,
        b: f64,
    },
    /// Linear in `log ε` between samples; outside the grid continued with
    /// slope `b` in `log ε` when present.
    Sampled {
        eps: Vec<f64>,
        beta: Vec<f64>,
        extension: Option<f64>,
    },
    /// The exact family envelope `max_f (entropy - ε energy)/‖f‖²`.
    Envelope(LsiProfile),
}

impl BetaCurve {
    pub fn from_fit(fit: &BetaFit) -> Self {
        BetaCurve::Sampled {
            eps: fit.eps.clone(),
            beta: fit.beta.clone(),
            extension: Some(fit.log_coefficient),
        }
    }

    pub fn value(&self, eps: f64) -> Result<f64> {
        match self {
            BetaCurve::Constant(b) => Ok(*b),
            BetaCurve::LogFit { c, b } => Ok(c + b * libm::log(eps)),
            BetaCurve::Envelope(p) => Ok(p.beta(eps)),
            BetaCurve::Sampled {
                eps: grid,
                beta,
                extension,
            } => {
                let n = grid.len();
                if n == 0 {
                    return Err(Error::InsufficientData("empty β grid".into()));
                }
                let l = libm::log(eps);
                let outside = |i: usize| {
                    extension
                        .map(|b| beta[i] + b * (l - libm::log(grid[i])))
                        .ok_or_else(|| {
                            Error::InsufficientData(format!(
                                "ε = {eps} outside the β grid and no fitted extension"
                            ))
                        })
                };
                if eps < grid[0] {
                    return outside(0);
                }
                if eps > grid[n - 1] {
                    return outside(n - 1);
                }
                let i = grid.partition_point(|&g| g <= eps).clamp(1, n.max(2) - 1);
                if n == 1 {
                    return Ok(beta[0]);
                }
                let (l0, l1) = (libm::log(grid[i - 1]), libm::log(grid[i]));
                let w = if l1 > l0 { (l - l0) / (l1 - l0) } else { 0.0 };
                Ok(beta[i - 1] + w * (beta[i] - beta[i - 1]))
            }
        }
    }

    /// Places where the curve is not smooth, inside `(0, t)`.
    fn kinks(&self, t: f64) -> Vec<f64> {
        match self {
            BetaCurve::Sampled { eps, .. } => eps.iter().copied().filter(|&e| e < t).collect(),
            BetaCurve::Envelope(p) => p.breakpoints(0.0, t),
            _ => Vec::new(),
        }
    }
}

/// `M(t) = (1/t)∫₀ᵗ β(ε) dε`.
///
/// After `ε = t s²` the integrand `2s β(t s²)` is bounded near 0 for any
/// logarithmic singularity; the pieces between kinks go to adaptive quadrature.
pub fn davies_simon_m(curve: &BetaCurve, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t must be positive, got {t}"
        )));
    }
    match curve {
        BetaCurve::Constant(b) => return Ok(*b),
        BetaCurve::LogFit { c, b } => return Ok(c + b * (libm::log(t) - 1.0)),
        BetaCurve::Sampled {
            eps,
            extension: None,
            ..
        } if eps.first().is_none_or(|&e| e > 0.0) => {
            return Err(Error::InsufficientData(
                "β near 0 is unknown without a fitted extension".into(),
            ));
        }
        _ => {}
    }
    let mut cuts: Vec<f64> = curve.kinks(t).iter().map(|&e| libm::sqrt(e / t)).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    let mut failure = None;
    for w in cuts.windows(2) {
        let (v, _) = quad::integrate(
            |s| {
                if s == 0.0 {
                    return 0.0;
                }
                match curve.value(t * s * s) {
                    Ok(b) => 2.0 * s * b,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            w[0],
            w[1],
            1e-13,
            2000,
        )?;
        total += v;
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}
