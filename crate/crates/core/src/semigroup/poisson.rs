// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Truncated Poisson(t) weights `e^{-t} t^k / k!` for `k = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    pub t: f64,
    pub weights: Vec<f64>,
    /// Upper bound on the discarded mass `Σ_{k>order} e^{-t} t^k/k!`.
    pub tail_bound: f64,
}

impl PoissonWeights {
    pub fn new(t: f64, tol: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "time must be positive, got {t}"
            )));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let ln_t = libm::log(t);
        let cap = (t + 60.0 * libm::sqrt(t) + 200.0) as usize;
        let mut weights = Vec::new();
        // Linear recurrence while e^{-t} is representable, log space beyond.
        let linear = t < 600.0;
        let mut w = libm::exp(-t);
        let mut log_w = -t;
        for k in 0..=cap {
            if k > 0 {
                if linear {
                    w *= t / k as f64;
                    log_w = libm::log(w);
                } else {
                    log_w += ln_t - libm::log(k as f64);
                    w = libm::exp(log_w);
                }
            }
            weights.push(w);
            // Terms past k shrink by at least t/(k+2) each, giving a geometric bound.
            let ratio = t / (k as f64 + 2.0);
            if ratio < 1.0 {
                let next = libm::exp(log_w + ln_t - libm::log(k as f64 + 1.0));
                let bound = next / (1.0 - ratio);
                if bound <= tol {
                    return Ok(Self {
                        t,
                        weights,
                        tail_bound: bound,
                    });
                }
            }
        }
        Err(Error::InvalidParameter(format!(
            "Poisson tail tolerance {tol:e} unreachable at t = {t}"
        )))
    }

    pub fn order(&self) -> usize {
        self.weights.len() - 1
    }
}
