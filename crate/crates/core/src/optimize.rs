// SPDX-License-Identifier: Apache-2.0

//! Box-constrained Nelder-Mead with adaptive coefficients.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when the simplex spread in `f` falls below this.
    pub f_tol: f64,
    /// Stop when every vertex lies within this distance of the best one (sup norm).
    pub x_tol: f64,
    pub initial_step: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 4000,
            f_tol: 1e-14,
            x_tol: 1e-10,
            initial_step: 0.5,
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` from `start`; every trial point is clamped into `[lower, upper]`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    opts: &NelderMeadOptions,
) -> Minimum {
    let n = start.len();
    let clamp = |v: &mut Vec<f64>| {
        for c in v.iter_mut() {
            *c = c.clamp(opts.lower, opts.upper);
        }
    };
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let value = eval(start, &mut evals);
        return Minimum {
            x: Vec::new(),
            value,
            evals,
            converged: true,
        };
    }
    let dim = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / dim, 0.75 - 0.5 / dim, 1.0 - 1.0 / dim);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    clamp(&mut x0);
    simplex.push(x0.clone());
    for i in 0..n {
        let mut v = x0.clone();
        let step = if v[i] + opts.initial_step > opts.upper {
            -opts.initial_step
        } else {
            opts.initial_step
        };
        v[i] += step;
        clamp(&mut v);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut converged = false;

    while evals < opts.max_evals {
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];
        let spread = values[worst] - values[best];
        let size = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| libm::fabs(a - b))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && size <= opts.x_tol {
            converged = true;
            break;
        }
        if size <= opts.x_tol * 1e-3 {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&simplex[i]) {
                *c += v / dim;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect();
            for c in p.iter_mut() {
                *c = c.clamp(opts.lower, opts.upper);
            }
            p
        };

        let reflected = along(alpha);
        let fr = eval(&reflected, &mut evals);
        if fr < values[best] {
            let expanded = along(alpha * gamma);
            let fe = eval(&expanded, &mut evals);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        let (trial, ft) = if fr < values[worst] {
            let c = along(alpha * rho);
            let fc = eval(&c, &mut evals);
            (c, fc)
        } else {
            let c = along(-rho);
            let fc = eval(&c, &mut evals);
            (c, fc)
        };
        if ft < values[worst].min(fr) {
            simplex[worst] = trial;
            values[worst] = ft;
            continue;
        }
        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            let mut v: Vec<f64> = anchor
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + sigma * (x - b))
                .collect();
            clamp(&mut v);
            values[i] = eval(&v, &mut evals);
            simplex[i] = v;
        }
    }
    let (best, _) =
        values.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
    Minimum {
        x: simplex.swap_remove(best),
        value: values[best],
        evals,
        converged,
    }
}
