// SPDX-License-Identifier: Apache-2.0

//! Structured test-function families.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dirichlet::dirichlet_lambda1;
use crate::error::{Error, Result};
use crate::graph::{ball_volume, WeightedGraph};
use crate::seed;
use crate::semigroup::{continuous_kernel, PoissonWeights};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub label: String,
    pub values: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyKind {
    BallIndicators {
        radii: Vec<usize>,
    },
    HeatColumns {
        times: Vec<f64>,
    },
    /// `exp(-a d(x,·)²)`.
    GaussianBumps {
        widths: Vec<f64>,
    },
    DirichletEigenvectors {
        radii: Vec<usize>,
    },
    RandomPositive {
        count: usize,
    },
    /// `1 + amplitude·noise`; the first member is the exact constant.
    PerturbedConstants {
        count: usize,
        amplitude: f64,
    },
}

impl FamilyKind {
    fn name(&self) -> &'static str {
        match self {
            FamilyKind::BallIndicators { .. } => "ball-indicators",
            FamilyKind::HeatColumns { .. } => "heat-columns",
            FamilyKind::GaussianBumps { .. } => "gaussian-bumps",
            FamilyKind::DirichletEigenvectors { .. } => "dirichlet-eigenvectors",
            FamilyKind::RandomPositive { .. } => "random-positive",
            FamilyKind::PerturbedConstants { .. } => "perturbed-constants",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionFamily {
    pub kinds: Vec<FamilyKind>,
    /// Centers for the localized kinds; empty means the graph's center.
    #[serde(default)]
    pub centers: Vec<usize>,
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-12
}

/// `count` points `lo·(hi/lo)^{i/(count-1)}`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo * libm::pow(hi / lo, i as f64 / (count - 1) as f64))
            .collect(),
    }
}

impl TestFunctionFamily {
    /// Balls, heat columns, bumps, eigenvectors, random positives and constants.
    pub fn standard(seed: u64) -> Self {
        Self {
            kinds: vec![
                FamilyKind::BallIndicators {
                    radii: vec![0, 1, 2, 3, 4, 6, 8, 12, 16],
                },
                FamilyKind::HeatColumns {
                    times: geometric_grid(0.02, 400.0, 60),
                },
                FamilyKind::GaussianBumps {
                    widths: geometric_grid(0.002, 2.0, 12),
                },
                FamilyKind::DirichletEigenvectors {
                    radii: vec![1, 2, 4, 8],
                },
                FamilyKind::RandomPositive { count: 8 },
                FamilyKind::PerturbedConstants {
                    count: 4,
                    amplitude: 0.1,
                },
            ],
            centers: Vec::new(),
            seed,
            tol: default_tol(),
        }
    }

    /// Members that fit the graph; localized members respecting the
    /// boundary guard, everything else vanishing on boundary marks.
    pub fn generate(&self, g: &WeightedGraph) -> Result<Vec<FamilyMember>> {
        let centers = if self.centers.is_empty() {
            vec![g.center()]
        } else {
            self.centers.clone()
        };
        for &c in &centers {
            g.check_vertex(c)?;
        }
        let mut out = Vec::new();
        for (k, kind) in self.kinds.iter().enumerate() {
            let s = seed::child(self.seed, k as u64);
            let name = kind.name();
            match kind {
                FamilyKind::BallIndicators { radii } => {
                    for &x in &centers {
                        let bd = g.boundary_distance(x).unwrap_or(usize::MAX);
                        for &r in radii.iter().filter(|&&r| r < bd) {
                            let ball = ball_volume(g, x, r)?;
                            let mut f = vec![0.0; g.len()];
                            for &y in &ball.members {
                                f[y] = 1.0;
                            }
                            push_new(&mut out, format!("{name}(x={x},r={r})"), f, s);
                        }
                    }
                }
                FamilyKind::HeatColumns { times } => {
                    for &x in &centers {
                        let bd = g.boundary_distance(x).unwrap_or(usize::MAX);
                        let ok: Vec<f64> = times
                            .iter()
                            .copied()
                            .filter(|&t| {
                                PoissonWeights::new(t, self.tol).is_ok_and(|w| w.order() < bd)
                            })
                            .collect();
                        if ok.is_empty() {
                            continue;
                        }
                        let table = continuous_kernel(g, x, &ok, self.tol)?;
                        for row in table.continuous {
                            let t = row.t;
                            push_new(&mut out, format!("{name}(x={x},t={t})"), row.values, s);
                        }
                    }
                }
                FamilyKind::GaussianBumps { widths } => {
                    for &x in &centers {
                        let dist = g.distances_from(x);
                        for &a in widths {
                            let f = (0..g.len())
                                .map(|y| {
                                    if g.is_boundary(y) || dist[y] == usize::MAX {
                                        0.0
                                    } else {
                                        let d = dist[y] as f64;
                                        libm::exp(-a * d * d)
                                    }
                                })
                                .collect();
                            push_new(&mut out, format!("{name}(x={x},a={a})"), f, s);
                        }
                    }
                }
                FamilyKind::DirichletEigenvectors { radii } => {
                    for &x in &centers {
                        let bd = g.boundary_distance(x).unwrap_or(usize::MAX);
                        for &r in radii.iter().filter(|&&r| r < bd) {
                            let ball = ball_volume(g, x, r)?;
                            if ball.len() == g.len() {
                                continue;
                            }
                            let e = dirichlet_lambda1(g, &ball)?;
                            push_new(&mut out, format!("{name}(x={x},r={r})"), e.eigenfunction, s);
                        }
                    }
                }
                FamilyKind::RandomPositive { count } => {
                    for i in 0..*count {
                        let si = seed::child(s, i as u64);
                        let mut rng = seed::rng(si);
                        let f = (0..g.len())
                            .map(|y| {
                                let v = libm::exp(rng.gen_range(-2.0..2.0));
                                if g.is_boundary(y) {
                                    0.0
                                } else {
                                    v
                                }
                            })
                            .collect();
                        push_new(&mut out, format!("{name}(i={i})"), f, si);
                    }
                }
                FamilyKind::PerturbedConstants { count, amplitude } => {
                    for i in 0..*count {
                        let si = seed::child(s, i as u64);
                        let mut rng = seed::rng(si);
                        let f = (0..g.len())
                            .map(|y| {
                                let noise = if i == 0 {
                                    0.0
                                } else {
                                    amplitude * rng.gen_range(-1.0..1.0)
                                };
                                if g.is_boundary(y) {
                                    0.0
                                } else {
                                    1.0 + noise
                                }
                            })
                            .collect();
                        push_new(&mut out, format!("{name}(i={i})"), f, si);
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InsufficientData(
                "family produced no admissible member".into(),
            ));
        }
        Ok(out)
    }
}

fn push_new(out: &mut Vec<FamilyMember>, label: String, values: Vec<f64>, seed: u64) {
    if values.iter().any(|&v| v != 0.0) {
        out.push(FamilyMember {
            label,
            values,
            seed,
        });
    }
}

/// Wraps plain functions as family members.
pub fn members_from(functions: &[Vec<f64>]) -> Vec<FamilyMember> {
    functions
        .iter()
        .enumerate()
        .map(|(i, f)| FamilyMember {
            label: format!("given(i={i})"),
            values: f.clone(),
            seed: 0,
        })
        .collect()
}
