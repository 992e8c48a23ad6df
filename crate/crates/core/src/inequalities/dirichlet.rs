// SPDX-License-Identifier: Apache-2.0

//! Dirichlet eigenvalues and Faber-Krahn scans.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ConstantEstimate, Direction, InequalityTag, Witness};
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletEigen {
    pub lambda1: f64,
    /// Zero off `Ω`, nonnegative, `‖f‖₂ = 1`.
    pub eigenfunction: Vec<f64>,
}

/// Bottom of the spectrum of `-Δ` with Dirichlet condition outside `Ω`.
pub fn dirichlet_lambda1(g: &WeightedGraph, omega: &VertexSet) -> Result<DirichletEigen> {
    if omega.is_empty() {
        return Err(Error::InvalidParameter("Ω must be nonempty".into()));
    }
    let members = &omega.members;
    let k = members.len();
    let mut local = vec![usize::MAX; g.len()];
    for (i, &x) in members.iter().enumerate() {
        local[x] = i;
    }
    let scale: Vec<f64> = members
        .iter()
        .map(|&x| 1.0 / libm::sqrt(g.measure(x)))
        .collect();
    // S = I - M^{-1/2} W_Ω M^{-1/2}
    let mut s = DMatrix::<f64>::identity(k, k);
    for (i, &x) in members.iter().enumerate() {
        for &(y, w) in g.neighbors(x) {
            let j = local[y];
            if j != usize::MAX {
                s[(i, j)] -= w * scale[i] * scale[j];
            }
        }
    }
    let eig = SymmetricEigen::new(s);
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Degenerate("empty spectrum".into()))?;
    let v = eig.eigenvectors.column(idx);
    let sum: f64 = v.iter().sum();
    let sign = if sum < 0.0 { -1.0 } else { 1.0 };
    let mut f = vec![0.0; g.len()];
    for (i, &x) in members.iter().enumerate() {
        f[x] = (sign * v[i] * scale[i]).max(0.0);
    }
    let norm = g.norm(&f, 2.0);
    for v in &mut f {
        *v /= norm;
    }
    Ok(DirichletEigen {
        lambda1: lambda.max(0.0),
        eigenfunction: f,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Ball,
    Box,
    RandomConnected,
    RandomSubset,
}

impl SetKind {
    const ALL: [SetKind; 4] = [
        SetKind::Ball,
        SetKind::Box,
        SetKind::RandomConnected,
        SetKind::RandomSubset,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: usize,
    /// Largest admissible `|Ω|`.
    pub max_size: usize,
    pub kinds: Vec<SetKind>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            samples: 500,
            max_size: 450,
            kinds: SetKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkSample {
    pub kind: SetKind,
    pub size: usize,
    pub volume: f64,
    pub lambda1: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkScan {
    pub estimate: ConstantEstimate,
    pub samples: Vec<FkSample>,
}

/// Draws sets away from boundary marks.
struct Sampler<'a> {
    g: &'a WeightedGraph,
    interior: Vec<usize>,
    allowed: Vec<bool>,
    max_size: usize,
}

impl<'a> Sampler<'a> {
    fn new(g: &'a WeightedGraph, max_size: usize) -> Result<Self> {
        let allowed: Vec<bool> = (0..g.len()).map(|x| !g.is_boundary(x)).collect();
        let interior: Vec<usize> = (0..g.len()).filter(|&x| allowed[x]).collect();
        if interior.is_empty() || max_size == 0 {
            return Err(Error::InsufficientData(
                "no admissible vertices to sample from".into(),
            ));
        }
        Ok(Self {
            g,
            interior,
            allowed,
            max_size,
        })
    }

    /// Ball `B(x,r)` if it avoids the boundary and respects the size cap.
    fn ball(&self, x: usize, r: usize) -> Option<Vec<usize>> {
        let dist = self.g.distances_from(x);
        let members: Vec<usize> = (0..self.g.len()).filter(|&y| dist[y] <= r).collect();
        let ok = members.len() <= self.max_size && members.iter().all(|&y| self.allowed[y]);
        ok.then_some(members)
    }

    fn max_radius(&self, x: usize) -> usize {
        let dist = self.g.distances_from(x);
        let ecc = dist
            .iter()
            .copied()
            .filter(|&d| d != usize::MAX)
            .max()
            .unwrap_or(0);
        let mut r = 0;
        while r < ecc {
            let next: Vec<usize> = (0..self.g.len()).filter(|&y| dist[y] <= r + 1).collect();
            if next.len() > self.max_size || next.iter().any(|&y| !self.allowed[y]) {
                break;
            }
            r += 1;
        }
        r
    }

    fn draw<R: Rng>(&self, kind: SetKind, rng: &mut R) -> Vec<usize> {
        let x = *self.interior.choose(rng).unwrap_or(&0);
        match kind {
            SetKind::Ball => {
                let r = rng.gen_range(0..=self.max_radius(x));
                self.ball(x, r).unwrap_or_else(|| vec![x])
            }
            SetKind::Box => self
                .lattice_box(x, rng)
                .unwrap_or_else(|| self.grow(x, rng)),
            SetKind::RandomConnected => self.grow(x, rng),
            SetKind::RandomSubset => {
                let cap = self.max_size.min(self.interior.len());
                let size = rng.gen_range(1..=cap);
                let mut v: Vec<usize> = self.interior.choose_multiple(rng, size).copied().collect();
                v.sort_unstable();
                v
            }
        }
    }

    /// Axis-aligned box with a random corner and random side lengths.
    fn lattice_box<R: Rng>(&self, x: usize, rng: &mut R) -> Option<Vec<usize>> {
        let origin = self.g.coordinates(x)?;
        let d = origin.len();
        let side_cap = (libm::pow(self.max_size as f64, 1.0 / d as f64) as i64).max(1);
        let sides: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=side_cap)).collect();
        let members: Vec<usize> = (0..self.g.len())
            .filter(|&y| {
                self.g.coordinates(y).is_some_and(|c| {
                    c.iter()
                        .zip(&origin)
                        .zip(&sides)
                        .all(|((&cy, &ox), &s)| cy >= ox && cy < ox + s)
                })
            })
            .collect();
        let ok = !members.is_empty()
            && members.len() <= self.max_size
            && members.iter().all(|&y| self.allowed[y]);
        ok.then_some(members)
    }

    /// Random growth from `x`, one uniformly chosen frontier vertex at a time.
    fn grow<R: Rng>(&self, x: usize, rng: &mut R) -> Vec<usize> {
        let target = rng.gen_range(1..=self.max_size);
        let mut inside = vec![false; self.g.len()];
        inside[x] = true;
        let mut members = vec![x];
        let mut frontier: Vec<usize> = Vec::new();
        let push = |y: usize, inside: &[bool], frontier: &mut Vec<usize>, allowed: &[bool]| {
            if allowed[y] && !inside[y] && !frontier.contains(&y) {
                frontier.push(y);
            }
        };
        for &(y, _) in self.g.neighbors(x) {
            push(y, &inside, &mut frontier, &self.allowed);
        }
        while members.len() < target && !frontier.is_empty() {
            let i = rng.gen_range(0..frontier.len());
            let y = frontier.swap_remove(i);
            inside[y] = true;
            members.push(y);
            for &(z, _) in self.g.neighbors(y) {
                push(z, &inside, &mut frontier, &self.allowed);
            }
        }
        members.sort_unstable();
        members
    }
}

/// `ĉ = min λ₁(Ω) V(Ω)^{2/D}` over sampled `Ω`.
///
/// The minimum over a sample bounds the best Faber-Krahn constant from above.
pub fn faber_krahn_scan(
    g: &WeightedGraph,
    dimension: f64,
    sampler: &SamplerConfig,
    seed: u64,
) -> Result<FkScan> {
    if !(dimension > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "D must be positive, got {dimension}"
        )));
    }
    if sampler.samples == 0 || sampler.kinds.is_empty() {
        return Err(Error::InsufficientData("sampler has no budget".into()));
    }
    let draw = Sampler::new(g, sampler.max_size)?;
    let mut rng = seed::rng(seed);
    let mut samples = Vec::with_capacity(sampler.samples);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for i in 0..sampler.samples {
        let kind = sampler.kinds[i % sampler.kinds.len()];
        let members = draw.draw(kind, &mut rng);
        let set = VertexSet::new(g, members)?;
        let lambda1 = dirichlet_lambda1(g, &set)?.lambda1;
        let value = lambda1 * libm::pow(set.volume, 2.0 / dimension);
        samples.push(FkSample {
            kind,
            size: set.len(),
            volume: set.volume,
            lambda1,
            value,
        });
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, set.members));
        }
    }
    let (value, members) =
        best.ok_or_else(|| Error::InsufficientData("sampler exhausted".into()))?;
    Ok(FkScan {
        estimate: ConstantEstimate {
            tag: InequalityTag::FaberKrahn,
            dimension,
            epsilon: None,
            nu: None,
            value,
            witness: Witness::Set { members },
            method: String::from("dirichlet-eigen/sampled-sets"),
            seed,
            direction: Direction::UpperBound,
        },
        samples,
    })
}

/// Relative variant: `min λ₁(Ω) r² (V(Ω)/V(x,r))^ν` over `Ω ⊆ B(x,r)`.
pub fn faber_krahn_relative_scan(
    g: &WeightedGraph,
    nu: f64,
    sampler: &SamplerConfig,
    seed: u64,
) -> Result<FkScan> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ν must be positive, got {nu}"
        )));
    }
    if sampler.samples == 0 {
        return Err(Error::InsufficientData("sampler has no budget".into()));
    }
    let draw = Sampler::new(g, sampler.max_size)?;
    let mut rng = seed::rng(seed);
    let mut samples = Vec::with_capacity(sampler.samples);
    let mut best: Option<(f64, usize, usize, Vec<usize>)> = None;
    for i in 0..sampler.samples {
        let x = *draw.interior.choose(&mut rng).unwrap_or(&0);
        let r_cap = draw.max_radius(x);
        if r_cap == 0 {
            continue;
        }
        let r = rng.gen_range(1..=r_cap);
        let ball = draw.ball(x, r).unwrap_or_else(|| vec![x]);
        let ball_set = VertexSet::new(g, ball.clone())?;
        let (kind, members) = if i % 2 == 0 {
            (SetKind::Ball, ball)
        } else {
            let sub = Sampler {
                g,
                interior: ball.clone(),
                allowed: (0..g.len())
                    .map(|y| ball.binary_search(&y).is_ok())
                    .collect(),
                max_size: ball.len(),
            };
            (SetKind::RandomConnected, sub.grow(x, &mut rng))
        };
        let set = VertexSet::new(g, members)?;
        let lambda1 = dirichlet_lambda1(g, &set)?.lambda1;
        let value = relative_value(lambda1, r, set.volume, ball_set.volume, nu);
        samples.push(FkSample {
            kind,
            size: set.len(),
            volume: set.volume,
            lambda1,
            value,
        });
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, x, r, set.members));
        }
    }
    let (value, center, radius, members) =
        best.ok_or_else(|| Error::InsufficientData("sampler exhausted".into()))?;
    Ok(FkScan {
        estimate: ConstantEstimate {
            tag: InequalityTag::FaberKrahnRelative,
            dimension: 2.0 / nu,
            epsilon: None,
            nu: Some(nu),
            value,
            witness: Witness::RelativeSet {
                center,
                radius,
                members,
            },
            method: String::from("dirichlet-eigen/sampled-subballs"),
            seed,
            direction: Direction::UpperBound,
        },
        samples,
    })
}

pub(crate) fn relative_value(lambda1: f64, r: usize, vol: f64, ball_vol: f64, nu: f64) -> f64 {
    let r = r as f64;
    lambda1 * r * r * libm::pow(vol / ball_vol, nu)
}
