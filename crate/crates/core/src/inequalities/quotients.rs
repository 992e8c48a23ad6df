// SPDX-License-Identifier: Apache-2.0

//! Nash and Sobolev quotients, entropy and log-Sobolev gaps.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::family::FamilyMember;
use super::{ConstantEstimate, Direction, InequalityTag, Witness};
use crate::error::{Error, Result};
use crate::forms::energy;
use crate::graph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quotients {
    /// `‖f‖₂^{2+4/D} / (⟨Γ(f)⟩ ‖f‖₁^{4/D})`.
    pub nash: f64,
    /// `‖f‖²_{2D/(D-2)} / ⟨Γ(f)⟩`, only for `D > 2`.
    pub sobolev: Option<f64>,
}

pub fn nash_quotient(g: &WeightedGraph, f: &[f64], dimension: f64) -> Result<f64> {
    let e = checked_energy(g, f)?;
    let n1 = g.norm(f, 1.0);
    let n2 = g.norm(f, 2.0);
    // Ratios first; the raw powers under- or overflow for large D.
    Ok(libm::pow(n2 / n1, 4.0 / dimension) * n2 * n2 / e)
}

pub fn sobolev_quotient(g: &WeightedGraph, f: &[f64], dimension: f64) -> Result<f64> {
    if !(dimension > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "the Sobolev quotient needs D > 2, got {dimension}"
        )));
    }
    let e = checked_energy(g, f)?;
    let q = g.norm(f, 2.0 * dimension / (dimension - 2.0));
    Ok(q * q / e)
}

pub fn functional_quotients(g: &WeightedGraph, f: &[f64], dimension: f64) -> Result<Quotients> {
    if !(dimension > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "D must be positive, got {dimension}"
        )));
    }
    let nash = nash_quotient(g, f, dimension)?;
    let sobolev = if dimension > 2.0 {
        Some(sobolev_quotient(g, f, dimension)?)
    } else {
        None
    };
    Ok(Quotients { nash, sobolev })
}

fn checked_energy(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::InvalidParameter(
            "function length differs from vertex count".into(),
        ));
    }
    let e = energy(g, f);
    if !(e > 0.0) {
        return Err(Error::Degenerate(
            "⟨Γ(f)⟩ = 0; f is constant on every component".into(),
        ));
    }
    Ok(e)
}

/// Sup of a quotient over a family; members with zero energy are skipped.
fn quotient_sup(
    family: &[FamilyMember],
    dimension: f64,
    tag: InequalityTag,
    eval: impl Fn(&[f64]) -> Result<f64>,
) -> Result<ConstantEstimate> {
    let mut best: Option<(f64, &FamilyMember)> = None;
    for m in family {
        if m.values.iter().any(|&v| v < 0.0) {
            continue;
        }
        match eval(&m.values) {
            Ok(q) if best.is_none_or(|(b, _)| q > b) => best = Some((q, m)),
            Ok(_) | Err(Error::Degenerate(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let (value, member) = best
        .ok_or_else(|| Error::InsufficientData("no family member with positive energy".into()))?;
    Ok(ConstantEstimate {
        tag,
        dimension,
        epsilon: None,
        nu: None,
        value,
        witness: Witness::Function {
            label: member.label.clone(),
            values: member.values.clone(),
        },
        method: String::from("family-sup"),
        seed: member.seed,
        direction: Direction::LowerBound,
    })
}

/// Largest Nash quotient over nonnegative family members.
pub fn nash_estimate(
    g: &WeightedGraph,
    family: &[FamilyMember],
    dimension: f64,
) -> Result<ConstantEstimate> {
    quotient_sup(family, dimension, InequalityTag::Nash, |f| {
        nash_quotient(g, f, dimension)
    })
}

/// Largest Sobolev quotient over nonnegative family members.
pub fn sobolev_estimate(
    g: &WeightedGraph,
    family: &[FamilyMember],
    dimension: f64,
) -> Result<ConstantEstimate> {
    quotient_sup(family, dimension, InequalityTag::Sobolev, |f| {
        sobolev_quotient(g, f, dimension)
    })
}

/// `⟨f² log f⟩ - ‖f‖₂² log ‖f‖₂` for `f >= 0`, with `0 log 0 = 0`.
pub fn entropy(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    if let Some(x) = f.iter().position(|&v| !(v >= 0.0)) {
        return Err(Error::Negative(x));
    }
    let n2 = g.inner(f, f);
    if n2 == 0.0 {
        return Err(Error::Degenerate("f vanishes identically".into()));
    }
    let mut s = 0.0;
    for (x, &v) in f.iter().enumerate() {
        if v > 0.0 {
            s += g.measure(x) * v * v * libm::log(v);
        }
    }
    Ok(s - 0.5 * n2 * libm::log(n2))
}

/// `entropy(f) - ε⟨Γ(f)⟩`.
pub fn lsi_gap(g: &WeightedGraph, f: &[f64], eps: f64) -> Result<f64> {
    Ok(entropy(g, f)? - eps * energy(g, f))
}

/// Scale-free LSI data of one family member: `entropy/‖f‖²` and `⟨Γ(f)⟩/‖f‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsiLine {
    pub label: String,
    pub entropy: f64,
    pub energy: f64,
}

impl LsiLine {
    pub fn at(&self, eps: f64) -> f64 {
        self.entropy - eps * self.energy
    }
}

/// `β_empirical(ε) = max_f (entropy(f) - ε⟨Γ(f)⟩)/‖f‖²` as an upper envelope of lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsiProfile {
    pub lines: Vec<LsiLine>,
}

impl LsiProfile {
    pub fn new(g: &WeightedGraph, family: &[FamilyMember]) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InsufficientData("empty test-function family".into()));
        }
        let lines = family
            .iter()
            .map(|m| {
                let n2 = g.inner(&m.values, &m.values);
                Ok(LsiLine {
                    label: m.label.clone(),
                    entropy: entropy(g, &m.values)? / n2,
                    energy: energy(g, &m.values) / n2,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { lines })
    }

    /// Index of the maximizing member.
    pub fn argmax(&self, eps: f64) -> usize {
        let mut best = 0;
        for (i, l) in self.lines.iter().enumerate() {
            if l.at(eps) > self.lines[best].at(eps) {
                best = i;
            }
        }
        best
    }

    pub fn beta(&self, eps: f64) -> f64 {
        self.lines[self.argmax(eps)].at(eps)
    }

    /// Every member has zero energy, so `β` is flat and carries no slope.
    pub fn is_degenerate(&self) -> bool {
        self.lines.iter().all(|l| l.energy == 0.0)
    }

    /// `ε` values where the maximizing line changes, inside `(lo, hi)`.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut eps = lo;
        let mut current = self.argmax(lo);
        // The envelope is convex: the maximizer's energy strictly decreases.
        loop {
            let cur = &self.lines[current];
            let mut next: Option<(f64, usize)> = None;
            for (i, l) in self.lines.iter().enumerate() {
                if l.energy < cur.energy {
                    let cross = (cur.entropy - l.entropy) / (cur.energy - l.energy);
                    if cross > eps && next.is_none_or(|(c, _)| cross < c) {
                        next = Some((cross, i));
                    }
                }
            }
            match next {
                Some((c, i)) if c < hi => {
                    out.push(c);
                    eps = c;
                    current = i;
                }
                _ => break,
            }
        }
        out
    }
}

/// `β_empirical(ε)` with its maximizing member as witness.
pub fn beta_empirical(
    g: &WeightedGraph,
    eps: f64,
    family: &[FamilyMember],
) -> Result<ConstantEstimate> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ε must be positive, got {eps}"
        )));
    }
    let profile = LsiProfile::new(g, family)?;
    Ok(beta_estimate(&profile, family, eps))
}

pub(crate) fn beta_estimate(
    profile: &LsiProfile,
    family: &[FamilyMember],
    eps: f64,
) -> ConstantEstimate {
    let i = profile.argmax(eps);
    ConstantEstimate {
        tag: InequalityTag::LsBeta,
        dimension: f64::NAN,
        epsilon: Some(eps),
        nu: None,
        value: profile.lines[i].at(eps),
        witness: Witness::Function {
            label: family[i].label.clone(),
            values: family[i].values.clone(),
        },
        method: String::from("family-sup"),
        seed: family[i].seed,
        direction: Direction::LowerBound,
    }
}

/// `β_empirical` on a grid of `ε`.
pub fn beta_grid(
    g: &WeightedGraph,
    eps: &[f64],
    family: &[FamilyMember],
) -> Result<(LsiProfile, Vec<ConstantEstimate>)> {
    if let Some(e) = eps.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "ε must be positive, got {e}"
        )));
    }
    let profile = LsiProfile::new(g, family)?;
    let est = eps
        .iter()
        .map(|&e| beta_estimate(&profile, family, e))
        .collect();
    Ok((profile, est))
}
