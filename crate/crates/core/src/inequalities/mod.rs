// SPDX-License-Identifier: Apache-2.0

//! Dirichlet eigenvalues, functional-inequality constants and the chains
//! linking them to heat-kernel decay.
//!
//! Brackets are measure-weighted, `⟨u⟩ = Σ_x m(x) u(x)`, so that
//! `⟨Γ(f)⟩ = -⟨f, Δf⟩`. Constants found by searching a finite family are
//! one-sided; [`Direction`] says which side.

pub mod beta;
pub mod chains;
pub mod dirichlet;
pub mod family;
pub mod quotients;

pub use beta::{beta_logfit, davies_simon_m, BetaCurve, BetaFit};
pub use chains::{
    chain_check, lsi_p_margin, lsi_p_version_check, ChainCheckRecord, ChainInputs, ChainParams,
    ChainPoint, ChainTag, CHAIN_SLACK,
};
pub use dirichlet::{
    dirichlet_lambda1, faber_krahn_relative_scan, faber_krahn_scan, DirichletEigen, FkSample,
    FkScan, SamplerConfig, SetKind,
};
pub use family::{geometric_grid, members_from, FamilyKind, FamilyMember, TestFunctionFamily};
pub use quotients::{
    beta_empirical, beta_grid, entropy, functional_quotients, lsi_gap, nash_estimate,
    nash_quotient, sobolev_estimate, sobolev_quotient, LsiLine, LsiProfile, Quotients,
};

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityTag {
    #[serde(rename = "S")]
    Sobolev,
    #[serde(rename = "N")]
    Nash,
    #[serde(rename = "FK")]
    FaberKrahn,
    #[serde(rename = "FK*")]
    FaberKrahnRelative,
    #[serde(rename = "LS-beta")]
    LsBeta,
}

/// Which side of the optimal constant a search result lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// A sup over witnesses: the best constant is at least this.
    LowerBound,
    /// A min over witnesses: the best constant is at most this.
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Function {
        label: String,
        values: Vec<f64>,
    },
    Set {
        members: Vec<usize>,
    },
    RelativeSet {
        center: usize,
        radius: usize,
        members: Vec<usize>,
    },
    Omitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub tag: InequalityTag,
    pub dimension: f64,
    pub epsilon: Option<f64>,
    pub nu: Option<f64>,
    pub value: f64,
    pub witness: Witness,
    pub method: String,
    pub seed: u64,
    pub direction: Direction,
}

impl ConstantEstimate {
    /// Recomputes the defining quotient on the stored witness.
    pub fn reevaluate(&self, g: &WeightedGraph) -> Result<f64> {
        match (&self.witness, self.tag) {
            (Witness::Function { values, .. }, InequalityTag::Nash) => {
                nash_quotient(g, values, self.dimension)
            }
            (Witness::Function { values, .. }, InequalityTag::Sobolev) => {
                sobolev_quotient(g, values, self.dimension)
            }
            (Witness::Function { values, .. }, InequalityTag::LsBeta) => {
                let eps = self
                    .epsilon
                    .ok_or_else(|| Error::InvalidParameter("LS estimate without ε".into()))?;
                Ok(lsi_gap(g, values, eps)? / g.inner(values, values))
            }
            (Witness::Set { members }, InequalityTag::FaberKrahn) => {
                let set = VertexSet::new(g, members.clone())?;
                let l = dirichlet_lambda1(g, &set)?.lambda1;
                Ok(l * libm::pow(set.volume, 2.0 / self.dimension))
            }
            (
                Witness::RelativeSet {
                    center,
                    radius,
                    members,
                },
                InequalityTag::FaberKrahnRelative,
            ) => {
                let nu = self
                    .nu
                    .ok_or_else(|| Error::InvalidParameter("FK* estimate without ν".into()))?;
                let set = VertexSet::new(g, members.clone())?;
                let ball = crate::graph::ball_volume(g, *center, *radius)?;
                let l = dirichlet_lambda1(g, &set)?.lambda1;
                Ok(dirichlet::relative_value(
                    l,
                    *radius,
                    set.volume,
                    ball.volume,
                    nu,
                ))
            }
            _ => Err(Error::InvalidParameter(
                "witness kind does not match the inequality".into(),
            )),
        }
    }

    /// Drops the witness payload.
    pub fn without_witness(mut self) -> Self {
        self.witness = Witness::Omitted;
        self
    }
}
