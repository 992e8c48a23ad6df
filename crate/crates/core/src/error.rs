// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    /// A horizon (steps, truncation order, radius) would reach a boundary-marked vertex.
    #[error("boundary guard violated: {0}")]
    GuardViolation(String),
    /// A function that must be strictly positive is not, at the given vertex.
    #[error("function is not positive at vertex {0}")]
    NonPositive(usize),
    #[error("function is negative at vertex {0}")]
    Negative(usize),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = core::result::Result<T, Error>;
