// SPDX-License-Identifier: Apache-2.0

//! Configuration, file formats and the analysis driver behind the `ultracon`
//! command line tool.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod config;
pub mod edgelist;
pub mod error;
pub mod report;
pub mod suite;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use report::{emit_plotdata, Report};
pub use suite::{run_analyses, run_suite, Analysis, RunOptions};
