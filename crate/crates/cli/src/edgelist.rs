// SPDX-License-Identifier: Apache-2.0

//! Plain-text edge lists: one `x y ω` triple per line, `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use ultracon_core::{GraphSpec, WeightedGraph};

use crate::error::{CliError, Result};

pub fn parse(text: &str, path: &Path) -> Result<GraphSpec> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CliError::EdgeList {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!(
                "expected `x y weight`, found {} fields",
                fields.len()
            )));
        }
        let x: usize = fields[0]
            .parse()
            .map_err(|e| err(format!("vertex `{}`: {e}", fields[0])))?;
        let y: usize = fields[1]
            .parse()
            .map_err(|e| err(format!("vertex `{}`: {e}", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|e| err(format!("weight `{}`: {e}", fields[2])))?;
        edges.push((x, y, w));
    }
    if edges.is_empty() {
        return Err(CliError::EdgeList {
            path: path.to_path_buf(),
            line: 0,
            message: "no edges".into(),
        });
    }
    Ok(GraphSpec::EdgeList {
        vertices: None,
        edges,
    })
}

pub fn load(path: &Path) -> Result<GraphSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading edge list {}", path.display()), e))?;
    parse(&text, path)
}

/// Inverse of [`parse`]; weights are written with round-trip precision.
pub fn render(g: &WeightedGraph) -> String {
    let mut s = format!("# {} ({} vertices)\n", g.label(), g.len());
    for (x, y, w) in g.edges() {
        let _ = writeln!(s, "{x} {y} {w:?}");
    }
    s
}
