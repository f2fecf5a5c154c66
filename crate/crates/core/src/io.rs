//! Loading and saving spaces: CSV distance matrices, JSON spaces, graph JSON.
//!
//! CSV layout: a header row of labels, then `n` rows of `n` comma-separated
//! reals. JSON layouts: `{"labels": [...], "dist": [[...], ...]}` for spaces
//! and `{"n": int, "edges": [[i, j, w], ...]}` for weighted graphs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{FiniteMetricSpace, MetricError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
    #[error("ParseError: line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("ParseError: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A parsed but not yet validated space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawSpace {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

impl RawSpace {
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        Self {
            labels: space.labels().to_vec(),
            dist: space.matrix(),
        }
    }

    /// Validates against the metric axioms with the given slack.
    pub fn validate(self, tol: f64) -> Result<FiniteMetricSpace, MetricError> {
        FiniteMetricSpace::validated(self.labels, &self.dist, tol)
    }
}

/// Weighted-graph input for tree/graph metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

pub fn parse_csv(text: &str) -> Result<RawSpace, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(IoError::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut dist = Vec::with_capacity(labels.len());
    for (idx, line) in lines {
        let row: Result<Vec<f64>, _> = line
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect();
        let row = row.map_err(|e| IoError::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        dist.push(row);
    }
    if dist.len() != labels.len() {
        return Err(IoError::Parse {
            line: 1,
            msg: format!("{} labels but {} matrix rows", labels.len(), dist.len()),
        });
    }
    Ok(RawSpace { labels, dist })
}

pub fn write_csv(space: &FiniteMetricSpace) -> String {
    let mut out = String::new();
    out.push_str(&space.labels().join(","));
    out.push('\n');
    for i in 0..space.len() {
        let row: Vec<String> = space
            .row(crate::PointId(i))
            .iter()
            .map(|v| format!("{v}"))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn load_csv(path: &Path) -> Result<RawSpace, IoError> {
    parse_csv(&fs::read_to_string(path)?)
}

pub fn save_csv(space: &FiniteMetricSpace, path: &Path) -> Result<(), IoError> {
    Ok(fs::write(path, write_csv(space))?)
}

pub fn load_json(path: &Path) -> Result<RawSpace, IoError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn load_graph_json(path: &Path) -> Result<RawGraph, IoError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Loads a space by extension: `.json` as a JSON space, anything else as CSV.
pub fn load_space(path: &Path) -> Result<RawSpace, IoError> {
    if path.extension().map(|e| e == "json").unwrap_or(false) {
        load_json(path)
    } else {
        load_csv(path)
    }
}
