//! Machine-readable verification reports: a named pass/fail with the
//! measured quantities that justify the verdict.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Quantity {
    pub label: String,
    pub value: f64,
    /// Standard error of `value`; 0.0 for deterministic quantities.
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub pass: bool,
    pub quantities: Vec<Quantity>,
    /// The acceptance threshold the check was run against, in the units
    /// stated by the quantity labels (sigmas or relative error).
    pub tolerance: f64,
    pub seed: u64,
    /// Wall-clock duration; informational only, excluded from any
    /// determinism guarantees.
    pub runtime_s: f64,
}

impl Report {
    pub fn new(name: impl Into<String>, tolerance: f64, seed: u64) -> Report {
        Report {
            name: name.into(),
            pass: true,
            quantities: Vec::new(),
            tolerance,
            seed,
            runtime_s: 0.0,
        }
    }

    pub fn push(&mut self, label: impl Into<String>, value: f64, stderr: f64) {
        self.quantities.push(Quantity {
            label: label.into(),
            value,
            stderr,
        });
    }

    /// Record a sub-check: failing once latches `pass` to false.
    pub fn require(&mut self, ok: bool) {
        self.pass = self.pass && ok;
    }

    pub fn quantity(&self, label: &str) -> Option<&Quantity> {
        self.quantities.iter().find(|q| q.label == label)
    }
}

/// Rows of per-path values as CSV: header `path,p0(x;y),p1(x;y),...` naming
/// each column by its evaluation point, then one row per path. Float cells
/// use the shortest representation that round-trips, so equal numbers
/// always produce identical bytes.
pub fn paths_to_csv<T: std::fmt::Display>(points: &[Vec<f64>], paths: &[Vec<T>]) -> String {
    use std::fmt::Write;
    let mut out = String::from("path");
    for (j, point) in points.iter().enumerate() {
        let _ = write!(out, ",p{j}(");
        for (k, c) in point.iter().enumerate() {
            if k > 0 {
                out.push(';');
            }
            let _ = write!(out, "{c}");
        }
        out.push(')');
    }
    out.push('\n');
    for (i, row) in paths.iter().enumerate() {
        let _ = write!(out, "{i}");
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}
