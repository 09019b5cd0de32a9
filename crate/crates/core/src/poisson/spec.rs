//! Specifications for the integer-valued shot-noise fields and the batch
//! container their simulations produce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, SpectralMeasure};
use crate::report::paths_to_csv;

/// A shot-noise random field of unit jumps driven by a Poisson process on
/// (location, scale) pairs, evaluated as counts in a scaled body at the
/// argument minus counts in the scaled body at the origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PoissonFieldSpec {
    /// Scale intensity r^{2H−d−1} dr with 0 < hurst < 1/2; the field has
    /// stationary increments and variance |z|^{2H}·chord integral.
    Fractional { hurst: f64, body: ConvexBody },
    /// Exponent index p > 1/2 with the scale variable capped at `cap`
    /// (the uncapped mass would be infinite).
    Truncated { p: f64, cap: f64, body: ConvexBody },
    /// Independent one-dimensional fractional fields along the atoms of a
    /// spectral measure, evaluated at ⟨z, v⟩ per atom v and summed.
    Directional {
        hurst: f64,
        measure: SpectralMeasure,
    },
}

impl PoissonFieldSpec {
    pub fn dim(&self) -> usize {
        match self {
            PoissonFieldSpec::Fractional { body, .. } => body.dim(),
            PoissonFieldSpec::Truncated { body, .. } => body.dim(),
            PoissonFieldSpec::Directional { measure, .. } => measure.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PoissonFieldSpec::Fractional { hurst, .. }
            | PoissonFieldSpec::Directional { hurst, .. } => {
                if !(*hurst > 0.0 && *hurst < 0.5) {
                    return Err(Error::InvalidParameter(format!(
                        "fractional field needs 0 < hurst < 1/2, got {hurst}"
                    )));
                }
            }
            PoissonFieldSpec::Truncated { p, cap, .. } => {
                if !(*p > 0.5 && p.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "truncated field needs p > 1/2, got {p}"
                    )));
                }
                if !(*cap > 0.0 && cap.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "truncated field needs a positive finite cap, got {cap}"
                    )));
                }
            }
        }
        if let PoissonFieldSpec::Directional { measure, .. } = self {
            if measure.is_empty() {
                return Err(Error::EmptyMeasure);
            }
        }
        Ok(())
    }
}

/// Aggregate proposal statistics over all replicates of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counters {
    /// Envelope proposals drawn.
    pub proposals: u64,
    /// Proposals surviving the thinning step (actual Poisson points).
    pub kept: u64,
    /// Mean number of evaluation points a kept point contributes to.
    pub mean_contributing: f64,
}

/// Joint samples of a shot-noise field at fixed evaluation points; one row
/// per replicate, integer-valued by construction.
#[derive(Debug, Clone, Serialize)]
pub struct PoissonSampleBatch {
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub paths: Vec<Vec<i64>>,
    pub counters: Counters,
}

impl PoissonSampleBatch {
    /// All replicate values at evaluation point j.
    pub fn column(&self, j: usize) -> Vec<i64> {
        self.paths.iter().map(|row| row[j]).collect()
    }

    /// Same column widened for the statistics helpers.
    pub fn column_f64(&self, j: usize) -> Vec<f64> {
        self.paths.iter().map(|row| row[j] as f64).collect()
    }

    /// CSV with one `path` row per replicate, matching the Gaussian batches.
    pub fn to_csv(&self) -> String {
        paths_to_csv(&self.points, &self.paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_round_trip() {
        let spec = PoissonFieldSpec::Fractional {
            hurst: 0.25,
            body: ConvexBody::unit_square(),
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"fractional\""));
        let back: PoissonFieldSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.dim(), 2);
        back.validate().unwrap();
    }

    #[test]
    fn unknown_fields_and_bad_kinds_are_rejected() {
        let with_extra = r#"{
            "kind": "truncated", "p": 1.0, "cap": 10.0, "typo": 1,
            "body": {"type": "ball", "center": [0.0, 0.0], "radius": 1.0}
        }"#;
        assert!(serde_json::from_str::<PoissonFieldSpec>(with_extra).is_err());
        let bad_kind = r#"{"kind": "stable", "hurst": 0.25}"#;
        assert!(serde_json::from_str::<PoissonFieldSpec>(bad_kind).is_err());
    }

    #[test]
    fn parameter_ranges_are_enforced() {
        let square = ConvexBody::unit_square();
        let too_high = PoissonFieldSpec::Fractional {
            hurst: 0.5,
            body: square.clone(),
        };
        assert!(too_high.validate().is_err());
        let low_p = PoissonFieldSpec::Truncated {
            p: 0.5,
            cap: 10.0,
            body: square.clone(),
        };
        assert!(low_p.validate().is_err());
        let bad_cap = PoissonFieldSpec::Truncated {
            p: 1.0,
            cap: 0.0,
            body: square,
        };
        assert!(bad_cap.validate().is_err());
    }

    #[test]
    fn batch_csv_matches_frozen_layout() {
        let batch = PoissonSampleBatch {
            points: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            seed: 7,
            paths: vec![vec![1, -2], vec![0, 3]],
            counters: Counters {
                proposals: 5,
                kept: 4,
                mean_contributing: 1.25,
            },
        };
        assert_eq!(batch.to_csv(), "path,p0(1;0),p1(0;1)\n0,1,-2\n1,0,3\n");
        assert_eq!(batch.column(1), vec![-2, 3]);
        assert_eq!(batch.column_f64(0), vec![1.0, 0.0]);
    }
}
