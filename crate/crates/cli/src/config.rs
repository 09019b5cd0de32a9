//! JSON envelopes accepted by the subcommands, and the resolved experiment
//! configuration written next to every artifact. All parsing is strict:
//! unknown fields are errors that name the offending field.

use serde::{Deserialize, Serialize};

use minkfield::gaussian::{SimMethod, Variant};
use minkfield::geometry::{ConvexBody, StarBody};
use minkfield::poisson::PoissonFieldSpec;
use minkfield::verify::Budgets;

/// Spec for `simulate-gauss`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussRunSpec {
    #[serde(rename = "H")]
    pub hurst: f64,
    pub body: StarBody,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    pub points: Vec<Vec<f64>>,
    #[serde(default = "default_method")]
    pub method: SimMethod,
    /// Replicates; may instead come from the `--n-paths` flag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
}

fn default_variant() -> Variant {
    Variant::Standard
}

fn default_method() -> SimMethod {
    SimMethod::Cholesky
}

/// Spec for `simulate-poisson`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonRunSpec {
    pub field: PoissonFieldSpec,
    pub points: Vec<Vec<f64>>,
    /// Replicates; may instead come from the `--n-paths` flag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
}

/// Spec for `body gauge`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub body: StarBody,
    pub at: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// Shadow-area gauge; deterministic.
    PolarProjection,
    /// Radial pth mean body, Monte Carlo; needs `p` and a seed.
    RadialMean,
    /// Star body whose gauge^{2H} is the field variance; needs `H` and a
    /// seed.
    Associated,
}

impl TransformKind {
    pub fn label(self) -> &'static str {
        match self {
            TransformKind::PolarProjection => "polar-projection",
            TransformKind::RadialMean => "radial-mean",
            TransformKind::Associated => "associated",
        }
    }

    pub fn is_stochastic(self) -> bool {
        !matches!(self, TransformKind::PolarProjection)
    }
}

/// Spec for `body transform`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSpec {
    pub body: ConvexBody,
    pub transform: TransformKind,
    /// Exponent in (−1, 0) for the radial mean transform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Hurst index for the associated-body transform.
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
}

/// The fully resolved configuration of one invocation, written as the
/// artifact sidecar so every output can be reproduced from its neighbour
/// file alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    pub spec: serde_json::Value,
    /// Absent only for fully deterministic commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub output_dir: String,
    #[serde(default)]
    pub budgets: Budgets,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_spec_rejects_unknown_fields() {
        let bad = r#"{"H":0.25,"body":{"type":"lp_ball","p":1.0,"scales":[1,1]},
                      "points":[[1,0]],"mthd":"cholesky"}"#;
        let err = serde_json::from_str::<GaussRunSpec>(bad).unwrap_err();
        assert!(err.to_string().contains("mthd"), "{err}");
    }

    #[test]
    fn gauss_spec_defaults_fill_in() {
        let ok = r#"{"H":0.25,"body":{"type":"lp_ball","p":1.0,"scales":[1,1]},
                     "points":[[1,0],[0,1]]}"#;
        let spec: GaussRunSpec = serde_json::from_str(ok).unwrap();
        assert_eq!(spec.variant, Variant::Standard);
        assert_eq!(spec.method, SimMethod::Cholesky);
        assert!(spec.n_paths.is_none());
    }

    #[test]
    fn experiment_config_round_trips() {
        let config = ExperimentConfig {
            command: "verify".into(),
            spec: serde_json::json!({"target": "suite"}),
            seed: Some(7),
            output_dir: "out".into(),
            budgets: Budgets::default(),
        };
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.command, "verify");
        assert_eq!(back.seed, Some(7));
    }

    #[test]
    fn transform_spec_parses_each_kind() {
        let body = r#"{"type":"box","lower":[0,0],"upper":[1,1]}"#;
        for (kind, extra) in [
            ("polar_projection", ""),
            ("radial_mean", r#","p":-0.5"#),
            ("associated", r#","H":0.25"#),
        ] {
            let text = format!(r#"{{"body":{body},"transform":"{kind}"{extra}}}"#);
            let spec: TransformSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(
                spec.transform.is_stochastic(),
                kind != "polar_projection"
            );
        }
    }
}
