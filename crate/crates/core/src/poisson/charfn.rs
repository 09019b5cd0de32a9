//! Empirical characteristic function and its Skellam reference law.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::mean_with_sem;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CharFnPoint {
    pub t: f64,
    pub phi: f64,
    pub stderr: f64,
}

/// Real part of the empirical characteristic function at each t. The fields
/// here are symmetric, so the imaginary part has zero mean and the real part
/// carries the whole law; at t = 0 the value is exactly one.
pub fn empirical_char_function(samples: &[f64], ts: &[f64]) -> Result<Vec<CharFnPoint>> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one sample for the characteristic function".into(),
        ));
    }
    if samples.iter().any(|x| !x.is_finite()) || ts.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite {
            context: "characteristic function input".into(),
        });
    }
    Ok(ts
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return CharFnPoint {
                    t,
                    phi: 1.0,
                    stderr: 0.0,
                };
            }
            let cosines: Vec<f64> = samples.iter().map(|&x| (t * x).cos()).collect();
            let (phi, stderr) = mean_with_sem(&cosines);
            CharFnPoint { t, phi, stderr }
        })
        .collect())
}

/// log E e^{itX} for X = N₁ − N₂ with independent N_i ~ Poisson(variance/2).
/// Every single-point marginal of the unit-jump fields is Skellam with this
/// parameter, so exp of this is the exact characteristic function.
pub fn skellam_log_char(variance: f64, t: f64) -> f64 {
    variance * (t.cos() - 1.0)
}
