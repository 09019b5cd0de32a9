//! Near-critical Hurst regime: as H climbs toward 1/2 the variance blows up
//! like 1/(1 - 2H), and (1 - 2H) Var approaches the gauge of half the polar
//! projection body. Halving the body as a set doubles its gauge, so the
//! limit equals twice the shadow-area gauge. The whole check is
//! deterministic quadrature.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{polar_projection_body, ConvexBody, StarBody};
use crate::poisson::fractional_variance;
use crate::report::Report;

/// Evaluates `(1 - 2H) Var xi(z)` along the increasing `h_values` and
/// requires the relative gap to the limit gauge to shrink at every step and
/// to end below two percent.
pub fn conv_half_report(
    name: &str,
    body: &ConvexBody,
    h_values: &[f64],
    z: &[f64],
    grid_n: usize,
    seed: u64,
) -> Result<Report> {
    let started = Instant::now();
    if h_values.len() < 2 || h_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "need at least two strictly increasing Hurst values".into(),
        ));
    }
    let tol = 0.02;
    let mut report = Report::new(name, tol, seed);

    let grid = super::direction_grid(body.dim(), grid_n)?;
    let ppb = polar_projection_body(body, &grid)?;
    let limit = StarBody::scaled_by(0.5, ppb)?;
    let target = limit.gauge(z)?;
    report.push("limit-gauge", target, 0.0);

    let mut gaps = Vec::with_capacity(h_values.len());
    for &h in h_values {
        let v = (1.0 - 2.0 * h) * fractional_variance(body, h, z)?;
        let gap = ((v - target) / target).abs();
        report.push(format!("scaled-variance-h{h}"), v, 0.0);
        report.push(format!("relative-gap-h{h}"), gap, 0.0);
        gaps.push(gap);
    }
    for w in gaps.windows(2) {
        report.require(w[1] < w[0]);
    }
    report.require(*gaps.last().expect("two or more values") < tol);

    report.runtime_s = started.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_scaled_variance_approaches_twice_the_shadow_gauge() {
        let report = conv_half_report(
            "conv-half-square",
            &ConvexBody::unit_square(),
            &[0.40, 0.45, 0.49, 0.499],
            &[1.0, 0.0],
            720,
            5,
        )
        .unwrap();
        assert!(report.pass, "{report:?}");
        let target = report.quantity("limit-gauge").unwrap().value;
        // Unit-width shadow in the axis direction, so the limit is 2.
        assert!((target - 2.0).abs() < 0.01, "{target}");
        let v = report.quantity("scaled-variance-h0.4").unwrap().value;
        assert!((v - 2.5).abs() < 1e-10, "{v}");
    }

    #[test]
    fn disc_limit_is_twice_the_diameter() {
        let report = conv_half_report(
            "conv-half-disc",
            &ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap(),
            &[0.40, 0.45, 0.49, 0.499],
            &[1.0, 0.0],
            720,
            5,
        )
        .unwrap();
        assert!(report.pass, "{report:?}");
        let target = report.quantity("limit-gauge").unwrap().value;
        assert!((target - 4.0).abs() < 1e-9, "{target}");
    }

    #[test]
    fn decreasing_h_values_are_rejected() {
        let err = conv_half_report(
            "conv-half-bad",
            &ConvexBody::unit_square(),
            &[0.45, 0.40],
            &[1.0, 0.0],
            64,
            5,
        )
        .unwrap_err();
        assert!(err.to_string().contains("increasing"), "{err}");
    }
}
