//! Large-cap limit of the truncated field (p > 1/2 with grain radii capped
//! at C): C^{1-2p} Var approaches the gauge of (p - 1/2) times the polar
//! projection body, which works out to the shadow-area gauge divided by
//! (p - 1/2). A Monte Carlo run at the largest cap cross-checks the
//! quadrature against the engine.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{polar_projection_body, ConvexBody, StarBody};
use crate::poisson::{simulate, truncated_variance, PoissonFieldSpec};
use crate::report::Report;
use crate::rng::derive_seed;
use crate::stats::variance_with_sem;

/// Evaluates `C^{1-2p} Var xi(z)` along the increasing `caps` and requires
/// the relative gap to the limit gauge to shrink at every step and to end
/// below two percent. With `n_mc_paths > 0` the largest cap also gets a
/// simulated variance that must sit within three standard errors of the
/// quadrature value.
#[allow(clippy::too_many_arguments)]
pub fn truncated_conv_report(
    name: &str,
    body: &ConvexBody,
    p: f64,
    caps: &[f64],
    z: &[f64],
    grid_n: usize,
    n_mc_paths: usize,
    seed: u64,
) -> Result<Report> {
    let started = Instant::now();
    if caps.is_empty() || caps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "need strictly increasing caps".into(),
        ));
    }
    let tol = 0.02;
    let mut report = Report::new(name, tol, seed);

    let grid = super::direction_grid(body.dim(), grid_n)?;
    let ppb = polar_projection_body(body, &grid)?;
    let limit = StarBody::scaled_by(p - 0.5, ppb)?;
    let target = limit.gauge(z)?;
    report.push("limit-gauge", target, 0.0);

    let mut gaps = Vec::with_capacity(caps.len());
    let mut largest_cap_var = f64::NAN;
    for &cap in caps {
        let v = truncated_variance(body, p, cap, z)?;
        largest_cap_var = v;
        let scaled_v = cap.powf(1.0 - 2.0 * p) * v;
        let gap = ((scaled_v - target) / target).abs();
        report.push(format!("scaled-variance-cap{cap}"), scaled_v, 0.0);
        report.push(format!("relative-gap-cap{cap}"), gap, 0.0);
        gaps.push(gap);
    }
    for w in gaps.windows(2) {
        report.require(w[1] < w[0]);
    }
    report.require(*gaps.last().expect("non-empty") < tol);

    if n_mc_paths > 0 {
        let cap = *caps.last().expect("non-empty");
        let spec = PoissonFieldSpec::Truncated {
            p,
            cap,
            body: body.clone(),
        };
        let batch = simulate(
            &spec,
            &[z.to_vec()],
            n_mc_paths,
            derive_seed(seed, &format!("{name}-mc")),
        )?;
        let (v_mc, se_mc) = variance_with_sem(&batch.column_f64(0));
        report.push("variance-simulated-largest-cap", v_mc, se_mc);
        report.push("variance-quadrature-largest-cap", largest_cap_var, 0.0);
        report.require((v_mc - largest_cap_var).abs() <= 3.0 * se_mc);
    }

    report.runtime_s = started.elapsed().as_secs_f64();
    Ok(report)
}
