//! Three routes to the variance of the compensated Poisson field at a point:
//! direct simulation, fiber quadrature, and the gauge of the radial mean
//! body. Their agreement ties the simulated field to the Gaussian model,
//! whose kernel is defined through that same gauge.

use std::time::Instant;

use crate::error::Result;
use crate::geometry::vec::{norm, normalized};
use crate::geometry::{radial_pth_mean_body, ConvexBody, StarBody};
use crate::poisson::{simulate, variance_quadrature, PoissonFieldSpec};
use crate::report::Report;
use crate::rng::derive_seed;
use crate::stats::variance_with_sem;

/// Compares, at one evaluation point `z`, the sample variance of the
/// fractional field, the quadrature value, and `Vol(K)/H` times the
/// `2H`-th power of the radial `(-2H)`-mean-body gauge. The mean body is
/// estimated by Monte Carlo on its own stream, so the geometric route is
/// independent of the field simulation. Each `alt_directions` entry adds a
/// quadrature evaluation that must match the main one to within rounding
/// (used for rotation-invariant bodies, where the variance cannot depend on
/// direction).
#[allow(clippy::too_many_arguments)]
pub fn equivalence_report(
    name: &str,
    body: &ConvexBody,
    hurst: f64,
    z: &[f64],
    alt_directions: &[Vec<f64>],
    n_paths: usize,
    n_samples: usize,
    grid_n: usize,
    seed: u64,
) -> Result<Report> {
    let started = Instant::now();
    let sigma = 3.0;
    let mut report = Report::new(name, sigma, seed);

    let spec = PoissonFieldSpec::Fractional {
        hurst,
        body: body.clone(),
    };
    let quad = variance_quadrature(&spec, z)?;
    report.push("variance-quadrature", quad, 0.0);

    let batch = simulate(
        &spec,
        &[z.to_vec()],
        n_paths,
        derive_seed(seed, &format!("{name}-mc")),
    )?;
    let (v_mc, se_mc) = variance_with_sem(&batch.column_f64(0));
    report.push("variance-simulated", v_mc, se_mc);

    let mut grid = super::direction_grid(body.dim(), grid_n)?;
    // Tabulated gauges interpolate between grid directions, which carries an
    // O(spacing) bias wherever the gauge has a kink; putting the evaluation
    // direction on the grid makes the lookup exact there. The weight is
    // unused, the mean-body estimate only reads directions.
    grid.nodes.push((normalized(z)?, 0.0));
    let rmb = radial_pth_mean_body(
        body,
        -2.0 * hurst,
        n_samples,
        derive_seed(seed, &format!("{name}-rmb")),
        &grid,
    )?;
    let StarBody::Tabulated { table } = &rmb else {
        unreachable!("the radial mean body is tabulated")
    };
    let (unit, unit_se) = table.unit_value(z);
    let s = norm(z);
    let gauge = s * unit;
    let factor = body.volume() / hurst;
    let v_geo = factor * gauge.powf(2.0 * hurst);
    // Delta method through gauge^{2H}.
    let se_geo = factor * 2.0 * hurst * gauge.powf(2.0 * hurst - 1.0) * s * unit_se;
    report.push("variance-geometric", v_geo, se_geo);

    report.require((v_mc - quad).abs() <= sigma * se_mc);
    report.require((v_geo - quad).abs() <= sigma * se_geo);
    report.require((v_mc - v_geo).abs() <= sigma * se_mc.hypot(se_geo));

    for (i, u) in alt_directions.iter().enumerate() {
        let scale = norm(z) / norm(u);
        let w: Vec<f64> = u.iter().map(|c| c * scale).collect();
        let v = variance_quadrature(&spec, &w)?;
        report.push(format!("variance-quadrature-alt{i}"), v, 0.0);
        report.require((v - quad).abs() <= 1e-9 * quad.abs());
    }

    report.runtime_s = started.elapsed().as_secs_f64();
    Ok(report)
}
