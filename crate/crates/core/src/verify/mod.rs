//! Self-checking harness: each check computes the same quantity along two or
//! more independent routes (simulation vs quadrature vs closed form) and
//! records the comparison in a [`Report`].
//!
//! Checks are addressed by name (see [`CHECK_NAMES`]) and take a single user
//! seed; internal replicate streams are derived from it with distinct tags,
//! so the routes being compared never share randomness. Monte Carlo
//! comparisons use a three-sigma gate, deterministic limits a stated
//! relative gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, DirectionGrid, StarBody};
use crate::report::Report;

mod clt;
mod conv_half;
mod equivalence;
mod psum;
mod slepian;
mod truncated;

pub use clt::clt_rescale_report;
pub use conv_half::conv_half_report;
pub use equivalence::equivalence_report;
pub use psum::psum_report;
pub use slepian::slepian_report;
pub use truncated::truncated_conv_report;

/// Names accepted by [`run_by_name`], in suite order.
pub const CHECK_NAMES: [&str; 7] = [
    "equivalence",
    "clt",
    "conv-half",
    "truncated",
    "slepian",
    "psum",
    "scaling",
];

/// Optional budget overrides. `None` keeps the per-check default, which is
/// sized so the whole suite runs in minutes on one core.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    /// Monte Carlo replicate count for simulation-based checks.
    pub n_paths: Option<usize>,
    /// Sample-cloud size for the radial mean body estimate.
    pub n_samples: Option<usize>,
    /// Direction-grid resolution for tabulated bodies.
    pub grid: Option<usize>,
}

impl Budgets {
    fn paths(&self, default: usize) -> usize {
        self.n_paths.unwrap_or(default)
    }

    fn samples(&self, default: usize) -> usize {
        self.n_samples.unwrap_or(default)
    }

    fn grid_n(&self, default: usize) -> usize {
        self.grid.unwrap_or(default)
    }
}

/// Direction grid used for tabulated bodies in dimension `dim`.
pub(crate) fn direction_grid(dim: usize, n: usize) -> Result<DirectionGrid> {
    match dim {
        2 => DirectionGrid::half_circle(n),
        3 => DirectionGrid::fibonacci_sphere(n),
        _ => Err(Error::UnsupportedDimension {
            dim,
            op: "direction grid".into(),
        }),
    }
}

/// Runs one named check and returns its reports (several checks run a small
/// family of cases). Unknown names list the known ones in the error.
pub fn run_by_name(name: &str, seed: u64, budgets: &Budgets) -> Result<Vec<Report>> {
    let b = budgets;
    match name {
        "equivalence" => {
            let square = equivalence_report(
                "equivalence-square",
                &ConvexBody::unit_square(),
                0.25,
                &[1.0, 0.0],
                &[],
                b.paths(10_000),
                b.samples(150_000),
                b.grid_n(240),
                seed,
            )?;
            let disc = equivalence_report(
                "equivalence-disc",
                &ConvexBody::ball(vec![0.0, 0.0], 1.0)?,
                0.25,
                &[1.0, 0.0],
                &[vec![0.6, 0.8], vec![-1.0, 0.5]],
                b.paths(10_000),
                b.samples(150_000),
                b.grid_n(240),
                seed,
            )?;
            let x = std::f64::consts::FRAC_1_SQRT_2;
            let hexagon = equivalence_report(
                "equivalence-hexagon",
                &ConvexBody::regular_polygon(6, 1.0)?,
                0.3,
                &[x, x],
                &[],
                b.paths(10_000),
                b.samples(150_000),
                b.grid_n(240),
                seed,
            )?;
            Ok(vec![square, disc, hexagon])
        }
        "clt" => Ok(vec![clt_rescale_report(
            "clt-square",
            &ConvexBody::unit_square(),
            0.25,
            &[1.0, 4.0, 16.0, 64.0],
            &[1.0, 0.0],
            b.paths(100_000),
            0.05,
            seed,
        )?]),
        "conv-half" => {
            let hs = [0.40, 0.45, 0.49, 0.499];
            let square = conv_half_report(
                "conv-half-square",
                &ConvexBody::unit_square(),
                &hs,
                &[1.0, 0.0],
                b.grid_n(720),
                seed,
            )?;
            let disc = conv_half_report(
                "conv-half-disc",
                &ConvexBody::ball(vec![0.0, 0.0], 1.0)?,
                &hs,
                &[1.0, 0.0],
                b.grid_n(720),
                seed,
            )?;
            Ok(vec![square, disc])
        }
        "truncated" => {
            let square = truncated_conv_report(
                "truncated-square",
                &ConvexBody::unit_square(),
                1.0,
                &[10.0, 100.0, 1000.0],
                &[1.0, 0.0],
                b.grid_n(720),
                b.paths(2_000),
                seed,
            )?;
            let disc = truncated_conv_report(
                "truncated-disc",
                &ConvexBody::ball(vec![0.0, 0.0], 1.0)?,
                0.75,
                &[20.0, 400.0, 8000.0],
                &[1.0, 0.0],
                b.grid_n(720),
                b.paths(2_000),
                seed,
            )?;
            Ok(vec![square, disc])
        }
        "slepian" => {
            let points = slepian_grid();
            let l1 = StarBody::lp_ball(1.0, 2);
            let shrunk = StarBody::scaled_by(0.5, l1.clone())?;
            let scaled = slepian_report(
                "slepian-scaled",
                &shrunk,
                &l1,
                0.25,
                &points,
                b.paths(100_000),
                b.grid_n(720),
                seed,
                true,
            )?;
            let equal = slepian_report(
                "slepian-equal",
                &l1,
                &l1,
                0.25,
                &points,
                b.paths(100_000),
                b.grid_n(720),
                seed,
                false,
            )?;
            let nested = slepian_report(
                "slepian-l1-in-l2",
                &l1,
                &StarBody::euclidean_ball(2),
                0.25,
                &points,
                b.paths(100_000),
                b.grid_n(720),
                seed,
                false,
            )?;
            Ok(vec![scaled, equal, nested])
        }
        "psum" => Ok(vec![psum_report("psum", 0.25, b.paths(30_000), seed)?]),
        "scaling" => Ok(vec![crate::poisson::scaling_check(
            &ConvexBody::unit_square(),
            0.25,
            &[1.0, 0.0],
            2.0,
            b.paths(6_000),
            seed,
        )?]),
        other => Err(Error::InvalidParameter(format!(
            "unknown check {other:?}; known checks: {}",
            CHECK_NAMES.join(", ")
        ))),
    }
}

/// Runs every check in [`CHECK_NAMES`] and concatenates the reports.
pub fn run_suite(seed: u64, budgets: &Budgets) -> Result<Vec<Report>> {
    let mut out = Vec::new();
    for name in CHECK_NAMES {
        out.extend(run_by_name(name, seed, budgets)?);
    }
    Ok(out)
}

/// A 5 x 4 rectangle of evaluation points used by the comparison checks.
fn slepian_grid() -> Vec<Vec<f64>> {
    let xs = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let ys = [-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0];
    let mut points = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            points.push(vec![x, y]);
        }
    }
    points
}
