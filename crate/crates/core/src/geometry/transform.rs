//! Transforms from convex bodies to star bodies: the polar projection body,
//! the radial pth mean body, the associated body matching the variance of
//! the compensated shot-noise field, and p-sums of star bodies.

use rayon::prelude::*;

use crate::geometry::convex::{uniform_sample_in, ConvexBody};
use crate::geometry::grid::DirectionGrid;
use crate::geometry::integrals::chord_power_integral;
use crate::geometry::star::{StarBody, TabulatedGauge};
use crate::geometry::vec::{check_dim, norm, normalized, sub};
use crate::{Error, Result};

fn check_grid(body: &ConvexBody, grid: &DirectionGrid) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("direction grid is empty".into()));
    }
    if grid.dim != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: grid.dim,
        });
    }
    Ok(())
}

/// The polar of the projection body of K: its gauge at a unit direction u
/// equals the shadow area of K on u^⊥. Exact at every grid node.
pub fn polar_projection_body(body: &ConvexBody, grid: &DirectionGrid) -> Result<StarBody> {
    check_grid(body, grid)?;
    let values = grid
        .nodes
        .iter()
        .map(|(u, _)| body.shadow_area(u))
        .collect::<Result<Vec<f64>>>()?;
    let directions = grid.nodes.iter().map(|(u, _)| u.clone()).collect();
    let table = TabulatedGauge::new(body.dim(), directions, values, None)?;
    Ok(StarBody::Tabulated { table })
}

/// Monte Carlo estimate of the radial pth mean body of K for p ∈ (−1, 0):
/// gauge(u) = (E[ρ(X, u)^p])^{−1/p} with X uniform in K and ρ the distance
/// from X to the boundary in direction u. Given the chord of K through X
/// along u, the position on it is uniform, so E[ρ^p | chord] = ℓ^p/(p+1);
/// averaging that instead of ρ^p keeps the estimator unbiased while giving
/// it finite variance (ρ^{2p} is non-integrable for p ≤ −1/2, chord lengths
/// stay integrable for every p > −1). One shared sample cloud serves every
/// grid direction, so the tabulated values are strongly correlated across
/// directions (good for shape, irrelevant for pointwise stderr).
pub fn radial_pth_mean_body(
    body: &ConvexBody,
    p: f64,
    n_samples: usize,
    seed: u64,
    grid: &DirectionGrid,
) -> Result<StarBody> {
    check_grid(body, grid)?;
    if !(p > -1.0 && p < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radial pth mean body needs p in (-1, 0), got {p}"
        )));
    }
    if n_samples < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "radial pth mean body needs at least 10000 samples, got {n_samples}"
        )));
    }
    let samples = uniform_sample_in(body, n_samples, seed)?;
    let (lo, hi) = body.bounding_box();
    // ℓ = 0 happens only on a null set; the floor introduces an
    // O(floor^{2+p}) bias, far below any stderr reached here.
    let floor = 1e-12 * norm(&sub(&hi, &lo));
    let inv_p1 = 1.0 / (p + 1.0);

    let stats: Vec<(f64, f64)> = grid
        .nodes
        .par_iter()
        .map(|(u, _)| {
            let vals: Vec<f64> = samples
                .iter()
                .map(|x| {
                    let ell = body
                        .line_chord(u, x)
                        .map_or(0.0, |(t0, t1)| (t1 - t0).max(0.0))
                        .max(floor);
                    ell.powf(p) * inv_p1
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / n_samples as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / (n_samples - 1) as f64;
            (mean, (var / n_samples as f64).sqrt())
        })
        .collect();

    let mut values = Vec::with_capacity(stats.len());
    let mut stderrs = Vec::with_capacity(stats.len());
    for (m, sem) in &stats {
        // gauge = m^{−1/p}; first-order error propagation through the power.
        values.push(m.powf(-1.0 / p));
        stderrs.push(m.powf(-1.0 / p - 1.0) * sem / p.abs());
    }
    let directions = grid.nodes.iter().map(|(u, _)| u.clone()).collect();
    let table = TabulatedGauge::new(body.dim(), directions, values, Some(stderrs))?;
    Ok(StarBody::Tabulated { table })
}

/// Exact gauge of the radial pth mean body in one direction, via the chord
/// identity ∫_K ρ(x,u)^p dx = (1/(p+1)) ∫_shadow ℓ^{p+1} dy.
pub fn radial_mean_gauge_quadrature(body: &ConvexBody, p: f64, u: &[f64]) -> Result<f64> {
    if !(p > -1.0 && p < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radial pth mean body needs p in (-1, 0), got {p}"
        )));
    }
    check_dim(body.dim(), u)?;
    let un = normalized(u)?;
    let mean = chord_power_integral(body, &un, p + 1.0)? / ((p + 1.0) * body.volume());
    Ok(mean.powf(-1.0 / p))
}

/// The star body F with ‖z‖_F^{2H} = Var ξ(z) for the compensated Poisson
/// field driven by K: a rescaled radial (−2H)th mean body, with scale
/// factor (H / Vol K)^{1/2H} applied as a set dilation.
pub fn associated_star_body(
    body: &ConvexBody,
    hurst: f64,
    n_samples: usize,
    seed: u64,
    grid: &DirectionGrid,
) -> Result<StarBody> {
    if !(hurst > 0.0 && hurst < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "associated body needs H in (0, 1/2), got {hurst}"
        )));
    }
    let rmb = radial_pth_mean_body(body, -2.0 * hurst, n_samples, seed, grid)?;
    let factor = (hurst / body.volume()).powf(1.0 / (2.0 * hurst));
    StarBody::scaled_by(factor, rmb)
}

/// The star body with gauge^p = gauge_{F1}^p + gauge_{F2}^p.
pub fn p_sum(f1: StarBody, f2: StarBody, p: f64) -> Result<StarBody> {
    let body = StarBody::PSum {
        p,
        parts: vec![f1, f2],
    };
    body.validate()?;
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polar_projection_of_the_square() {
        let k = ConvexBody::unit_square();
        let grid = DirectionGrid::half_circle(90).unwrap();
        let body = polar_projection_body(&k, &grid).unwrap();
        for (u, _) in &grid.nodes {
            let expect = u[0].abs() + u[1].abs();
            assert_relative_eq!(body.gauge(u).unwrap(), expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn radial_mean_gauge_matches_quadrature_on_the_square() {
        let k = ConvexBody::unit_square();
        let grid = DirectionGrid::half_circle(60).unwrap();
        let body = radial_pth_mean_body(&k, -0.5, 30_000, 11, &grid).unwrap();
        // Exact value along e1: E[ρ^{-1/2}] = 2, gauge = 2² = 4.
        let exact = radial_mean_gauge_quadrature(&k, -0.5, &[1.0, 0.0]).unwrap();
        assert_relative_eq!(exact, 4.0, epsilon = 1e-12);
        let mc = body.gauge(&[1.0, 0.0]).unwrap();
        assert!((mc - exact).abs() < 0.6, "mc={mc} exact={exact}");
    }

    #[test]
    fn radial_mean_gauge_matches_quadrature_on_the_disc() {
        let k = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        let grid = DirectionGrid::half_circle(40).unwrap();
        let body = radial_pth_mean_body(&k, -0.4, 20_000, 5, &grid).unwrap();
        let u = normalized(&[0.6, -0.8]).unwrap();
        let exact = radial_mean_gauge_quadrature(&k, -0.4, &u).unwrap();
        let mc = body.gauge(&u).unwrap();
        assert!(
            (mc - exact).abs() < 0.05 * exact,
            "mc={mc} exact={exact}"
        );
    }

    #[test]
    fn associated_body_of_the_unit_square() {
        // H = 1/4, V = 1: the set scale is (1/4)² = 1/16, so the gauge at e1
        // is 16 · 4 = 64, and gauge^{2H} = 8 is the field variance there.
        let k = ConvexBody::unit_square();
        let grid = DirectionGrid::half_circle(90).unwrap();
        let body = associated_star_body(&k, 0.25, 40_000, 17, &grid).unwrap();
        let g = body.gauge(&[1.0, 0.0]).unwrap();
        assert!((g - 64.0).abs() < 8.0, "gauge={g}");
        assert!((body.gauge_pow(&[1.0, 0.0], 0.5).unwrap() - 8.0).abs() < 0.5);
    }

    #[test]
    fn p_sum_of_euclidean_balls() {
        let b = StarBody::euclidean_ball(2);
        let s = p_sum(b.clone(), b, 2.0).unwrap();
        assert_relative_eq!(
            s.gauge(&[3.0, 4.0]).unwrap(),
            2.0f64.sqrt() * 5.0,
            epsilon = 1e-12
        );
        let d1 = StarBody::euclidean_ball(1);
        assert!(p_sum(StarBody::euclidean_ball(2), d1, 2.0).is_err());
    }

    #[test]
    fn transform_input_validation() {
        let k = ConvexBody::unit_square();
        let grid = DirectionGrid::half_circle(8).unwrap();
        assert!(radial_pth_mean_body(&k, -1.5, 20_000, 1, &grid).is_err());
        assert!(radial_pth_mean_body(&k, -0.5, 100, 1, &grid).is_err());
        assert!(associated_star_body(&k, 0.6, 20_000, 1, &grid).is_err());
        let grid3 = DirectionGrid::fibonacci_sphere(16).unwrap();
        assert!(polar_projection_body(&k, &grid3).is_err());
    }
}
