//! Deterministic direction grids with quadrature weights: equally spaced
//! angles in the plane, a Fibonacci lattice on the sphere.

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct DirectionGrid {
    pub dim: usize,
    /// (unit direction, quadrature weight); weights sum to the measure of
    /// the covered domain (π, 2π, or 4π).
    pub nodes: Vec<(Vec<f64>, f64)>,
}

impl DirectionGrid {
    /// n equally spaced directions on the full unit circle, weight 2π/n.
    pub fn full_circle(n: usize) -> Result<Self> {
        Self::circle(n, 2.0 * std::f64::consts::PI)
    }

    /// n directions with angles in [0, π); enough for even integrands.
    /// Weights sum to π.
    pub fn half_circle(n: usize) -> Result<Self> {
        Self::circle(n, std::f64::consts::PI)
    }

    fn circle(n: usize, span: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid needs at least 1 node".into()));
        }
        let w = span / n as f64;
        let nodes = (0..n)
            .map(|k| {
                let theta = span * (k as f64 + 0.5) / n as f64;
                (vec![theta.cos(), theta.sin()], w)
            })
            .collect();
        Ok(DirectionGrid { dim: 2, nodes })
    }

    /// Fibonacci (golden angle) lattice of n near-uniform directions on the
    /// unit sphere, equal weights 4π/n.
    pub fn fibonacci_sphere(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid needs at least 1 node".into()));
        }
        let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
        let w = 4.0 * std::f64::consts::PI / n as f64;
        let nodes = (0..n)
            .map(|k| {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                let rho = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * k as f64;
                (vec![rho * phi.cos(), rho * phi.sin(), z], w)
            })
            .collect();
        Ok(DirectionGrid { dim: 3, nodes })
    }

    /// Default grid for tabulating gauges in dimension d.
    pub fn default_for_dim(d: usize) -> Result<Self> {
        match d {
            2 => Self::half_circle(720),
            3 => Self::fibonacci_sphere(2000),
            _ => Err(Error::UnsupportedDimension {
                dim: d,
                op: "direction grid".into(),
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
