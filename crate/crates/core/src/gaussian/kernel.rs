//! The covariance kernel of the fractional Brownian field with a star-body
//! gauge in place of the Euclidean norm, and its sub-fractional variant.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::geometry::StarBody;
use crate::geometry::vec::{check_dim, check_finite, sub};
use crate::stats::min_symmetric_eigenvalue;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// C(z1,z2) = ½(‖z1‖^{2H} + ‖z2‖^{2H} − ‖z1−z2‖^{2H}).
    Standard,
    /// C(z1,z2) + C(z1,−z2); even in each argument.
    SubFractional,
}

/// A centred Gaussian field specification: Hurst index, gauge body, variant.
///
/// The kernel is a valid covariance exactly when ‖·‖^{2H} is negative
/// definite, i.e. when the body embeds as an L_{2H} ball. Construction does
/// not check that (it is undecidable from the parametric form alone);
/// [`MfBfSpec::gram_min_eigenvalue`] and the simulators detect violations
/// on concrete point sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfBfSpec {
    pub hurst: f64,
    pub body: StarBody,
    pub variant: Variant,
}

impl MfBfSpec {
    pub fn new(hurst: f64, body: StarBody, variant: Variant) -> Result<MfBfSpec> {
        if !(hurst > 0.0 && hurst <= 1.0 && hurst.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Hurst index must lie in (0, 1], got {hurst}"
            )));
        }
        body.validate()?;
        Ok(MfBfSpec {
            hurst,
            body,
            variant,
        })
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    fn base_cov(&self, z1: &[f64], z2: &[f64]) -> Result<f64> {
        let q = 2.0 * self.hurst;
        let g1 = self.body.gauge_pow(z1, q)?;
        let g2 = self.body.gauge_pow(z2, q)?;
        let g12 = self.body.gauge_pow(&sub(z1, z2), q)?;
        Ok(0.5 * (g1 + g2 - g12))
    }

    pub fn cov(&self, z1: &[f64], z2: &[f64]) -> Result<f64> {
        let d = self.dim();
        check_dim(d, z1)?;
        check_dim(d, z2)?;
        check_finite(z1, "covariance argument")?;
        check_finite(z2, "covariance argument")?;
        match self.variant {
            Variant::Standard => self.base_cov(z1, z2),
            Variant::SubFractional => {
                // ½(g1+g2−g12) + ½(g1+g2−g1p2) with the reflected argument.
                let q = 2.0 * self.hurst;
                let g1 = self.body.gauge_pow(z1, q)?;
                let g2 = self.body.gauge_pow(z2, q)?;
                let g12 = self.body.gauge_pow(&sub(z1, z2), q)?;
                let zsum: Vec<f64> = z1.iter().zip(z2).map(|(a, b)| a + b).collect();
                let gsum = self.body.gauge_pow(&zsum, q)?;
                Ok(g1 + g2 - 0.5 * (g12 + gsum))
            }
        }
    }

    pub fn var(&self, z: &[f64]) -> Result<f64> {
        self.cov(z, z)
    }

    pub fn gram(&self, points: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        let n = points.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let c = self.cov(&points[i], &points[j])?;
                m[(i, j)] = c;
                m[(j, i)] = c;
            }
        }
        Ok(m)
    }

    /// (min eigenvalue, trace) of the Gram matrix at the given points.
    /// The matrix counts as positive semidefinite in the simulation path
    /// when min_eig ≥ −1e−10 · trace.
    pub fn gram_min_eigenvalue(&self, points: &[Vec<f64>]) -> Result<(f64, f64)> {
        let m = self.gram(points)?;
        Ok(min_symmetric_eigenvalue(&m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn l1_quarter() -> MfBfSpec {
        MfBfSpec::new(0.25, StarBody::lp_ball(1.0, 2), Variant::Standard).unwrap()
    }

    #[test]
    fn known_covariance_values() {
        // ℓ1 gauge, H = 1/4: ‖e1−e2‖_1^{1/2} = √2 so C = (2−√2)/2.
        let spec = l1_quarter();
        assert_relative_eq!(
            spec.cov(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            (2.0 - 2.0f64.sqrt()) / 2.0,
            epsilon = 1e-14
        );
        // Euclidean H = 1/2 gives the same number.
        let spec2 =
            MfBfSpec::new(0.5, StarBody::euclidean_ball(2), Variant::Standard).unwrap();
        assert_relative_eq!(
            spec2.cov(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            (2.0 - 2.0f64.sqrt()) / 2.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(spec.var(&[1.0, 0.0]).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn stationary_increments_identity() {
        let spec = l1_quarter();
        let pairs = [
            ([0.3, -1.2], [2.0, 0.7]),
            ([1.0, 1.0], [-1.0, 2.5]),
            ([0.0, 0.0], [4.0, -3.0]),
        ];
        for (z1, z2) in pairs {
            let incr = spec.var(&z1).unwrap() + spec.var(&z2).unwrap()
                - 2.0 * spec.cov(&z1, &z2).unwrap();
            let gauge = spec.body.gauge_pow(&crate::geometry::vec::sub(&z1, &z2), 0.5).unwrap();
            assert_relative_eq!(incr, gauge, epsilon = 1e-12);
        }
    }

    #[test]
    fn sub_fractional_variance_factor() {
        // Var_sub(z) = (2 − 2^{2H−1})·‖z‖^{2H}.
        for h in [0.25, 0.5, 0.75] {
            let spec =
                MfBfSpec::new(h, StarBody::lp_ball(1.0, 2), Variant::SubFractional).unwrap();
            let z = [0.7, -0.4];
            let gauge = spec.body.gauge_pow(&z, 2.0 * h).unwrap();
            let factor = 2.0 - 2.0f64.powf(2.0 * h - 1.0);
            assert_relative_eq!(spec.var(&z).unwrap(), factor * gauge, epsilon = 1e-13);
        }
    }

    #[test]
    fn sub_fractional_is_even() {
        let spec =
            MfBfSpec::new(0.3, StarBody::lp_ball(0.6, 2), Variant::SubFractional).unwrap();
        let z1 = [1.3, 0.4];
        let z2 = [-0.2, 2.0];
        let n1 = [-1.3, -0.4];
        assert_relative_eq!(
            spec.cov(&z1, &z2).unwrap(),
            spec.cov(&n1, &z2).unwrap(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn gram_is_psd_for_a_matching_lp_ball() {
        // p = 2H: the gauge body is an L_{2H} ball by construction.
        let spec =
            MfBfSpec::new(0.25, StarBody::lp_ball(0.5, 2), Variant::Standard).unwrap();
        let pts: Vec<Vec<f64>> = (0..12)
            .map(|k| {
                let t = k as f64 * 0.7;
                vec![t.sin() * (1.0 + 0.1 * k as f64), t.cos() * 2.0 - 0.5]
            })
            .collect();
        let (min_eig, trace) = spec.gram_min_eigenvalue(&pts).unwrap();
        assert!(
            min_eig >= -1e-10 * trace,
            "min_eig={min_eig} trace={trace}"
        );
    }

    #[test]
    fn gram_detects_a_nonexistent_field() {
        // ℓ1 gauge with 2H = 1.8 > 1 is not an L_{1.8} ball; the witness
        // v = (1,1,−1) at {e1, e2, e1+e2} gives vᵀMv = 4 − 2^{2.8} < 0.
        let spec = MfBfSpec::new(0.9, StarBody::lp_ball(1.0, 2), Variant::Standard).unwrap();
        let pts = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let m = spec.gram(&pts).unwrap();
        let v = nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0]);
        let quad = (v.transpose() * &m * &v)[(0, 0)];
        assert_relative_eq!(quad, 4.0 - 2.0f64.powf(2.8), epsilon = 1e-12);
        let (min_eig, trace) = spec.gram_min_eigenvalue(&pts).unwrap();
        assert!(min_eig < -1e-10 * trace);
    }

    proptest! {
        #[test]
        fn positive_homogeneity(
            x1 in -5.0f64..5.0, y1 in -5.0f64..5.0,
            x2 in -5.0f64..5.0, y2 in -5.0f64..5.0,
            c in 0.05f64..20.0,
            h in 0.05f64..1.0,
        ) {
            let spec = MfBfSpec::new(h, StarBody::lp_ball(1.0, 2), Variant::Standard).unwrap();
            let z1 = [x1, y1];
            let z2 = [x2, y2];
            let zc1 = [c * x1, c * y1];
            let zc2 = [c * x2, c * y2];
            let lhs = spec.cov(&zc1, &zc2).unwrap();
            let rhs = c.powf(2.0 * h) * spec.cov(&z1, &z2).unwrap();
            let scale = spec.var(&zc1).unwrap().abs().max(spec.var(&zc2).unwrap().abs()).max(1e-30);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1.0),
                "lhs={lhs} rhs={rhs}");
        }
    }
}
