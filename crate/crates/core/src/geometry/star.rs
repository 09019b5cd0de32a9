//! Centred star bodies and their gauge (Minkowski) functionals.
//!
//! Every variant evaluates `gauge`, which is positively homogeneous, even,
//! and vanishes only at the origin. `Scaled { factor: c, inner: F }` denotes
//! the dilated set c·F, so its gauge is `F.gauge(z) / c`: enlarging the body
//! shrinks the norm.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::geometry::vec::{check_dim, check_finite, dot, norm};
use crate::{Error, Result};

/// One representative of a symmetric atom pair {±direction}; the pair
/// carries weight/2 on each sign, so evenness is structural.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralAtom {
    pub direction: Vec<f64>,
    pub weight: f64,
}

/// Finite even measure on the unit sphere, stored as one atom per ± pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SpectralMeasureRaw", into = "SpectralMeasureRaw")]
pub struct SpectralMeasure {
    dim: usize,
    atoms: Vec<SpectralAtom>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralMeasureRaw {
    dim: usize,
    atoms: Vec<SpectralAtom>,
}

impl TryFrom<SpectralMeasureRaw> for SpectralMeasure {
    type Error = Error;
    fn try_from(raw: SpectralMeasureRaw) -> Result<Self> {
        SpectralMeasure::new(raw.dim, raw.atoms)
    }
}

impl From<SpectralMeasure> for SpectralMeasureRaw {
    fn from(m: SpectralMeasure) -> Self {
        SpectralMeasureRaw {
            dim: m.dim,
            atoms: m.atoms,
        }
    }
}

impl SpectralMeasure {
    /// Empty measures are permitted (the zero body, the p-sum identity);
    /// simulators that need at least one atom reject them explicitly.
    pub fn new(dim: usize, atoms: Vec<SpectralAtom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("measure dimension 0".into()));
        }
        for atom in &atoms {
            check_dim(dim, &atom.direction)?;
            check_finite(&atom.direction, "spectral atom direction")?;
            if (norm(&atom.direction) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "spectral atom direction {:?} is not unit length",
                    atom.direction
                )));
            }
            if !(atom.weight > 0.0 && atom.weight.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "spectral atom weight {} must be positive and finite",
                    atom.weight
                )));
            }
        }
        Ok(SpectralMeasure { dim, atoms })
    }

    pub fn from_pairs(dim: usize, pairs: &[(Vec<f64>, f64)]) -> Result<Self> {
        Self::new(
            dim,
            pairs
                .iter()
                .map(|(direction, weight)| SpectralAtom {
                    direction: direction.clone(),
                    weight: *weight,
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[SpectralAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Σ_atoms w·|⟨z,u⟩|^p; with the ± convention this is the integral of
    /// |⟨z,·⟩|^p against the measure.
    pub fn moment_sum(&self, z: &[f64], p: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * dot(z, &a.direction).abs().powf(p))
            .sum()
    }

    /// Superposition of two measures (adds the atom lists).
    pub fn merged(&self, other: &SpectralMeasure) -> Result<SpectralMeasure> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        SpectralMeasure::new(self.dim, atoms)
    }
}

/// Gauge values tabulated on a direction grid, extended 1-homogeneously.
/// d=2 interpolates linearly in angle; d=3 uses inverse-distance weights
/// over the 3 nearest grid nodes. Evenness is enforced by folding ±z.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TabulatedRaw", into = "TabulatedRaw")]
pub struct TabulatedGauge {
    dim: usize,
    directions: Vec<Vec<f64>>,
    values: Vec<f64>,
    stderrs: Option<Vec<f64>>,
    /// d=2 only: node indices sorted by angle folded into [0, π).
    angle_order: Vec<(f64, usize)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TabulatedRaw {
    dim: usize,
    directions: Vec<Vec<f64>>,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stderrs: Option<Vec<f64>>,
}

impl TryFrom<TabulatedRaw> for TabulatedGauge {
    type Error = Error;
    fn try_from(raw: TabulatedRaw) -> Result<Self> {
        TabulatedGauge::new(raw.dim, raw.directions, raw.values, raw.stderrs)
    }
}

impl From<TabulatedGauge> for TabulatedRaw {
    fn from(t: TabulatedGauge) -> Self {
        TabulatedRaw {
            dim: t.dim,
            directions: t.directions,
            values: t.values,
            stderrs: t.stderrs,
        }
    }
}

fn fold_angle(theta: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut t = theta % pi;
    if t < 0.0 {
        t += pi;
    }
    if t >= pi {
        t -= pi;
    }
    t
}

impl TabulatedGauge {
    pub fn new(
        dim: usize,
        directions: Vec<Vec<f64>>,
        values: Vec<f64>,
        stderrs: Option<Vec<f64>>,
    ) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::UnsupportedDimension {
                dim,
                op: "tabulated gauge".into(),
            });
        }
        if directions.is_empty() || directions.len() != values.len() {
            return Err(Error::InvalidParameter(
                "tabulated gauge needs matching non-empty directions and values".into(),
            ));
        }
        if let Some(se) = &stderrs {
            if se.len() != values.len() {
                return Err(Error::InvalidParameter(
                    "stderr list length must match values".into(),
                ));
            }
        }
        for u in &directions {
            check_dim(dim, u)?;
            if (norm(u) - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidParameter(
                    "tabulated directions must be unit vectors".into(),
                ));
            }
        }
        for v in &values {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidParameter(
                    "tabulated gauge values must be positive and finite".into(),
                ));
            }
        }
        let mut angle_order = Vec::new();
        if dim == 2 {
            angle_order = directions
                .iter()
                .enumerate()
                .map(|(i, u)| (fold_angle(u[1].atan2(u[0])), i))
                .collect();
            angle_order.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        Ok(TabulatedGauge {
            dim,
            directions,
            values,
            stderrs,
            angle_order,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Interpolated (gauge, stderr) at the unit direction of z.
    pub fn unit_value(&self, z: &[f64]) -> (f64, f64) {
        let pick = |i: usize| {
            (
                self.values[i],
                self.stderrs.as_ref().map_or(0.0, |se| se[i]),
            )
        };
        if self.dim == 2 {
            let theta = fold_angle(z[1].atan2(z[0]));
            let m = self.angle_order.len();
            if m == 1 {
                return pick(self.angle_order[0].1);
            }
            // Find the enclosing segment; the wrap segment joins the last
            // angle back to the first plus π (gauge has period π).
            let pos = self.angle_order.partition_point(|(a, _)| *a <= theta);
            let (i0, i1, t) = if pos == 0 || pos == m {
                let (al, il) = self.angle_order[m - 1];
                let (af, ifi) = self.angle_order[0];
                let gap = af + std::f64::consts::PI - al;
                let offset = if pos == 0 {
                    theta + std::f64::consts::PI - al
                } else {
                    theta - al
                };
                (il, ifi, (offset / gap).clamp(0.0, 1.0))
            } else {
                let (a0, i0) = self.angle_order[pos - 1];
                let (a1, i1) = self.angle_order[pos];
                let t = if a1 > a0 { (theta - a0) / (a1 - a0) } else { 0.0 };
                (i0, i1, t)
            };
            let (v0, s0) = pick(i0);
            let (v1, s1) = pick(i1);
            (
                (1.0 - t) * v0 + t * v1,
                ((1.0 - t) * s0).hypot(t * s1),
            )
        } else {
            let zn = norm(z);
            let mut best = [(f64::INFINITY, 0usize); 3];
            for (i, u) in self.directions.iter().enumerate() {
                // Symmetrized chordal distance to the pair {±u}.
                let c = dot(z, u) / zn;
                let d = (2.0 * (1.0 - c.abs())).max(0.0).sqrt();
                if d < best[2].0 {
                    best[2] = (d, i);
                    best.sort_by(|a, b| a.partial_cmp(b).unwrap());
                }
            }
            if best[0].0 < 1e-9 {
                return pick(best[0].1);
            }
            let mut wsum = 0.0;
            let mut v = 0.0;
            let mut var = 0.0;
            for (d, i) in best {
                let w = 1.0 / d;
                let (vi, si) = pick(i);
                wsum += w;
                v += w * vi;
                var += (w * si) * (w * si);
            }
            (v / wsum, var.sqrt() / wsum)
        }
    }
}

/// A centred star body in one of several parametric forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StarBody {
    /// {z : zᵀAz ≤ 1} for symmetric positive definite A; gauge √(zᵀAz).
    Ellipsoid { matrix: Vec<Vec<f64>> },
    /// Axis-scaled ℓ_p ball: gauge (Σ |z_i/s_i|^p)^{1/p}.
    LpBall { p: f64, scales: Vec<f64> },
    /// gauge^p = Σ w·|⟨z,u⟩|^p over the measure's symmetric atoms.
    Spectral { p: f64, measure: SpectralMeasure },
    /// The dilate factor·inner (as a set); gauge = inner gauge / factor.
    Scaled { factor: f64, inner: Box<StarBody> },
    /// gauge^p = Σ_parts gauge_part^p.
    PSum { p: f64, parts: Vec<StarBody> },
    Tabulated { table: TabulatedGauge },
}

impl StarBody {
    pub fn euclidean_ball(dim: usize) -> StarBody {
        StarBody::LpBall {
            p: 2.0,
            scales: vec![1.0; dim],
        }
    }

    pub fn lp_ball(p: f64, dim: usize) -> StarBody {
        StarBody::LpBall {
            p,
            scales: vec![1.0; dim],
        }
    }

    pub fn ellipsoid(matrix: Vec<Vec<f64>>) -> Result<StarBody> {
        let body = StarBody::Ellipsoid { matrix };
        body.validate()?;
        Ok(body)
    }

    pub fn spectral(p: f64, measure: SpectralMeasure) -> Result<StarBody> {
        let body = StarBody::Spectral { p, measure };
        body.validate()?;
        Ok(body)
    }

    pub fn scaled_by(factor: f64, inner: StarBody) -> Result<StarBody> {
        let body = StarBody::Scaled {
            factor,
            inner: Box::new(inner),
        };
        body.validate()?;
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        match self {
            StarBody::Ellipsoid { matrix } => matrix.len(),
            StarBody::LpBall { scales, .. } => scales.len(),
            StarBody::Spectral { measure, .. } => measure.dim(),
            StarBody::Scaled { inner, .. } => inner.dim(),
            StarBody::PSum { parts, .. } => parts.first().map_or(0, |f| f.dim()),
            StarBody::Tabulated { table } => table.dim(),
        }
    }

    /// Structural validation of the variant parameters (recursive).
    pub fn validate(&self) -> Result<()> {
        match self {
            StarBody::Ellipsoid { matrix } => {
                let d = matrix.len();
                if d == 0 || matrix.iter().any(|row| row.len() != d) {
                    return Err(Error::InvalidParameter(
                        "ellipsoid matrix must be square and non-empty".into(),
                    ));
                }
                let m = DMatrix::from_fn(d, d, |i, j| matrix[i][j]);
                if (&m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) {
                    return Err(Error::InvalidParameter(
                        "ellipsoid matrix must be symmetric".into(),
                    ));
                }
                if m.clone().cholesky().is_none() {
                    return Err(Error::InvalidParameter(
                        "ellipsoid matrix must be positive definite".into(),
                    ));
                }
                Ok(())
            }
            StarBody::LpBall { p, scales } => {
                if !(p.is_finite() && *p > 0.0) {
                    return Err(Error::InvalidParameter(format!("lp ball needs p > 0, got {p}")));
                }
                if scales.is_empty() || scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                    return Err(Error::InvalidParameter(
                        "lp ball scales must be positive and finite".into(),
                    ));
                }
                Ok(())
            }
            StarBody::Spectral { p, .. } => {
                if !(p.is_finite() && *p > 0.0 && *p <= 2.0) {
                    return Err(Error::InvalidParameter(format!(
                        "spectral body needs p in (0, 2], got {p}"
                    )));
                }
                Ok(())
            }
            StarBody::Scaled { factor, inner } => {
                if !(factor.is_finite() && *factor > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "scale factor must be positive and finite, got {factor}"
                    )));
                }
                inner.validate()
            }
            StarBody::PSum { p, parts } => {
                if !(p.is_finite() && *p > 0.0) {
                    return Err(Error::InvalidParameter(format!("p-sum needs p > 0, got {p}")));
                }
                if parts.is_empty() {
                    return Err(Error::InvalidParameter("p-sum needs at least one part".into()));
                }
                let d = parts[0].dim();
                for part in parts {
                    if part.dim() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: part.dim(),
                        });
                    }
                    part.validate()?;
                }
                Ok(())
            }
            StarBody::Tabulated { .. } => Ok(()),
        }
    }

    pub fn gauge(&self, z: &[f64]) -> Result<f64> {
        check_dim(self.dim(), z)?;
        check_finite(z, "gauge argument")?;
        Ok(self.gauge_raw(z))
    }

    /// gauge(z)^q, with exact short-circuits when q matches the variant's
    /// own exponent (avoids the lossy ^(1/p) then ^q round trip; this is
    /// what makes the additive kernel identities hold to machine precision).
    pub fn gauge_pow(&self, z: &[f64], q: f64) -> Result<f64> {
        check_dim(self.dim(), z)?;
        check_finite(z, "gauge argument")?;
        Ok(self.gauge_pow_raw(z, q))
    }

    pub(crate) fn gauge_raw(&self, z: &[f64]) -> f64 {
        match self {
            StarBody::Ellipsoid { matrix } => {
                let mut q = 0.0;
                for (i, row) in matrix.iter().enumerate() {
                    q += z[i] * dot(row, z);
                }
                q.max(0.0).sqrt()
            }
            StarBody::LpBall { p, scales } => {
                let s: f64 = z
                    .iter()
                    .zip(scales)
                    .map(|(zi, si)| (zi / si).abs().powf(*p))
                    .sum();
                s.powf(1.0 / p)
            }
            StarBody::Spectral { p, measure } => measure.moment_sum(z, *p).powf(1.0 / p),
            StarBody::Scaled { factor, inner } => inner.gauge_raw(z) / factor,
            StarBody::PSum { p, parts } => {
                let s: f64 = parts.iter().map(|f| f.gauge_pow_raw(z, *p)).sum();
                s.powf(1.0 / p)
            }
            StarBody::Tabulated { table } => {
                let n = norm(z);
                if n == 0.0 {
                    0.0
                } else {
                    n * table.unit_value(z).0
                }
            }
        }
    }

    fn gauge_pow_raw(&self, z: &[f64], q: f64) -> f64 {
        match self {
            StarBody::LpBall { p, scales } if *p == q => z
                .iter()
                .zip(scales)
                .map(|(zi, si)| (zi / si).abs().powf(*p))
                .sum(),
            StarBody::Spectral { p, measure } if *p == q => measure.moment_sum(z, *p),
            StarBody::PSum { p, parts } if *p == q => {
                parts.iter().map(|f| f.gauge_pow_raw(z, q)).sum()
            }
            StarBody::Scaled { factor, inner } => inner.gauge_pow_raw(z, q) / factor.powf(q),
            StarBody::Ellipsoid { .. } if q == 2.0 => {
                let g = self.gauge_raw(z);
                g * g
            }
            _ => self.gauge_raw(z).powf(q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_gauge_is_the_norm() {
        let body = StarBody::ellipsoid(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_relative_eq!(body.gauge(&[3.0, 4.0]).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn l1_gauge() {
        let body = StarBody::lp_ball(1.0, 2);
        assert_relative_eq!(body.gauge(&[1.0, 1.0]).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn single_atom_pair_projects() {
        let sigma = SpectralMeasure::from_pairs(2, &[(vec![1.0, 0.0], 1.0)]).unwrap();
        let body = StarBody::spectral(0.5, sigma).unwrap();
        for z in [[0.7, -2.0], [-1.3, 0.4]] {
            assert_relative_eq!(body.gauge(&z).unwrap(), z[0].abs(), epsilon = 1e-12);
        }
    }

    #[test]
    fn scaled_body_divides_the_gauge() {
        let inner = StarBody::euclidean_ball(2);
        let double = StarBody::scaled_by(2.0, inner.clone()).unwrap();
        // 2·B is bigger, so its norm is smaller.
        assert_relative_eq!(double.gauge(&[3.0, 4.0]).unwrap(), 2.5, epsilon = 1e-12);
        let half = StarBody::scaled_by(0.5, inner).unwrap();
        assert_relative_eq!(half.gauge(&[3.0, 4.0]).unwrap(), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn psum_of_two_balls() {
        let body = StarBody::PSum {
            p: 2.0,
            parts: vec![StarBody::euclidean_ball(2), StarBody::euclidean_ball(2)],
        };
        let expect = 2.0f64.sqrt() * 5.0;
        assert_relative_eq!(body.gauge(&[3.0, 4.0]).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn psum_matches_merged_spectral_measure() {
        let s1 = SpectralMeasure::from_pairs(2, &[(vec![1.0, 0.0], 0.8)]).unwrap();
        let s2 = SpectralMeasure::from_pairs(
            2,
            &[(vec![0.0, 1.0], 0.5), (vec![0.6, 0.8], 1.2)],
        )
        .unwrap();
        let p = 0.7;
        let merged = StarBody::spectral(p, s1.merged(&s2).unwrap()).unwrap();
        let summed = StarBody::PSum {
            p,
            parts: vec![
                StarBody::spectral(p, s1).unwrap(),
                StarBody::spectral(p, s2).unwrap(),
            ],
        };
        for z in [[1.0, 2.0], [-0.3, 0.9], [4.0, -1.0]] {
            assert_relative_eq!(
                merged.gauge(&z).unwrap(),
                summed.gauge(&z).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn empty_measure_is_the_psum_identity() {
        let zero = StarBody::spectral(0.5, SpectralMeasure::new(2, vec![]).unwrap()).unwrap();
        let sigma = SpectralMeasure::from_pairs(2, &[(vec![1.0, 0.0], 1.0)]).unwrap();
        let f = StarBody::spectral(0.5, sigma).unwrap();
        let sum = StarBody::PSum {
            p: 0.5,
            parts: vec![f.clone(), zero],
        };
        for z in [[1.0, 2.0], [-0.3, 0.9]] {
            assert_relative_eq!(
                sum.gauge(&z).unwrap(),
                f.gauge(&z).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn tabulated_interpolation_roundtrip() {
        // Tabulate the Euclidean gauge on a coarse grid; interpolation should
        // reproduce it closely, including across the wrap segment.
        let n = 90;
        let dirs: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let t = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let vals = vec![1.0; n];
        let table = TabulatedGauge::new(2, dirs, vals, None).unwrap();
        let body = StarBody::Tabulated { table };
        for z in [[1.0f64, 0.0], [0.0, -2.0], [3.0, 4.0], [-0.01, 1.0]] {
            let expect = (z[0] * z[0] + z[1] * z[1]).sqrt();
            assert_relative_eq!(body.gauge(&z).unwrap(), expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn gauge_pow_shortcut_is_additive_exactly() {
        let s1 = SpectralMeasure::from_pairs(2, &[(vec![1.0, 0.0], 0.3)]).unwrap();
        let s2 = SpectralMeasure::from_pairs(2, &[(vec![0.6, 0.8], 0.9)]).unwrap();
        let p = 0.5;
        let f1 = StarBody::spectral(p, s1).unwrap();
        let f2 = StarBody::spectral(p, s2).unwrap();
        let sum = StarBody::PSum {
            p,
            parts: vec![f1.clone(), f2.clone()],
        };
        let z = [1.7, -0.2];
        let lhs = sum.gauge_pow(&z, p).unwrap();
        let rhs = f1.gauge_pow(&z, p).unwrap() + f2.gauge_pow(&z, p).unwrap();
        assert!((lhs - rhs).abs() <= f64::EPSILON * rhs.abs());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StarBody::ellipsoid(vec![vec![1.0, 0.0], vec![0.1, 1.0]]).is_err());
        assert!(StarBody::ellipsoid(vec![vec![-1.0]]).is_err());
        assert!(StarBody::spectral(
            2.5,
            SpectralMeasure::new(2, vec![]).unwrap()
        )
        .is_err());
        assert!(SpectralMeasure::from_pairs(2, &[(vec![1.0, 1.0], 1.0)]).is_err());
        assert!(SpectralMeasure::from_pairs(2, &[(vec![1.0, 0.0], -1.0)]).is_err());
        let body = StarBody::euclidean_ball(2);
        assert!(matches!(
            body.gauge(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            body.gauge(&[f64::NAN, 0.0]),
            Err(Error::NonFinite { .. })
        ));
    }
}
