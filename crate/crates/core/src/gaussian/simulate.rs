//! Exact simulation of the Gaussian fields: dense Cholesky on arbitrary
//! point sets, and the plane-wave superposition for spectral gauge bodies.

use nalgebra::DVector;
use rand_distr::StandardNormal;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gaussian::fbm::{cholesky_with_jitter, Fbm1d, GRID_CAP};
use crate::gaussian::kernel::MfBfSpec;
use crate::geometry::vec::{check_dim, check_finite, dot};
use crate::geometry::StarBody;
use crate::report::paths_to_csv;
use crate::rng::run_replicates;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMethod {
    Cholesky,
    PlaneWave,
}

/// Sampled Gaussian paths: `paths[r][j]` is replicate r at `points[j]`.
#[derive(Debug, Clone, Serialize)]
pub struct GaussSampleBatch {
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub method: SimMethod,
    /// Absolute diagonal jitter the factorization needed (largest across
    /// factorizations when several were involved); 0 when none.
    pub jitter: f64,
    pub paths: Vec<Vec<f64>>,
}

impl GaussSampleBatch {
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p[j]).collect()
    }

    pub fn to_csv(&self) -> String {
        paths_to_csv(&self.points, &self.paths)
    }
}

fn validate_points(spec: &MfBfSpec, points: &[Vec<f64>], n_paths: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("no evaluation points".into()));
    }
    if points.len() > GRID_CAP {
        return Err(Error::GridTooLarge {
            n: points.len(),
            cap: GRID_CAP,
        });
    }
    if n_paths == 0 {
        return Err(Error::InvalidParameter("need at least one path".into()));
    }
    for z in points {
        check_dim(spec.dim(), z)?;
        check_finite(z, "evaluation point")?;
    }
    Ok(())
}

/// Exact sampling through the Cholesky factor of the Gram matrix. Points
/// with zero gauge carry the almost-surely-zero value exactly; a Gram
/// matrix that stays indefinite after jitter means the field does not
/// exist for this body and Hurst index, reported as such.
pub fn cholesky_simulate(
    spec: &MfBfSpec,
    points: &[Vec<f64>],
    n_paths: usize,
    seed: u64,
) -> Result<GaussSampleBatch> {
    validate_points(spec, points, n_paths)?;
    let mut active = Vec::new();
    for (j, z) in points.iter().enumerate() {
        if spec.body.gauge(z)? > 0.0 {
            active.push(j);
        }
    }
    let n = points.len();
    if active.is_empty() {
        return Ok(GaussSampleBatch {
            points: points.to_vec(),
            seed,
            method: SimMethod::Cholesky,
            jitter: 0.0,
            paths: vec![vec![0.0; n]; n_paths],
        });
    }
    let active_points: Vec<Vec<f64>> = active.iter().map(|&j| points[j].clone()).collect();
    let gram = spec.gram(&active_points)?;
    let (factor, jitter) = cholesky_with_jitter(&gram)?;
    let k = active.len();
    let paths = run_replicates(seed, n_paths, |_, rng| {
        let xi = DVector::from_iterator(k, (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let y = &factor * xi;
        let mut out = vec![0.0; n];
        for (idx, &j) in active.iter().enumerate() {
            out[j] = y[idx];
        }
        out
    });
    Ok(GaussSampleBatch {
        points: points.to_vec(),
        seed,
        method: SimMethod::Cholesky,
        jitter,
        paths,
    })
}

struct AtomEngine {
    weight_sqrt: f64,
    fbm: Fbm1d,
    /// For each evaluation point, the index into the fbm grid, or None
    /// when the point projects exactly to 0 (field contribution 0).
    slot: Vec<Option<usize>>,
}

/// Plane-wave simulation: one independent 1-d (sub-)fractional Brownian
/// motion per spectral atom, evaluated at the projections ⟨z, u⟩ and summed
/// with weights √w. Exact in distribution for spectral gauge bodies whose
/// exponent matches 2H.
pub fn plane_wave_simulate(
    spec: &MfBfSpec,
    points: &[Vec<f64>],
    n_paths: usize,
    seed: u64,
) -> Result<GaussSampleBatch> {
    validate_points(spec, points, n_paths)?;
    let StarBody::Spectral { p, measure } = &spec.body else {
        return Err(Error::InvalidParameter(
            "plane-wave simulation needs a spectral gauge body; use the cholesky method"
                .into(),
        ));
    };
    if (p - 2.0 * spec.hurst).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "plane-wave simulation needs the spectral exponent to equal 2H; \
             got p = {p}, 2H = {}",
            2.0 * spec.hurst
        )));
    }
    if measure.is_empty() {
        return Err(Error::EmptyMeasure);
    }

    let mut engines = Vec::new();
    for atom in measure.atoms() {
        let ts: Vec<f64> = points.iter().map(|z| dot(z, &atom.direction)).collect();
        let scale = ts.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        // Unique sorted non-zero projections form the fbm grid; points on
        // the same fiber (within 1e-12 relative) share a grid node.
        let tol = 1e-12 * scale;
        let mut uniq: Vec<f64> = ts.iter().copied().filter(|t| t.abs() > tol).collect();
        uniq.sort_by(|a, b| a.partial_cmp(b).unwrap());
        uniq.dedup_by(|a, b| (*a - *b).abs() <= tol);
        if uniq.is_empty() {
            continue;
        }
        let slot = ts
            .iter()
            .map(|&t| {
                if t.abs() <= tol {
                    return None;
                }
                let i = uniq.partition_point(|&g| g < t);
                let best = [i.wrapping_sub(1), i]
                    .into_iter()
                    .filter(|&c| c < uniq.len())
                    .min_by(|&a, &b| {
                        let da = (uniq[a] - t).abs();
                        let db = (uniq[b] - t).abs();
                        da.partial_cmp(&db).unwrap()
                    })
                    .expect("non-empty grid always has a nearest node");
                Some(best)
            })
            .collect();
        engines.push(AtomEngine {
            weight_sqrt: atom.weight.sqrt(),
            fbm: Fbm1d::new(spec.hurst, spec.variant, uniq)?,
            slot,
        });
    }

    let n = points.len();
    let paths = run_replicates(seed, n_paths, |_, rng| {
        let mut out = vec![0.0; n];
        for engine in &engines {
            let y = engine.fbm.sample_with(rng);
            for (j, slot) in engine.slot.iter().enumerate() {
                if let Some(idx) = slot {
                    out[j] += engine.weight_sqrt * y[*idx];
                }
            }
        }
        out
    });
    let jitter = engines
        .iter()
        .fold(0.0_f64, |m, e| m.max(e.fbm.jitter()));
    Ok(GaussSampleBatch {
        points: points.to_vec(),
        seed,
        method: SimMethod::PlaneWave,
        jitter,
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::kernel::Variant;
    use crate::geometry::SpectralMeasure;
    use crate::stats::{covariance_with_sem, variance_with_sem};

    fn check_cov_matches(spec: &MfBfSpec, batch: &GaussSampleBatch, sigmas: f64) {
        let n = batch.points.len();
        for i in 0..n {
            for j in 0..=i {
                let exact = spec.cov(&batch.points[i], &batch.points[j]).unwrap();
                let (est, sem) = if i == j {
                    variance_with_sem(&batch.column(i))
                } else {
                    covariance_with_sem(&batch.column(i), &batch.column(j))
                };
                assert!(
                    (est - exact).abs() <= sigmas * sem.max(1e-12),
                    "cov[{i},{j}]: est={est} exact={exact} sem={sem}"
                );
            }
        }
    }

    #[test]
    fn cholesky_reproduces_the_kernel() {
        let spec = MfBfSpec::new(0.25, StarBody::lp_ball(1.0, 2), Variant::Standard).unwrap();
        let points = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.5, 0.5],
        ];
        let batch = cholesky_simulate(&spec, &points, 30_000, 101).unwrap();
        assert!(batch.paths.iter().all(|p| p[0] == 0.0), "origin column is exact zero");
        check_cov_matches(&spec, &batch, 3.5);
    }

    #[test]
    fn sub_fractional_variance_through_simulation() {
        let spec =
            MfBfSpec::new(0.3, StarBody::euclidean_ball(2), Variant::SubFractional).unwrap();
        let z = vec![1.2, -0.5];
        let batch = cholesky_simulate(&spec, std::slice::from_ref(&z), 30_000, 7).unwrap();
        let (var, sem) = variance_with_sem(&batch.column(0));
        let expect = spec.var(&z).unwrap();
        let factor = 2.0 - 2.0f64.powf(2.0 * 0.3 - 1.0);
        let gauge = spec.body.gauge_pow(&z, 0.6).unwrap();
        assert!((expect - factor * gauge).abs() < 1e-13);
        assert!((var - expect).abs() < 3.0 * sem, "var={var} expect={expect}");
    }

    #[test]
    fn plane_wave_matches_the_kernel() {
        let measure = SpectralMeasure::from_pairs(
            2,
            &[(vec![1.0, 0.0], 0.5), (vec![0.0, 1.0], 0.5)],
        )
        .unwrap();
        let spec = MfBfSpec::new(
            0.25,
            StarBody::spectral(0.5, measure).unwrap(),
            Variant::Standard,
        )
        .unwrap();
        let points = vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![-2.0, 0.5]];
        let batch = plane_wave_simulate(&spec, &points, 30_000, 23).unwrap();
        check_cov_matches(&spec, &batch, 3.5);
    }

    #[test]
    fn plane_wave_single_atom_variance() {
        let measure = SpectralMeasure::from_pairs(2, &[(vec![0.6, 0.8], 2.0)]).unwrap();
        let spec = MfBfSpec::new(
            0.25,
            StarBody::spectral(0.5, measure).unwrap(),
            Variant::Standard,
        )
        .unwrap();
        let z = vec![1.0, 1.0];
        let batch = plane_wave_simulate(&spec, std::slice::from_ref(&z), 30_000, 5).unwrap();
        let (var, sem) = variance_with_sem(&batch.column(0));
        let expect = 2.0 * 1.4f64.powf(0.5);
        assert!((spec.var(&z).unwrap() - expect).abs() < 1e-13);
        assert!((var - expect).abs() < 3.0 * sem, "var={var} expect={expect}");
    }

    #[test]
    fn plane_wave_guards_its_preconditions() {
        let spec = MfBfSpec::new(0.25, StarBody::lp_ball(1.0, 2), Variant::Standard).unwrap();
        assert!(plane_wave_simulate(&spec, &[vec![1.0, 0.0]], 10, 1).is_err());
        let measure = SpectralMeasure::from_pairs(2, &[(vec![1.0, 0.0], 1.0)]).unwrap();
        let mismatched = MfBfSpec::new(
            0.3,
            StarBody::spectral(0.5, measure).unwrap(),
            Variant::Standard,
        )
        .unwrap();
        assert!(plane_wave_simulate(&mismatched, &[vec![1.0, 0.0]], 10, 1).is_err());
    }

    #[test]
    fn batch_csv_format_is_frozen() {
        let batch = GaussSampleBatch {
            points: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            seed: 0,
            method: SimMethod::Cholesky,
            jitter: 0.0,
            paths: vec![vec![1.0, -0.5], vec![0.25, 2.0]],
        };
        assert_eq!(batch.to_csv(), "path,p0(1;0),p1(0;1)\n0,1,-0.5\n1,0.25,2\n");
    }

    #[test]
    fn point_cap_is_enforced() {
        let spec = MfBfSpec::new(0.25, StarBody::lp_ball(1.0, 2), Variant::Standard).unwrap();
        let points: Vec<Vec<f64>> = (0..GRID_CAP + 1).map(|i| vec![i as f64, 0.0]).collect();
        assert!(matches!(
            cholesky_simulate(&spec, &points, 1, 0),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn same_seed_same_paths() {
        let spec = MfBfSpec::new(0.4, StarBody::euclidean_ball(2), Variant::Standard).unwrap();
        let points = vec![vec![1.0, 2.0], vec![-0.5, 0.25]];
        let a = cholesky_simulate(&spec, &points, 64, 99).unwrap();
        let b = cholesky_simulate(&spec, &points, 64, 99).unwrap();
        assert_eq!(a.paths, b.paths);
        let c = cholesky_simulate(&spec, &points, 64, 100).unwrap();
        assert_ne!(a.paths, c.paths);
    }
}
