//! One-dimensional fractional Brownian motion on arbitrary grids, the
//! building block of the plane-wave construction, plus the jittered
//! Cholesky factorization shared by every dense Gaussian sampler.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::gaussian::kernel::Variant;
use crate::rng::run_replicates;
use crate::stats::min_symmetric_eigenvalue;
use crate::{Error, Result};

/// Dense factorization cap: n² doubles and n³/3 flops beyond this point
/// stop being a desk-scale computation.
pub const GRID_CAP: usize = 4096;

/// Cholesky factor of m, retrying with an escalating diagonal jitter
/// (up to 1e−8 of the mean diagonal) to absorb semidefinite rank loss.
/// Returns the factor together with the absolute jitter that was added.
/// Genuine indefiniteness exhausts the ladder and reports the most
/// negative eigenvalue.
pub fn cholesky_with_jitter(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let n = m.nrows();
    let trace = m.trace();
    for frac in [0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8] {
        let jitter = frac * trace / n.max(1) as f64;
        let candidate = if jitter > 0.0 {
            m + DMatrix::identity(n, n) * jitter
        } else {
            m.clone()
        };
        if let Some(ch) = candidate.cholesky() {
            return Ok((ch.unpack(), jitter));
        }
    }
    let (min_eig, trace) = min_symmetric_eigenvalue(m);
    Err(Error::NotPositiveSemidefinite { min_eig, trace })
}

/// Covariance of 1-d (sub-)fractional Brownian motion at s, t ∈ ℝ.
pub fn cov1d(hurst: f64, variant: Variant, s: f64, t: f64) -> f64 {
    let q = 2.0 * hurst;
    let gs = s.abs().powf(q);
    let gt = t.abs().powf(q);
    match variant {
        Variant::Standard => 0.5 * (gs + gt - (s - t).abs().powf(q)),
        Variant::SubFractional => {
            gs + gt - 0.5 * ((s - t).abs().powf(q) + (s + t).abs().powf(q))
        }
    }
}

/// A factorized 1-d fractional Brownian motion sampler on a fixed grid.
#[derive(Debug, Clone)]
pub struct Fbm1d {
    ts: Vec<f64>,
    factor: DMatrix<f64>,
    jitter: f64,
}

impl Fbm1d {
    pub fn new(hurst: f64, variant: Variant, ts: Vec<f64>) -> Result<Fbm1d> {
        if !(hurst > 0.0 && hurst <= 1.0 && hurst.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Hurst index must lie in (0, 1], got {hurst}"
            )));
        }
        if ts.is_empty() {
            return Err(Error::InvalidParameter("empty time grid".into()));
        }
        if ts.len() > GRID_CAP {
            return Err(Error::GridTooLarge {
                n: ts.len(),
                cap: GRID_CAP,
            });
        }
        if ts.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite {
                context: "time grid".into(),
            });
        }
        let n = ts.len();
        let m = DMatrix::from_fn(n, n, |i, j| cov1d(hurst, variant, ts[i], ts[j]));
        let (factor, jitter) = cholesky_with_jitter(&m)?;
        Ok(Fbm1d { ts, factor, jitter })
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    /// Absolute diagonal jitter the factorization needed (0 when none).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// One path, consuming exactly len() normal draws from the generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let xi = DVector::from_iterator(
            self.len(),
            (0..self.len()).map(|_| rng.sample::<f64, _>(StandardNormal)),
        );
        (&self.factor * xi).iter().copied().collect()
    }
}

/// n_paths of standard fBm over the grid, one replicate stream per path.
/// Grid points exactly at 0 come back as exact zeros.
pub fn fbm1d_sample(
    hurst: f64,
    ts: &[f64],
    n_paths: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if n_paths == 0 {
        return Err(Error::InvalidParameter("need at least one path".into()));
    }
    let active: Vec<usize> = (0..ts.len()).filter(|&i| ts[i] != 0.0).collect();
    if active.is_empty() {
        return Ok(vec![vec![0.0; ts.len()]; n_paths]);
    }
    let engine = Fbm1d::new(
        hurst,
        Variant::Standard,
        active.iter().map(|&i| ts[i]).collect(),
    )?;
    Ok(run_replicates(seed, n_paths, |_, rng| {
        let y = engine.sample_with(rng);
        let mut out = vec![0.0; ts.len()];
        for (k, &i) in active.iter().enumerate() {
            out[i] = y[k];
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::variance_with_sem;
    use approx::assert_relative_eq;

    #[test]
    fn variance_grows_like_t_to_the_2h() {
        let hurst = 0.3;
        let paths = fbm1d_sample(hurst, &[0.0, 1.0, 2.0], 20_000, 42).unwrap();
        let at2: Vec<f64> = paths.iter().map(|p| p[2]).collect();
        let (var, sem) = variance_with_sem(&at2);
        let expect = 2.0f64.powf(2.0 * hurst);
        assert!(
            (var - expect).abs() < 3.0 * sem,
            "var={var} expect={expect} sem={sem}"
        );
        assert!(paths.iter().all(|p| p[0] == 0.0));
    }

    #[test]
    fn h_equals_one_is_a_random_line() {
        // The Gram matrix is rank one; the jitter ladder (≤1e-8 of the mean
        // diagonal) admits noise of order 1e-4 in the paths, no more.
        let paths = fbm1d_sample(1.0, &[1.0, 2.0], 4000, 9).unwrap();
        for p in &paths {
            assert_relative_eq!(p[1], 2.0 * p[0], epsilon = 1e-4);
        }
    }

    #[test]
    fn brownian_increments_are_independent() {
        let paths = fbm1d_sample(0.5, &[1.0, 2.0], 40_000, 3).unwrap();
        let a: Vec<f64> = paths.iter().map(|p| p[0]).collect();
        let b: Vec<f64> = paths.iter().map(|p| p[1] - p[0]).collect();
        let (cov, sem) = crate::stats::covariance_with_sem(&a, &b);
        assert!(cov.abs() < 3.0 * sem, "cov={cov} sem={sem}");
    }

    #[test]
    fn sub_fractional_block_variance() {
        // Var = 2t^{2H} − ½(2t)^{2H} at time t.
        let engine = Fbm1d::new(0.25, Variant::SubFractional, vec![1.5]).unwrap();
        let mut rng = crate::rng::replicate_rng(11, 0);
        let xs: Vec<f64> = (0..30_000).map(|_| engine.sample_with(&mut rng)[0]).collect();
        let (var, sem) = variance_with_sem(&xs);
        let t: f64 = 1.5;
        let expect = 2.0 * t.powf(0.5) - 0.5 * (2.0 * t).powf(0.5);
        assert!((var - expect).abs() < 3.0 * sem, "var={var} expect={expect}");
    }

    #[test]
    fn grid_cap_and_bad_input() {
        let ts: Vec<f64> = (0..GRID_CAP + 1).map(|i| i as f64).collect();
        assert!(matches!(
            Fbm1d::new(0.5, Variant::Standard, ts),
            Err(Error::GridTooLarge { .. })
        ));
        assert!(Fbm1d::new(0.5, Variant::Standard, vec![f64::NAN]).is_err());
        assert!(Fbm1d::new(1.5, Variant::Standard, vec![1.0]).is_err());
    }
}
