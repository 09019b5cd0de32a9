//! Small sample-statistics toolkit used by the verification reports: moment
//! estimates with standard errors that stay valid for non-Gaussian samples.

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

/// Sample mean and its standard error.
pub fn mean_with_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance with a standard error from the fourth central
/// moment, se² ≈ (m4 − var²)/n. Valid without normality assumptions.
pub fn variance_with_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    let se = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    (var, se)
}

/// Sample covariance with a moment-based standard error.
pub fn covariance_with_sem(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut c = 0.0;
    let mut c2 = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let p = (x - mx) * (y - my);
        c += p;
        c2 += p * p;
    }
    let cov = c / (n - 1.0);
    let m11 = c / n;
    let se = ((c2 / n - m11 * m11).max(0.0) / n).sqrt();
    (cov, se)
}

pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2) - 3.0
}

/// Batch-means standard error of an arbitrary statistic: split into `k`
/// contiguous batches, take the spread of the batch values. Robust for
/// statistics (skewness, KS distance) whose delta-method error is awkward.
pub fn batch_sem(xs: &[f64], k: usize, stat: impl Fn(&[f64]) -> f64) -> f64 {
    let k = k.min(xs.len()).max(2);
    let size = xs.len() / k;
    let vals: Vec<f64> = (0..k).map(|i| stat(&xs[i * size..(i + 1) * size])).collect();
    let (_, sem) = mean_with_sem(&vals);
    sem
}

/// Kolmogorov–Smirnov sup distance between the empirical CDF of `xs` and the
/// normal law fitted to the sample mean and variance.
pub fn ks_distance_to_fitted_normal(xs: &[f64]) -> f64 {
    let (mean, _) = mean_with_sem(xs);
    let (var, _) = variance_with_sem(xs);
    let normal = Normal::new(mean, var.sqrt()).expect("fitted normal");
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = normal.cdf(*x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        sup = sup.max((f - lo).abs()).max((hi - f).abs());
    }
    sup
}

/// Smallest eigenvalue and trace of a symmetric matrix.
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> (f64, f64) {
    let trace = m.trace();
    let eigs = m.clone().symmetric_eigenvalues();
    let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    (min, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use approx::assert_relative_eq;
    use rand_distr::{Distribution, Normal as RandNormal};

    #[test]
    fn variance_estimate_on_gaussian_sample() {
        let mut rng = replicate_rng(11, 0);
        let normal = RandNormal::new(0.0, 2.0).unwrap();
        let xs: Vec<f64> = (0..40_000).map(|_| normal.sample(&mut rng)).collect();
        let (var, se) = variance_with_sem(&xs);
        assert!((var - 4.0).abs() < 4.0 * se, "var={var} se={se}");
        // Gaussian: se(var) ≈ var·sqrt(2/n).
        assert_relative_eq!(se, 4.0 * (2.0f64 / 40_000.0).sqrt(), max_relative = 0.15);
    }

    #[test]
    fn ks_distance_small_for_normal_sample() {
        let mut rng = replicate_rng(12, 0);
        let normal = RandNormal::new(1.0, 3.0).unwrap();
        let xs: Vec<f64> = (0..20_000).map(|_| normal.sample(&mut rng)).collect();
        assert!(ks_distance_to_fitted_normal(&xs) < 0.02);
    }

    #[test]
    fn min_eigenvalue_of_known_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (min, trace) = min_symmetric_eigenvalue(&m);
        assert_relative_eq!(min, 1.0, epsilon = 1e-12);
        assert_relative_eq!(trace, 4.0, epsilon = 1e-12);
    }
}
