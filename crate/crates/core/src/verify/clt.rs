//! Central-limit behaviour of the rescaled field: pushing the evaluation
//! point out by a factor `a` and dividing by `a^H` keeps the variance fixed
//! while the marginal law drifts toward a Gaussian. The check tracks the
//! moment diagnostics and a fitted-normal distribution distance along an
//! increasing scale sequence.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::gaussian::{cholesky_simulate, MfBfSpec, Variant};
use crate::geometry::vec::scaled;
use crate::geometry::{ConvexBody, StarBody};
use crate::poisson::{simulate, variance_quadrature, PoissonFieldSpec};
use crate::report::Report;
use crate::rng::derive_seed;
use crate::stats::{
    batch_sem, excess_kurtosis, ks_distance_to_fitted_normal, mean_with_sem, skewness,
    variance_with_sem,
};

/// Simulates `a^{-H} xi(a z)` for each `a` in the increasing `a_values`,
/// then requires: the variance matches quadrature at every scale, the
/// largest scale passes the moment and distribution-distance gates, and the
/// diagnostics improve from the first scale to the last. A Gaussian sample
/// of the same size supplies the distance noise floor (the fitted-normal
/// distance is scale-free, so no rescaling is needed there).
#[allow(clippy::too_many_arguments)]
pub fn clt_rescale_report(
    name: &str,
    body: &ConvexBody,
    hurst: f64,
    a_values: &[f64],
    z: &[f64],
    n_paths: usize,
    ks_level: f64,
    seed: u64,
) -> Result<Report> {
    let started = Instant::now();
    if a_values.len() < 2 || a_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "need at least two strictly increasing scale factors".into(),
        ));
    }
    let sigma = 3.0;
    let mut report = Report::new(name, sigma, seed);
    let spec = PoissonFieldSpec::Fractional {
        hurst,
        body: body.clone(),
    };

    let mut diagnostics = Vec::with_capacity(a_values.len());
    for (i, &a) in a_values.iter().enumerate() {
        let az = scaled(z, a);
        let target = variance_quadrature(&spec, &az)? * a.powf(-2.0 * hurst);
        let batch = simulate(
            &spec,
            &[az],
            n_paths,
            derive_seed(seed, &format!("{name}-a{i}")),
        )?;
        let rescale = a.powf(-hurst);
        let xs: Vec<f64> = batch.column_f64(0).iter().map(|v| v * rescale).collect();

        let (mean, mean_se) = mean_with_sem(&xs);
        let (var, var_se) = variance_with_sem(&xs);
        let sk = skewness(&xs);
        let sk_se = batch_sem(&xs, 20, skewness);
        let ku = excess_kurtosis(&xs);
        let ku_se = batch_sem(&xs, 20, excess_kurtosis);
        let ks = ks_distance_to_fitted_normal(&xs);

        report.push(format!("mean-a{a}"), mean, mean_se);
        report.push(format!("variance-a{a}"), var, var_se);
        report.push(format!("variance-target-a{a}"), target, 0.0);
        report.push(format!("skewness-a{a}"), sk, sk_se);
        report.push(format!("excess-kurtosis-a{a}"), ku, ku_se);
        report.push(format!("ks-distance-a{a}"), ks, 0.0);
        report.require((var - target).abs() <= sigma * var_se);
        diagnostics.push((sk, sk_se, ku, ku_se, ks));
    }

    let (sk0, sk0_se, ku0, ku0_se, ks0) = diagnostics[0];
    let (skl, skl_se, kul, kul_se, ksl) = *diagnostics.last().expect("two or more scales");
    // The largest scale must look Gaussian.
    report.require(skl.abs() <= sigma * skl_se);
    report.require(kul.abs() <= sigma * kul_se);
    report.require(ksl <= ks_level);
    // And the diagnostics must improve along the sequence.
    report.require(skl.abs() <= sk0.abs() + sigma * sk0_se.hypot(skl_se));
    report.require(kul <= ku0 + sigma * ku0_se.hypot(kul_se));
    report.require(ksl < ks0);

    let gauss = MfBfSpec::new(hurst, StarBody::euclidean_ball(body.dim()), Variant::Standard)?;
    let reference = cholesky_simulate(
        &gauss,
        &[z.to_vec()],
        n_paths,
        derive_seed(seed, &format!("{name}-ref")),
    )?;
    report.push(
        "ks-distance-gaussian-reference",
        ks_distance_to_fitted_normal(&reference.column(0)),
        0.0,
    );

    report.runtime_s = started.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_marginals_drift_toward_gaussian() {
        let report = clt_rescale_report(
            "clt-square",
            &ConvexBody::unit_square(),
            0.25,
            &[1.0, 8.0, 64.0],
            &[1.0, 0.0],
            30_000,
            0.05,
            13,
        )
        .unwrap();
        assert!(report.pass, "{report:?}");
        // The variance is scale-free for this body and point.
        let target = report.quantity("variance-target-a64").unwrap();
        assert!((target.value - 8.0).abs() < 1e-8);
        let first = report.quantity("ks-distance-a1").unwrap().value;
        let last = report.quantity("ks-distance-a64").unwrap().value;
        assert!(last < first, "{first} -> {last}");
    }

    #[test]
    fn unsorted_scales_are_rejected() {
        let err = clt_rescale_report(
            "clt-bad",
            &ConvexBody::unit_square(),
            0.25,
            &[4.0, 1.0],
            &[1.0, 0.0],
            100,
            0.05,
            13,
        )
        .unwrap_err();
        assert!(err.to_string().contains("increasing"), "{err}");
    }
}
