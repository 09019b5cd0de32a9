//! Distributional scale relation of the fractional field. Substituting
//! (x, r) → (ax, ar) multiplies the intensity dx·r^{2H−d−1} dr by a^{−2H},
//! while dilating the body by b multiplies it by b^{d−2H}; hence dilating
//! the argument by a matches dilating the body by b = a^{2H/(d−2H)} in
//! joint law, not just in variance.

use crate::error::{Error, Result};
use crate::geometry::vec::scaled;
use crate::geometry::ConvexBody;
use crate::poisson::charfn::{empirical_char_function, skellam_log_char};
use crate::poisson::engine::simulate;
use crate::poisson::spec::PoissonFieldSpec;
use crate::poisson::variance::variance_quadrature;
use crate::report::Report;
use crate::rng::derive_seed;
use crate::stats::variance_with_sem;

/// Simulates the field at a·z and the b-dilated body's field at z and
/// compares their variance and characteristic function against each other
/// and against the quadrature value, at 3.5 standard errors.
pub fn scaling_check(
    body: &ConvexBody,
    hurst: f64,
    z: &[f64],
    a: f64,
    n_paths: usize,
    seed: u64,
) -> Result<Report> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scale factor must be positive, got {a}"
        )));
    }
    let started = std::time::Instant::now();
    let d = body.dim() as f64;
    let b = a.powf(2.0 * hurst / (d - 2.0 * hurst));
    let arg_spec = PoissonFieldSpec::Fractional {
        hurst,
        body: body.clone(),
    };
    let body_spec = PoissonFieldSpec::Fractional {
        hurst,
        body: body.scaled(b)?,
    };
    let az = scaled(z, a);

    let target = variance_quadrature(&arg_spec, &az)?;
    let target_dilated = variance_quadrature(&body_spec, z)?;

    let sigma = 3.5;
    let mut report = Report::new("scaling", sigma, seed);
    report.push("scale-factor-body", b, 0.0);
    report.push("variance-quadrature", target, 0.0);
    report.push("variance-quadrature-dilated-body", target_dilated, 0.0);
    report.require((target - target_dilated).abs() <= 1e-6 * target.abs());

    let arg_batch = simulate(&arg_spec, &[az], n_paths, derive_seed(seed, "scaling-arg"))?;
    let body_batch = simulate(
        &body_spec,
        &[z.to_vec()],
        n_paths,
        derive_seed(seed, "scaling-body"),
    )?;
    let xs = arg_batch.column_f64(0);
    let ys = body_batch.column_f64(0);

    let (v1, e1) = variance_with_sem(&xs);
    let (v2, e2) = variance_with_sem(&ys);
    report.push("variance-dilated-argument", v1, e1);
    report.push("variance-dilated-body", v2, e2);
    report.require((v1 - v2).abs() <= sigma * e1.hypot(e2));
    report.require((v1 - target).abs() <= sigma * e1);
    report.require((v2 - target).abs() <= sigma * e2);

    let ts = [0.5, 1.0];
    let phi_arg = empirical_char_function(&xs, &ts)?;
    let phi_body = empirical_char_function(&ys, &ts)?;
    for (pa, pb) in phi_arg.iter().zip(&phi_body) {
        let exact = skellam_log_char(target, pa.t).exp();
        report.push(format!("charfn-{}-dilated-argument", pa.t), pa.phi, pa.stderr);
        report.push(format!("charfn-{}-dilated-body", pb.t), pb.phi, pb.stderr);
        report.push(format!("charfn-{}-exact", pa.t), exact, 0.0);
        report.require((pa.phi - pb.phi).abs() <= sigma * pa.stderr.hypot(pb.stderr));
        report.require((pa.phi - exact).abs() <= sigma * pa.stderr);
        report.require((pb.phi - exact).abs() <= sigma * pb.stderr);
    }
    report.runtime_s = started.elapsed().as_secs_f64();
    Ok(report)
}
