//! Variances of the shot-noise fields by fiber integration. Splitting the
//! symmetric-difference mass along the argument direction gives, per shadow
//! point w with chord length ℓ(w), the scale integral
//! ∫ r^{α−2}·2·min(|z|, r·ℓ(w)) dr, which is explicit in both regimes of
//! min; summing the pieces over the shadow is the variance.

use crate::error::{Error, Result};
use crate::geometry::integrals::chord_power_integral;
use crate::geometry::vec::{check_dim, check_finite, complement_basis, dot, norm, scaled};
use crate::geometry::{ConvexBody, ShadowSampler, SpectralMeasure};
use crate::poisson::engine::power_integral;
use crate::poisson::spec::PoissonFieldSpec;
use crate::quad::{graded_edges, integrate_panels};

/// Exact (up to quadrature) variance of the field at z.
pub fn variance_quadrature(spec: &PoissonFieldSpec, z: &[f64]) -> Result<f64> {
    spec.validate()?;
    match spec {
        PoissonFieldSpec::Fractional { hurst, body } => fractional_variance(body, *hurst, z),
        PoissonFieldSpec::Truncated { p, cap, body } => truncated_variance(body, *p, *cap, z),
        PoissonFieldSpec::Directional { hurst, measure } => {
            directional_variance(measure, *hurst, z)
        }
    }
}

/// |z|^{2H}/(H(1−2H)) times the chord-power integral of the body with
/// exponent 1−2H in the argument direction.
pub fn fractional_variance(body: &ConvexBody, hurst: f64, z: &[f64]) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "fractional field needs 0 < hurst < 1/2, got {hurst}"
        )));
    }
    check_dim(body.dim(), z)?;
    check_finite(z, "evaluation point")?;
    let s = norm(z);
    if s == 0.0 {
        return Err(Error::OriginEvalPoint);
    }
    let dir = scaled(z, 1.0 / s);
    let cpi = chord_power_integral(body, &dir, 1.0 - 2.0 * hurst)?;
    Ok(s.powf(2.0 * hurst) / (hurst * (1.0 - 2.0 * hurst)) * cpi)
}

/// One-dimensional fields along the atoms are independent, so the variance
/// is 2^{1−2H}/(H(1−2H)) times the weighted 2H-moment of |⟨z, v⟩|.
pub fn directional_variance(
    measure: &SpectralMeasure,
    hurst: f64,
    z: &[f64],
) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "fractional field needs 0 < hurst < 1/2, got {hurst}"
        )));
    }
    if measure.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    check_dim(measure.dim(), z)?;
    check_finite(z, "evaluation point")?;
    if norm(z) == 0.0 {
        return Err(Error::OriginEvalPoint);
    }
    let c1d = 2.0f64.powf(1.0 - 2.0 * hurst) / (hurst * (1.0 - 2.0 * hurst));
    Ok(c1d * measure.moment_sum(z, 2.0 * hurst))
}

/// Capped fiber integral 2[ℓ·min(cap, r*)^{2p}/(2p) + |z|·∫_{r*}^{cap}
/// r^{2p−2} dr], r* = |z|/ℓ, summed over the shadow.
pub fn truncated_variance(body: &ConvexBody, p: f64, cap: f64, z: &[f64]) -> Result<f64> {
    if !(p > 0.5 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "truncated field needs p > 1/2, got {p}"
        )));
    }
    if !(cap > 0.0 && cap.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "truncated field needs a positive finite cap, got {cap}"
        )));
    }
    check_dim(body.dim(), z)?;
    check_finite(z, "evaluation point")?;
    let s = norm(z);
    if s == 0.0 {
        return Err(Error::OriginEvalPoint);
    }
    let dir = scaled(z, 1.0 / s);
    let refl = body.reflected();

    match body.dim() {
        1 => Ok(fiber_value(body.volume(), s, p, cap)),
        2 => truncated_variance_interval(&refl, &dir, s, p, cap),
        3 => {
            if let Some(lmax) = body.center_chord_length(&dir) {
                truncated_variance_elliptic(body, &dir, lmax, s, p, cap)
            } else {
                truncated_variance_lattice(&refl, &dir, s, p, cap)
            }
        }
        d => Err(Error::UnsupportedDimension {
            dim: d,
            op: "truncated variance".into(),
        }),
    }
}

/// Scale integral over one fiber with chord length ℓ.
fn fiber_value(ell: f64, s: f64, p: f64, cap: f64) -> f64 {
    if ell <= 0.0 {
        return 0.0;
    }
    let two_p = 2.0 * p;
    let rstar = s / ell;
    let mut v = ell * rstar.min(cap).powf(two_p) / two_p;
    if rstar < cap {
        v += s * power_integral(two_p - 1.0, rstar, cap);
    }
    2.0 * v
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if (fa > 0.0) == (fm > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// 2-d case: the shadow is an interval; the integrand kinks where the chord
/// function crosses |z|/cap and at vertex projections, and has square-root
/// behaviour at the shadow endpoints, so panels break there and grade
/// toward the ends.
fn truncated_variance_interval(
    refl: &ConvexBody,
    dir: &[f64],
    s: f64,
    p: f64,
    cap: f64,
) -> Result<f64> {
    let ShadowSampler::Interval { axis, lo, hi } = refl.shadow_sampler(dir)? else {
        unreachable!("2-d shadows are intervals");
    };
    let width = hi - lo;
    if !(width > 0.0) {
        return Err(Error::InvalidParameter("degenerate shadow".into()));
    }
    let ell = |w: f64| {
        refl.chord_length(dir, &scaled(&axis, w))
            .expect("shadow axis is orthogonal to the direction")
    };

    let mut brk = vec![lo, hi];
    if let Some(verts) = refl.vertices() {
        for v in &verts {
            let w = dot(v, &axis);
            if w > lo + 1e-12 * width && w < hi - 1e-12 * width {
                brk.push(w);
            }
        }
    }
    // Kink of min(|z|, r·ℓ(w)) at the cap: ℓ(w) = |z|/cap. The chord
    // function of a planar convex body is concave, so at most two roots.
    let thr = s / cap;
    let probes = 128;
    let mut prev_w = lo;
    let mut prev_g = ell(prev_w) - thr;
    for i in 1..=probes {
        let w = lo + width * i as f64 / probes as f64;
        let g = ell(w) - thr;
        if (prev_g > 0.0) != (g > 0.0) {
            brk.push(bisect(|t| ell(t) - thr, prev_w, w));
        }
        prev_w = w;
        prev_g = g;
    }
    brk.sort_by(|a, b| a.partial_cmp(b).unwrap());
    brk.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * width.max(1.0));

    let mut edges: Vec<f64> = Vec::new();
    let push_seg = |seg: Vec<f64>, edges: &mut Vec<f64>| {
        for e in seg {
            if edges.last().is_none_or(|&last| e > last) {
                edges.push(e);
            }
        }
    };
    // Every breakpoint can carry a kink or square-root behaviour (shadow
    // ends, vertex projections, cap crossings), so each segment grades
    // toward both of its endpoints.
    for seg in brk.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b - a <= 1e-14 * width {
            continue;
        }
        let m = 0.5 * (a + b);
        push_seg(graded_edges(a, m, 20, 5.0), &mut edges);
        let mut right = graded_edges(b, m, 20, 5.0);
        right.reverse();
        push_seg(right, &mut edges);
    }

    let f = |w: f64| fiber_value(ell(w), s, p, cap);
    let coarse = integrate_panels(f, &edges, 8).0;
    let fine = integrate_panels(f, &edges, 16).0;
    if (fine - coarse).abs() > 1e-6 * fine.abs().max(1e-12) {
        return Err(Error::QuadratureNotConverged { coarse, fine });
    }
    Ok(fine)
}

/// Balls and ellipsoids in 3-d: the chord profile is ℓ_max·√(1−g) with the
/// sublevel areas of g proportional to the level, so the shadow integral
/// collapses to Vol(shadow)·∫₀¹ f(ℓ_max·u)·2u du.
fn truncated_variance_elliptic(
    body: &ConvexBody,
    dir: &[f64],
    lmax: f64,
    s: f64,
    p: f64,
    cap: f64,
) -> Result<f64> {
    let shadow = body.shadow_area(dir)?;
    let mut brk = vec![0.0, 1.0];
    let ustar = s / (cap * lmax);
    if ustar > 1e-12 && ustar < 1.0 - 1e-12 {
        brk.push(ustar);
        brk.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    let mut edges = Vec::new();
    for seg in brk.windows(2) {
        for k in 0..=24 {
            let e = seg[0] + (seg[1] - seg[0]) * k as f64 / 24.0;
            if edges.last().is_none_or(|&last| e > last) {
                edges.push(e);
            }
        }
    }
    let f = |u: f64| fiber_value(lmax * u, s, p, cap) * 2.0 * u;
    let coarse = integrate_panels(f, &edges, 8).0;
    let fine = integrate_panels(f, &edges, 16).0;
    if (fine - coarse).abs() > 1e-9 * fine.abs().max(1e-12) {
        return Err(Error::QuadratureNotConverged { coarse, fine });
    }
    Ok(shadow * fine)
}

/// 3-d polytopes and boxes: midpoint lattice over the shadow's bounding
/// box at two resolutions, with an honest agreement gate.
fn truncated_variance_lattice(
    refl: &ConvexBody,
    dir: &[f64],
    s: f64,
    p: f64,
    cap: f64,
) -> Result<f64> {
    let basis = complement_basis(dir);
    let value = |n: usize| {
        let mut lo = [0.0f64; 2];
        let mut hi = [0.0f64; 2];
        for k in 0..2 {
            hi[k] = refl.support(&basis[k]);
            lo[k] = -refl.support(&scaled(&basis[k], -1.0));
        }
        let hx = (hi[0] - lo[0]) / n as f64;
        let hy = (hi[1] - lo[1]) / n as f64;
        let d = basis[0].len();
        let mut point = vec![0.0; d];
        let mut sum = 0.0;
        for i in 0..n {
            let x = lo[0] + (i as f64 + 0.5) * hx;
            for j in 0..n {
                let y = lo[1] + (j as f64 + 0.5) * hy;
                for k in 0..d {
                    point[k] = x * basis[0][k] + y * basis[1][k];
                }
                let ell = refl
                    .line_chord(dir, &point)
                    .map_or(0.0, |(t0, t1)| (t1 - t0).max(0.0));
                sum += fiber_value(ell, s, p, cap);
            }
        }
        sum * hx * hy
    };
    let coarse = value(217);
    let fine = value(307);
    if (fine - coarse).abs() > 2e-2 * fine.abs().max(1e-12) {
        return Err(Error::QuadratureNotConverged { coarse, fine });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_axis_values_are_exact() {
        let square = ConvexBody::unit_square();
        let v = fractional_variance(&square, 0.25, &[1.0, 0.0]).unwrap();
        assert_relative_eq!(v, 8.0, max_relative = 1e-12);
        for a in [0.5, 2.0, 7.0] {
            let va = fractional_variance(&square, 0.25, &[a, 0.0]).unwrap();
            assert_relative_eq!(va, 8.0 * a.sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn truncated_square_closed_form() {
        let square = ConvexBody::unit_square();
        // Along the axis every chord has length 1 and r* = 1, so for p = 1
        // and cap ≥ 1 the variance is 2·cap − 1.
        let mut rescaled = Vec::new();
        for cap in [10.0, 100.0, 1000.0] {
            let v = truncated_variance(&square, 1.0, cap, &[1.0, 0.0]).unwrap();
            assert_relative_eq!(v, 2.0 * cap - 1.0, max_relative = 1e-9);
            rescaled.push(v / cap);
        }
        assert!(rescaled.windows(2).all(|w| w[1] > w[0]));
        assert!((rescaled[2] - 2.0).abs() < 2e-3);
        // Cap below r*: only the fully-covered regime contributes cap².
        let small = truncated_variance(&square, 1.0, 0.5, &[1.0, 0.0]).unwrap();
        assert_relative_eq!(small, 0.25, max_relative = 1e-9);
    }

    #[test]
    fn one_dimensional_fiber_is_explicit() {
        let seg = ConvexBody::cuboid(vec![-1.0], vec![1.0]).unwrap();
        // ℓ = 2, r* = 1/2: 2[2·(1/2)²/2 + (10 − 1/2)] = 19.5.
        let v = truncated_variance(&seg, 1.0, 10.0, &[1.0]).unwrap();
        assert_relative_eq!(v, 19.5, max_relative = 1e-12);
    }

    #[test]
    fn disc_truncated_matches_brute_force() {
        let disc = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        let (p, cap) = (1.0, 4.0);
        let v = truncated_variance(&disc, p, cap, &[1.0, 0.0]).unwrap();
        // Brute-force midpoint over (w, r), independent of the fiber
        // formula: ∫∫ r^{2p−2}·2·min(|z|, r·ℓ(w)) dr dw.
        let (nw, nr) = (2000, 4000);
        let mut brute = 0.0;
        for i in 0..nw {
            let w = -1.0 + 2.0 * (i as f64 + 0.5) / nw as f64;
            let ell = 2.0 * (1.0 - w * w).max(0.0).sqrt();
            for j in 0..nr {
                let r = cap * (j as f64 + 0.5) / nr as f64;
                brute += r.powf(2.0 * p - 2.0) * 2.0 * (1.0f64).min(r * ell);
            }
        }
        brute *= (2.0 / nw as f64) * (cap / nr as f64);
        assert_relative_eq!(v, brute, max_relative = 2e-4);
    }

    #[test]
    fn ball_3d_uses_the_level_set_form() {
        let ball = ConvexBody::ball(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let (p, cap, s) = (1.0, 2.0, 1.0);
        let v = truncated_variance(&ball, p, cap, &[0.0, 0.0, s]).unwrap();
        let n = 400_001;
        let mut brute = 0.0;
        for k in 0..n {
            let u = (k as f64 + 0.5) / n as f64;
            brute += fiber_value(2.0 * u, s, p, cap) * 2.0 * u;
        }
        brute *= std::f64::consts::PI / n as f64;
        assert_relative_eq!(v, brute, max_relative = 1e-6);
    }

    #[test]
    fn cube_3d_lattice_is_exact_along_the_axis() {
        let cube = ConvexBody::cuboid(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]).unwrap();
        // Every fiber over the unit-square shadow has chord 1.
        let v = truncated_variance(&cube, 1.0, 10.0, &[1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(v, 19.0, max_relative = 1e-12);
    }

    #[test]
    fn variance_is_even_in_the_argument() {
        let hexagon = ConvexBody::regular_polygon(6, 1.0).unwrap();
        let z = [0.3, 0.7];
        let neg = [-0.3, -0.7];
        let a = fractional_variance(&hexagon, 0.3, &z).unwrap();
        let b = fractional_variance(&hexagon, 0.3, &neg).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
        let at = truncated_variance(&hexagon, 1.0, 5.0, &z).unwrap();
        let bt = truncated_variance(&hexagon, 1.0, 5.0, &neg).unwrap();
        assert_relative_eq!(at, bt, max_relative = 1e-8);
    }

    #[test]
    fn directional_closed_form() {
        let measure =
            SpectralMeasure::from_pairs(2, &[(vec![1.0, 0.0], 2.0)]).unwrap();
        let hurst = 0.25;
        let z = [3.0, -1.0];
        let v = directional_variance(&measure, hurst, &z).unwrap();
        let c1d = 2.0f64.sqrt() / (0.25 * 0.5);
        assert_relative_eq!(v, c1d * 2.0 * 3.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        let square = ConvexBody::unit_square();
        assert!(fractional_variance(&square, 0.5, &[1.0, 0.0]).is_err());
        assert!(fractional_variance(&square, 0.25, &[0.0, 0.0]).is_err());
        assert!(truncated_variance(&square, 0.5, 10.0, &[1.0, 0.0]).is_err());
        assert!(truncated_variance(&square, 1.0, -1.0, &[1.0, 0.0]).is_err());
        let empty = SpectralMeasure::new(2, vec![]);
        assert!(empty.is_err() || directional_variance(&empty.unwrap(), 0.25, &[1.0, 0.0]).is_err());
    }
}
