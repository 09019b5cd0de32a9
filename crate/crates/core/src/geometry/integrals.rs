//! Integrals of powers of the chord-length function over a body's shadow.
//! These connect the convex geometry to both the variance of the shot-noise
//! fields and the radial pth mean body: for p > −1,
//! ∫_K dist(x, ∂K in direction u)^p dx = (1/(p+1)) ∫_shadow ℓ(y)^{p+1} dy.

use statrs::function::gamma::gamma;

use crate::geometry::convex::ConvexBody;
use crate::geometry::vec::{check_dim, complement_basis, dot, normalized, perp2, scaled};
use crate::quad::linear_power_integral;
use crate::{Error, Result};

/// ∫ over the shadow of K on u^⊥ of ℓ(y)^q dy, where ℓ(y) is the length of
/// the chord K ∩ (y + ℝu); q > −1. In d = 1 the shadow is a single point
/// carrying counting measure, so the value is |K|^q.
///
/// Exact for all bodies in d ≤ 2 and for balls and ellipsoids in d = 3;
/// 3-d polytopes use a midpoint lattice with ~400² chords.
pub fn chord_power_integral(body: &ConvexBody, u: &[f64], q: f64) -> Result<f64> {
    chord_power_integral_with(body, u, q, 400)
}

/// As [`chord_power_integral`] with an explicit lattice resolution for the
/// 3-d polytope fallback.
pub fn chord_power_integral_with(
    body: &ConvexBody,
    u: &[f64],
    q: f64,
    grid_n: usize,
) -> Result<f64> {
    let d = body.dim();
    check_dim(d, u)?;
    if !(q > -1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "chord power integral needs q > -1, got {q}"
        )));
    }
    let un = normalized(u)?;

    if d == 1 {
        let len = body
            .line_chord(&un, &[0.0])
            .map_or(0.0, |(t0, t1)| (t1 - t0).max(0.0));
        return Ok(len.powf(q));
    }

    // Balls and ellipsoids: ℓ(y) = ℓ_max·√(1 − g(y)) where {g ≤ 1} is the
    // shadow ellipse, so the integral reduces to a beta-function moment:
    // ℓ_max^q · Vol(shadow) · Γ(k/2+1)Γ(q/2+1)/Γ((k+q)/2+1), k = d−1.
    if let Some(lmax) = body.center_chord_length(&un) {
        let k = (d - 1) as f64;
        let shadow = body.shadow_area(&un)?;
        let factor = gamma(k / 2.0 + 1.0) * gamma(q / 2.0 + 1.0) / gamma((k + q) / 2.0 + 1.0);
        return Ok(lmax.powf(q) * shadow * factor);
    }

    let verts = body
        .vertices()
        .expect("non-smooth bodies expose their vertices");
    match d {
        2 => {
            // ℓ is piecewise linear between consecutive vertex projections,
            // so each segment integrates in closed form.
            let w = perp2(&un);
            let mut ts: Vec<f64> = verts.iter().map(|v| dot(v, &w)).collect();
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            let mut total = 0.0;
            for seg in ts.windows(2) {
                let (t0, t1) = (seg[0], seg[1]);
                if t1 - t0 < 1e-14 {
                    continue;
                }
                let la = chord_at(body, &un, &w, t0);
                let lb = chord_at(body, &un, &w, t1);
                let m = (lb - la) / (t1 - t0);
                let c = la - m * t0;
                total += linear_power_integral(c, m, q, t0, t1);
            }
            Ok(total)
        }
        3 => {
            let basis = complement_basis(&un);
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for v in &verts {
                for (k, b) in basis.iter().enumerate() {
                    let t = dot(v, b);
                    lo[k] = lo[k].min(t);
                    hi[k] = hi[k].max(t);
                }
            }
            let n = grid_n.max(8);
            let hx = (hi[0] - lo[0]) / n as f64;
            let hy = (hi[1] - lo[1]) / n as f64;
            let mut sum = 0.0;
            let dim = basis[0].len();
            let mut point = vec![0.0; dim];
            for i in 0..n {
                let x = lo[0] + (i as f64 + 0.5) * hx;
                for j in 0..n {
                    let y = lo[1] + (j as f64 + 0.5) * hy;
                    for k in 0..dim {
                        point[k] = x * basis[0][k] + y * basis[1][k];
                    }
                    if let Some((t0, t1)) = body.line_chord(&un, &point) {
                        let len = t1 - t0;
                        if len > 0.0 {
                            sum += len.powf(q);
                        }
                    }
                }
            }
            Ok(sum * hx * hy)
        }
        _ => Err(Error::UnsupportedDimension {
            dim: d,
            op: "chord power integral".into(),
        }),
    }
}

fn chord_at(body: &ConvexBody, un: &[f64], w: &[f64], t: f64) -> f64 {
    body.line_chord(un, &scaled(w, t))
        .map_or(0.0, |(t0, t1)| (t1 - t0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{graded_edges, integrate_panels};
    use approx::assert_relative_eq;

    #[test]
    fn unit_square_along_the_axis() {
        let k = ConvexBody::unit_square();
        for q in [0.37, 0.5, 1.0, 2.0] {
            assert_relative_eq!(
                chord_power_integral(&k, &[1.0, 0.0], q).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn unit_square_along_the_diagonal() {
        // ℓ(t) = √2 − 2|t| on [−1/√2, 1/√2]: integral (√2)^{q+1}/(q+1).
        let k = ConvexBody::unit_square();
        let diag = [std::f64::consts::FRAC_1_SQRT_2; 2];
        for q in [0.5, 1.0, 2.0] {
            let expect = 2.0f64.sqrt().powf(q + 1.0) / (q + 1.0);
            assert_relative_eq!(
                chord_power_integral(&k, &diag, q).unwrap(),
                expect,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn q_one_recovers_the_volume() {
        let bodies: Vec<(ConvexBody, Vec<f64>)> = vec![
            (ConvexBody::regular_polygon(6, 1.0).unwrap(), vec![0.3, 0.6]),
            (ConvexBody::ball(vec![0.5, -0.5], 1.3).unwrap(), vec![1.0, 0.1]),
            (
                ConvexBody::ellipsoid(
                    vec![0.0, 0.0],
                    vec![vec![0.25, 0.1], vec![0.1, 1.0]],
                )
                .unwrap(),
                vec![-0.2, 1.0],
            ),
            (
                ConvexBody::ball(vec![0.0, 0.0, 0.0], 0.9).unwrap(),
                vec![1.0, 1.0, 1.0],
            ),
        ];
        for (k, u) in &bodies {
            let un = normalized(u).unwrap();
            assert_relative_eq!(
                chord_power_integral(k, &un, 1.0).unwrap(),
                k.volume(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn cube_lattice_matches_volume_along_the_diagonal() {
        let cube = ConvexBody::cuboid(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let diag = [1.0 / 3.0f64.sqrt(); 3];
        let v = chord_power_integral_with(&cube, &diag, 1.0, 600).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 5e-3);
        // Along an axis the lattice is exact: ℓ ≡ 1 on the unit-square shadow.
        let axis = chord_power_integral(&cube, &[0.0, 0.0, 1.0], 0.7).unwrap();
        assert_relative_eq!(axis, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ball_3d_closed_form() {
        // ∫ (2√(r²−ρ²))^q over the disc = π 2^{q+1} r^{q+2}/(q+2).
        let r = 1.4;
        let k = ConvexBody::ball(vec![0.0, 0.0, 0.0], r).unwrap();
        for q in [0.5, 1.3] {
            let expect = std::f64::consts::PI * 2.0f64.powf(q + 1.0) * r.powf(q + 2.0) / (q + 2.0);
            assert_relative_eq!(
                chord_power_integral(&k, &[0.0, 1.0, 0.0], q).unwrap(),
                expect,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn ellipse_closed_form_against_panel_quadrature() {
        // Semi-axes 2 and 1, integrate along e1: ℓ(y) = 4√(1−y²).
        let k = ConvexBody::ellipsoid(vec![0.0, 0.0], vec![vec![0.25, 0.0], vec![0.0, 1.0]])
            .unwrap();
        let q = 0.6;
        let exact = chord_power_integral(&k, &[1.0, 0.0], q).unwrap();
        let f = |y: f64| (4.0 * (1.0 - y * y).max(0.0).sqrt()).powf(q);
        // Integrand is even with √-type decay at y = 1: integrate [0,1]
        // with panels graded toward 1 and double.
        let edges: Vec<f64> = graded_edges(0.0, 1.0, 80, 3.0)
            .into_iter()
            .rev()
            .map(|t| 1.0 - t)
            .collect();
        let (half, _) = integrate_panels(f, &edges, 20);
        assert_relative_eq!(exact, 2.0 * half, max_relative = 1e-6);
    }

    #[test]
    fn one_dimensional_interval() {
        let k = ConvexBody::cuboid(vec![-1.0], vec![3.0]).unwrap();
        assert_relative_eq!(
            chord_power_integral(&k, &[1.0], 0.5).unwrap(),
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rejects_bad_exponents() {
        let k = ConvexBody::unit_square();
        assert!(chord_power_integral(&k, &[1.0, 0.0], -1.0).is_err());
        assert!(chord_power_integral(&k, &[1.0, 0.0], f64::NAN).is_err());
    }
}
