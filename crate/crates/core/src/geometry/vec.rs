//! Plain-slice vector helpers. Points are `Vec<f64>` throughout the crate;
//! nalgebra is reserved for dense linear algebra (Cholesky, eigenvalues).

use crate::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scaled(a: &[f64], t: f64) -> Vec<f64> {
    a.iter().map(|x| x * t).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// a + t·b without intermediate allocations.
pub fn axpy(a: &[f64], t: f64, b: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.extend(a.iter().zip(b).map(|(x, y)| x + t * y));
}

pub fn normalized(a: &[f64]) -> Result<Vec<f64>> {
    let n = norm(a);
    if n <= 0.0 || !n.is_finite() {
        return Err(Error::InvalidParameter(
            "direction must be a non-zero finite vector".into(),
        ));
    }
    Ok(scaled(a, 1.0 / n))
}

pub fn check_finite(z: &[f64], context: &str) -> Result<()> {
    if z.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: context.to_string(),
        })
    }
}

pub fn check_dim(expected: usize, z: &[f64]) -> Result<()> {
    if z.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            got: z.len(),
        })
    }
}

/// The counter-clockwise perpendicular of a 2-vector.
pub fn perp2(u: &[f64]) -> Vec<f64> {
    vec![-u[1], u[0]]
}

/// Orthonormal basis of the hyperplane u^⊥ (d−1 vectors), deterministic in u.
/// Gram-Schmidt over the coordinate axes, skipping the axis most aligned
/// with u so the pivot never degenerates.
pub fn complement_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    if d == 1 {
        return Vec::new();
    }
    if d == 2 {
        return vec![perp2(u)];
    }
    let skip = (0..d)
        .max_by(|&i, &j| u[i].abs().partial_cmp(&u[j].abs()).unwrap())
        .unwrap();
    let mut basis: Vec<Vec<f64>> = vec![u.to_vec()];
    for axis in (0..d).filter(|&i| i != skip) {
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        for b in &basis {
            let c = dot(&v, b) / dot(b, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let n = norm(&v);
        basis.push(scaled(&v, 1.0 / n));
    }
    basis.remove(0);
    basis
}

/// Convex hull of 2-D points, counter-clockwise (Andrew's monotone chain).
pub fn hull2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Signed area of a counter-clockwise polygon (shoelace).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        s += poly[i][0] * poly[j][1] - poly[j][0] * poly[i][1];
    }
    0.5 * s
}
