//! Bounded convex bodies: membership, support, chords, volumes, shadows
//! (projections onto hyperplanes), and uniform sampling. These are the shape
//! parameters of the Poisson fields; the star bodies in `star` are the shape
//! parameters of the Gaussian ones.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::geometry::vec::{
    add, check_dim, check_finite, complement_basis, dot, hull2d, norm, normalized, perp2,
    polygon_area, scaled, sub,
};
use crate::{Error, Result};

/// Volume of the d-dimensional unit Euclidean ball.
pub fn unit_ball_volume(d: usize) -> f64 {
    std::f64::consts::PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0)
}

#[derive(Debug, Clone)]
struct PolytopeData {
    dim: usize,
    /// (unit outward normal, offset): the body is ⋂ {⟨a,x⟩ ≤ b}.
    halfspaces: Vec<(Vec<f64>, f64)>,
    /// All vertices; counter-clockwise hull order when dim == 2.
    vertices: Vec<Vec<f64>>,
    /// dim == 3 only: per bounding halfspace, the ring of vertex indices.
    facets: Vec<(usize, Vec<usize>)>,
}

#[derive(Debug, Clone)]
enum Shape {
    Polytope(PolytopeData),
    Ellipsoid {
        center: Vec<f64>,
        matrix: Vec<Vec<f64>>,
        inverse: Vec<Vec<f64>>,
        det: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

/// A bounded convex body with non-empty interior.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ConvexBodyRaw", into = "ConvexBodyRaw")]
pub struct ConvexBody {
    shape: Shape,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ConvexBodyRaw {
    Polytope { halfspaces: Vec<(Vec<f64>, f64)> },
    Ellipsoid { center: Vec<f64>, matrix: Vec<Vec<f64>> },
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl TryFrom<ConvexBodyRaw> for ConvexBody {
    type Error = Error;
    fn try_from(raw: ConvexBodyRaw) -> Result<Self> {
        match raw {
            ConvexBodyRaw::Polytope { halfspaces } => ConvexBody::from_halfspaces(halfspaces),
            ConvexBodyRaw::Ellipsoid { center, matrix } => ConvexBody::ellipsoid(center, matrix),
            ConvexBodyRaw::Ball { center, radius } => ConvexBody::ball(center, radius),
            ConvexBodyRaw::Box { lower, upper } => ConvexBody::cuboid(lower, upper),
        }
    }
}

impl From<ConvexBody> for ConvexBodyRaw {
    fn from(body: ConvexBody) -> Self {
        match body.shape {
            Shape::Polytope(p) => ConvexBodyRaw::Polytope {
                halfspaces: p.halfspaces,
            },
            Shape::Ellipsoid { center, matrix, .. } => ConvexBodyRaw::Ellipsoid { center, matrix },
            Shape::Ball { center, radius } => ConvexBodyRaw::Ball { center, radius },
            Shape::Box { lower, upper } => ConvexBodyRaw::Box { lower, upper },
        }
    }
}

fn mat_det(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    match d {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => {
            let n = nalgebra::DMatrix::from_fn(d, d, |i, j| m[i][j]);
            n.determinant()
        }
    }
}

fn mat_inverse(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = m.len();
    let n = nalgebra::DMatrix::from_fn(d, d, |i, j| m[i][j]);
    let inv = n
        .try_inverse()
        .ok_or_else(|| Error::InvalidParameter("singular ellipsoid matrix".into()))?;
    Ok((0..d).map(|i| (0..d).map(|j| inv[(i, j)]).collect()).collect())
}

fn quad_form(m: &[Vec<f64>], x: &[f64]) -> f64 {
    m.iter().zip(x).map(|(row, xi)| xi * dot(row, x)).sum()
}

/// Solve the small linear system A x = b for d ≤ 3 (Cramer).
fn solve_small(a: &[&[f64]], b: &[f64]) -> Option<Vec<f64>> {
    let d = b.len();
    let rows: Vec<Vec<f64>> = a.iter().map(|r| r.to_vec()).collect();
    let det = mat_det(&rows);
    if det.abs() < 1e-12 {
        return None;
    }
    let mut out = vec![0.0; d];
    for k in 0..d {
        let mut m = rows.clone();
        for i in 0..d {
            m[i][k] = b[i];
        }
        out[k] = mat_det(&m) / det;
    }
    Some(out)
}

impl ConvexBody {
    pub fn from_halfspaces(halfspaces: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(Error::InvalidParameter("no halfspaces given".into()));
        }
        let dim = halfspaces[0].0.len();
        if !(dim == 2 || dim == 3) {
            return Err(Error::UnsupportedDimension {
                dim,
                op: "polytope".into(),
            });
        }
        let mut normalized_hs = Vec::with_capacity(halfspaces.len());
        for (a, b) in &halfspaces {
            check_dim(dim, a)?;
            check_finite(a, "halfspace normal")?;
            if !b.is_finite() {
                return Err(Error::NonFinite {
                    context: "halfspace offset".into(),
                });
            }
            let n = norm(a);
            if n < 1e-12 {
                return Err(Error::InvalidParameter("zero halfspace normal".into()));
            }
            normalized_hs.push((scaled(a, 1.0 / n), b / n));
        }
        let scale = 1.0 + normalized_hs.iter().map(|(_, b)| b.abs()).fold(0.0, f64::max);
        let feas_tol = 1e-9 * scale;

        // Enumerate candidate vertices from normal-count-sized subsets.
        let m = normalized_hs.len();
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        let push_candidate = |x: Vec<f64>, vertices: &mut Vec<Vec<f64>>| {
            if normalized_hs.iter().all(|(a, b)| dot(a, &x) <= b + feas_tol)
                && !vertices
                    .iter()
                    .any(|v| sub(v, &x).iter().all(|c| c.abs() < 1e-8 * scale))
            {
                vertices.push(x);
            }
        };
        if dim == 2 {
            for i in 0..m {
                for j in i + 1..m {
                    let a = [normalized_hs[i].0.as_slice(), normalized_hs[j].0.as_slice()];
                    let b = [normalized_hs[i].1, normalized_hs[j].1];
                    if let Some(x) = solve_small(&a, &b) {
                        push_candidate(x, &mut vertices);
                    }
                }
            }
        } else {
            for i in 0..m {
                for j in i + 1..m {
                    for k in j + 1..m {
                        let a = [
                            normalized_hs[i].0.as_slice(),
                            normalized_hs[j].0.as_slice(),
                            normalized_hs[k].0.as_slice(),
                        ];
                        let b = [normalized_hs[i].1, normalized_hs[j].1, normalized_hs[k].1];
                        if let Some(x) = solve_small(&a, &b) {
                            push_candidate(x, &mut vertices);
                        }
                    }
                }
            }
        }
        if vertices.len() < dim + 1 {
            return Err(Error::InvalidParameter(format!(
                "polytope has only {} vertices; empty or degenerate",
                vertices.len()
            )));
        }

        // Boundedness: the outward normals must positively span the space,
        // otherwise some direction recedes to infinity.
        if dim == 2 {
            let mut angles: Vec<f64> = normalized_hs
                .iter()
                .map(|(a, _)| a[1].atan2(a[0]))
                .collect();
            angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mut max_gap: f64 = 0.0;
            for i in 0..angles.len() {
                let next = if i + 1 < angles.len() {
                    angles[i + 1]
                } else {
                    angles[0] + 2.0 * std::f64::consts::PI
                };
                max_gap = max_gap.max(next - angles[i]);
            }
            if max_gap >= std::f64::consts::PI - 1e-9 {
                return Err(Error::InvalidParameter("polytope is unbounded".into()));
            }
        } else {
            let probes = crate::geometry::grid::DirectionGrid::fibonacci_sphere(200)?;
            for (u, _) in &probes.nodes {
                let covered = normalized_hs.iter().any(|(a, _)| dot(a, u) > 1e-8);
                if !covered {
                    return Err(Error::InvalidParameter("polytope is unbounded".into()));
                }
            }
        }

        // Interior: the vertex centroid must have positive slack.
        let centroid = centroid_of(&vertices);
        let slack = normalized_hs
            .iter()
            .map(|(a, b)| b - dot(a, &centroid))
            .fold(f64::INFINITY, f64::min);
        if slack <= 1e-9 * scale {
            return Err(Error::InvalidParameter(
                "polytope interior is empty or degenerate".into(),
            ));
        }

        let mut data = PolytopeData {
            dim,
            halfspaces: normalized_hs,
            vertices,
            facets: Vec::new(),
        };
        if dim == 2 {
            order_ccw(&mut data.vertices, &centroid);
        } else {
            data.facets = build_facets(&data, scale)?;
        }
        Ok(ConvexBody {
            shape: Shape::Polytope(data),
        })
    }

    /// Convex polygon from its vertices (any order); d = 2.
    pub fn polygon(vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidParameter("polygon needs >= 3 vertices".into()));
        }
        for v in &vertices {
            check_dim(2, v)?;
            check_finite(v, "polygon vertex")?;
        }
        let mut verts = vertices;
        let centroid = centroid_of(&verts);
        order_ccw(&mut verts, &centroid);
        let scale = 1.0 + verts.iter().map(|v| norm(v)).fold(0.0, f64::max);
        let n = verts.len();
        let mut halfspaces = Vec::with_capacity(n);
        for i in 0..n {
            let p = &verts[i];
            let q = &verts[(i + 1) % n];
            let edge = sub(q, p);
            // Outward normal of a CCW polygon is the clockwise perpendicular.
            let normal = normalized(&[edge[1], -edge[0]])?;
            let b = dot(&normal, p);
            for v in &verts {
                if dot(&normal, v) > b + 1e-9 * scale {
                    return Err(Error::InvalidParameter(
                        "polygon vertices are not in convex position".into(),
                    ));
                }
            }
            halfspaces.push((normal, b));
        }
        Ok(ConvexBody {
            shape: Shape::Polytope(PolytopeData {
                dim: 2,
                halfspaces,
                vertices: verts,
                facets: Vec::new(),
            }),
        })
    }

    /// Centred regular n-gon with the given circumradius.
    pub fn regular_polygon(n: usize, circumradius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter("regular polygon needs n >= 3".into()));
        }
        let verts = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                vec![circumradius * t.cos(), circumradius * t.sin()]
            })
            .collect();
        Self::polygon(verts)
    }

    pub fn cuboid(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidParameter("box corners must match and be non-empty".into()));
        }
        check_finite(&lower, "box lower corner")?;
        check_finite(&upper, "box upper corner")?;
        if lower.iter().zip(&upper).any(|(l, u)| !(u > l)) {
            return Err(Error::InvalidParameter(
                "box upper corner must exceed lower corner".into(),
            ));
        }
        Ok(ConvexBody {
            shape: Shape::Box { lower, upper },
        })
    }

    pub fn unit_square() -> Self {
        Self::cuboid(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_finite(&center, "ball center")?;
        if center.is_empty() || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter("ball needs a positive finite radius".into()));
        }
        Ok(ConvexBody {
            shape: Shape::Ball { center, radius },
        })
    }

    pub fn ellipsoid(center: Vec<f64>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let d = center.len();
        if d == 0 || matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidParameter(
                "ellipsoid matrix must be square and match the center".into(),
            ));
        }
        check_finite(&center, "ellipsoid center")?;
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| matrix[i][j]);
        if (&m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) {
            return Err(Error::InvalidParameter("ellipsoid matrix must be symmetric".into()));
        }
        if m.clone().cholesky().is_none() {
            return Err(Error::InvalidParameter(
                "ellipsoid matrix must be positive definite".into(),
            ));
        }
        let inverse = mat_inverse(&matrix)?;
        let det = mat_det(&matrix);
        Ok(ConvexBody {
            shape: Shape::Ellipsoid {
                center,
                matrix,
                inverse,
                det,
            },
        })
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Polytope(p) => p.dim,
            Shape::Ellipsoid { center, .. } => center.len(),
            Shape::Ball { center, .. } => center.len(),
            Shape::Box { lower, .. } => lower.len(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match &self.shape {
            Shape::Polytope(p) => p
                .halfspaces
                .iter()
                .all(|(a, b)| dot(a, x) <= b + 1e-10 * (1.0 + b.abs())),
            Shape::Ellipsoid { center, matrix, .. } => {
                quad_form(matrix, &sub(x, center)) <= 1.0 + 1e-10
            }
            Shape::Ball { center, radius } => {
                norm(&sub(x, center)) <= radius * (1.0 + 1e-10) + 1e-300
            }
            Shape::Box { lower, upper } => x.iter().zip(lower).zip(upper).all(|((xi, l), u)| {
                let tol = 1e-10 * (1.0 + l.abs().max(u.abs()));
                *xi >= l - tol && *xi <= u + tol
            }),
        }
    }

    /// Membership x ∈ r·K for r ≥ 0 without forming x/r, so it stays exact
    /// for scale factors near the ends of the double range. Deliberately
    /// strict (no slack): simulation uses this to split symmetric
    /// differences, where a tolerance band would bias the split.
    pub(crate) fn contains_scaled(&self, x: &[f64], r: f64) -> bool {
        if x.len() != self.dim() || !(r >= 0.0) {
            return false;
        }
        match &self.shape {
            Shape::Polytope(p) => p.halfspaces.iter().all(|(a, b)| dot(a, x) <= r * b),
            Shape::Ellipsoid { center, matrix, .. } => {
                let rel: Vec<f64> = x.iter().zip(center).map(|(xi, c)| xi - r * c).collect();
                quad_form(matrix, &rel) <= r * r
            }
            Shape::Ball { center, radius } => {
                let rel: Vec<f64> = x.iter().zip(center).map(|(xi, c)| xi - r * c).collect();
                norm(&rel) <= r * radius
            }
            Shape::Box { lower, upper } => x
                .iter()
                .zip(lower)
                .zip(upper)
                .all(|((xi, l), u)| *xi >= r * l && *xi <= r * u),
        }
    }

    /// Support function h(K, u) = sup{⟨x,u⟩ : x ∈ K} for any non-zero u
    /// (positively homogeneous in u).
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.shape {
            Shape::Polytope(p) => p
                .vertices
                .iter()
                .map(|v| dot(v, u))
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Ellipsoid {
                center, inverse, ..
            } => dot(center, u) + quad_form(inverse, u).max(0.0).sqrt(),
            Shape::Ball { center, radius } => dot(center, u) + radius * norm(u),
            Shape::Box { lower, upper } => u
                .iter()
                .zip(lower)
                .zip(upper)
                .map(|((ui, l), up)| if *ui >= 0.0 { ui * up } else { ui * l })
                .sum(),
        }
    }

    /// Width h(K,u) + h(K,−u) in a unit direction.
    pub fn support_width(&self, u: &[f64]) -> Result<f64> {
        check_dim(self.dim(), u)?;
        let un = normalized(u)?;
        let neg = scaled(&un, -1.0);
        Ok(self.support(&un) + self.support(&neg))
    }

    /// Parameter interval {t : point + t·dir ∈ K}, or None if the line
    /// misses the body. `dir` must be non-zero (not necessarily unit; the
    /// interval is in units of |dir|).
    pub fn line_chord(&self, dir: &[f64], point: &[f64]) -> Option<(f64, f64)> {
        match &self.shape {
            Shape::Polytope(p) => {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for (a, b) in &p.halfspaces {
                    let den = dot(a, dir);
                    let num = b - dot(a, point);
                    if den.abs() < 1e-14 {
                        if num < -1e-10 * (1.0 + b.abs()) {
                            return None;
                        }
                    } else if den > 0.0 {
                        hi = hi.min(num / den);
                    } else {
                        lo = lo.max(num / den);
                    }
                }
                if lo <= hi {
                    Some((lo, hi))
                } else {
                    None
                }
            }
            Shape::Box { lower, upper } => {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for i in 0..lower.len() {
                    let den = dir[i];
                    if den.abs() < 1e-14 {
                        let tol = 1e-10 * (1.0 + lower[i].abs().max(upper[i].abs()));
                        if point[i] < lower[i] - tol || point[i] > upper[i] + tol {
                            return None;
                        }
                    } else {
                        let t1 = (lower[i] - point[i]) / den;
                        let t2 = (upper[i] - point[i]) / den;
                        lo = lo.max(t1.min(t2));
                        hi = hi.min(t1.max(t2));
                    }
                }
                if lo <= hi {
                    Some((lo, hi))
                } else {
                    None
                }
            }
            Shape::Ball { center, radius } => {
                let rel = sub(point, center);
                let a = dot(dir, dir);
                let b = dot(&rel, dir);
                let c = dot(&rel, &rel) - radius * radius;
                quadratic_interval(a, b, c)
            }
            Shape::Ellipsoid { center, matrix, .. } => {
                let rel = sub(point, center);
                let a = quad_form(matrix, dir);
                let b = matrix
                    .iter()
                    .zip(dir)
                    .map(|(row, di)| di * dot(row, &rel))
                    .sum::<f64>();
                let c = quad_form(matrix, &rel) - 1.0;
                quadratic_interval(a, b, c)
            }
        }
    }

    /// Length of K ∩ {y + t·u}, for unit u and y ⊥ u.
    pub fn chord_length(&self, u: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), u)?;
        check_dim(self.dim(), y)?;
        let un = normalized(u)?;
        if dot(&un, y).abs() > 1e-10 * (1.0 + norm(y)) {
            return Err(Error::InvalidParameter(
                "chord base point must be orthogonal to the direction".into(),
            ));
        }
        Ok(self
            .line_chord(&un, y)
            .map_or(0.0, |(t0, t1)| (t1 - t0).max(0.0)))
    }

    /// Largest t ≥ 0 with x + t·u ∈ K, for x ∈ K.
    pub fn rho_from(&self, x: &[f64], u: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x)?;
        let un = normalized(u)?;
        if !self.contains(x) {
            return Err(Error::PointOutsideBody);
        }
        let (_, t1) = self
            .line_chord(&un, x)
            .unwrap_or((0.0, 0.0));
        Ok(t1.max(0.0))
    }

    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Polytope(p) => {
                if p.dim == 2 {
                    let pts: Vec<[f64; 2]> =
                        p.vertices.iter().map(|v| [v[0], v[1]]).collect();
                    polygon_area(&pts).abs()
                } else {
                    let o = centroid_of(&p.vertices);
                    let mut vol = 0.0;
                    for (plane, ring) in &p.facets {
                        let (a, b) = &p.halfspaces[*plane];
                        let h = b - dot(a, &o);
                        vol += h * facet_area(p, *plane, ring) / 3.0;
                    }
                    vol
                }
            }
            Shape::Ellipsoid { det, center, .. } => {
                unit_ball_volume(center.len()) / det.sqrt()
            }
            Shape::Ball { center, radius } => {
                unit_ball_volume(center.len()) * radius.powi(center.len() as i32)
            }
            Shape::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| u - l).product()
            }
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Polytope(p) => {
                let d = p.dim;
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for v in &p.vertices {
                    for i in 0..d {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            Shape::Ellipsoid {
                center, inverse, ..
            } => {
                let ext: Vec<f64> = (0..center.len())
                    .map(|i| inverse[i][i].max(0.0).sqrt())
                    .collect();
                (sub(center, &ext), add(center, &ext))
            }
            Shape::Ball { center, radius } => {
                let ext = vec![*radius; center.len()];
                (sub(center, &ext), add(center, &ext))
            }
            Shape::Box { lower, upper } => (lower.clone(), upper.clone()),
        }
    }

    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        check_dim(self.dim(), v)?;
        check_finite(v, "translation")?;
        let shape = match &self.shape {
            Shape::Polytope(p) => {
                let mut q = p.clone();
                for (a, b) in &mut q.halfspaces {
                    *b += dot(a, v);
                }
                for vert in &mut q.vertices {
                    *vert = add(vert, v);
                }
                Shape::Polytope(q)
            }
            Shape::Ellipsoid {
                center,
                matrix,
                inverse,
                det,
            } => Shape::Ellipsoid {
                center: add(center, v),
                matrix: matrix.clone(),
                inverse: inverse.clone(),
                det: *det,
            },
            Shape::Ball { center, radius } => Shape::Ball {
                center: add(center, v),
                radius: *radius,
            },
            Shape::Box { lower, upper } => Shape::Box {
                lower: add(lower, v),
                upper: add(upper, v),
            },
        };
        Ok(ConvexBody { shape })
    }

    /// The dilate αK = {αx : x ∈ K}; α < 0 reflects through the origin.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be finite and non-zero, got {alpha}"
            )));
        }
        let shape = match &self.shape {
            Shape::Polytope(p) => {
                let mut q = p.clone();
                for (a, b) in &mut q.halfspaces {
                    if alpha > 0.0 {
                        *b *= alpha;
                    } else {
                        *a = scaled(a, -1.0);
                        *b *= -alpha;
                    }
                }
                for vert in &mut q.vertices {
                    *vert = scaled(vert, alpha);
                }
                if p.dim == 2 && alpha < 0.0 {
                    // Reflection flips orientation; restore CCW order.
                    q.vertices.reverse();
                }
                Shape::Polytope(q)
            }
            Shape::Ellipsoid {
                center,
                matrix,
                inverse,
                det,
            } => {
                let a2 = alpha * alpha;
                let d = center.len() as i32;
                Shape::Ellipsoid {
                    center: scaled(center, alpha),
                    matrix: matrix.iter().map(|r| scaled(r, 1.0 / a2)).collect(),
                    inverse: inverse.iter().map(|r| scaled(r, a2)).collect(),
                    det: det / a2.powi(d),
                }
            }
            Shape::Ball { center, radius } => Shape::Ball {
                center: scaled(center, alpha),
                radius: radius * alpha.abs(),
            },
            Shape::Box { lower, upper } => {
                let l = scaled(lower, alpha);
                let u = scaled(upper, alpha);
                if alpha > 0.0 {
                    Shape::Box { lower: l, upper: u }
                } else {
                    Shape::Box { lower: u, upper: l }
                }
            }
        };
        Ok(ConvexBody { shape })
    }

    pub fn reflected(&self) -> Self {
        self.scaled(-1.0).expect("reflection is always valid")
    }

    /// Vol_{d−1} of the orthogonal projection of K onto u^⊥ (u unit).
    /// In d = 1 the projection is a single point with counting measure 1.
    pub fn shadow_area(&self, u: &[f64]) -> Result<f64> {
        Ok(self.shadow_sampler(u)?.area())
    }

    /// Sampler for the uniform distribution on the projection of K onto
    /// u^⊥, returning points in ambient coordinates (orthogonal to u).
    pub fn shadow_sampler(&self, u: &[f64]) -> Result<ShadowSampler> {
        let d = self.dim();
        check_dim(d, u)?;
        let un = normalized(u)?;
        match d {
            1 => Ok(ShadowSampler::Point { dim: 1 }),
            2 => {
                let w = perp2(&un);
                let hi = self.support(&w);
                let lo = -self.support(&scaled(&w, -1.0));
                Ok(ShadowSampler::Interval { axis: w, lo, hi })
            }
            3 => {
                let basis = complement_basis(&un);
                match &self.shape {
                    Shape::Polytope(p) => Ok(ShadowSampler::polygon_from_points(
                        &basis,
                        p.vertices.iter().map(|v| project2(&basis, v)).collect(),
                    )),
                    Shape::Box { lower, upper } => {
                        let mut corners = Vec::with_capacity(8);
                        for mask in 0..(1usize << d) {
                            let corner: Vec<f64> = (0..d)
                                .map(|i| if mask & (1 << i) != 0 { upper[i] } else { lower[i] })
                                .collect();
                            corners.push(project2(&basis, &corner));
                        }
                        Ok(ShadowSampler::polygon_from_points(&basis, corners))
                    }
                    Shape::Ball { center, radius } => Ok(ShadowSampler::Disc {
                        basis: basis.clone(),
                        center2: project2(&basis, center),
                        radius: *radius,
                    }),
                    Shape::Ellipsoid {
                        center, inverse, ..
                    } => {
                        // Shadow of {x : (x−c)ᵀM(x−c) ≤ 1} onto span(basis) is the
                        // ellipse with covariance-form Q = Bᵀ M⁻¹ B.
                        let q = [
                            [
                                quad_bilinear(inverse, &basis[0], &basis[0]),
                                quad_bilinear(inverse, &basis[0], &basis[1]),
                            ],
                            [
                                quad_bilinear(inverse, &basis[1], &basis[0]),
                                quad_bilinear(inverse, &basis[1], &basis[1]),
                            ],
                        ];
                        let l00 = q[0][0].max(0.0).sqrt();
                        let l10 = if l00 > 0.0 { q[1][0] / l00 } else { 0.0 };
                        let l11 = (q[1][1] - l10 * l10).max(0.0).sqrt();
                        Ok(ShadowSampler::Ellipse {
                            basis: basis.clone(),
                            center2: project2(&basis, center),
                            chol: [[l00, 0.0], [l10, l11]],
                        })
                    }
                }
            }
            _ => Err(Error::UnsupportedDimension {
                dim: d,
                op: "shadow".into(),
            }),
        }
    }

    /// Vertices of a polytope (corner points for a box); None for smooth
    /// bodies. In 2-d the list is in counter-clockwise hull order.
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        match &self.shape {
            Shape::Polytope(p) => Some(p.vertices.clone()),
            Shape::Box { lower, upper } => {
                let d = lower.len();
                let corners = (0..1usize << d)
                    .map(|mask| {
                        (0..d)
                            .map(|i| if mask & (1 << i) != 0 { upper[i] } else { lower[i] })
                            .collect()
                    })
                    .collect();
                Some(corners)
            }
            _ => None,
        }
    }

    /// For bodies with an elliptic chord-length profile (balls and
    /// ellipsoids): the chord through the center in unit direction u.
    pub(crate) fn center_chord_length(&self, u: &[f64]) -> Option<f64> {
        match &self.shape {
            Shape::Ball { radius, .. } => Some(2.0 * radius),
            Shape::Ellipsoid { matrix, .. } => {
                Some(2.0 / quad_form(matrix, u).max(0.0).sqrt())
            }
            _ => None,
        }
    }

    pub fn uniform_sampler(&self) -> UniformSampler<'_> {
        let (lo, hi) = self.bounding_box();
        UniformSampler {
            body: self,
            lo,
            hi,
            direct_box: matches!(self.shape, Shape::Box { .. }),
        }
    }
}

fn quadratic_interval(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    // a t² + 2bt + c ≤ 0 with a > 0 for non-degenerate bodies.
    if a <= 0.0 {
        return None;
    }
    let disc = b * b - a * c;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some(((-b - s) / a, (-b + s) / a))
}

fn centroid_of(vertices: &[Vec<f64>]) -> Vec<f64> {
    let d = vertices[0].len();
    let mut c = vec![0.0; d];
    for v in vertices {
        for i in 0..d {
            c[i] += v[i];
        }
    }
    scaled(&c, 1.0 / vertices.len() as f64)
}

fn order_ccw(vertices: &mut [Vec<f64>], centroid: &[f64]) {
    vertices.sort_by(|a, b| {
        let ta = (a[1] - centroid[1]).atan2(a[0] - centroid[0]);
        let tb = (b[1] - centroid[1]).atan2(b[0] - centroid[0]);
        ta.partial_cmp(&tb).unwrap()
    });
}

fn project2(basis: &[Vec<f64>], x: &[f64]) -> [f64; 2] {
    [dot(&basis[0], x), dot(&basis[1], x)]
}

fn build_facets(p: &PolytopeData, scale: f64) -> Result<Vec<(usize, Vec<usize>)>> {
    let mut facets = Vec::new();
    for (i, (a, b)) in p.halfspaces.iter().enumerate() {
        let on: Vec<usize> = (0..p.vertices.len())
            .filter(|&k| (dot(a, &p.vertices[k]) - b).abs() <= 1e-8 * scale)
            .collect();
        if on.len() < 3 {
            continue;
        }
        // Order the ring by angle in the facet plane.
        let basis = complement_basis(a);
        let fc = centroid_of(&on.iter().map(|&k| p.vertices[k].clone()).collect::<Vec<_>>());
        let mut ring = on;
        ring.sort_by(|&x, &y| {
            let px = project2(&basis, &sub(&p.vertices[x], &fc));
            let py = project2(&basis, &sub(&p.vertices[y], &fc));
            px[1].atan2(px[0]).partial_cmp(&py[1].atan2(py[0])).unwrap()
        });
        facets.push((i, ring));
    }
    if facets.len() < 4 {
        return Err(Error::InvalidParameter(
            "3-d polytope needs at least 4 facets".into(),
        ));
    }
    Ok(facets)
}

fn facet_area(p: &PolytopeData, plane: usize, ring: &[usize]) -> f64 {
    let basis = complement_basis(&p.halfspaces[plane].0);
    let pts: Vec<[f64; 2]> = ring
        .iter()
        .map(|&k| project2(&basis, &p.vertices[k]))
        .collect();
    polygon_area(&pts).abs()
}

fn quad_bilinear(m: &[Vec<f64>], x: &[f64], y: &[f64]) -> f64 {
    m.iter().zip(x).map(|(row, xi)| xi * dot(row, y)).sum()
}

/// Uniform sampler over a convex body by rejection from its bounding box.
pub struct UniformSampler<'a> {
    body: &'a ConvexBody,
    lo: Vec<f64>,
    hi: Vec<f64>,
    direct_box: bool,
}

impl UniformSampler<'_> {
    /// One uniform point; errors if the empirical acceptance rate falls
    /// below 1e−4 (degenerate thin body).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let d = self.lo.len();
        let mut x = vec![0.0; d];
        for _ in 0..200_000u32 {
            for i in 0..d {
                x[i] = self.lo[i] + (self.hi[i] - self.lo[i]) * rng.random::<f64>();
            }
            if self.direct_box || self.body.contains(&x) {
                return Ok(x);
            }
        }
        Err(Error::AcceptanceTooLow {
            rate: 1.0 / 200_000.0,
            floor: 1e-4,
        })
    }
}

/// n i.i.d. uniform points in K, deterministic in the seed.
pub fn uniform_sample_in(body: &ConvexBody, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let sampler = body.uniform_sampler();
    let mut rng = crate::rng::replicate_rng(seed, 0);
    (0..n).map(|_| sampler.sample(&mut rng)).collect()
}

/// Uniform sampler on a (d−1)-dimensional shadow, in ambient coordinates.
#[derive(Debug, Clone)]
pub enum ShadowSampler {
    Point {
        dim: usize,
    },
    Interval {
        axis: Vec<f64>,
        lo: f64,
        hi: f64,
    },
    Polygon {
        basis: Vec<Vec<f64>>,
        /// Fan triangles in 2-d shadow coordinates with cumulative areas.
        tris: Vec<([f64; 2], [f64; 2], [f64; 2], f64)>,
        area: f64,
    },
    Disc {
        basis: Vec<Vec<f64>>,
        center2: [f64; 2],
        radius: f64,
    },
    Ellipse {
        basis: Vec<Vec<f64>>,
        center2: [f64; 2],
        chol: [[f64; 2]; 2],
    },
}

impl ShadowSampler {
    fn polygon_from_points(basis: &[Vec<f64>], points: Vec<[f64; 2]>) -> ShadowSampler {
        let hull = hull2d(&points);
        let mut tris = Vec::new();
        let mut cum = 0.0;
        for i in 1..hull.len().saturating_sub(1) {
            let (a, b, c) = (hull[0], hull[i], hull[i + 1]);
            let area = 0.5
                * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
            cum += area;
            tris.push((a, b, c, cum));
        }
        ShadowSampler::Polygon {
            basis: basis.to_vec(),
            tris,
            area: cum,
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            ShadowSampler::Point { .. } => 1.0,
            ShadowSampler::Interval { lo, hi, .. } => (hi - lo).max(0.0),
            ShadowSampler::Polygon { area, .. } => *area,
            ShadowSampler::Disc { radius, .. } => std::f64::consts::PI * radius * radius,
            ShadowSampler::Ellipse { chol, .. } => {
                std::f64::consts::PI * (chol[0][0] * chol[1][1]).abs()
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            ShadowSampler::Point { dim } => vec![0.0; *dim],
            ShadowSampler::Interval { axis, lo, hi } => {
                let t = lo + (hi - lo) * rng.random::<f64>();
                scaled(axis, t)
            }
            ShadowSampler::Polygon { basis, tris, area } => {
                let target = rng.random::<f64>() * area;
                let idx = tris.partition_point(|&(_, _, _, cum)| cum < target);
                let (a, b, c, _) = tris[idx.min(tris.len() - 1)];
                let (r1, r2) = (rng.random::<f64>(), rng.random::<f64>());
                let s = r1.sqrt();
                let y = [
                    (1.0 - s) * a[0] + s * (1.0 - r2) * b[0] + s * r2 * c[0],
                    (1.0 - s) * a[1] + s * (1.0 - r2) * b[1] + s * r2 * c[1],
                ];
                lift(basis, y)
            }
            ShadowSampler::Disc {
                basis,
                center2,
                radius,
            } => {
                let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                let r = radius * rng.random::<f64>().sqrt();
                lift(
                    basis,
                    [center2[0] + r * theta.cos(), center2[1] + r * theta.sin()],
                )
            }
            ShadowSampler::Ellipse {
                basis,
                center2,
                chol,
            } => {
                let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                let r = rng.random::<f64>().sqrt();
                let s = [r * theta.cos(), r * theta.sin()];
                lift(
                    basis,
                    [
                        center2[0] + chol[0][0] * s[0],
                        center2[1] + chol[1][0] * s[0] + chol[1][1] * s[1],
                    ],
                )
            }
        }
    }
}

fn lift(basis: &[Vec<f64>], y: [f64; 2]) -> Vec<f64> {
    let d = basis[0].len();
    (0..d).map(|i| y[0] * basis[0][i] + y[1] * basis[1][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use approx::assert_relative_eq;

    fn square() -> ConvexBody {
        ConvexBody::unit_square()
    }

    fn square_polytope() -> ConvexBody {
        ConvexBody::from_halfspaces(vec![
            (vec![1.0, 0.0], 1.0),
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, 1.0], 1.0),
            (vec![0.0, -1.0], 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn square_support_widths() {
        for k in [square(), square_polytope()] {
            assert_relative_eq!(k.support_width(&[1.0, 0.0]).unwrap(), 1.0, epsilon = 1e-12);
            let diag = [std::f64::consts::FRAC_1_SQRT_2; 2];
            assert_relative_eq!(
                k.support_width(&diag).unwrap(),
                2.0f64.sqrt(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn square_chords_and_rho() {
        let k = square();
        assert_relative_eq!(
            k.chord_length(&[1.0, 0.0], &[0.0, 0.5]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_eq!(k.chord_length(&[1.0, 0.0], &[0.0, 2.0]).unwrap(), 0.0);
        assert_relative_eq!(
            k.rho_from(&[0.25, 0.5], &[1.0, 0.0]).unwrap(),
            0.75,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            k.rho_from(&[0.25, 0.5], &[0.0, 1.0]).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert!(matches!(
            k.rho_from(&[2.0, 0.0], &[1.0, 0.0]),
            Err(Error::PointOutsideBody)
        ));
        assert!(k.chord_length(&[1.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn ball_chord_quadratic() {
        let k = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(
            k.chord_length(&[1.0, 0.0], &[0.0, 0.6]).unwrap(),
            1.6,
            epsilon = 1e-12
        );
        assert_relative_eq!(k.support_width(&[0.6, 0.8]).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(k.rho_from(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn chord_equals_rho_sum_inside() {
        let bodies = [
            square(),
            ConvexBody::ball(vec![0.2, -0.1], 0.8).unwrap(),
            ConvexBody::regular_polygon(6, 1.0).unwrap(),
        ];
        let mut rng = replicate_rng(3, 0);
        for k in &bodies {
            let sampler = k.uniform_sampler();
            for _ in 0..50 {
                let x = sampler.sample(&mut rng).unwrap();
                let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                let u = vec![theta.cos(), theta.sin()];
                let forward = k.rho_from(&x, &u).unwrap();
                let backward = k.rho_from(&x, &scaled(&u, -1.0)).unwrap();
                let (t0, t1) = k.line_chord(&u, &x).unwrap();
                assert_relative_eq!(forward + backward, t1 - t0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn volumes() {
        assert_relative_eq!(square().volume(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(square_polytope().volume(), 1.0, epsilon = 1e-10);
        let ball = ConvexBody::ball(vec![0.0, 0.0], 2.0).unwrap();
        assert_relative_eq!(ball.volume(), 4.0 * std::f64::consts::PI, epsilon = 1e-10);
        let hex = ConvexBody::regular_polygon(6, 1.0).unwrap();
        assert_relative_eq!(hex.volume(), 1.5 * 3.0f64.sqrt(), epsilon = 1e-10);
        let ell = ConvexBody::ellipsoid(
            vec![0.0, 0.0],
            vec![vec![0.25, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        // Semi-axes 2 and 1.
        assert_relative_eq!(ell.volume(), 2.0 * std::f64::consts::PI, epsilon = 1e-10);
    }

    #[test]
    fn cube_polytope_in_3d() {
        let mut hs = Vec::new();
        for i in 0..3 {
            let mut a = vec![0.0; 3];
            a[i] = 1.0;
            hs.push((a.clone(), 1.0));
            a[i] = -1.0;
            hs.push((a, 0.0));
        }
        let cube = ConvexBody::from_halfspaces(hs).unwrap();
        assert_relative_eq!(cube.volume(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(
            cube.shadow_area(&[0.0, 0.0, 1.0]).unwrap(),
            1.0,
            epsilon = 1e-9
        );
        let diag = [1.0 / 3.0f64.sqrt(); 3];
        assert_relative_eq!(
            cube.shadow_area(&diag).unwrap(),
            3.0f64.sqrt(),
            epsilon = 1e-9
        );
        assert_relative_eq!(
            cube.support_width(&diag).unwrap(),
            3.0f64.sqrt(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn shadows_in_2d_and_reflection() {
        let k = square();
        assert_relative_eq!(k.shadow_area(&[1.0, 0.0]).unwrap(), 1.0, epsilon = 1e-12);
        let r = k.reflected();
        assert!(r.contains(&[-0.5, -0.5]));
        assert!(!r.contains(&[0.5, 0.5]));
        assert_relative_eq!(r.volume(), 1.0, epsilon = 1e-12);
        let down = k.scaled(0.5).unwrap();
        assert_relative_eq!(down.volume(), 0.25, epsilon = 1e-12);
        let shifted = k.translated(&[3.0, -1.0]).unwrap();
        assert!(shifted.contains(&[3.5, -0.5]));
        assert_relative_eq!(shifted.volume(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ellipsoid_shadow_matches_ball() {
        let ball = ConvexBody::ball(vec![0.1, -0.2, 0.3], 1.5).unwrap();
        let ell = ConvexBody::ellipsoid(
            vec![0.1, -0.2, 0.3],
            vec![
                vec![1.0 / 2.25, 0.0, 0.0],
                vec![0.0, 1.0 / 2.25, 0.0],
                vec![0.0, 0.0, 1.0 / 2.25],
            ],
        )
        .unwrap();
        let u = normalized(&[1.0, 2.0, -0.5]).unwrap();
        assert_relative_eq!(
            ball.shadow_area(&u).unwrap(),
            ell.shadow_area(&u).unwrap(),
            epsilon = 1e-9
        );
        assert_relative_eq!(
            ball.shadow_area(&u).unwrap(),
            std::f64::consts::PI * 2.25,
            epsilon = 1e-9
        );
    }

    #[test]
    fn shadow_samples_lie_in_the_projection() {
        let bodies = [
            (square(), vec![1.0, 0.0]),
            (
                ConvexBody::ball(vec![1.0, 2.0, 3.0], 0.7).unwrap(),
                normalized(&[1.0, 1.0, 1.0]).unwrap(),
            ),
        ];
        let mut rng = replicate_rng(9, 0);
        for (k, u) in &bodies {
            let sampler = k.shadow_sampler(u).unwrap();
            for _ in 0..200 {
                let y = sampler.sample(&mut rng);
                assert!(dot(&y, u).abs() < 1e-9);
                // The line through y in direction u must hit the body.
                assert!(k.line_chord(u, &y).is_some());
            }
        }
    }

    #[test]
    fn uniform_samples_center_on_the_ball() {
        let k = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        let pts = uniform_sample_in(&k, 4000, 7).unwrap();
        let mean0: f64 = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
        let mean1: f64 = pts.iter().map(|p| p[1]).sum::<f64>() / pts.len() as f64;
        // sd of each coordinate is 1/2, so the sem is ~0.0079.
        assert!(mean0.abs() < 3.0 * 0.008, "mean0={mean0}");
        assert!(mean1.abs() < 3.0 * 0.008, "mean1={mean1}");
        assert!(pts.iter().all(|p| k.contains(p)));
    }

    #[test]
    fn degenerate_polytopes_are_rejected() {
        // Unbounded: only two normals.
        assert!(ConvexBody::from_halfspaces(vec![
            (vec![1.0, 0.0], 1.0),
            (vec![0.0, 1.0], 1.0),
        ])
        .is_err());
        // Empty interior.
        assert!(ConvexBody::from_halfspaces(vec![
            (vec![1.0, 0.0], 0.0),
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, 1.0], 1.0),
            (vec![0.0, -1.0], 1.0),
        ])
        .is_err());
        // Non-convex vertex list.
        assert!(ConvexBody::polygon(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.4, 0.4],
            vec![0.0, 1.0],
        ])
        .is_err());
        assert!(ConvexBody::cuboid(vec![0.0], vec![0.0]).is_err());
    }
}
