//! Exact joint simulation of the shot-noise fields by envelope thinning.
//!
//! Every Poisson point that changes any output value lies, for some
//! evaluation point z with scale r, in the symmetric difference
//! (z − rK) Δ (−rK). Two envelopes cover that set at every scale. Below the
//! switch scale R = |z|·shadow/vol(K) the two bodies jointly cover it, so a
//! proposal picks one body (fair coin) and a uniform point inside it. Above
//! R the fiber through any shadow point w meets the symmetric difference
//! inside two slabs of height |z| based at the chord endpoints of −K, so a
//! proposal picks a shadow point, an endpoint (fair coin), and a uniform
//! offset in the slab. R equalises the two envelope densities, which is
//! where their total mass is smallest.
//!
//! A proposal drawn from the sum of all envelopes is kept with probability
//! 1/κ, where κ counts how many envelope sets cover it; kept points form a
//! Poisson process with the exact target intensity on the contributing set,
//! and each adds ±1 to the evaluation points whose symmetric difference
//! contains it.
//!
//! Membership tests are strict, so boundary ties resolve by rounding, an
//! O(ulp) effect. A proposal's own point is always resolved in fiber
//! coordinates, which survive arbitrarily large scales; its associations
//! with *other* evaluation points go through x-space coordinates and fade
//! once the scale passes about 1e16 times the evaluation radius, where
//! doubles can no longer hold the offsets. The mass above such scales is
//! r^{α−1}-small and only cross-covariances feel it.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::vec::{check_dim, check_finite, dot, norm, scaled};
use crate::geometry::{ConvexBody, ShadowSampler};
use crate::poisson::spec::{Counters, PoissonFieldSpec, PoissonSampleBatch};
use crate::rng::run_replicates;

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct RepStats {
    pub proposals: u64,
    pub kept: u64,
    pub contributing: u64,
}

struct EvalPoint {
    out_idx: usize,
    z: Vec<f64>,
    dir: Vec<f64>,
    s: f64,
    /// Uniform sampler on the shadow of −K orthogonal to `dir`.
    shadow: ShadowSampler,
    /// Envelope switch scale min(R, cap).
    split: f64,
    mass_a: f64,
    mass_b: f64,
}

pub(crate) struct ThinningEngine {
    body: ConvexBody,
    refl: ConvexBody,
    dim: usize,
    alpha: f64,
    cap: Option<f64>,
    points: Vec<EvalPoint>,
    cum_mass: Vec<f64>,
    total_mass: f64,
}

/// ∫_lo^hi r^{g−1} dr, stable when g is close to zero.
pub(crate) fn power_integral(g: f64, lo: f64, hi: f64) -> f64 {
    if g.abs() < 1e-6 {
        ((g * hi.ln()).exp_m1() - (g * lo.ln()).exp_m1()) / g
    } else {
        (hi.powf(g) - lo.powf(g)) / g
    }
}

/// Inverse CDF of the density ∝ r^{g−1} on [lo, hi], g ≠ 0.
fn inv_power_between(g: f64, lo: f64, hi: f64, u: f64) -> f64 {
    if g.abs() < 1e-6 {
        (lo.ln() + u * (hi.ln() - lo.ln())).exp()
    } else {
        (lo.powf(g) + u * (hi.powf(g) - lo.powf(g))).powf(1.0 / g)
    }
}

impl ThinningEngine {
    pub(crate) fn new(
        body: &ConvexBody,
        alpha: f64,
        cap: Option<f64>,
        weight: f64,
        points: &[(usize, Vec<f64>)],
    ) -> Result<ThinningEngine> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale exponent must be positive, got {alpha}"
            )));
        }
        if cap.is_none() && alpha >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "scale exponent {alpha} has infinite tail mass without a cap"
            )));
        }
        if let Some(c) = cap {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "scale cap must be positive and finite, got {c}"
                )));
            }
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "intensity weight must be positive, got {weight}"
            )));
        }
        let dim = body.dim();
        let refl = body.reflected();
        let vol = body.volume();
        let g = alpha - 1.0;
        let mut eval = Vec::new();
        for (out_idx, z) in points {
            check_dim(dim, z)?;
            check_finite(z, "evaluation point")?;
            let s = norm(z);
            if s == 0.0 {
                continue; // the field is exactly zero at the origin
            }
            let dir = scaled(z, 1.0 / s);
            let shadow = refl.shadow_sampler(&dir)?;
            let b = shadow.area();
            let switch = s * b / vol;
            let split = cap.map_or(switch, |c| switch.min(c));
            let mass_a = 2.0 * vol * weight * split.powf(alpha) / alpha;
            let mass_b = match cap {
                None => 2.0 * s * b * weight * split.powf(g) / (-g),
                Some(c) if split < c => 2.0 * s * b * weight * power_integral(g, split, c),
                Some(_) => 0.0,
            };
            eval.push(EvalPoint {
                out_idx: *out_idx,
                z: z.clone(),
                dir,
                s,
                shadow,
                split,
                mass_a,
                mass_b,
            });
        }
        let mut cum_mass = Vec::with_capacity(eval.len());
        let mut total_mass = 0.0;
        for pt in &eval {
            total_mass += pt.mass_a + pt.mass_b;
            cum_mass.push(total_mass);
        }
        Ok(ThinningEngine {
            body: body.clone(),
            refl,
            dim,
            alpha,
            cap,
            points: eval,
            cum_mass,
            total_mass,
        })
    }

    /// One replicate: adds the sampled field values into `values` (indexed
    /// by the evaluation points' `out_idx`) and updates the counters.
    pub(crate) fn sample_into(
        &self,
        rng: &mut ChaCha8Rng,
        values: &mut [i64],
        stats: &mut RepStats,
    ) {
        if self.total_mass <= 0.0 {
            return;
        }
        let d = self.dim;
        let count = Poisson::new(self.total_mass)
            .expect("total envelope mass is positive and finite")
            .sample(rng) as u64;
        let kernel = self.body.uniform_sampler();
        let mut x = [0.0f64; 3];
        let mut scratch = [0.0f64; 3];
        let mut hits: Vec<(usize, i64)> = Vec::with_capacity(self.points.len());

        'proposals: for _ in 0..count {
            stats.proposals += 1;
            let pick = rng.random::<f64>() * self.total_mass;
            let j = self
                .cum_mass
                .partition_point(|&c| c <= pick)
                .min(self.points.len() - 1);
            let pt = &self.points[j];

            let use_a = rng.random::<f64>() * (pt.mass_a + pt.mass_b) < pt.mass_a;
            // B proposals resolve their own point in fiber coordinates
            // (slab offset versus chord extent), which stays exact at
            // scales where x-space coordinates absorb the O(|z|) offsets.
            let mut own: Option<(i64, u64)> = None;
            let r = if use_a {
                let r = pt.split * rng.random::<f64>().powf(1.0 / self.alpha);
                let k = match kernel.sample(rng) {
                    Ok(k) => k,
                    Err(_) => continue,
                };
                if rng.random::<bool>() {
                    for i in 0..d {
                        x[i] = pt.z[i] - r * k[i];
                    }
                } else {
                    for i in 0..d {
                        x[i] = -r * k[i];
                    }
                }
                r
            } else {
                let g = self.alpha - 1.0;
                let u = rng.random::<f64>();
                let r = match self.cap {
                    None => pt.split * (1.0 - u).powf(1.0 / g),
                    Some(c) => inv_power_between(g, pt.split, c, u),
                };
                let v = pt.shadow.sample(rng);
                let Some((t0, t1)) = self.refl.line_chord(&pt.dir, &v) else {
                    continue;
                };
                if !(t1 > t0) {
                    continue; // degenerate chord carries no mass
                }
                let upper = rng.random::<bool>();
                let du = rng.random::<f64>() * pt.s;
                // Fiber picture at offset du into the chosen slab: the body
                // occupies [r·t0, r·t1], its shift [r·t0+s, r·t1+s]. The
                // upper slab is in the shifted body iff du ≥ s − r(t1−t0)
                // and doubles with the lower slab iff du ≤ s − r(t1−t0);
                // the lower slab mirrors this.
                let extent = r * (t1 - t0);
                own = Some(if upper {
                    let c = i64::from(du >= pt.s - extent);
                    (c, 1 + u64::from(du <= pt.s - extent))
                } else {
                    let c = -i64::from(du <= extent);
                    (c, 1 + u64::from(du >= extent))
                });
                let tau = r * if upper { t1 } else { t0 } + du;
                let mut finite = r.is_finite();
                if finite {
                    for i in 0..d {
                        x[i] = r * v[i] + tau * pt.dir[i];
                        finite &= x[i].is_finite();
                    }
                }
                if !finite {
                    // Scale beyond the double range: associations with
                    // other evaluation points are dropped, the own
                    // contribution stands.
                    let (c, kap) = own.expect("own is set on the B branch");
                    if c != 0 && (kap == 1 || rng.random::<f64>() * (kap as f64) < 1.0) {
                        stats.kept += 1;
                        stats.contributing += 1;
                        values[pt.out_idx] += c;
                    }
                    continue;
                }
                r
            };

            let mut kappa: u64 = 0;
            hits.clear();
            if let Some((c, kap)) = own {
                kappa += kap;
                if c != 0 {
                    hits.push((pt.out_idx, c));
                }
            }
            for (qi, q) in self.points.iter().enumerate() {
                if qi == j && own.is_some() {
                    continue;
                }
                for i in 0..d {
                    scratch[i] = q.z[i] - x[i];
                }
                let in_shift = self.body.contains_scaled(&scratch[..d], r);
                for i in 0..d {
                    scratch[i] = -x[i];
                }
                let in_orig = self.body.contains_scaled(&scratch[..d], r);
                if r <= q.split {
                    kappa += in_shift as u64 + in_orig as u64;
                } else {
                    let tau = dot(&x[..d], &q.dir);
                    for i in 0..d {
                        scratch[i] = (x[i] - tau * q.dir[i]) / r;
                    }
                    if let Some((t0, t1)) = self.refl.line_chord(&q.dir, &scratch[..d]) {
                        let (a0, a1) = (r * t0, r * t1);
                        kappa += (tau >= a0 && tau <= a0 + q.s) as u64
                            + (tau >= a1 && tau <= a1 + q.s) as u64;
                    }
                }
                if in_shift != in_orig {
                    hits.push((q.out_idx, if in_shift { 1 } else { -1 }));
                }
            }
            if hits.is_empty() {
                continue;
            }
            let kappa = kappa.max(1);
            if kappa > 1 && rng.random::<f64>() * kappa as f64 >= 1.0 {
                continue 'proposals;
            }
            stats.kept += 1;
            stats.contributing += hits.len() as u64;
            for &(idx, c) in &hits {
                values[idx] += c;
            }
        }
    }
}

/// Joint exact simulation of a shot-noise field at the given evaluation
/// points. Rows are independent replicates, deterministic in the seed and
/// independent of the thread count.
pub fn simulate(
    spec: &PoissonFieldSpec,
    points: &[Vec<f64>],
    n_paths: usize,
    seed: u64,
) -> Result<PoissonSampleBatch> {
    spec.validate()?;
    if points.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one evaluation point".into(),
        ));
    }
    if n_paths == 0 {
        return Err(Error::InvalidParameter("need at least one path".into()));
    }
    let dim = spec.dim();
    for z in points {
        check_dim(dim, z)?;
        check_finite(z, "evaluation point")?;
    }

    let engines: Vec<ThinningEngine> = match spec {
        PoissonFieldSpec::Fractional { hurst, body } => {
            let indexed: Vec<(usize, Vec<f64>)> =
                points.iter().cloned().enumerate().collect();
            vec![ThinningEngine::new(body, 2.0 * hurst, None, 1.0, &indexed)?]
        }
        PoissonFieldSpec::Truncated { p, cap, body } => {
            let indexed: Vec<(usize, Vec<f64>)> =
                points.iter().cloned().enumerate().collect();
            vec![ThinningEngine::new(body, 2.0 * p, Some(*cap), 1.0, &indexed)?]
        }
        PoissonFieldSpec::Directional { hurst, measure } => {
            let segment = ConvexBody::cuboid(vec![-1.0], vec![1.0])?;
            measure
                .atoms()
                .iter()
                .map(|atom| {
                    let ts: Vec<(usize, Vec<f64>)> = points
                        .iter()
                        .enumerate()
                        .map(|(j, z)| (j, vec![dot(z, &atom.direction)]))
                        .collect();
                    ThinningEngine::new(&segment, 2.0 * hurst, None, atom.weight, &ts)
                })
                .collect::<Result<_>>()?
        }
    };

    let n_out = points.len();
    let rows = run_replicates(seed, n_paths, |_, rng| {
        let mut values = vec![0i64; n_out];
        let mut stats = RepStats::default();
        for engine in &engines {
            engine.sample_into(rng, &mut values, &mut stats);
        }
        (values, stats)
    });

    let mut paths = Vec::with_capacity(rows.len());
    let mut totals = RepStats::default();
    for (values, stats) in rows {
        paths.push(values);
        totals.proposals += stats.proposals;
        totals.kept += stats.kept;
        totals.contributing += stats.contributing;
    }
    let mean_contributing = if totals.kept > 0 {
        totals.contributing as f64 / totals.kept as f64
    } else {
        0.0
    };
    Ok(PoissonSampleBatch {
        points: points.to_vec(),
        seed,
        paths,
        counters: Counters {
            proposals: totals.proposals,
            kept: totals.kept,
            mean_contributing,
        },
    })
}
