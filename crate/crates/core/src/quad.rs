//! Quadrature helpers: Gauss-Legendre rules, composite integration with a
//! crude error estimate, and the antiderivative of (c + m·t)^q needed for
//! exact chord-power integrals over polytopes.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// ∫_a^b f(t) dt by an n-point Gauss-Legendre rule.
pub fn integrate_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Composite integration over explicit panel edges, with the difference
/// against a lower-order pass reported as an error estimate.
pub fn integrate_panels(f: impl Fn(f64) -> f64, edges: &[f64], n: usize) -> (f64, f64) {
    let mut hi = 0.0;
    let mut lo = 0.0;
    for w in edges.windows(2) {
        hi += integrate_gl(&f, w[0], w[1], n);
        lo += integrate_gl(&f, w[0], w[1], (n / 2).max(2));
    }
    (hi, (hi - lo).abs())
}

/// Panel edges on [a, b] graded toward `a` with strength `gamma` > 1:
/// edge_i = a + (b-a)·(i/k)^gamma. Used for integrands with an algebraic
/// singularity at the left endpoint.
pub fn graded_edges(a: f64, b: f64, k: usize, gamma: f64) -> Vec<f64> {
    (0..=k)
        .map(|i| a + (b - a) * (i as f64 / k as f64).powf(gamma))
        .collect()
}

/// ∫_{t0}^{t1} (c + m·t)^q dt, exact. Requires c + m·t ≥ 0 on the interval.
pub fn linear_power_integral(c: f64, m: f64, q: f64, t0: f64, t1: f64) -> f64 {
    if (t1 - t0).abs() == 0.0 {
        return 0.0;
    }
    if m.abs() < 1e-14 * (c.abs() + m.abs() * t0.abs().max(t1.abs())).max(1e-300) {
        return c.powf(q) * (t1 - t0);
    }
    // Antiderivative (c + m t)^{q+1} / (m (q+1)); q = -1 does not occur here
    // (chord powers use q = 1 - 2H > -1).
    let g = |t: f64| (c + m * t).max(0.0).powf(q + 1.0) / (m * (q + 1.0));
    g(t1) - g(t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // 5-point rule is exact through degree 9.
        let val = integrate_gl(|t| t.powi(9) + 3.0 * t.powi(4), -1.0, 1.0, 5);
        assert_relative_eq!(val, 6.0 / 5.0, epsilon = 1e-13);
    }

    #[test]
    fn graded_panels_handle_endpoint_singularity() {
        // ∫_0^1 t^{-1/2} dt = 2. The panel containing the singularity has a
        // scale-invariant relative error, so the total error tracks the
        // first panel's contribution ~ 2·(1/k)^{γ/2}; γ = 6 pushes it
        // below 1e-6, and the refinement gap must not understate it.
        let edges = graded_edges(0.0, 1.0, 40, 6.0);
        let (val, err) = integrate_panels(|t| t.powf(-0.5), &edges, 16);
        assert!((val - 2.0).abs() < 1e-6, "val={val} err={err}");
        let coarse = graded_edges(0.0, 1.0, 40, 3.0);
        let (cval, cerr) = integrate_panels(|t| t.powf(-0.5), &coarse, 16);
        assert!((cval - 2.0).abs() < 10.0 * cerr, "cval={cval} cerr={cerr}");
    }

    #[test]
    fn linear_power_matches_quadrature() {
        let exact = linear_power_integral(0.3, 0.7, 0.5, -0.2, 1.1);
        let quad = integrate_gl(|t| (0.3 + 0.7 * t).powf(0.5), -0.2, 1.1, 32);
        assert_relative_eq!(exact, quad, epsilon = 1e-10);
        // Constant chord (m = 0).
        assert_relative_eq!(
            linear_power_integral(2.0, 0.0, 0.5, 0.0, 3.0),
            3.0 * 2.0f64.sqrt(),
            epsilon = 1e-12
        );
    }
}
