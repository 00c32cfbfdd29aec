//! Maximization of a separable quadratic on a sphere.
//!
//! Solves
//!
//! ```text
//! maximize  Σ λᵢ yᵢ² + 2 hᵢ yᵢ   subject to ‖y‖ = ρ
//! ```
//!
//! which is the trust-region subproblem with a diagonal model. At the global
//! maximizer `yᵢ = hᵢ / (μ − λᵢ)` with multiplier `μ ≥ max λ`, so `μ` is the
//! root of the secular equation `Σ hᵢ² / (μ − λᵢ)² = ρ²` to the right of the
//! largest pole. The root is found by safeguarded Newton on
//! `1/‖y(μ)‖ − 1/ρ`, which is nearly linear in `μ`.
//!
//! The hard case (the gradient has no component along the top eigenspace and
//! the remaining terms do not fill the sphere) has a family of maximizers; the
//! lexicographically largest is returned, i.e. the free norm goes to the
//! first top-eigenvalue coordinate with a positive sign.

/// Eigenvalues within this of the largest one are treated as tied.
pub const TIE_TOL: f64 = 1e-12;

const ROOT_RTOL: f64 = 1e-15;
const MAX_ITER: usize = 200;

/// Maximizer of `Σ λᵢ yᵢ² + 2 hᵢ yᵢ` on the sphere of radius `radius`.
///
/// `lambda` and `h` must have the same length.
pub fn maximize_on_sphere(lambda: &[f64], h: &[f64], radius: f64) -> Vec<f64> {
    assert_eq!(lambda.len(), h.len());
    let n = lambda.len();
    if n == 0 || radius <= 0.0 {
        return vec![0.0; n];
    }
    let top = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<bool> = lambda.iter().map(|&l| l >= top - TIE_TOL).collect();
    let h_scale = h.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let negligible = 1e-15 * h_scale.max(f64::MIN_POSITIVE);

    let top_gradient_vanishes = h
        .iter()
        .zip(&tied)
        .all(|(&hi, &t)| !t || hi.abs() <= negligible);

    if top_gradient_vanishes {
        // Candidate hard case: μ sits on the top pole.
        let mut y = vec![0.0; n];
        let mut used = 0.0;
        for i in 0..n {
            if !tied[i] {
                y[i] = h[i] / (top - lambda[i]);
                used += y[i] * y[i];
            }
        }
        if used <= radius * radius {
            let free = (radius * radius - used).sqrt();
            let first = tied
                .iter()
                .position(|&t| t)
                .expect("at least one tied index");
            y[first] = free;
            return y;
        }
    }

    let t = secular_root(lambda, h, top, radius);
    (0..n)
        .map(|i| {
            let denom = t + (top - lambda[i]);
            if denom > 0.0 {
                h[i] / denom
            } else {
                0.0
            }
        })
        .collect()
}

/// Returns `t = μ − max λ > 0` solving `‖y(μ)‖ = ρ`.
fn secular_root(lambda: &[f64], h: &[f64], top: f64, radius: f64) -> f64 {
    let norm_at = |t: f64| -> (f64, f64) {
        // ‖y‖ and d‖y‖/dt.
        let mut s = 0.0;
        let mut ds = 0.0;
        for (&l, &hi) in lambda.iter().zip(h) {
            let d = t + (top - l);
            if d <= 0.0 {
                if hi != 0.0 {
                    return (f64::INFINITY, f64::NEG_INFINITY);
                }
                continue;
            }
            let yi = hi / d;
            s += yi * yi;
            ds += -2.0 * yi * yi / d;
        }
        let nrm = s.sqrt();
        (nrm, if nrm > 0.0 { ds / (2.0 * nrm) } else { 0.0 })
    };

    let h_norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut lo = lambda
        .iter()
        .zip(h)
        .map(|(&l, &hi)| hi.abs() / radius - (top - l))
        .fold(0.0, f64::max);
    let mut hi_t = (h_norm / radius).max(lo);
    if hi_t <= 0.0 {
        return 0.0;
    }
    let mut t = hi_t;
    for _ in 0..MAX_ITER {
        let (nrm, dnrm) = norm_at(t);
        // φ(t) = 1/‖y‖ − 1/ρ is increasing in t.
        let phi = if nrm.is_finite() {
            1.0 / nrm - 1.0 / radius
        } else {
            -1.0 / radius
        };
        if phi > 0.0 {
            hi_t = t;
        } else {
            lo = t;
        }
        if phi == 0.0 || hi_t - lo <= ROOT_RTOL * hi_t {
            break;
        }
        let dphi = if nrm.is_finite() && nrm > 0.0 {
            -dnrm / (nrm * nrm)
        } else {
            0.0
        };
        let newton = if dphi > 0.0 { t - phi / dphi } else { f64::NAN };
        let next = if newton.is_finite() && newton > lo && newton < hi_t {
            newton
        } else {
            0.5 * (lo + hi_t)
        };
        if (next - t).abs() <= ROOT_RTOL * t.abs() {
            t = next;
            break;
        }
        t = next;
    }
    t
}
