//! Binary capacity of a qubit channel with antipodal pure inputs and a
//! projective measurement.
//!
//! The inner maximization over the prior has a closed form. The outer one
//! runs over the border of the region, parametrized by `k`: a Chebyshev
//! sweep picks the best sample, and golden-section search refines `k`
//! between its neighbors.

use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::{TransitionPoint, UnitAxis};
use crate::channel::{AffineChannel, DiagonalFrame};
use crate::error::{check_probability, Error, Result};
use crate::region::{edge_problem, k_nodes, RegionSample};

/// Default width of the final `k` bracket.
pub const DEFAULT_REFINE_TOL: f64 = 1e-8;

/// Channels with `|1 − p11 − p00|` below this are treated as useless.
pub const SINGULAR_TOL: f64 = 1e-12;

/// `h(x) = −x log₂ x − (1−x) log₂(1−x)`, with `0·log 0 = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// `h′(x) = log₂((1 − x)/x)`.
pub fn binary_entropy_derivative(x: f64) -> f64 {
    (1.0 / x - 1.0).log2()
}

/// Inverse of [`binary_entropy_derivative`]: `g(y) = 1/(2^y + 1)`.
pub fn inverse_entropy_derivative(y: f64) -> f64 {
    1.0 / (y.exp2() + 1.0)
}

/// `I(X;Y)` in bits for the prior `P(X = 1) = p1`.
pub fn mutual_information(p: &TransitionPoint, p1: f64) -> Result<f64> {
    p.validate()?;
    check_probability("p1", p1)?;
    Ok(mutual_information_unchecked(p, p1))
}

fn mutual_information_unchecked(p: &TransitionPoint, p1: f64) -> f64 {
    let r = output_zero_probability(p, p1);
    (binary_entropy(r) - p1 * binary_entropy(p.p11) - (1.0 - p1) * binary_entropy(p.p00)).max(0.0)
}

/// `P(Y = 0) = p00 + p1 (1 − p11 − p00)`.
fn output_zero_probability(p: &TransitionPoint, p1: f64) -> f64 {
    (p.p00 + p1 * (1.0 - p.p11 - p.p00)).clamp(0.0, 1.0)
}

/// Capacity-achieving prior of a binary channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriorSolution {
    /// `P(X = 1)`
    pub p1: f64,
    /// `P(Y = 0)`
    pub r: f64,
    /// Mutual information in bits.
    pub i: f64,
}

pub fn optimal_prior(p: &TransitionPoint) -> Result<PriorSolution> {
    p.validate()?;
    Ok(optimal_prior_unchecked(p))
}

fn optimal_prior_unchecked(p: &TransitionPoint) -> PriorSolution {
    let denom = 1.0 - p.p11 - p.p00;
    if denom.abs() < SINGULAR_TOL {
        return PriorSolution {
            p1: 0.5,
            r: output_zero_probability(p, 0.5),
            i: 0.0,
        };
    }
    let r = inverse_entropy_derivative((binary_entropy(p.p11) - binary_entropy(p.p00)) / denom);
    let p1 = ((r - p.p00) / denom).clamp(0.0, 1.0);
    PriorSolution {
        p1,
        r: output_zero_probability(p, p1),
        i: mutual_information_unchecked(p, p1),
    }
}

/// Optimal binary code for a qubit channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityReport {
    /// Capacity in bits per channel use.
    pub c_bin: f64,
    pub point: TransitionPoint,
    pub prior_p1: f64,
    /// `P(Y = 0)` at the optimum.
    pub r: f64,
    /// Measurement axis of `Π1`.
    pub axis: UnitAxis,
    /// Inputs `(v0, v1)` sent for symbols 0 and 1.
    pub inputs: [UnitAxis; 2],
    pub k_at_opt: f64,
    /// Refinement around the best sample ended below the sample itself.
    pub non_unimodal: bool,
}

/// Binary capacity of a completely positive channel.
pub fn optimize_capacity(
    ch: &AffineChannel,
    n_samples: usize,
    refine_tol: f64,
) -> Result<CapacityReport> {
    ch.ensure_cptp()?;
    optimize_capacity_frame(&ch.diagonalize(), n_samples, refine_tol)
}

/// As [`optimize_capacity`] without the complete-positivity check.
pub fn optimize_capacity_frame(
    frame: &DiagonalFrame,
    n_samples: usize,
    refine_tol: f64,
) -> Result<CapacityReport> {
    if n_samples < 8 {
        return Err(Error::InvalidArgument(format!(
            "n_samples must be at least 8, got {n_samples}"
        )));
    }
    if refine_tol.is_nan() || refine_tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "refine tolerance must be positive, got {refine_tol}"
        )));
    }
    let nodes = k_nodes(frame.xi.norm(), n_samples);
    let evaluated: Vec<(RegionSample, PriorSolution)> = nodes
        .par_iter()
        .map(|&k| evaluate(frame, k))
        .collect::<Result<_>>()?;

    // Strict comparison in ascending k keeps the smallest k among ties.
    let mut best = 0;
    for (j, (_, prior)) in evaluated.iter().enumerate() {
        if prior.i > evaluated[best].1.i {
            best = j;
        }
    }
    let seed = evaluated[best];
    let mut chosen = seed;
    let mut non_unimodal = false;
    if nodes.len() > 1 {
        let lo = nodes[best.saturating_sub(1)];
        let hi = nodes[(best + 1).min(nodes.len() - 1)];
        let refined = golden_section(frame, lo, hi, refine_tol)?;
        if refined.1.i > seed.1.i {
            chosen = refined;
        } else if refined.1.i < seed.1.i - 1e-12 {
            non_unimodal = true;
        }
    }

    let (sample, prior) = chosen;
    let v1 = frame
        .support_point(&sample.axis)
        .v_in
        .unwrap_or(sample.axis);
    Ok(CapacityReport {
        c_bin: prior.i,
        point: sample.point,
        prior_p1: prior.p1,
        r: prior.r,
        axis: sample.axis,
        inputs: [-v1, v1],
        k_at_opt: sample.k,
        non_unimodal,
    })
}

fn evaluate(frame: &DiagonalFrame, k: f64) -> Result<(RegionSample, PriorSolution)> {
    let sample = edge_problem(frame, k)?;
    Ok((sample, optimal_prior_unchecked(&sample.point)))
}

/// Golden-section maximization of the mutual information over `k ∈ [lo, hi]`.
fn golden_section(
    frame: &DiagonalFrame,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(RegionSample, PriorSolution)> {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = evaluate(frame, x1)?;
    let mut f2 = evaluate(frame, x2)?;
    while hi - lo > tol {
        if f1.1.i >= f2.1.i {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = evaluate(frame, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = evaluate(frame, x2)?;
        }
    }
    Ok(if f1.1.i >= f2.1.i { f1 } else { f2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::generate_region_frame;
    use crate::sampling::{sample_cptp_channel, sample_unital_channel};
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix3, Vector3};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid_capacity(p: &TransitionPoint, n: usize) -> f64 {
        (0..n)
            .map(|j| mutual_information(p, j as f64 / (n - 1) as f64).unwrap())
            .fold(0.0, f64::max)
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_abs_diff_eq!(inverse_entropy_derivative(2.0), 0.2, epsilon = 1e-15);
        // Series oracle: −x ln x − (1−x) ln(1−x) with ln(1−x) = −Σ xⁿ/n.
        let x: f64 = 0.9;
        let ln_one_minus = -(1..500).map(|n| 0.9f64.powi(n) / n as f64).sum::<f64>();
        let nats = -x * x.ln() - (1.0 - x) * ln_one_minus;
        assert_abs_diff_eq!(
            binary_entropy(0.9),
            nats / std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(binary_entropy(0.9), 0.468996, epsilon = 1e-6);
    }

    #[test]
    fn derivative_and_inverse() {
        for x in [0.01, 0.2, 0.5, 0.77, 0.999] {
            let h = 1e-6;
            let numeric = (binary_entropy(x + h) - binary_entropy(x - h)) / (2.0 * h);
            assert_abs_diff_eq!(binary_entropy_derivative(x), numeric, epsilon = 1e-6);
            assert_abs_diff_eq!(
                inverse_entropy_derivative(binary_entropy_derivative(x)),
                x,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn optimal_prior_examples() {
        let s = optimal_prior(&TransitionPoint::new(1.0, 1.0)).unwrap();
        assert_eq!((s.p1, s.i), (0.5, 1.0));

        let s = optimal_prior(&TransitionPoint::new(0.7, 0.3)).unwrap();
        assert_eq!((s.p1, s.i), (0.5, 0.0));

        let s = optimal_prior(&TransitionPoint::new(1.0, 0.5)).unwrap();
        assert_abs_diff_eq!(s.p1, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(s.i, 0.321928, epsilon = 1e-6);
        assert_abs_diff_eq!(s.i, 5f64.log2() - 2.0, epsilon = 1e-12);

        let s = optimal_prior(&TransitionPoint::new(0.9, 0.9)).unwrap();
        assert_abs_diff_eq!(s.p1, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.i, 1.0 - binary_entropy(0.9), epsilon = 1e-12);
        assert_abs_diff_eq!(s.i, 0.531004, epsilon = 1e-6);
    }

    #[test]
    fn mutual_information_examples() {
        assert_eq!(
            mutual_information(&TransitionPoint::new(1.0, 1.0), 0.5).unwrap(),
            1.0
        );
        assert_eq!(
            mutual_information(&TransitionPoint::new(0.8, 0.4), 0.0).unwrap(),
            0.0
        );
        assert_abs_diff_eq!(
            mutual_information(&TransitionPoint::new(1.0, 0.5), 0.6).unwrap(),
            0.321928,
            epsilon = 1e-6
        );
        assert!(mutual_information(&TransitionPoint::new(0.5, 0.5), 1.5).is_err());
    }

    #[test]
    fn closed_form_prior_beats_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..200 {
            let p = TransitionPoint::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let s = optimal_prior(&p).unwrap();
            let grid = grid_capacity(&p, 10_001);
            assert!(s.i >= grid - 1e-12);
            assert!(s.i - grid < 1e-8);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn information_is_bounded(p11 in 0.0..=1.0f64, p00 in 0.0..=1.0f64, p1 in 0.0..=1.0f64) {
            let p = TransitionPoint::new(p11, p00);
            let i = mutual_information(&p, p1).unwrap();
            let r = output_zero_probability(&p, p1);
            prop_assert!(i >= 0.0);
            prop_assert!(i <= binary_entropy(r) + 1e-15);
            let best = optimal_prior(&p).unwrap();
            prop_assert!(best.i >= i - 1e-12);
            prop_assert!((0.0..=1.0).contains(&best.p1));
            prop_assert!(best.i <= 1.0);
        }

        #[test]
        fn relabeling_preserves_capacity(p11 in 0.0..=1.0f64, p00 in 0.0..=1.0f64) {
            let p = TransitionPoint::new(p11, p00);
            let a = optimal_prior(&p).unwrap().i;
            prop_assert!((a - optimal_prior(&p.swapped()).unwrap().i).abs() < 1e-12);
            prop_assert!((a - optimal_prior(&p.complemented()).unwrap().i).abs() < 1e-12);
        }
    }

    #[test]
    fn capacity_examples() {
        let r = optimize_capacity(&AffineChannel::identity(), 16, DEFAULT_REFINE_TOL).unwrap();
        assert_eq!(r.c_bin, 1.0);
        assert_eq!(r.point, TransitionPoint::new(1.0, 1.0));
        assert_eq!(r.prior_p1, 0.5);

        let zero = AffineChannel::new(Matrix3::zeros(), Vector3::zeros());
        let r = optimize_capacity(&zero, 16, DEFAULT_REFINE_TOL).unwrap();
        assert_eq!(r.c_bin, 0.0);

        let unital = AffineChannel::diagonal([0.3, 0.6, 0.5], [0.0; 3]);
        let r = optimize_capacity(&unital, 16, DEFAULT_REFINE_TOL).unwrap();
        assert_abs_diff_eq!(r.c_bin, 1.0 - binary_entropy(0.8), epsilon = 1e-12);
        assert_abs_diff_eq!(r.point.p11, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(r.point.p00, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(r.prior_p1, 0.5, epsilon = 1e-12);

        assert!(optimize_capacity(&unital, 4, DEFAULT_REFINE_TOL).is_err());
        let transpose = AffineChannel::diagonal([1.0, -1.0, 1.0], [0.0; 3]);
        assert!(matches!(
            optimize_capacity(&transpose, 16, DEFAULT_REFINE_TOL),
            Err(Error::NotCompletelyPositive { .. })
        ));
    }

    #[test]
    fn skewed_channel_priors() {
        let channels = [
            ([0.14, 0.07, 0.19], [0.46, 0.74, 0.03], 0.57),
            ([0.34, 0.24, 0.45], [-0.42, -0.27, -0.26], 0.55),
            ([0.11, 0.64, 0.07], [-0.24, -0.15, 0.45], 0.54),
        ];
        for (t, b, p1) in channels {
            let ch = AffineChannel::diagonal(t, b);
            let r = optimize_capacity(&ch, 256, DEFAULT_REFINE_TOL).unwrap();
            assert!((r.prior_p1 - p1).abs() <= 0.01, "{} vs {p1}", r.prior_p1);
            assert!(!r.non_unimodal);
        }
    }

    #[test]
    fn optimum_is_maximal_and_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..20 {
            let ch = sample_cptp_channel(&mut rng);
            let frame = ch.diagonalize();
            let r = optimize_capacity(&ch, 64, DEFAULT_REFINE_TOL).unwrap();
            let region = generate_region_frame(&frame, 64).unwrap();
            // The refined point lies on the exact border, which the union of
            // sampled parallelograms undercuts between neighboring samples.
            let (s, t) = (r.point.p11 - r.point.p00, r.point.p11 + r.point.p00 - 1.0);
            let h = region.border_height(s);
            assert!(t >= h - 1e-9 && t - h < 5e-3, "t={t} h={h}");
            for smp in &region.samples {
                let p = smp.point;
                assert!(!(p.p11 > r.point.p11 + 1e-6 && p.p00 > r.point.p00 + 1e-6));
                assert!(optimal_prior(&p).unwrap().i <= r.c_bin + 1e-12);
            }
            assert!(r.k_at_opt >= 0.0);
            let w1 = ch.apply(r.inputs[1].vector());
            let w0 = ch.apply(r.inputs[0].vector());
            let p = crate::bloch::transition_probabilities(&r.axis, &w0, &w1);
            assert!(p.distance(&r.point) < 1e-9);
        }
    }

    #[test]
    fn invariant_under_signed_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let perms = [[1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0]];
        for _ in 0..10 {
            let ch = sample_cptp_channel(&mut rng);
            let base = optimize_capacity(&ch, 64, DEFAULT_REFINE_TOL)
                .unwrap()
                .c_bin;
            for perm in perms {
                let signs = [1.0, -1.0, if rng.random_bool(0.5) { 1.0 } else { -1.0 }];
                let p = Matrix3::from_fn(|i, j| if perm[i] == j { signs[i] } else { 0.0 });
                let conj = AffineChannel::new(p * ch.t * p.transpose(), p * ch.b);
                let c = optimize_capacity(&conj, 64, DEFAULT_REFINE_TOL)
                    .unwrap()
                    .c_bin;
                assert_abs_diff_eq!(c, base, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn capacity_grows_with_contraction_strength() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for _ in 0..20 {
            let ch = sample_unital_channel(&mut rng);
            let mut last = 0.0;
            for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let scaled = AffineChannel::new(ch.t * alpha, ch.b);
                let c = optimize_capacity(&scaled, 16, DEFAULT_REFINE_TOL)
                    .unwrap()
                    .c_bin;
                assert!(c >= last - 1e-12);
                last = c;
            }
        }
    }

    #[test]
    fn doubling_samples_is_stable_on_offset_channel() {
        let ch = AffineChannel::diagonal([0.1, 0.4, 0.1], [0.23, 0.32, 0.05]);
        let a = optimize_capacity(&ch, 256, DEFAULT_REFINE_TOL)
            .unwrap()
            .c_bin;
        let b = optimize_capacity(&ch, 512, DEFAULT_REFINE_TOL)
            .unwrap()
            .c_bin;
        assert!((a - b).abs() < 1e-6);
    }
}
