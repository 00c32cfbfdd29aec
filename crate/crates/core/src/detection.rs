//! Maximal probability of correct decision for a given prior.
//!
//! With antipodal outputs `w0 = 2b − w1`,
//! `Pc = ½ + ½ π̂·(w1 − 2p0 b)`, so the best projective measurement is the
//! direction from `q = 2p0 b` to the farthest point of the image ellipsoid,
//! and `Pc = (1 + ‖d‖)/2` with `d = w1 − q`. If a trivial measurement does
//! better, `Pc = max(p0, 1 − p0)`.

use nalgebra::Vector3;
use serde::Serialize;

use crate::bloch::{transition_probabilities, TransitionPoint, UnitAxis};
use crate::channel::{AffineChannel, DiagonalFrame};
use crate::error::{check_probability, Result};

/// Distances within this of the optimum count as a second optimal direction.
pub const DEGENERACY_TOL: f64 = 1e-9;

const DEGENERACY_GRID: usize = 2000;
const DEGENERACY_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionMode {
    Projective,
    /// `Π0 = I`: always decide 0.
    TrivialIdentity,
    /// `Π0 = 0`: always decide 1.
    TrivialNull,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionReport {
    pub p0: f64,
    pub pc: f64,
    pub mode: DetectionMode,
    /// Measurement axis of `Π1`, projective mode only.
    pub axis: Option<UnitAxis>,
    /// `w1 − 2p0 b` at the farthest ellipsoid point.
    pub d: Vector3<f64>,
    /// Inputs `(v0, v1)` sent for symbols 0 and 1, projective mode only.
    pub inputs: Option<[UnitAxis; 2]>,
    /// Resulting binary channel.
    pub point: TransitionPoint,
    /// Another direction attains the optimum as well.
    pub degenerate: bool,
}

/// `Pc = p0·p00 + (1 − p0)·p11`.
pub fn pc_of_point(p: &TransitionPoint, p0: f64) -> Result<f64> {
    p.validate()?;
    check_probability("p0", p0)?;
    Ok(p0 * p.p00 + (1.0 - p0) * p.p11)
}

/// Optimal correct-decision probability of a completely positive channel.
pub fn optimize_pc(ch: &AffineChannel, p0: f64) -> Result<DetectionReport> {
    check_probability("p0", p0)?;
    ch.ensure_cptp()?;
    optimize_pc_frame(&ch.diagonalize(), p0)
}

/// As [`optimize_pc`] without the complete-positivity check.
pub fn optimize_pc_frame(frame: &DiagonalFrame, p0: f64) -> Result<DetectionReport> {
    check_probability("p0", p0)?;
    let b = frame.shift();
    let q = b * (2.0 * p0);
    let far = frame.farthest_point(&q);
    let d = far.w - q;
    let gap = (1.0 - 2.0 * p0).abs();

    if far.distance >= gap && far.distance > 1e-15 {
        let axis = UnitAxis::normalize(d).expect("nonzero difference vector");
        let support = frame.support_point(&axis);
        let v1 = support.v_in.unwrap_or(axis);
        let point = transition_probabilities(&axis, &(2.0 * b - far.w), &far.w);
        return Ok(DetectionReport {
            p0,
            pc: 0.5 * (1.0 + far.distance),
            mode: DetectionMode::Projective,
            axis: Some(axis),
            d,
            inputs: Some([-v1, v1]),
            point,
            degenerate: has_second_optimum(frame, &q, &far.w, far.distance),
        });
    }

    let (mode, point) = if p0 >= 0.5 {
        (
            DetectionMode::TrivialIdentity,
            TransitionPoint::new(0.0, 1.0),
        )
    } else {
        (DetectionMode::TrivialNull, TransitionPoint::new(1.0, 0.0))
    };
    Ok(DetectionReport {
        p0,
        pc: p0.max(1.0 - p0),
        mode,
        axis: None,
        d,
        inputs: None,
        point,
        degenerate: false,
    })
}

/// Looks for an ellipsoid point away from `best` whose distance from `q`
/// matches the optimum, over a Fibonacci grid of inputs and the principal
/// input directions. When `q` is the center, the reflection of `best` is
/// the same measurement with relabeled outcomes and does not count.
fn has_second_optimum(
    frame: &DiagonalFrame,
    q: &Vector3<f64>,
    best: &Vector3<f64>,
    dist: f64,
) -> bool {
    let t = frame.transform();
    let b = frame.shift();
    let mirror = ((q - b).norm() <= 1e-12).then(|| 2.0 * q - best);
    let principal = (0..3).flat_map(|i| {
        let v = frame.v.column(i).into_owned();
        [v, -v]
    });
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let grid = (0..DEGENERACY_GRID).map(|i| {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / DEGENERACY_GRID as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = golden * i as f64;
        Vector3::new(r * phi.cos(), r * phi.sin(), z)
    });
    principal.chain(grid).any(|v| {
        let w = t * v + b;
        (w - best).norm() > DEGENERACY_EXCLUSION
            && mirror.is_none_or(|m| (w - m).norm() > DEGENERACY_EXCLUSION)
            && (w - q).norm() >= dist - DEGENERACY_TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::region::generate_region_frame;
    use crate::sampling::{sample_cptp_channel, sample_unital_channel};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_sphere() -> AffineChannel {
        AffineChannel::diagonal([0.1, 0.1, 0.1], [0.3, 0.0, 0.0])
    }

    #[test]
    fn pc_of_point_examples() {
        assert_eq!(
            pc_of_point(&TransitionPoint::new(1.0, 1.0), 0.3).unwrap(),
            1.0
        );
        assert_eq!(
            pc_of_point(&TransitionPoint::new(0.5, 0.5), 0.7).unwrap(),
            0.5
        );
        assert_abs_diff_eq!(
            pc_of_point(&TransitionPoint::new(0.95, 0.65), 0.5).unwrap(),
            0.80,
            epsilon = 1e-15
        );
        assert!(matches!(
            pc_of_point(&TransitionPoint::new(1.2, 0.5), 0.5),
            Err(Error::OutOfRange { .. })
        ));
        assert!(pc_of_point(&TransitionPoint::new(0.5, 0.5), -0.1).is_err());
    }

    #[test]
    fn identity_channel_is_perfect() {
        let r = optimize_pc(&AffineChannel::identity(), 0.5).unwrap();
        assert_eq!(r.mode, DetectionMode::Projective);
        assert_abs_diff_eq!(r.pc, 1.0, epsilon = 1e-15);
        assert!(r.degenerate);
        let [v0, v1] = r.inputs.unwrap();
        assert!((v0.vector() + v1.vector()).norm() < 1e-15);
        assert!(r.point.distance(&TransitionPoint::new(1.0, 1.0)) < 1e-15);
    }

    #[test]
    fn sphere_channel_has_continuum_of_optima() {
        let r = optimize_pc(&small_sphere(), 0.5).unwrap();
        assert_eq!(r.mode, DetectionMode::Projective);
        assert_abs_diff_eq!(r.pc, 0.55, epsilon = 1e-12);
        assert!(r.degenerate);
        let axis = r.axis.unwrap();
        assert!((axis.vector() - r.d.normalize()).norm() < 1e-9);
    }

    #[test]
    fn skewed_prior_prefers_trivial_measurement() {
        let r = optimize_pc(&small_sphere(), 0.9).unwrap();
        assert_eq!(r.mode, DetectionMode::TrivialIdentity);
        assert_eq!(r.pc, 0.9);
        assert_abs_diff_eq!(r.d.norm(), 0.34, epsilon = 1e-12);
        assert_eq!(pc_of_point(&r.point, 0.9).unwrap(), 0.9);
        let r = optimize_pc(&small_sphere(), 0.1).unwrap();
        assert_eq!(r.mode, DetectionMode::TrivialNull);
        assert_abs_diff_eq!(r.pc, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(pc_of_point(&r.point, 0.1).unwrap(), 0.9, epsilon = 1e-15);
    }

    #[test]
    fn relabeled_optimum_is_not_a_second_optimum() {
        let offset = AffineChannel::diagonal([0.1, 0.4, 0.1], [0.23, 0.32, 0.05]);
        let unital = AffineChannel::diagonal([0.3, 0.7, 0.2], [0.0; 3]);
        for ch in [offset, unital] {
            assert!(!optimize_pc(&ch, 0.5).unwrap().degenerate);
        }
        assert!(!optimize_pc(&unital, 0.2).unwrap().degenerate);
        let disc = AffineChannel::diagonal([0.5, 0.5, 0.1], [0.0; 3]);
        assert!(optimize_pc(&disc, 0.5).unwrap().degenerate);
    }

    #[test]
    fn isotropic_contraction() {
        let r = optimize_pc(&AffineChannel::diagonal([0.5, 0.5, 0.5], [0.0; 3]), 0.5).unwrap();
        assert_abs_diff_eq!(r.pc, 0.75, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let transpose = AffineChannel::diagonal([1.0, -1.0, 1.0], [0.0; 3]);
        assert!(matches!(
            optimize_pc(&transpose, 0.5),
            Err(Error::NotCompletelyPositive { .. })
        ));
        assert!(matches!(
            optimize_pc(&AffineChannel::identity(), 1.5),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn reported_point_reproduces_pc() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..200 {
            let ch = sample_cptp_channel(&mut rng);
            let p0 = rng.random_range(0.0..1.0);
            let r = optimize_pc(&ch, p0).unwrap();
            assert!(r.pc >= p0.max(1.0 - p0) - 1e-12);
            assert_abs_diff_eq!(pc_of_point(&r.point, p0).unwrap(), r.pc, epsilon = 1e-10);
            if let (Some(axis), Some([v0, v1])) = (r.axis, r.inputs) {
                assert!((axis.vector() - r.d.normalize()).norm() < 1e-9);
                let w1 = ch.apply(v1.vector());
                let w0 = ch.apply(v0.vector());
                let p = transition_probabilities(&axis, &w0, &w1);
                assert!(p.distance(&r.point) < 1e-9);
            }
        }
    }

    #[test]
    fn optimum_dominates_region_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..20 {
            let ch = sample_cptp_channel(&mut rng);
            let frame = ch.diagonalize();
            let region = generate_region_frame(&frame, 64).unwrap();
            for p0 in [0.1, 0.3, 0.5, 0.8] {
                let pc = optimize_pc(&ch, p0).unwrap().pc;
                for smp in &region.samples {
                    assert!(pc_of_point(&smp.point, p0).unwrap() <= pc + 1e-8);
                }
            }
        }
    }

    #[test]
    fn unital_channels_are_symmetric_in_the_prior() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..100 {
            let ch = sample_unital_channel(&mut rng);
            let p0 = rng.random_range(0.0..1.0);
            let a = optimize_pc(&ch, p0).unwrap().pc;
            let b = optimize_pc(&ch, 1.0 - p0).unwrap().pc;
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn more_noise_never_helps() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for _ in 0..100 {
            let ch = sample_unital_channel(&mut rng);
            let mut last = optimize_pc(&ch, 0.5).unwrap().pc;
            for alpha in [0.9, 0.6, 0.3, 0.0] {
                let scaled = AffineChannel::new(ch.t * alpha, ch.b);
                let pc = optimize_pc(&scaled, 0.5).unwrap().pc;
                assert!(pc <= last + 1e-12);
                last = pc;
            }
        }
    }
}
