//! Random completely positive qubit channels.
//!
//! Draws `T` with entries uniform in `[-1, 1]` and `b` uniform in the unit
//! ball, and rejects until the Choi matrix is positive semidefinite. Only a
//! few draws in 10⁵ survive, so two exact necessary conditions are checked
//! before the Choi matrix is built:
//!
//! * `‖T eᵢ‖² + ‖b‖² ≤ 1` for each column, since `T(±eᵢ) + b` must stay in the
//!   unit ball;
//! * `‖T‖²_F + ‖b‖² ≤ 3`, since `tr J² = 1 + ‖T‖²_F + ‖b‖²` and `tr J = 2`.
//!
//! The Choi test itself runs as a Cholesky factorization of `J + tol·I`,
//! which succeeds exactly when the smallest eigenvalue exceeds `-tol`.

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{AffineChannel, DEFAULT_CP_TOL};
use crate::linalg::is_positive_definite;

/// Uniform point in the closed unit ball.
pub fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.random_range(-1.0..=1.0));
        if v.norm_squared() <= 1.0 {
            return v;
        }
    }
}

/// Fast positive-semidefiniteness gate on the Choi matrix.
pub fn passes_choi_gate(ch: &AffineChannel, tol: f64) -> bool {
    let shifted = ch.choi_matrix() + Matrix4::<Complex64>::identity() * Complex64::new(tol, 0.0);
    is_positive_definite(&shifted)
}

fn passes_prefilter(t: &Matrix3<f64>, b: &Vector3<f64>) -> bool {
    let b2 = b.norm_squared();
    t.column_iter().all(|c| c.norm_squared() + b2 <= 1.0) && t.norm_squared() + b2 <= 3.0
}

/// Rejection-samples a channel passing the Choi test at the default
/// tolerance.
pub fn sample_cptp_channel<R: Rng + ?Sized>(rng: &mut R) -> AffineChannel {
    loop {
        let t = Matrix3::from_fn(|_, _| rng.random_range(-1.0..=1.0));
        let b = uniform_in_ball(rng);
        if !passes_prefilter(&t, &b) {
            continue;
        }
        let ch = AffineChannel::new(t, b);
        if passes_choi_gate(&ch, DEFAULT_CP_TOL) {
            return ch;
        }
    }
}

/// Channel with `b = 0` sampled as above.
pub fn sample_unital_channel<R: Rng + ?Sized>(rng: &mut R) -> AffineChannel {
    loop {
        let t = Matrix3::from_fn(|_, _| rng.random_range(-1.0..=1.0));
        let b = Vector3::zeros();
        if !passes_prefilter(&t, &b) {
            continue;
        }
        let ch = AffineChannel::new(t, b);
        if passes_choi_gate(&ch, DEFAULT_CP_TOL) {
            return ch;
        }
    }
}
