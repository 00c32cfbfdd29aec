//! Coherence-vector (Bloch) algebra for qubit states and rank-1 projective
//! measurements.
//!
//! A state is `ρ = ½(I + v·σ)` with `σ = (σx, σy, σz)`; a measurement axis
//! `π̂` defines the projector pair `Π1 = ½(I + π̂·σ)`, `Π0 = I − Π1`.

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A coherence vector: the real coefficients of a qubit operator on the Pauli
/// basis `(σx, σy, σz)`.
pub type CoherenceVector = Vector3<f64>;

/// Tolerance on norms, traces and eigenvalues of states.
pub const STATE_TOL: f64 = 1e-12;

/// Accepted deviation from unit norm for measurement axes.
pub const AXIS_TOL: f64 = 1e-9;

/// The Pauli matrices `[σx, σy, σz]`.
pub fn pauli() -> [Matrix2<Complex64>; 3] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(one, o, o, -one),
    ]
}

/// `½(x0·I + v·σ)` for complex coefficients.
pub(crate) fn from_pauli_coefficients(x0: Complex64, v: &Vector3<Complex64>) -> Matrix2<Complex64> {
    let [sx, sy, sz] = pauli();
    (Matrix2::identity() * x0 + sx * v[0] + sy * v[1] + sz * v[2]) * Complex64::new(0.5, 0.0)
}

/// `(tr X, tr(σx X), tr(σy X), tr(σz X))`.
pub(crate) fn pauli_coefficients(x: &Matrix2<Complex64>) -> (Complex64, Vector3<Complex64>) {
    let [sx, sy, sz] = pauli();
    (
        x.trace(),
        Vector3::new((sx * x).trace(), (sy * x).trace(), (sz * x).trace()),
    )
}

fn real_operator(v: &CoherenceVector) -> Matrix2<Complex64> {
    from_pauli_coefficients(Complex64::new(1.0, 0.0), &v.map(|x| Complex64::new(x, 0.0)))
}

/// A unit-norm measurement axis `π̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "[f64; 3]")]
pub struct UnitAxis(Vector3<f64>);

impl UnitAxis {
    /// Accepts a vector whose norm is 1 within [`AXIS_TOL`] and renormalizes it.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > AXIS_TOL || !norm.is_finite() {
            return Err(Error::NonUnitAxis { norm });
        }
        Ok(UnitAxis(v / norm))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(v: Vector3<f64>) -> Option<Self> {
        let norm = v.norm();
        (norm > 0.0 && norm.is_finite()).then(|| UnitAxis(v / norm))
    }

    pub fn x() -> Self {
        UnitAxis(Vector3::x())
    }

    pub fn y() -> Self {
        UnitAxis(Vector3::y())
    }

    pub fn z() -> Self {
        UnitAxis(Vector3::z())
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Vector3<f64> {
        self.0
    }
}

impl std::ops::Neg for UnitAxis {
    type Output = UnitAxis;

    fn neg(self) -> UnitAxis {
        UnitAxis(-self.0)
    }
}

impl From<UnitAxis> for [f64; 3] {
    fn from(a: UnitAxis) -> Self {
        [a.0.x, a.0.y, a.0.z]
    }
}

impl TryFrom<[f64; 3]> for UnitAxis {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        UnitAxis::new(Vector3::from(v))
    }
}

/// A qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState(Matrix2<Complex64>);

impl QubitState {
    /// `ρ = ½(I + v·σ)`, rejecting vectors outside the Bloch ball.
    pub fn from_coherence(v: &CoherenceVector) -> Result<Self> {
        let norm = v.norm();
        if norm > 1.0 + STATE_TOL || !norm.is_finite() {
            return Err(Error::InvalidState { norm });
        }
        Ok(QubitState(real_operator(v)))
    }

    /// Validates a 2×2 matrix as a density operator.
    pub fn from_matrix(m: Matrix2<Complex64>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidDensity { reason };
        if (m - m.adjoint()).iter().any(|z| z.norm() > STATE_TOL) {
            return Err(invalid("matrix is not Hermitian".into()));
        }
        let trace = m.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(invalid(format!("trace is {trace}, expected 1")));
        }
        let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        let min_eig = 0.5 * (a + d - ((a - d).powi(2) + 4.0 * b.norm_sqr()).sqrt());
        if min_eig < -STATE_TOL {
            return Err(invalid(format!("negative eigenvalue {min_eig}")));
        }
        Ok(QubitState(m))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    /// `vᵢ = tr(ρ σᵢ)`.
    pub fn coherence_vector(&self) -> CoherenceVector {
        let (_, v) = pauli_coefficients(&self.0);
        v.map(|z| z.re)
    }
}

/// A binary projective measurement `{Π0, Π1}` with `π̂0 = −π̂1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair {
    pub axis: UnitAxis,
    pub pi0: Matrix2<Complex64>,
    pub pi1: Matrix2<Complex64>,
}

/// Builds `Π1 = ½(I + π̂·σ)` and `Π0 = I − Π1`.
pub fn measurement_pair_from_axis(axis: &UnitAxis) -> ProjectorPair {
    let pi1 = real_operator(axis.vector());
    ProjectorPair {
        axis: *axis,
        pi0: Matrix2::identity() - pi1,
        pi1,
    }
}

/// A classical binary channel given by its correct-transition probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoint {
    /// `P(y = 1 | x = 1)`
    pub p11: f64,
    /// `P(y = 0 | x = 0)`
    pub p00: f64,
}

impl TransitionPoint {
    pub fn new(p11: f64, p00: f64) -> Self {
        TransitionPoint { p11, p00 }
    }

    /// Mirror image across the bisecting line `p11 = p00`.
    pub fn swapped(&self) -> Self {
        TransitionPoint::new(self.p00, self.p11)
    }

    /// Point reflection through `(½, ½)`.
    pub fn complemented(&self) -> Self {
        TransitionPoint::new(1.0 - self.p11, 1.0 - self.p00)
    }

    pub fn distance(&self, other: &TransitionPoint) -> f64 {
        (self.p11 - other.p11).hypot(self.p00 - other.p00)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        crate::error::check_probability("p11", self.p11)?;
        crate::error::check_probability("p00", self.p00)
    }
}

/// Transition probabilities of a projective measurement along `axis` on the
/// output states `w0`, `w1`:
/// `p11 = (1 + π̂·w1)/2`, `p00 = (1 − π̂·w0)/2`.
pub fn transition_probabilities(
    axis: &UnitAxis,
    w0: &CoherenceVector,
    w1: &CoherenceVector,
) -> TransitionPoint {
    let a = axis.vector();
    TransitionPoint::new(
        (0.5 * (1.0 + a.dot(w1))).clamp(0.0, 1.0),
        (0.5 * (1.0 - a.dot(w0))).clamp(0.0, 1.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ball_vector() -> impl Strategy<Value = Vector3<f64>> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..1.0f64).prop_filter_map(
            "nonzero direction",
            |(x, y, z, r)| {
                let v = Vector3::new(x, y, z);
                (v.norm() > 1e-3).then(|| v.normalize() * r.cbrt())
            },
        )
    }

    fn unit_axis() -> impl Strategy<Value = UnitAxis> {
        ball_vector().prop_filter_map("nonzero", UnitAxis::normalize)
    }

    #[test]
    fn codec_examples() {
        let mixed = QubitState::from_coherence(&Vector3::zeros()).unwrap();
        assert_eq!(*mixed.matrix(), Matrix2::identity() * c(0.5));
        let up = QubitState::from_coherence(&Vector3::z()).unwrap();
        assert_eq!(*up.matrix(), Matrix2::new(c(1.0), c(0.0), c(0.0), c(0.0)));
        let plus = QubitState::from_coherence(&Vector3::x()).unwrap();
        assert_eq!(*plus.matrix(), Matrix2::new(c(0.5), c(0.5), c(0.5), c(0.5)));
    }

    #[test]
    fn codec_rejects_invalid_inputs() {
        assert!(matches!(
            QubitState::from_coherence(&Vector3::new(0.8, 0.8, 0.0)),
            Err(Error::InvalidState { .. })
        ));
        let not_hermitian = Matrix2::new(c(0.5), c(0.3), c(0.1), c(0.5));
        assert!(matches!(
            QubitState::from_matrix(not_hermitian),
            Err(Error::InvalidDensity { .. })
        ));
        let bad_trace = Matrix2::new(c(0.7), c(0.0), c(0.0), c(0.5));
        assert!(QubitState::from_matrix(bad_trace).is_err());
        let negative = Matrix2::new(c(1.5), c(0.0), c(0.0), c(-0.5));
        assert!(QubitState::from_matrix(negative).is_err());
    }

    #[test]
    fn transition_examples() {
        let z = UnitAxis::z();
        let p = transition_probabilities(&z, &-Vector3::z(), &Vector3::z());
        assert_eq!((p.p11, p.p00), (1.0, 1.0));
        let p = transition_probabilities(&z, &Vector3::zeros(), &Vector3::zeros());
        assert_eq!((p.p11, p.p00), (0.5, 0.5));
        let w1 = Vector3::new(0.3, 0.0, 0.9);
        let w0 = Vector3::new(0.6, 0.0, 0.0) - w1;
        let p = transition_probabilities(&z, &w0, &w1);
        assert_abs_diff_eq!(p.p11, 0.95, epsilon = 1e-15);
        assert_abs_diff_eq!(p.p00, 0.95, epsilon = 1e-15);
    }

    #[test]
    fn axis_must_be_unit() {
        assert!(matches!(
            UnitAxis::new(Vector3::new(0.0, 0.0, 0.9)),
            Err(Error::NonUnitAxis { .. })
        ));
        assert!(UnitAxis::new(Vector3::new(0.0, 0.0, 1.0 + 1e-10)).is_ok());
    }

    #[test]
    fn projector_examples() {
        let pair = measurement_pair_from_axis(&UnitAxis::z());
        assert_eq!(pair.pi1, Matrix2::new(c(1.0), c(0.0), c(0.0), c(0.0)));
        assert_eq!(pair.pi0, Matrix2::new(c(0.0), c(0.0), c(0.0), c(1.0)));
        let flipped = measurement_pair_from_axis(&-UnitAxis::z());
        assert_eq!(flipped.pi1, pair.pi0);
        assert_eq!(flipped.pi0, pair.pi1);
        let pair = measurement_pair_from_axis(&UnitAxis::x());
        assert_eq!(pair.pi1, Matrix2::new(c(0.5), c(0.5), c(0.5), c(0.5)));
        assert_eq!(pair.pi0, Matrix2::new(c(0.5), c(-0.5), c(-0.5), c(0.5)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn codec_round_trip(v in ball_vector()) {
            let back = QubitState::from_coherence(&v).unwrap().coherence_vector();
            prop_assert!((back - v).amax() <= 1e-12);
            let rho = QubitState::from_coherence(&v).unwrap();
            prop_assert!(QubitState::from_matrix(*rho.matrix()).is_ok());
        }

        #[test]
        fn transitions_are_probabilities(axis in unit_axis(), w0 in ball_vector(), w1 in ball_vector()) {
            let p = transition_probabilities(&axis, &w0, &w1);
            prop_assert!((0.0..=1.0).contains(&p.p11) && (0.0..=1.0).contains(&p.p00));
        }

        #[test]
        fn coherence_form_matches_trace_form(axis in unit_axis(), w1 in ball_vector()) {
            let pair = measurement_pair_from_axis(&axis);
            let rho = QubitState::from_coherence(&w1).unwrap();
            let trace = (pair.pi1 * rho.matrix()).trace();
            let p = transition_probabilities(&axis, &Vector3::zeros(), &w1);
            prop_assert!((trace.re - p.p11).abs() <= 1e-12);
            prop_assert!(trace.im.abs() <= 1e-12);
            prop_assert!((pair.pi1 * pair.pi1 - pair.pi1).iter().all(|z| z.norm() <= 1e-12));
            prop_assert!((pair.pi0 + pair.pi1 - Matrix2::identity()).iter().all(|z| z.norm() <= f64::EPSILON));
        }

        #[test]
        fn negating_axis_complements_probabilities(axis in unit_axis(), w0 in ball_vector(), w1 in ball_vector()) {
            let p = transition_probabilities(&axis, &w0, &w1);
            let q = transition_probabilities(&-axis, &w0, &w1);
            prop_assert!((q.p11 - (1.0 - p.p11)).abs() <= 1e-12);
            prop_assert!((q.p00 - (1.0 - p.p00)).abs() <= 1e-12);
        }
    }
}
