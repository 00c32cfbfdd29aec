//! Affine qubit channels `v ↦ T v + b` and the geometry of their image
//! ellipsoid.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::bloch::{from_pauli_coefficients, pauli_coefficients, CoherenceVector, UnitAxis};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, svd3};
use crate::secular::maximize_on_sphere;

/// Default tolerance on the smallest Choi eigenvalue.
pub const DEFAULT_CP_TOL: f64 = 1e-9;

/// Radii at or below this are treated as exactly zero.
pub const RADIUS_TOL: f64 = 1e-12;

/// A qubit channel in coherence-vector form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineChannel {
    /// Linear part.
    pub t: Matrix3<f64>,
    /// Shift: the image of the maximally mixed state.
    pub b: Vector3<f64>,
}

/// Outcome of the complete-positivity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChoiReport {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
}

impl AffineChannel {
    pub fn new(t: Matrix3<f64>, b: Vector3<f64>) -> Self {
        AffineChannel { t, b }
    }

    /// `T = diag(radii)`.
    pub fn diagonal(radii: [f64; 3], b: [f64; 3]) -> Self {
        AffineChannel::new(
            Matrix3::from_diagonal(&Vector3::from(radii)),
            Vector3::from(b),
        )
    }

    pub fn identity() -> Self {
        AffineChannel::new(Matrix3::identity(), Vector3::zeros())
    }

    pub fn apply(&self, v: &CoherenceVector) -> CoherenceVector {
        self.t * v + self.b
    }

    /// Action of the channel extended linearly to arbitrary 2×2 operators.
    pub fn apply_operator(&self, x: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        let (x0, v) = pauli_coefficients(x);
        let t = self.t.map(|e| Complex64::new(e, 0.0));
        let b = self.b.map(|e| Complex64::new(e, 0.0));
        from_pauli_coefficients(x0, &(t * v + b * x0))
    }

    /// Unnormalized Choi matrix `Σᵢⱼ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
    pub fn choi_matrix(&self) -> Matrix4<Complex64> {
        let mut choi = Matrix4::<Complex64>::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let mut e = Matrix2::<Complex64>::zeros();
                e[(i, j)] = Complex64::new(1.0, 0.0);
                let out = self.apply_operator(&e);
                for r in 0..2 {
                    for c in 0..2 {
                        choi[(2 * i + r, 2 * j + c)] = out[(r, c)];
                    }
                }
            }
        }
        choi
    }

    /// Complete positivity via positivity of the Choi matrix.
    pub fn choi_cptp_check(&self, tol: f64) -> ChoiReport {
        let min_eigenvalue = hermitian_eigenvalues(&self.choi_matrix())[0];
        ChoiReport {
            is_cp: min_eigenvalue >= -tol,
            min_eigenvalue,
        }
    }

    /// Fails with [`Error::NotCompletelyPositive`] unless the channel passes
    /// the Choi test at [`DEFAULT_CP_TOL`].
    pub fn ensure_cptp(&self) -> Result<()> {
        let report = self.choi_cptp_check(DEFAULT_CP_TOL);
        if report.is_cp {
            Ok(())
        } else {
            Err(Error::NotCompletelyPositive {
                min_eigenvalue: report.min_eigenvalue,
            })
        }
    }

    pub fn diagonalize(&self) -> DiagonalFrame {
        let svd = svd3(&self.t);
        DiagonalFrame {
            u: svd.u,
            s: svd.s,
            v: svd.v,
            xi: svd.u.transpose() * self.b,
        }
    }
}

/// The channel in the coordinates where `T` is diagonal:
/// `T = U diag(s) Vᵀ`, `ξ = Uᵀ b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalFrame {
    pub u: Matrix3<f64>,
    /// Semi-axes of the image ellipsoid, descending.
    pub s: Vector3<f64>,
    pub v: Matrix3<f64>,
    /// Shift in the output frame.
    pub xi: Vector3<f64>,
}

/// Point of the image ellipsoid with maximal projection on an axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPoint {
    pub w: CoherenceVector,
    /// `π̂·w = ‖Tᵀπ̂‖ + π̂·b`.
    pub value: f64,
    /// Pure input state mapped to `w`, `Tᵀπ̂/‖Tᵀπ̂‖`. `None` when `Tᵀπ̂ = 0`,
    /// in which case every input is optimal and `w = b`.
    pub v_in: Option<UnitAxis>,
}

/// Point of the image ellipsoid farthest from a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarthestPoint {
    pub w: CoherenceVector,
    pub distance: f64,
}

impl DiagonalFrame {
    pub fn transform(&self) -> Matrix3<f64> {
        self.u * Matrix3::from_diagonal(&self.s) * self.v.transpose()
    }

    /// The shift `b = U ξ` in the original coordinates.
    pub fn shift(&self) -> Vector3<f64> {
        self.u * self.xi
    }

    pub fn channel(&self) -> AffineChannel {
        AffineChannel::new(self.transform(), self.shift())
    }

    /// Radii with values below [`RADIUS_TOL`] snapped to zero.
    pub fn radii(&self) -> Vector3<f64> {
        self.s.map(|r| if r <= RADIUS_TOL { 0.0 } else { r })
    }

    /// `Tᵀ π̂ = V S Uᵀ π̂`.
    fn t_transpose(&self, axis: &Vector3<f64>) -> Vector3<f64> {
        self.v * self.radii().component_mul(&(self.u.transpose() * axis))
    }

    pub fn support_point(&self, axis: &UnitAxis) -> SupportPoint {
        let a = axis.vector();
        let pulled = self.t_transpose(a);
        let norm = pulled.norm();
        let b = self.shift();
        match UnitAxis::normalize(pulled).filter(|_| norm > RADIUS_TOL) {
            Some(v_in) => SupportPoint {
                w: self.transform() * v_in.vector() + b,
                value: norm + a.dot(&b),
                v_in: Some(v_in),
            },
            None => SupportPoint {
                w: b,
                value: a.dot(&b),
                v_in: None,
            },
        }
    }

    /// Maximizes `‖w − q‖` over the image ellipsoid.
    ///
    /// In the diagonal frame `w = S ψ + ξ` with `‖ψ‖ = 1`, so the problem is a
    /// trust-region subproblem in `ψ`; ties are resolved towards the
    /// lexicographically largest point in the diagonal frame.
    pub fn farthest_point(&self, q: &Vector3<f64>) -> FarthestPoint {
        let radii = self.radii();
        let rel = self.u.transpose() * q - self.xi;
        let lambda: Vec<f64> = radii.iter().map(|r| r * r).collect();
        let h: Vec<f64> = (0..3).map(|i| -radii[i] * rel[i]).collect();
        let psi = maximize_on_sphere(&lambda, &h, 1.0);
        let w_diag = radii.component_mul(&Vector3::from_column_slice(&psi)) + self.xi;
        let w = self.u * w_diag;
        FarthestPoint {
            w,
            distance: (w - q).norm(),
        }
    }
}
