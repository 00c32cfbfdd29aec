//! Reduction of the edge problem to the farthest point of a plane ellipse
//! from the origin.
//!
//! In the diagonal frame the edge problem reads
//!
//! ```text
//! maximize ‖S π‖  subject to  ‖π‖ = 1,  π·ξ = k.
//! ```
//!
//! With `x = S π` the sphere becomes the ellipsoid `Σ xᵢ²/sᵢ² = 1` and the
//! constraint a plane. The chain
//!
//! ```text
//! π = H1 x,  x = H2 p2 + t2,  p2 = H3 p3,  p3 = H4 p4 + t4,  p4 = H5 p5
//! ```
//!
//! eliminates the plane, splits `‖x‖²` into `‖p4‖²/ξz²` plus a constant and
//! rotates the resulting conic onto its principal axes, leaving
//! `A x² + C y² + D x + E y + F = 0` in `p5`.

use nalgebra::{Matrix2, Matrix3, Matrix3x2, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen2;
use crate::secular::maximize_on_sphere;

/// Radii and `|ξz|` below this make the substitutions ill-conditioned.
pub const REDUCTION_TOL: f64 = 1e-9;

/// Conic `A x² + B xy + C y² + D x + E y + F = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Conic {
    pub fn eval(&self, p: &Vector2<f64>) -> f64 {
        let (x, y) = (p.x, p.y);
        self.a * x * x + self.b * x * y + self.c * y * y + self.d * x + self.e * y + self.f
    }
}

/// The full change of variables for one `(frame, k)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipseProblem {
    pub k: f64,
    /// Radii in problem coordinates.
    pub radii: Vector3<f64>,
    /// Shift in problem coordinates.
    pub xi: Vector3<f64>,
    /// Problem coordinate `i` is diagonal-frame coordinate `order[i]`.
    pub order: [usize; 3],
    pub h1: Matrix3<f64>,
    pub h2: Matrix3x2<f64>,
    pub t2: Vector3<f64>,
    pub h3: Matrix2<f64>,
    pub h4: Matrix2<f64>,
    pub t4: Vector2<f64>,
    pub h5: Matrix2<f64>,
    /// `R² = a²b²ξz² + c²v`.
    pub r: f64,
    /// Radicand of the closed-form principal coefficients.
    pub s: f64,
    /// `v = b²ξx² + a²ξy²`.
    pub v: f64,
    pub conic: Conic,
    pub center: Vector2<f64>,
    pub semi_axes: Vector2<f64>,
}

/// Reduction in the frame's own coordinates.
pub fn ellipse_reduction(
    radii: &Vector3<f64>,
    xi: &Vector3<f64>,
    k: f64,
) -> Result<EllipseProblem> {
    reduce_ordered(radii, xi, k, [0, 1, 2])
}

/// Reduction after relabeling axes so that the largest `|ξᵢ|` plays the role
/// of `ξz`.
pub fn ellipse_reduction_relabeled(
    radii: &Vector3<f64>,
    xi: &Vector3<f64>,
    k: f64,
) -> Result<EllipseProblem> {
    let big = xi.iamax();
    let mut order = [0, 1, 2];
    order.swap(2, big);
    reduce_ordered(radii, xi, k, order)
}

fn reduce_ordered(
    radii: &Vector3<f64>,
    xi_frame: &Vector3<f64>,
    k: f64,
    order: [usize; 3],
) -> Result<EllipseProblem> {
    let xi_norm = xi_frame.norm();
    if k.abs() > xi_norm + 1e-12 {
        return Err(Error::InfeasibleConstraint { k, max: xi_norm });
    }
    let s = Vector3::from_fn(|i, _| radii[order[i]]);
    let xi = Vector3::from_fn(|i, _| xi_frame[order[i]]);
    let (a, b, c) = (s.x, s.y, s.z);
    let (xx, xy, xz) = (xi.x, xi.y, xi.z);
    if s.min() < REDUCTION_TOL {
        return Err(Error::ReductionFallback {
            reason: "radius near zero",
        });
    }
    if xz.abs() < REDUCTION_TOL {
        return Err(Error::ReductionFallback {
            reason: "shift component near zero",
        });
    }

    let h1 = Matrix3::from_diagonal(&Vector3::new(1.0 / a, 1.0 / b, 1.0 / c));
    let h2 = Matrix3x2::new(1.0, 0.0, 0.0, 1.0, -c * xx / (a * xz), -c * xy / (b * xz));
    let t2 = Vector3::new(0.0, 0.0, c * k / xz);

    let v = b * b * xx * xx + a * a * xy * xy;
    let sv = v.sqrt();
    let (h3, sv) = if sv > 1e-12 * a * xi_norm {
        (Matrix2::new(b * xx, a * xy, a * xy, -b * xx) / sv, sv)
    } else {
        (Matrix2::identity(), 0.0)
    };
    let r2 = a * a * b * b * xz * xz + c * c * v;
    let r = r2.sqrt();
    let h4 = Matrix2::new(a * b / r, 0.0, 0.0, 1.0 / xz);
    let t4 = Vector2::new(k * a * b * c * c * sv / r2, 0.0);

    // x = L p4 + m
    let l = h2 * h3 * h4;
    let m = h2 * (h3 * t4) + t2;
    let q = Matrix3::from_diagonal(&Vector3::new(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c)));
    let z2 = xz * xz;
    let quad = l.transpose() * q * l * z2;
    let lin = l.transpose() * q * m * z2;
    let f = (m.dot(&(q * m)) - 1.0) * z2;

    let off = 0.5 * (quad[(0, 1)] + quad[(1, 0)]);
    let sym = Matrix2::new(quad[(0, 0)], off, off, quad[(1, 1)]);
    let (big_a, big_c, va, vc) = symmetric_eigen2(&sym);
    let h5 = Matrix2::from_columns(&[va, vc]);
    let de = h5.transpose() * lin * 2.0;
    let conic = Conic {
        a: big_a,
        b: 0.0,
        c: big_c,
        d: de.x,
        e: de.y,
        f,
    };
    if big_c.is_nan() || big_c <= 0.0 {
        return Err(Error::DegenerateConic {
            reason: "quadratic part is not positive definite",
        });
    }

    let center = Vector2::new(-conic.d / (2.0 * big_a), -conic.e / (2.0 * big_c));
    let numer = conic.d * conic.d * big_c + conic.e * conic.e * big_a - 4.0 * big_a * big_c * f;
    let scale =
        conic.d * conic.d * big_c + conic.e * conic.e * big_a + 4.0 * big_a * big_c * f.abs();
    if numer < -1e-12 * scale {
        return Err(Error::DegenerateConic {
            reason: "conic has no real points",
        });
    }
    let numer = numer.max(0.0);
    let semi_axes = Vector2::new(
        (numer / (4.0 * big_a * big_a * big_c)).sqrt(),
        (numer / (4.0 * big_a * big_c * big_c)).sqrt(),
    );

    let (a2, b2, c2) = (a * a, b * b, c * c);
    let lin_s = (b2 - c2) * xx * xx + (a2 - c2) * xy * xy + (a2 - b2) * xz * xz;
    let s_rad = lin_s * lin_s - 4.0 * xx * xx * xz * xz * (a2 - b2) * (b2 - c2);

    Ok(EllipseProblem {
        k,
        radii: s,
        xi,
        order,
        h1,
        h2,
        t2,
        h3,
        h4,
        t4,
        h5,
        r,
        s: s_rad,
        v,
        conic,
        center,
        semi_axes,
    })
}

impl EllipseProblem {
    /// Point of the ellipse at parameter angle `theta`.
    pub fn point_at(&self, theta: f64) -> Vector2<f64> {
        self.center
            + Vector2::new(
                self.semi_axes.x * theta.cos(),
                self.semi_axes.y * theta.sin(),
            )
    }

    /// `x = S π` in problem coordinates.
    pub fn scaled_point(&self, p5: &Vector2<f64>) -> Vector3<f64> {
        let p4 = self.h5 * p5;
        let p3 = self.h4 * p4 + self.t4;
        self.h2 * (self.h3 * p3) + self.t2
    }

    /// Maps a conic point back to the axis `π` in diagonal-frame coordinates.
    pub fn frame_axis(&self, p5: &Vector2<f64>) -> Vector3<f64> {
        let pi = self.h1 * self.scaled_point(p5);
        let mut out = Vector3::zeros();
        for (i, &j) in self.order.iter().enumerate() {
            out[j] = pi[i];
        }
        out
    }

    /// `‖S π‖` at a conic point.
    pub fn objective(&self, p5: &Vector2<f64>) -> f64 {
        self.scaled_point(p5).norm()
    }
}

/// Point of the conic farthest from the origin. Among equal maxima the
/// lexicographically largest `(x, y)` is returned.
pub fn farthest_on_ellipse(ep: &EllipseProblem) -> Result<Vector2<f64>> {
    let ax = ep.semi_axes;
    if !(ax.x.is_finite() && ax.y.is_finite()) {
        return Err(Error::DegenerateConic {
            reason: "non-finite semi-axes",
        });
    }
    // ‖center + diag(ax) u‖² over the unit circle.
    let lambda = [ax.x * ax.x, ax.y * ax.y];
    let h = [ep.center.x * ax.x, ep.center.y * ax.y];
    let u = maximize_on_sphere(&lambda, &h, 1.0);
    Ok(ep.center + Vector2::new(ax.x * u[0], ax.y * u[1]))
}
