//! Small fixed-size dense linear algebra.
//!
//! Everything in this crate works on 2×2, 3×3 or 4×4 (embedded as 8×8 real)
//! matrices, so cyclic Jacobi rotations are both accurate and fast enough.
//! The routines here are deterministic: the same input always yields the same
//! bits out, which the frame conventions rely on.

use nalgebra::{Matrix2, Matrix3, Matrix4, SMatrix, SVector, Vector2, Vector3};
use num_complex::Complex64;
use std::cmp::Ordering;

/// Off-diagonal Frobenius norm at which Jacobi iterations stop.
pub const JACOBI_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// columns.
pub fn symmetric_eigen<const N: usize>(
    a: &SMatrix<f64, N, N>,
) -> (SVector<f64, N>, SMatrix<f64, N, N>) {
    let mut a = (a + a.transpose()) * 0.5;
    let mut v = SMatrix::<f64, N, N>::identity();
    let scale = a.norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_symmetric(&mut a, p, q, c, s);
                for k in 0..N {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = SVector::<f64, N>::from_fn(|i, _| a[(order[i], order[i])]);
    let vectors = SMatrix::<f64, N, N>::from_fn(|r, c| v[(r, order[c])]);
    (values, vectors)
}

fn off_diagonal_norm<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

// A <- Jᵀ A J with J the Givens rotation in the (p, q) plane.
fn rotate_symmetric<const N: usize>(
    a: &mut SMatrix<f64, N, N>,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
) {
    for k in 0..N {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..N {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
}

/// Eigenvalues of a 4×4 Hermitian matrix, ascending.
///
/// The matrix `H = X + iY` is embedded as the real symmetric 8×8 matrix
/// `[[X, -Y], [Y, X]]`, whose spectrum is that of `H` with every eigenvalue
/// doubled in multiplicity.
pub fn hermitian_eigenvalues(h: &Matrix4<Complex64>) -> [f64; 4] {
    let embedded = SMatrix::<f64, 8, 8>::from_fn(|r, c| {
        let z = h[(r % 4, c % 4)];
        match (r / 4, c / 4) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let (values, _) = symmetric_eigen(&embedded);
    [values[0], values[2], values[4], values[6]]
}

/// Cholesky test for positive definiteness of a Hermitian 4×4 matrix.
///
/// Only the lower triangle is read. Fails as soon as a pivot is not strictly
/// positive.
pub fn is_positive_definite(h: &Matrix4<Complex64>) -> bool {
    let mut l = Matrix4::<Complex64>::zeros();
    for j in 0..4 {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..4 {
            let mut z = h[(i, j)];
            for k in 0..j {
                z -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = z / d;
        }
    }
    true
}

/// Eigen-decomposition of a symmetric 2×2 matrix.
///
/// Returns `(larger, smaller, v_larger, v_smaller)` with orthonormal
/// eigenvectors. The smaller eigenvalue is recovered from the determinant to
/// avoid cancellation.
pub fn symmetric_eigen2(m: &Matrix2<f64>) -> (f64, f64, Vector2<f64>, Vector2<f64>) {
    let (p, q, r) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
    let half_gap = (0.5 * (p - r)).hypot(q);
    let mean = 0.5 * (p + r);
    let hi = mean + half_gap;
    let lo = if hi.abs() > 0.0 && mean > 0.0 {
        (p * r - q * q) / hi
    } else {
        mean - half_gap
    };
    if q == 0.0 {
        return if p >= r {
            (p, r, Vector2::x(), Vector2::y())
        } else {
            (r, p, Vector2::y(), Vector2::x())
        };
    }
    // (A - hi I) v = 0 has the two row solutions; take the better-conditioned one.
    let v1 = Vector2::new(q, hi - p);
    let v2 = Vector2::new(hi - r, q);
    let vhi = if v1.norm() >= v2.norm() { v1 } else { v2 }.normalize();
    let vlo = Vector2::new(-vhi.y, vhi.x);
    (hi, lo, vhi, vlo)
}

/// Singular value decomposition `T = U diag(s) Vᵀ` of a 3×3 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd3 {
    pub u: Matrix3<f64>,
    pub s: Vector3<f64>,
    pub v: Matrix3<f64>,
}

/// Singular values at or below this are treated as zero when completing `U`.
const RANK_TOL: f64 = 1e-14;

/// One-sided (Hestenes) Jacobi SVD with a canonical output.
///
/// Conventions: singular values are sorted in descending order; each left
/// singular vector has its largest-magnitude entry positive (the matching
/// right vector is flipped with it); equal singular values are ordered by
/// lexicographically descending left vectors. `U` and `V` are orthogonal but
/// not necessarily proper rotations.
pub fn svd3(t: &Matrix3<f64>) -> Svd3 {
    let mut a = *t;
    let mut v = Matrix3::<f64>::identity();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..3 {
            for q in (p + 1)..3 {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..3 {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut s = Vector3::from_fn(|i, _| a.column(i).norm());
    let mut u_cols: [Option<Vector3<f64>>; 3] = [None, None, None];
    for i in 0..3 {
        if s[i] > RANK_TOL {
            u_cols[i] = Some(a.column(i) / s[i]);
        } else {
            s[i] = 0.0;
        }
    }
    let u = complete_basis(u_cols);

    let mut triples: Vec<(f64, Vector3<f64>, Vector3<f64>)> = (0..3)
        .map(|i| {
            let mut ui: Vector3<f64> = u.column(i).into();
            let mut vi: Vector3<f64> = v.column(i).into();
            if ui[largest_magnitude_index(&ui)] < 0.0 {
                ui = -ui;
                vi = -vi;
            }
            (s[i], ui, vi)
        })
        .collect();
    triples.sort_by(|x, y| match y.0.total_cmp(&x.0) {
        Ordering::Equal => lex_cmp(&y.1, &x.1),
        other => other,
    });

    Svd3 {
        u: Matrix3::from_columns(&[triples[0].1, triples[1].1, triples[2].1]),
        s: Vector3::new(triples[0].0, triples[1].0, triples[2].0),
        v: Matrix3::from_columns(&[triples[0].2, triples[1].2, triples[2].2]),
    }
}

/// Fills the missing columns of a partial orthonormal set in R³.
fn complete_basis(cols: [Option<Vector3<f64>>; 3]) -> Matrix3<f64> {
    let known: Vec<Vector3<f64>> = cols.iter().flatten().copied().collect();
    let mut extra: Vec<Vector3<f64>> = Vec::new();
    match known.len() {
        3 => {}
        2 => extra.push(known[0].cross(&known[1]).normalize()),
        1 => {
            let w = orthogonal_unit(&known[0]);
            extra.push(w);
            extra.push(known[0].cross(&w));
        }
        _ => extra.extend([Vector3::x(), Vector3::y(), Vector3::z()]),
    }
    let mut extra = extra.into_iter();
    let filled: Vec<Vector3<f64>> = cols
        .iter()
        .map(|c| c.unwrap_or_else(|| extra.next().expect("basis completion")))
        .collect();
    Matrix3::from_columns(&filled)
}

/// A unit vector orthogonal to `n`, built from the coordinate axis least
/// aligned with it.
pub fn orthogonal_unit(n: &Vector3<f64>) -> Vector3<f64> {
    let abs = n.abs();
    let axis = if abs.x <= abs.y && abs.x <= abs.z {
        Vector3::x()
    } else if abs.y <= abs.z {
        Vector3::y()
    } else {
        Vector3::z()
    };
    n.cross(&axis).normalize()
}

fn largest_magnitude_index(v: &Vector3<f64>) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if v[i].abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    best
}

fn lex_cmp(x: &Vector3<f64>, y: &Vector3<f64>) -> Ordering {
    for i in 0..3 {
        match x[i].total_cmp(&y[i]) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}
