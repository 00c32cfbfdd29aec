//! Partial orders on binary classical channels: product ordering of the
//! transition points, stochastic degradedness and capability.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::bloch::TransitionPoint;
use crate::capacity::mutual_information;
use crate::error::{Error, Result};

/// Default tolerance on witness entries and column sums.
pub const DEFAULT_DEGRADE_TOL: f64 = 1e-9;

/// Default number of priors in the capability check.
pub const DEFAULT_CAPABILITY_GRID: usize = 1001;

/// Slack on mutual-information comparisons in the capability check.
pub const CAPABILITY_SLACK: f64 = 1e-9;

const STOCHASTIC_TOL: f64 = 1e-12;
const SINGULAR_DET: f64 = 1e-12;

/// Column-stochastic matrix `m[(y, x)] = P(y | x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[[f64; 2]; 2]")]
pub struct TransitionMatrix(Matrix2<f64>);

impl From<TransitionMatrix> for [[f64; 2]; 2] {
    fn from(t: TransitionMatrix) -> Self {
        let m = t.0;
        [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
    }
}

impl TransitionMatrix {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        if m.iter()
            .any(|&p| !(-STOCHASTIC_TOL..=1.0 + STOCHASTIC_TOL).contains(&p))
        {
            return Err(Error::InvalidArgument(format!(
                "transition matrix entries must lie in [0, 1]: {m}"
            )));
        }
        for col in m.column_iter() {
            if (col.sum() - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidArgument(format!(
                    "transition matrix columns must sum to 1: {m}"
                )));
            }
        }
        Ok(TransitionMatrix(m))
    }

    pub fn identity() -> Self {
        TransitionMatrix(Matrix2::identity())
    }

    pub fn from_point(p: &TransitionPoint) -> Self {
        TransitionMatrix(Matrix2::new(p.p00, 1.0 - p.p11, 1.0 - p.p00, p.p11))
    }

    pub fn point(&self) -> TransitionPoint {
        TransitionPoint::new(self.0[(1, 1)], self.0[(0, 0)])
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }
}

/// `c` dominates `c′` in the product ordering: `p11′ ≤ p11` and `p00′ ≤ p00`.
pub fn dominates(c: &TransitionPoint, c_prime: &TransitionPoint) -> bool {
    c_prime.p11 <= c.p11 && c_prime.p00 <= c.p00
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Degradation {
    pub degraded: bool,
    /// `T″` with `T′ = T″ T`, when one exists.
    pub witness: Option<TransitionMatrix>,
}

/// Whether `c′` is a cascade of `c` with a further binary channel.
pub fn stochastically_degraded(
    c_prime: &TransitionMatrix,
    c: &TransitionMatrix,
    tol: f64,
) -> Degradation {
    let t = c.0;
    let tp = c_prime.0;
    match t
        .try_inverse()
        .filter(|_| t.determinant().abs() > SINGULAR_DET)
    {
        Some(inv) => {
            let w = tp * inv;
            let stochastic = w.iter().all(|&p| p >= -tol && p <= 1.0 + tol)
                && w.column_iter().all(|col| (col.sum() - 1.0).abs() <= tol);
            Degradation {
                degraded: stochastic,
                witness: stochastic.then_some(TransitionMatrix(w)),
            }
        }
        None => {
            // Singular T has equal columns, and so does every cascade.
            let col = tp.column(0);
            let equal = (tp.column(1) - col).amax() <= tol;
            Degradation {
                degraded: equal,
                witness: equal.then(|| TransitionMatrix(Matrix2::from_columns(&[col, col]))),
            }
        }
    }
}

/// Whether `I(X;Y′) ≤ I(X;Y)` on a uniform grid of `grid_n` priors, with
/// slack [`CAPABILITY_SLACK`].
pub fn less_capable(c_prime: &TransitionPoint, c: &TransitionPoint, grid_n: usize) -> Result<bool> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!(
            "capability grid needs at least 2 points, got {grid_n}"
        )));
    }
    for j in 0..grid_n {
        let p1 = j as f64 / (grid_n - 1) as f64;
        if mutual_information(c_prime, p1)? > mutual_information(c, p1)? + CAPABILITY_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All three relations of `c′` with respect to `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderReport {
    pub dominated: bool,
    pub degraded: bool,
    pub witness: Option<TransitionMatrix>,
    pub less_capable: bool,
}

pub fn compare(c_prime: &TransitionPoint, c: &TransitionPoint) -> Result<OrderReport> {
    c_prime.validate()?;
    c.validate()?;
    let deg = stochastically_degraded(
        &TransitionMatrix::from_point(c_prime),
        &TransitionMatrix::from_point(c),
        DEFAULT_DEGRADE_TOL,
    );
    Ok(OrderReport {
        dominated: dominates(c, c_prime),
        degraded: deg.degraded,
        witness: deg.witness,
        less_capable: less_capable(c_prime, c, DEFAULT_CAPABILITY_GRID)?,
    })
}
