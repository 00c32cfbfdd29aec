//! The region of binary channels reachable with antipodal pure inputs and a
//! projective measurement.
//!
//! For each `k = π̂·b` the edge problem picks the measurement axis that
//! maximizes `‖Tᵀπ̂‖`; the resulting transition points, together with their
//! mirror images across `p11 = p00`, form the generating set `G_R`. The
//! region is the union of the parallelograms with vertices `(0,1)`, `p̄`,
//! `(1,0)`, `(1,1) − p̄` over `p̄ ∈ G_R`.

mod border;
pub mod ellipse;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::{TransitionPoint, UnitAxis};
use crate::channel::{AffineChannel, DiagonalFrame};
use crate::error::{Error, Result};
use crate::linalg::orthogonal_unit;

pub use ellipse::{
    ellipse_reduction, ellipse_reduction_relabeled, farthest_on_ellipse, Conic, EllipseProblem,
};

/// Default number of `k` samples.
pub const DEFAULT_SAMPLES: usize = 256;

/// Boundary tolerance for membership and border tests.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Mapped-back axes must satisfy both constraints to this accuracy.
pub const ROUND_TRIP_TOL: f64 = 1e-8;

const FEASIBILITY_SLACK: f64 = 1e-12;
const RESTARTS: usize = 16;

/// One solution of the edge problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSample {
    pub k: f64,
    pub axis: UnitAxis,
    pub point: TransitionPoint,
    /// `‖Tᵀπ̂‖`
    pub objective: f64,
}

impl RegionSample {
    fn from_frame_axis(frame: &DiagonalFrame, k: f64, pi: &Vector3<f64>) -> Self {
        let objective = frame.radii().component_mul(pi).norm();
        let axis = UnitAxis::normalize(frame.u * pi).expect("unit axis in frame coordinates");
        RegionSample {
            k,
            axis,
            point: point_from_objective(objective, k),
            objective,
        }
    }

    /// Solution for `−k`: negate the axis, which swaps the probabilities.
    pub fn mirrored(&self) -> Self {
        RegionSample {
            k: -self.k,
            axis: -self.axis,
            point: self.point.swapped(),
            objective: self.objective,
        }
    }
}

/// `p11 = (1 + ‖Tᵀπ̂‖ + k)/2`, `p00 = (1 + ‖Tᵀπ̂‖ − k)/2`.
pub fn point_from_objective(objective: f64, k: f64) -> TransitionPoint {
    TransitionPoint::new(
        (0.5 * (1.0 + objective + k)).clamp(0.0, 1.0),
        (0.5 * (1.0 + objective - k)).clamp(0.0, 1.0),
    )
}

enum Trivial {
    Solved(Vector3<f64>),
    Circle { n: Vector3<f64>, rho: f64, kn: f64 },
}

/// Handles infeasibility, the unital case and the single-point constraint.
fn classify(frame: &DiagonalFrame, k: f64) -> Result<Trivial> {
    let xi = frame.xi;
    let xi_norm = xi.norm();
    if !k.is_finite() || k.abs() > xi_norm + FEASIBILITY_SLACK {
        return Err(Error::InfeasibleConstraint { k, max: xi_norm });
    }
    if xi_norm < FEASIBILITY_SLACK {
        return Ok(Trivial::Solved(Vector3::x()));
    }
    let n = xi / xi_norm;
    let kn = (k / xi_norm).clamp(-1.0, 1.0);
    let rho = (1.0 - kn * kn).max(0.0).sqrt();
    if rho < FEASIBILITY_SLACK {
        return Ok(Trivial::Solved(n * kn.signum()));
    }
    Ok(Trivial::Circle { n, rho, kn })
}

/// Edge problem through the ellipse reduction.
///
/// Fails with [`Error::ReductionFallback`] when the substitutions are
/// ill-conditioned even after relabeling axes, or when the mapped-back axis
/// misses either constraint by more than [`ROUND_TRIP_TOL`].
pub fn edge_problem_ellipse(frame: &DiagonalFrame, k: f64) -> Result<RegionSample> {
    let pi = match classify(frame, k)? {
        Trivial::Solved(pi) => pi,
        Trivial::Circle { .. } => {
            let ep = ellipse_reduction_relabeled(&frame.radii(), &frame.xi, k)?;
            let p5 = farthest_on_ellipse(&ep)?;
            let pi = ep.frame_axis(&p5);
            if (pi.norm() - 1.0).abs() > ROUND_TRIP_TOL
                || (pi.dot(&frame.xi) - k).abs() > ROUND_TRIP_TOL
            {
                return Err(Error::ReductionFallback {
                    reason: "round trip off the constraint set",
                });
            }
            pi.normalize()
        }
    };
    Ok(RegionSample::from_frame_axis(frame, k, &pi))
}

/// Edge problem by Newton ascent along the feasible circle from
/// evenly spaced starting angles.
pub fn edge_problem_direct(frame: &DiagonalFrame, k: f64) -> Result<RegionSample> {
    let pi = match classify(frame, k)? {
        Trivial::Solved(pi) => pi,
        Trivial::Circle { n, rho, kn } => {
            let e1 = orthogonal_unit(&n);
            let e2 = n.cross(&e1);
            let theta = maximize_on_circle(&frame.radii(), &(n * kn), &(e1 * rho), &(e2 * rho));
            n * kn + (e1 * theta.cos() + e2 * theta.sin()) * rho
        }
    };
    Ok(RegionSample::from_frame_axis(frame, k, &pi))
}

/// Solves the edge problem: maximize `‖S π̂‖` subject to `‖π̂‖ = 1` and
/// `π̂·ξ = k`, using the ellipse reduction when it is well conditioned.
pub fn edge_problem(frame: &DiagonalFrame, k: f64) -> Result<RegionSample> {
    match edge_problem_ellipse(frame, k) {
        Err(Error::ReductionFallback { .. }) | Err(Error::DegenerateConic { .. }) => {
            edge_problem_direct(frame, k)
        }
        other => other,
    }
}

/// Maximizes `Σ sᵢ² (pᵢ + aᵢ cos θ + bᵢ sin θ)²` over `θ`.
fn maximize_on_circle(
    radii: &Vector3<f64>,
    p: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
) -> f64 {
    let w = radii.component_mul(radii);
    let wd = |x: &Vector3<f64>, y: &Vector3<f64>| w.component_mul(x).dot(y);
    // f = c0 + c1 cos θ + d1 sin θ + c2 cos 2θ + d2 sin 2θ
    let c0 = wd(p, p) + 0.5 * (wd(a, a) + wd(b, b));
    let c1 = 2.0 * wd(p, a);
    let d1 = 2.0 * wd(p, b);
    let c2 = 0.5 * (wd(a, a) - wd(b, b));
    let d2 = wd(a, b);
    let f = |t: f64| c0 + c1 * t.cos() + d1 * t.sin() + c2 * (2.0 * t).cos() + d2 * (2.0 * t).sin();
    let df = |t: f64| {
        -c1 * t.sin() + d1 * t.cos() - 2.0 * c2 * (2.0 * t).sin() + 2.0 * d2 * (2.0 * t).cos()
    };
    let d2f = |t: f64| {
        -c1 * t.cos() - d1 * t.sin() - 4.0 * c2 * (2.0 * t).cos() - 4.0 * d2 * (2.0 * t).sin()
    };
    let max_step = std::f64::consts::PI / RESTARTS as f64;

    let mut best = (f(0.0), 0.0);
    for j in 0..RESTARTS {
        let mut t = std::f64::consts::TAU * j as f64 / RESTARTS as f64;
        let mut ft = f(t);
        for _ in 0..100 {
            let g = df(t);
            let h = d2f(t);
            let mut step = if h < 0.0 {
                -g / h
            } else {
                g.signum() * max_step
            };
            step = step.clamp(-max_step, max_step);
            let mut accepted = false;
            for _ in 0..40 {
                let cand = t + step;
                let fc = f(cand);
                if fc >= ft {
                    t = cand;
                    ft = fc;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted || step.abs() < 1e-15 {
                break;
            }
        }
        if ft > best.0 {
            best = (ft, t);
        }
    }
    best.1
}

/// Chebyshev–Lobatto nodes on `[0, max]`, or the single node `0` when
/// `max = 0`.
pub fn k_nodes(max: f64, n: usize) -> Vec<f64> {
    if max <= 0.0 || n < 2 {
        return vec![0.0];
    }
    (0..n)
        .map(|j| {
            let c = (std::f64::consts::PI * j as f64 / (n - 1) as f64).cos();
            (0.5 * max * (1.0 - c)).clamp(0.0, max)
        })
        .collect()
}

/// The achievable region of a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// `G_R`, ordered by `k`.
    pub samples: Vec<RegionSample>,
    /// Border polyline from `(0,1)` to `(1,0)`.
    pub border: Vec<TransitionPoint>,
    /// Samples on the border with `p11 + p00 ≥ 1`.
    pub maximal: Vec<RegionSample>,
    envelope: Vec<(f64, f64)>,
}

impl Region {
    fn from_samples(samples: Vec<RegionSample>) -> Self {
        let points: Vec<TransitionPoint> = samples.iter().map(|s| s.point).collect();
        let envelope = border::envelope(&points);
        let border_points = envelope
            .iter()
            .map(|&(s, t)| border::from_st(s, t))
            .collect();
        let maximal = samples
            .iter()
            .filter(|smp| {
                let (s, t) = border::to_st(&smp.point);
                t >= -BOUNDARY_TOL && t >= border::height_at(&envelope, s) - BOUNDARY_TOL
            })
            .copied()
            .collect();
        Region {
            samples,
            border: border_points,
            maximal,
            envelope,
        }
    }

    /// Area of the region in the `(p11, p00)` square.
    pub fn area(&self) -> f64 {
        border::area(&self.envelope)
    }

    /// Largest `p11 + p00 − 1` over the region at a given `p11 − p00`.
    pub fn border_height(&self, s: f64) -> f64 {
        border::height_at(&self.envelope, s)
    }

    /// Membership in the union of parallelograms, with boundary tolerance
    /// [`BOUNDARY_TOL`].
    pub fn contains(&self, p: &TransitionPoint) -> bool {
        let (s, t) = border::to_st(p);
        if s.abs() > 1.0 + BOUNDARY_TOL {
            return false;
        }
        let sc = s.clamp(-1.0, 1.0);
        self.samples.iter().any(|smp| {
            let apex = border::apex(&smp.point);
            let upper = border::tent(apex, sc);
            let lower = -border::tent(apex, -sc);
            t <= upper + BOUNDARY_TOL && t >= lower - BOUNDARY_TOL
        })
    }
}

pub fn region_contains(region: &Region, p: &TransitionPoint) -> bool {
    region.contains(p)
}

/// Builds the region of a completely positive channel from `n_samples`
/// values of `k`.
pub fn generate_region(ch: &AffineChannel, n_samples: usize) -> Result<Region> {
    ch.ensure_cptp()?;
    generate_region_frame(&ch.diagonalize(), n_samples)
}

/// As [`generate_region`] without the complete-positivity check.
pub fn generate_region_frame(frame: &DiagonalFrame, n_samples: usize) -> Result<Region> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "n_samples must be at least 2, got {n_samples}"
        )));
    }
    let nodes = k_nodes(frame.xi.norm(), n_samples);
    let positive: Vec<RegionSample> = nodes
        .par_iter()
        .map(|&k| edge_problem(frame, k))
        .collect::<Result<_>>()?;
    let mut samples: Vec<RegionSample> = positive
        .iter()
        .rev()
        .filter(|s| s.k > 0.0)
        .map(RegionSample::mirrored)
        .collect();
    samples.extend(positive);
    Ok(Region::from_samples(samples))
}
