//! Upper border of a union of parallelograms.
//!
//! Works in the rotated coordinates `s = p11 − p00`, `t = p11 + p00 − 1`, in
//! which `(0,1)` and `(1,0)` become `(−1,0)` and `(1,0)` and the
//! parallelogram spanned by a point `(σ, τ)` is bounded above by the tent
//! through `(−1,0)`, `(σ,|τ|)` and `(1,0)` (after replacing the point by its
//! central reflection when `τ < 0`).

use crate::bloch::TransitionPoint;

pub(crate) fn to_st(p: &TransitionPoint) -> (f64, f64) {
    (p.p11 - p.p00, p.p11 + p.p00 - 1.0)
}

pub(crate) fn from_st(s: f64, t: f64) -> TransitionPoint {
    TransitionPoint::new(0.5 * (1.0 + t + s), 0.5 * (1.0 + t - s))
}

/// Apex of the tent spanned by a point, with nonnegative height.
pub(crate) fn apex(p: &TransitionPoint) -> (f64, f64) {
    let (s, t) = to_st(p);
    if t < 0.0 {
        (-s, -t)
    } else {
        (s, t)
    }
}

/// Height of a single tent at `s`, zero outside `[−1, 1]`.
pub(crate) fn tent(apex: (f64, f64), s: f64) -> f64 {
    let (sigma, tau) = apex;
    if !(-1.0..=1.0).contains(&s) || tau <= 0.0 {
        return 0.0;
    }
    if s <= sigma {
        if sigma <= -1.0 {
            tau
        } else {
            tau * (1.0 + s) / (1.0 + sigma)
        }
    } else if sigma >= 1.0 {
        tau
    } else {
        tau * (1.0 - s) / (1.0 - sigma)
    }
}

/// Upper envelope of the tents of all points, as an exact polyline in
/// `(s, t)` running from `(−1, 0)` to `(1, 0)`.
pub(crate) fn envelope(points: &[TransitionPoint]) -> Vec<(f64, f64)> {
    let mut apexes: Vec<(f64, f64)> = points
        .iter()
        .map(apex)
        .filter(|&(s, t)| t > 0.0 && s > -1.0 && s < 1.0)
        .collect();
    apexes.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Slopes of the left flanks (through (−1,0)) and right flanks (through (1,0)).
    let n = apexes.len();
    let mut left_from = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        let (s, t) = apexes[i];
        left_from[i] = left_from[i + 1].max(t / (1.0 + s));
    }
    let mut right_upto = vec![0.0f64; n + 1];
    for i in 0..n {
        let (s, t) = apexes[i];
        right_upto[i + 1] = right_upto[i].max(t / (1.0 - s));
    }

    let mut knots: Vec<f64> = Vec::with_capacity(n + 2);
    knots.push(-1.0);
    knots.extend(apexes.iter().map(|a| a.0));
    knots.push(1.0);

    let mut poly = vec![(-1.0, 0.0)];
    for i in 0..=n {
        // On (knots[i], knots[i+1]) the envelope is max(α(1+s), β(1−s)).
        let (lo, hi) = (knots[i], knots[i + 1]);
        let alpha = left_from[i];
        let beta = right_upto[i];
        let height = |s: f64| (alpha * (1.0 + s)).max(beta * (1.0 - s));
        if hi > lo && alpha + beta > 0.0 {
            let cross = (beta - alpha) / (alpha + beta);
            if cross > lo && cross < hi {
                poly.push((cross, height(cross)));
            }
        }
        if i < n {
            push_distinct(&mut poly, (hi, height(hi)));
        }
    }
    push_distinct(&mut poly, (1.0, 0.0));
    poly
}

fn push_distinct(poly: &mut Vec<(f64, f64)>, p: (f64, f64)) {
    if let Some(last) = poly.last_mut() {
        if last.0 == p.0 {
            // Several apexes at the same s: keep the highest.
            last.1 = last.1.max(p.1);
            return;
        }
    }
    poly.push(p);
}

/// Envelope height at `s` by linear interpolation on the polyline.
pub(crate) fn height_at(poly: &[(f64, f64)], s: f64) -> f64 {
    if !(-1.0..=1.0).contains(&s) {
        return f64::NEG_INFINITY;
    }
    let idx = poly.partition_point(|p| p.0 < s);
    if idx == 0 {
        return poly[0].1;
    }
    if idx >= poly.len() {
        return poly[poly.len() - 1].1;
    }
    let (s0, t0) = poly[idx - 1];
    let (s1, t1) = poly[idx];
    if s1 == s0 {
        return t0.max(t1);
    }
    t0 + (t1 - t0) * (s - s0) / (s1 - s0)
}

/// `∫ H(s) ds`. The union is `−H(−s) ≤ t ≤ H(s)` and the map to
/// `(p11, p00)` halves areas, so this is the region's area.
pub(crate) fn area(poly: &[(f64, f64)]) -> f64 {
    poly.windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_height(points: &[TransitionPoint], s: f64) -> f64 {
        points.iter().map(|p| tent(apex(p), s)).fold(0.0, f64::max)
    }

    #[test]
    fn coordinate_round_trip() {
        let p = TransitionPoint::new(0.9, 0.3);
        let (s, t) = to_st(&p);
        let q = from_st(s, t);
        assert_abs_diff_eq!(p.p11, q.p11, epsilon = 1e-15);
        assert_abs_diff_eq!(p.p00, q.p00, epsilon = 1e-15);
        assert_eq!(to_st(&TransitionPoint::new(0.0, 1.0)), (-1.0, 0.0));
        assert_eq!(to_st(&TransitionPoint::new(1.0, 0.0)), (1.0, 0.0));
    }

    #[test]
    fn unit_square_from_corner() {
        let poly = envelope(&[TransitionPoint::new(1.0, 1.0)]);
        assert_eq!(poly, vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        assert_abs_diff_eq!(area(&poly), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_set_gives_flat_border() {
        let poly = envelope(&[TransitionPoint::new(0.5, 0.5)]);
        assert_eq!(poly, vec![(-1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(area(&poly), 0.0);
    }

    #[test]
    fn envelope_matches_brute_force_maximum() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let n = rng.random_range(1..40);
            let points: Vec<TransitionPoint> = (0..n)
                .map(|_| {
                    TransitionPoint::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))
                })
                .collect();
            let poly = envelope(&points);
            assert_eq!(poly.first(), Some(&(-1.0, 0.0)));
            assert_eq!(poly.last(), Some(&(1.0, 0.0)));
            assert!(poly.windows(2).all(|w| w[0].0 < w[1].0));
            for i in 0..=2000 {
                let s = -1.0 + 2.0 * i as f64 / 2000.0;
                assert_abs_diff_eq!(
                    height_at(&poly, s),
                    brute_height(&points, s),
                    epsilon = 1e-12
                );
            }
            let m = 200_000;
            let riemann: f64 = (0..m)
                .map(|i| brute_height(&points, -1.0 + 2.0 * (i as f64 + 0.5) / m as f64))
                .sum::<f64>()
                * 2.0
                / m as f64;
            assert_abs_diff_eq!(area(&poly), riemann, epsilon = 1e-6);
        }
    }
}
