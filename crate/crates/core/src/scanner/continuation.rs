//! Identification of charge lattices along parameter paths: basis periods
//! are continued step by step through coefficient space, tracking zeros by
//! proximity and square-root signs by continuity. The continued frame
//! expresses saddle data measured at the endpoint in the starting basis.

use super::quad::{point_segment_distance, sqrt_integral_along};
use super::saddles::PeriodFrame;
use super::{Poly, PolynomialDifferential, ScanError, ScannerConfig};
use num::complex::Complex64;

/// Match each previous root to its nearest successor, requiring the
/// matching to be injective.
fn match_roots(prev: &[Complex64], next: &[Complex64]) -> Result<Vec<usize>, ScanError> {
    let mut assignment = Vec::with_capacity(prev.len());
    for &p in prev {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (j, &q) in next.iter().enumerate() {
            let d = (p - q).norm();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        assignment.push(best);
    }
    let mut seen = vec![false; next.len()];
    for &a in &assignment {
        if seen[a] {
            return Err(ScanError::RootsTooClose { distance: 0.0 });
        }
        seen[a] = true;
    }
    Ok(assignment)
}

/// Period between two roots along a straight segment, detouring around any
/// third root that comes too close.
fn period_between(
    poly: &Poly,
    roots: &[Complex64],
    a: usize,
    b: usize,
    config: &ScannerConfig,
) -> Result<Complex64, ScanError> {
    let scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let clearance_needed = config.path_tol * scale;
    let blocked = |p: Complex64, q: Complex64| -> Option<usize> {
        roots
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != a && i != b)
            .find(|&(_, &r)| point_segment_distance(r, p, q) < clearance_needed)
            .map(|(i, _)| i)
    };
    let (ra, rb) = (roots[a], roots[b]);
    let path: Vec<Complex64> = if blocked(ra, rb).is_none() {
        vec![ra, rb]
    } else {
        // offset the midpoint perpendicular to the segment, picking the side
        // with more room
        let mid = 0.5 * (ra + rb);
        let dir = (rb - ra) / (rb - ra).norm();
        let normal = Complex64::new(-dir.im, dir.re);
        let offset = 4.0 * clearance_needed;
        let candidates = [mid + normal * offset, mid - normal * offset];
        let choice = candidates
            .into_iter()
            .find(|&m| blocked(ra, m).is_none() && blocked(m, rb).is_none());
        match choice {
            Some(m) => vec![ra, m, rb],
            None => {
                return Err(ScanError::PathTooClose {
                    zero: blocked(ra, rb).unwrap_or(0),
                    clearance: clearance_needed,
                })
            }
        }
    };
    Ok(sqrt_integral_along(poly, &path, config.quad_tol)? * 2.0)
}

/// Continue a frame from one polynomial to another along the straight
/// coefficient path with the given number of steps. The returned periods
/// are continuous continuations of the starting ones (not re-normalized).
pub fn continue_frame(
    from: &PolynomialDifferential,
    frame: &PeriodFrame,
    to: &Poly,
    steps: usize,
    config: &ScannerConfig,
) -> Result<PeriodFrame, ScanError> {
    let steps = steps.max(1);
    let mut roots_prev = from.roots().to_vec();
    let mut basis = frame.basis.clone();
    let mut periods = frame.periods.clone();
    for j in 1..=steps {
        let t = j as f64 / steps as f64;
        let poly_t = from.poly().lerp(to, t)?;
        let roots_t = poly_t.roots(config.root_tol)?;
        let assignment = match_roots(&roots_prev, &roots_t)?;
        basis = basis
            .iter()
            .map(|&(a, b)| (assignment[a], assignment[b]))
            .collect();
        for (idx, &(a, b)) in basis.iter().enumerate() {
            let raw = period_between(&poly_t, &roots_t, a, b, config)?;
            // sign continuity with the previous step
            let prev = periods[idx];
            periods[idx] = if (raw - prev).norm() <= (raw + prev).norm() { raw } else { -raw };
        }
        roots_prev = roots_t;
    }
    Ok(PeriodFrame { basis_records: frame.basis_records.clone(), basis, periods })
}
