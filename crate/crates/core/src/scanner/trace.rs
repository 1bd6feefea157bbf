//! Trajectory tracing: straight arcs of phase theta satisfy
//! dz/ds = e^{i pi theta} / sqrt(P(z)) in the flat arc-length
//! parametrization, with the square-root branch continued along the way.

use super::{PolynomialDifferential, ScanError, ScannerConfig};
use num::complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// Came within hit tolerance of the indexed zero.
    HitZero { index: usize, distance: f64 },
    /// Left the escape radius; committed to a distinguished direction.
    Escaped { direction: usize },
    /// Returned to its start point (closed trajectory probe).
    Closed { flat_length: f64 },
    StepLimit,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub phase: f64,
    pub points: Vec<Complex64>,
    pub termination: Termination,
    pub flat_length: f64,
}

impl Trajectory {
    pub fn closest_approach(&self, target: Complex64) -> f64 {
        self.closest_approach_indexed(target).0
    }

    pub fn closest_approach_indexed(&self, target: Complex64) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0usize);
        for (i, &p) in self.points.iter().enumerate() {
            let d = (p - target).norm();
            if d < best.0 {
                best = (d, i);
            }
        }
        best
    }
}

/// The three directions in which trajectories of phase theta leave a simple
/// zero: arg(P'(z0)) + 3 arg(d) = 2 pi theta (mod 2 pi).
pub fn separatrix_directions(
    diff: &PolynomialDifferential,
    zero: usize,
    theta: f64,
) -> [Complex64; 3] {
    let z0 = diff.roots()[zero];
    let dp = diff.poly().eval_derivative(z0);
    let base = (2.0 * std::f64::consts::PI * theta - dp.arg()) / 3.0;
    let third = 2.0 * std::f64::consts::PI / 3.0;
    [
        Complex64::from_polar(1.0, base),
        Complex64::from_polar(1.0, base + third),
        Complex64::from_polar(1.0, base + 2.0 * third),
    ]
}

/// The k+2 asymptotic directions at infinity for phase theta:
/// ((k+2)/2) arg(z) + arg(sqrt(c)) = pi theta (mod pi).
pub fn escape_directions(diff: &PolynomialDifferential, theta: f64) -> Vec<f64> {
    let k = diff.degree() as f64;
    let arg_sqrt_c = diff.poly().leading().arg() / 2.0;
    let m = k + 2.0;
    (0..diff.boundary_marked())
        .map(|l| {
            let a = (2.0 / m) * (std::f64::consts::PI * theta - arg_sqrt_c
                + std::f64::consts::PI * l as f64);
            a.rem_euclid(2.0 * std::f64::consts::PI)
        })
        .collect()
}

fn classify_escape(diff: &PolynomialDifferential, theta: f64, z: Complex64) -> usize {
    let angle = z.arg().rem_euclid(2.0 * std::f64::consts::PI);
    let dirs = escape_directions(diff, theta);
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (l, &a) in dirs.iter().enumerate() {
        let mut d = (angle - a).rem_euclid(2.0 * std::f64::consts::PI);
        if d > std::f64::consts::PI {
            d = 2.0 * std::f64::consts::PI - d;
        }
        if d < best_d {
            best_d = d;
            best = l;
        }
    }
    best
}

/// Decimating point store: keeps a bounded polyline witness.
struct PointBuffer {
    points: Vec<Complex64>,
    stride: usize,
    counter: usize,
}

impl PointBuffer {
    fn new() -> Self {
        PointBuffer { points: Vec::new(), stride: 1, counter: 0 }
    }

    fn push(&mut self, z: Complex64) {
        if self.counter % self.stride == 0 {
            self.points.push(z);
        }
        self.counter += 1;
        if self.points.len() > 4096 {
            let kept: Vec<Complex64> =
                self.points.iter().step_by(2).copied().collect();
            self.points = kept;
            self.stride *= 2;
        }
    }
}

pub struct TraceRequest {
    pub start: Complex64,
    pub theta: f64,
    /// Reference value selecting the initial square-root branch; the two
    /// choices traverse the same arc in opposite directions.
    pub initial_branch: Complex64,
    /// Detect a return to the start (closed-trajectory probe).
    pub watch_return: bool,
}

/// Branch selection relative to a running reference.
fn tracked_sqrt(p: Complex64, reference: Complex64) -> Complex64 {
    let w = p.sqrt();
    if (w - reference).norm() <= (w + reference).norm() {
        w
    } else {
        -w
    }
}

/// Integrate the trajectory through `req.start`. Steps are fourth-order
/// Runge-Kutta in the flat arc length, capped so each step moves a fraction
/// of the distance to the nearest zero.
pub fn trace(
    diff: &PolynomialDifferential,
    req: &TraceRequest,
    config: &ScannerConfig,
) -> Result<Trajectory, ScanError> {
    let direction = Complex64::from_polar(1.0, std::f64::consts::PI * req.theta);
    let escape_radius = diff.escape_radius(config);
    let far_radius = 3.0 * escape_radius;
    let scale = diff.scale();
    let mut z = req.start;
    let mut reference = req.initial_branch;
    let mut s = 0.0f64;
    let mut buffer = PointBuffer::new();
    buffer.push(z);
    let start = req.start;
    let mut moved_away = false;

    for _ in 0..config.max_steps {
        let (d_min, nearest) = nearest_zero(diff, z);
        if d_min < config.hit_tol {
            buffer.push(z);
            return Ok(Trajectory {
                phase: req.theta,
                points: buffer.points,
                termination: Termination::HitZero { index: nearest, distance: d_min },
                flat_length: s,
            });
        }
        if z.norm() > far_radius {
            buffer.push(z);
            return Ok(Trajectory {
                phase: req.theta,
                points: buffer.points,
                termination: Termination::Escaped {
                    direction: classify_escape(diff, req.theta, z),
                },
                flat_length: s,
            });
        }
        if req.watch_return {
            let sep = (z - start).norm();
            if moved_away && sep < config.hit_tol {
                return Ok(Trajectory {
                    phase: req.theta,
                    points: buffer.points,
                    termination: Termination::Closed { flat_length: s },
                    flat_length: s,
                });
            }
            if sep > 20.0 * config.hit_tol {
                moved_away = true;
            }
        }
        // step size: |dz| a fraction of the clearance, growing far out
        let dz_cap = (0.25 * d_min).min(0.05 * scale).max(1e-12 * scale).max(
            if z.norm() > escape_radius { 0.1 * z.norm() } else { 0.0 },
        );
        let w_here = tracked_sqrt(diff.poly().eval(z), reference);
        if w_here.norm() == 0.0 {
            return Err(ScanError::BranchJump);
        }
        let ds = dz_cap * w_here.norm();
        // RK4 stages share the running branch reference
        let f = |zz: Complex64, rf: Complex64| -> (Complex64, Complex64) {
            let w = tracked_sqrt(diff.poly().eval(zz), rf);
            (direction / w, w)
        };
        let (k1, w1) = f(z, reference);
        let (k2, w2) = f(z + k1 * (ds / 2.0), w1);
        let (k3, w3) = f(z + k2 * (ds / 2.0), w2);
        let (k4, w4) = f(z + k3 * ds, w3);
        z += (k1 + (k2 + k3) * 2.0 + k4) * (ds / 6.0);
        reference = w4;
        s += ds;
        buffer.push(z);
    }
    Ok(Trajectory {
        phase: req.theta,
        points: buffer.points,
        termination: Termination::StepLimit,
        flat_length: s,
    })
}

pub fn nearest_zero(diff: &PolynomialDifferential, z: Complex64) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut idx = 0;
    for (i, &r) in diff.roots().iter().enumerate() {
        let d = (z - r).norm();
        if d < best {
            best = d;
            idx = i;
        }
    }
    (best, idx)
}

/// Trace a separatrix of the given zero: start a small offset along the
/// local direction, with the branch oriented outward.
pub fn trace_separatrix(
    diff: &PolynomialDifferential,
    zero: usize,
    dir: Complex64,
    theta: f64,
    config: &ScannerConfig,
) -> Result<Trajectory, ScanError> {
    let z0 = diff.roots()[zero];
    let start = z0 + dir * (config.start_offset * diff.scale());
    // outward motion: velocity e^{i pi theta}/w parallel to dir
    let target_w = Complex64::from_polar(1.0, std::f64::consts::PI * theta) * dir.conj();
    let w = diff.poly().eval(start).sqrt();
    let initial = if (w - target_w * w.norm()).norm() <= (w + target_w * w.norm()).norm() {
        w
    } else {
        -w
    };
    trace(
        diff,
        &TraceRequest { start, theta, initial_branch: initial, watch_return: false },
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_diff() -> (PolynomialDifferential, ScannerConfig) {
        let config = ScannerConfig::default();
        let p = super::super::Poly::from_real_descending(&[1.0, 0.0, -1.0]).unwrap();
        (PolynomialDifferential::new(p, &config).unwrap(), config)
    }

    #[test]
    fn separatrix_directions_are_symmetric() {
        let (diff, _) = square_diff();
        let dirs = separatrix_directions(&diff, 1, 0.0);
        for i in 0..3 {
            let angle = (dirs[(i + 1) % 3] / dirs[i]).arg().abs();
            assert!((angle - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        }
        // rotating theta by 1 maps the direction set into itself together
        // with its negatives
        let rotated = separatrix_directions(&diff, 1, 1.0);
        for d in rotated {
            let matched = dirs
                .iter()
                .any(|&e| (d - e).norm() < 1e-9 || (d + e).norm() < 1e-9);
            assert!(matched, "direction {d} unmatched");
        }
    }

    #[test]
    fn saddle_separatrix_hits_other_zero() {
        // P = z^2 - 1: sqrt(P) dz is purely imaginary on [-1, 1], so the
        // segment is the phase-1/2 saddle connection
        let (diff, config) = square_diff();
        let theta = 0.5;
        let dirs = separatrix_directions(&diff, 1, theta);
        // pick the direction pointing at -1 (negative real axis)
        let toward = dirs
            .iter()
            .find(|d| (d.arg().abs() - std::f64::consts::PI).abs() < 1e-6)
            .copied()
            .expect("one separatrix points along the real axis");
        let traj = trace_separatrix(&diff, 1, toward, theta, &config).unwrap();
        match traj.termination {
            Termination::HitZero { index, .. } => assert_eq!(index, 0),
            other => panic!("expected zero hit, got {other:?}"),
        }
    }

    #[test]
    fn off_saddle_start_escapes() {
        let (diff, config) = square_diff();
        let req = TraceRequest {
            start: Complex64::new(2.0, 0.0),
            theta: 0.0,
            initial_branch: diff.poly().eval(Complex64::new(2.0, 0.0)).sqrt(),
            watch_return: false,
        };
        let traj = trace(&diff, &req, &config).unwrap();
        assert!(matches!(traj.termination, Termination::Escaped { .. }));
    }

    #[test]
    fn reversed_branch_traverses_oppositely() {
        let (diff, config) = square_diff();
        let start = Complex64::new(0.3, 0.4);
        let w = diff.poly().eval(start).sqrt();
        let fwd = trace(
            &diff,
            &TraceRequest { start, theta: 0.25, initial_branch: w, watch_return: false },
            &config,
        )
        .unwrap();
        let bwd = trace(
            &diff,
            &TraceRequest { start, theta: 0.25, initial_branch: -w, watch_return: false },
            &config,
        )
        .unwrap();
        // both escape, along different directions (generic start)
        let (df, db) = match (&fwd.termination, &bwd.termination) {
            (Termination::Escaped { direction: a }, Termination::Escaped { direction: b }) => {
                (*a, *b)
            }
            other => panic!("expected double escape, got {other:?}"),
        };
        assert_ne!(df, db);
    }

    #[test]
    fn escape_direction_count() {
        let (diff, _) = square_diff();
        assert_eq!(escape_directions(&diff, 0.3).len(), 4);
    }
}
