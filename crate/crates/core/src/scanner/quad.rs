//! Period integrals: adaptive Gauss-Legendre quadrature of sqrt(P) along
//! polyline paths between zeros, with branch continuity and substitutions
//! that absorb the square-root vanishing at the endpoints.

use super::poly::Poly;
use super::ScanError;
use num::complex::Complex64;
use std::sync::OnceLock;

const GL_ORDER: usize = 24;

fn gl_nodes() -> &'static Vec<(f64, f64)> {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| legendre_nodes(GL_ORDER))
}

/// Nodes and weights of Gauss-Legendre quadrature on [-1, 1], by Newton
/// iteration on the Legendre polynomial.
fn legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_eval(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Branch-tracked square root of P along a path: choose the lift of
/// sqrt(P(z)) nearest to a running reference value.
pub struct BranchTracker<'a> {
    poly: &'a Poly,
    reference: Complex64,
    initialized: bool,
}

impl<'a> BranchTracker<'a> {
    pub fn new(poly: &'a Poly) -> Self {
        BranchTracker { poly, reference: Complex64::new(0.0, 0.0), initialized: false }
    }

    pub fn with_reference(poly: &'a Poly, reference: Complex64) -> Self {
        BranchTracker { poly, reference, initialized: true }
    }

    pub fn reference(&self) -> Complex64 {
        self.reference
    }

    /// Square root at z on the tracked branch. The first call fixes the
    /// branch to the principal square root.
    pub fn sqrt_at(&mut self, z: Complex64) -> Complex64 {
        let w = self.poly.eval(z).sqrt();
        if !self.initialized {
            self.initialized = true;
            self.reference = w;
            return w;
        }
        let keep = (w - self.reference).norm();
        let flip = (w + self.reference).norm();
        let chosen = if keep <= flip { w } else { -w };
        if chosen.norm() > 0.0 {
            self.reference = chosen;
        }
        chosen
    }
}

/// Composite quadrature of f over [0,1] with one shared branch tracker;
/// the tracker must be advanced in increasing parameter order, so the
/// adaptive refinement walks segments left to right.
fn integrate_unit_interval<F>(
    f: &F,
    tracker: &mut BranchTracker<'_>,
    tol: f64,
    max_depth: u32,
) -> Complex64
where
    F: Fn(f64, &mut BranchTracker<'_>) -> Complex64,
{
    fn gl_on<F>(f: &F, a: f64, b: f64, tracker: &mut BranchTracker<'_>) -> Complex64
    where
        F: Fn(f64, &mut BranchTracker<'_>) -> Complex64,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for &(x, w) in gl_nodes() {
            acc += f(mid + half * x, tracker) * w;
        }
        acc * half
    }

    fn recurse<F>(
        f: &F,
        a: f64,
        b: f64,
        tracker: &mut BranchTracker<'_>,
        tol: f64,
        depth: u32,
    ) -> Complex64
    where
        F: Fn(f64, &mut BranchTracker<'_>) -> Complex64,
    {
        // probe with a disposable tracker so the real one only advances once
        let mut probe = BranchTracker::with_reference(tracker.poly, tracker.reference());
        let whole = gl_on(f, a, b, &mut probe);
        let mut probe = BranchTracker::with_reference(tracker.poly, tracker.reference());
        let mid = 0.5 * (a + b);
        let left_probe = gl_on(f, a, mid, &mut probe);
        let right_probe = gl_on(f, mid, b, &mut probe);
        if depth == 0 || (whole - (left_probe + right_probe)).norm() < tol {
            let left = gl_on(f, a, mid, tracker);
            let right = gl_on(f, mid, b, tracker);
            return left + right;
        }
        let left = recurse(f, a, mid, tracker, 0.5 * tol, depth - 1);
        let right = recurse(f, mid, b, tracker, 0.5 * tol, depth - 1);
        left + right
    }

    recurse(f, 0.0, 1.0, tracker, tol, max_depth)
}

/// Integral of the tracked sqrt(P) along a polyline whose first and last
/// points are zeros of P. Endpoint segments use the substitution
/// z = zero + (next - zero) v^2, which makes the integrand vanish linearly
/// instead of like a square root. Returns the integral (one branch; the
/// caller owns orientation and the double-cover factor).
pub fn sqrt_integral_along(
    poly: &Poly,
    path: &[Complex64],
    tol: f64,
) -> Result<Complex64, ScanError> {
    if path.len() < 2 {
        return Err(ScanError::EmptyPath);
    }
    // both endpoints carry the vanishing-sqrt substitution, so they must
    // live on distinct segments
    let mut path = path.to_vec();
    if path.len() == 2 {
        let mid = 0.5 * (path[0] + path[1]);
        path.insert(1, mid);
    }
    let path = &path[..];
    let mut tracker = BranchTracker::new(poly);
    let mut total = Complex64::new(0.0, 0.0);
    let last = path.len() - 1;
    for s in 0..last {
        let (a, b) = (path[s], path[s + 1]);
        if s == 0 {
            // z = a + (b - a) v^2, dz = 2 (b - a) v dv
            let f = |v: f64, t: &mut BranchTracker<'_>| {
                let z = a + (b - a) * (v * v);
                t.sqrt_at(z) * (b - a) * (2.0 * v)
            };
            // seed the branch away from the zero where sqrt(P) vanishes
            tracker.sqrt_at(a + (b - a) * 1e-4);
            total += integrate_unit_interval(&f, &mut tracker, tol, 24);
            // leave the reference at the junction
            tracker.sqrt_at(b);
        } else if s == last - 1 {
            // z = b + (a - b) v^2 walked from v = 1 down to 0; in the
            // forward parameter u = 1 - v the volume element picks up a
            // minus sign.
            let f = |u: f64, t: &mut BranchTracker<'_>| {
                let v = 1.0 - u;
                let z = b + (a - b) * (v * v);
                -(t.sqrt_at(z) * (a - b) * (2.0 * v))
            };
            total += integrate_unit_interval(&f, &mut tracker, tol, 24);
        } else {
            let f = |u: f64, t: &mut BranchTracker<'_>| {
                let z = a + (b - a) * u;
                t.sqrt_at(z) * (b - a)
            };
            total += integrate_unit_interval(&f, &mut tracker, tol, 24);
        }
    }
    Ok(total)
}

/// Distance from a point to the segment [a, b].
pub fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
