//! Saddle detection: a separatrix's escape direction is locally constant in
//! the phase and jumps exactly where the separatrix runs into another zero.
//! Scanning a phase grid and bisecting each jump finds the saddle phases;
//! the periods come from quadrature along the traced connection.

use super::quad::{point_segment_distance, sqrt_integral_along};
use super::trace::{trace, trace_separatrix, Termination, TraceRequest};
use super::{normalize_period, PolynomialDifferential, ScanError, ScannerConfig};
use crate::lattice::{ClassLattice, ClassVector};
use num::complex::Complex64;

/// A detected saddle connection between two zeros.
#[derive(Debug, Clone)]
pub struct SaddleRecord {
    pub zero_a: usize,
    pub zero_b: usize,
    /// Phase within the scanned window.
    pub theta: f64,
    /// Period, normalized to the representative with phase in (0, 1].
    pub period: Complex64,
    /// Coordinates in the period frame, filled by classification.
    pub class: Option<ClassVector>,
    /// Both endpoints at the same zero.
    pub closed: bool,
    /// Polyline witness from zero_a to zero_b.
    pub path: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum GridLabel {
    Escaped(usize),
    Hit,
    Exhausted,
}

fn separatrix_label(
    diff: &PolynomialDifferential,
    zero: usize,
    branch: usize,
    theta: f64,
    config: &ScannerConfig,
) -> Result<(GridLabel, Option<super::trace::Trajectory>), ScanError> {
    let dirs = super::trace::separatrix_directions(diff, zero, theta);
    let traj = trace_separatrix(diff, zero, dirs[branch], theta, config)?;
    Ok(match traj.termination {
        Termination::Escaped { direction } => (GridLabel::Escaped(direction), Some(traj)),
        Termination::HitZero { .. } => (GridLabel::Hit, Some(traj)),
        Termination::Closed { .. } | Termination::StepLimit => (GridLabel::Exhausted, None),
    })
}

/// Scan the window for saddles of every separatrix of every zero, bisect
/// each escape-label jump, confirm the hit, and deduplicate.
pub fn find_saddles(
    diff: &PolynomialDifferential,
    window: (f64, f64),
    config: &ScannerConfig,
) -> Result<Vec<SaddleRecord>, ScanError> {
    let (lo, hi) = window;
    if hi - lo <= 0.0 {
        return Ok(Vec::new());
    }
    if hi - lo > 1.0 + 1e-12 {
        return Err(ScanError::WindowTooLong(hi - lo));
    }
    let n_grid = ((config.grid as f64) * (hi - lo)).ceil().max(8.0) as usize;
    let mut candidates: Vec<SaddleRecord> = Vec::new();
    for zero in 0..diff.roots().len() {
        for branch in 0..3 {
            let mut labels: Vec<(f64, GridLabel)> = Vec::with_capacity(n_grid + 1);
            for j in 0..=n_grid {
                let theta = lo + (hi - lo) * (j as f64) / (n_grid as f64);
                let (label, traj) = separatrix_label(diff, zero, branch, theta, config)?;
                if label == GridLabel::Hit {
                    // grid point sits on (or extremely near) a saddle phase
                    if let Some(t) = traj {
                        record_candidate(diff, zero, theta, &t, config, &mut candidates)?;
                    }
                }
                labels.push((theta, label));
            }
            for j in 0..n_grid {
                let (ta, la) = labels[j];
                let (tb, lb) = labels[j + 1];
                if la != lb {
                    bisect_jump(diff, zero, branch, (ta, la), (tb, lb), config, 0, &mut candidates)?;
                }
            }
        }
    }
    Ok(dedupe(diff, candidates))
}

#[allow(clippy::too_many_arguments)]
fn bisect_jump(
    diff: &PolynomialDifferential,
    zero: usize,
    branch: usize,
    (mut lo, mut label_lo): (f64, GridLabel),
    (mut hi, mut label_hi): (f64, GridLabel),
    config: &ScannerConfig,
    depth: u32,
    out: &mut Vec<SaddleRecord>,
) -> Result<(), ScanError> {
    if depth > 8 {
        return Err(ScanError::UnresolvedJump(0.5 * (lo + hi)));
    }
    let usable = |l: GridLabel| matches!(l, GridLabel::Escaped(_));
    if !usable(label_lo) || !usable(label_hi) {
        // an endpoint sat on a saddle (recorded already) or exhausted its
        // steps; step off it and re-read the labels
        let margin = (10.0 * config.bisect_tol).max(1e-6);
        lo += margin;
        hi -= margin;
        if hi <= lo {
            return Ok(());
        }
        label_lo = separatrix_label(diff, zero, branch, lo, config)?.0;
        label_hi = separatrix_label(diff, zero, branch, hi, config)?.0;
        if !usable(label_lo) || !usable(label_hi) {
            return Err(ScanError::UnresolvedJump(0.5 * (lo + hi)));
        }
        if label_lo == label_hi {
            return Ok(());
        }
    }
    while hi - lo > config.bisect_tol {
        let mid = 0.5 * (lo + hi);
        let (label, traj) = separatrix_label(diff, zero, branch, mid, config)?;
        match label {
            GridLabel::Hit => {
                let t = traj.expect("hit carries its trajectory");
                record_candidate(diff, zero, mid, &t, config, out)?;
                return Ok(());
            }
            GridLabel::Exhausted => {
                return Err(ScanError::UnresolvedJump(mid));
            }
            l if l == label_lo => lo = mid,
            l if l == label_hi => hi = mid,
            l => {
                // a third escape label: two separate jumps inside
                bisect_jump(diff, zero, branch, (lo, label_lo), (mid, l), config, depth + 1, out)?;
                bisect_jump(diff, zero, branch, (mid, l), (hi, label_hi), config, depth + 1, out)?;
                return Ok(());
            }
        }
    }
    // The jump is localized to bisect_tol; the separatrix at the midpoint
    // passes the far zero within the integration accuracy, which can exceed
    // the hit tolerance, so the confirmation uses the closest approach.
    let mid = 0.5 * (lo + hi);
    let dirs = super::trace::separatrix_directions(diff, zero, mid);
    let traj = trace_separatrix(diff, zero, dirs[branch], mid, config)?;
    record_candidate(diff, zero, mid, &traj, config, out)
}

/// Build a record from a separatrix trace at a localized saddle phase: the
/// trace either hit a zero or passed one within the confirmation distance.
/// The witness path is the trace truncated at the approach point, and the
/// period comes from quadrature along it.
fn record_candidate(
    diff: &PolynomialDifferential,
    zero: usize,
    theta: f64,
    traj: &super::trace::Trajectory,
    config: &ScannerConfig,
    out: &mut Vec<SaddleRecord>,
) -> Result<(), ScanError> {
    let confirm_tol = 1e-4 * diff.scale();
    let (target, cut_index, approach) = match traj.termination {
        Termination::HitZero { index, .. } => {
            (index, traj.points.len() - 1, 0.0)
        }
        _ => {
            // nearest zero over the trace, ignoring the start zero's own
            // neighborhood at the launch end
            let mut best: Option<(usize, usize, f64)> = None;
            for (j, &root) in diff.roots().iter().enumerate() {
                let (d, idx) = traj.closest_approach_indexed(root);
                if j == zero && idx < traj.points.len() / 8 {
                    continue;
                }
                if best.map_or(true, |(_, _, bd)| d < bd) {
                    best = Some((j, idx, d));
                }
            }
            match best {
                Some((j, idx, d)) if d < confirm_tol => (j, idx, d),
                _ => return Err(ScanError::UnresolvedJump(theta)),
            }
        }
    };
    let _ = approach;
    let points = &traj.points[..=cut_index];
    let path = witness_path(diff, zero, target, points, config)?;
    let raw = sqrt_integral_along(diff.poly(), &path, config.quad_tol)?;
    let period = normalize_period(raw * 2.0);
    let phase_error = phase_distance_mod1(period.im.atan2(period.re) / std::f64::consts::PI, theta);
    if phase_error > config.phase_tol {
        return Err(ScanError::PhaseInconsistent { theta, error: phase_error });
    }
    out.push(SaddleRecord {
        zero_a: zero.min(target),
        zero_b: zero.max(target),
        theta,
        period,
        class: None,
        closed: zero == target,
        path,
    });
    Ok(())
}

/// Distance between phases modulo 1 (a saddle and its reverse orientation
/// differ by a half turn of the circle of directions).
pub fn phase_distance_mod1(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(1.0);
    if d > 0.5 {
        d = 1.0 - d;
    }
    d
}

/// Decimate a traced connection into a polyline from the exact start zero
/// to the exact target zero, keeping enough anchors that no chord cuts a
/// corner near another zero.
fn witness_path(
    diff: &PolynomialDifferential,
    zero: usize,
    target: usize,
    points: &[Complex64],
    config: &ScannerConfig,
) -> Result<Vec<Complex64>, ScanError> {
    let mut clearance = f64::INFINITY;
    for (i, &r) in diff.roots().iter().enumerate() {
        if i == zero || i == target {
            continue;
        }
        for &p in points {
            clearance = clearance.min((p - r).norm());
        }
    }
    let anchors = 48.min(points.len().max(2));
    let mut path = Vec::with_capacity(anchors + 2);
    path.push(diff.roots()[zero]);
    let step = (points.len() as f64 - 1.0) / (anchors as f64);
    for j in 1..anchors {
        let idx = (j as f64 * step) as usize;
        let p = points[idx.min(points.len() - 1)];
        // skip anchors glued to the endpoints: the substitution segments
        // handle those neighborhoods
        if (p - diff.roots()[zero]).norm() > 1e-3 * diff.scale()
            && (p - diff.roots()[target]).norm() > 1e-3 * diff.scale()
        {
            path.push(p);
        }
    }
    path.push(diff.roots()[target]);
    // chords must respect the clearance the actual trajectory had
    let threshold = (0.45 * clearance).min(config.path_tol * diff.scale());
    if clearance.is_finite() && threshold > 0.0 {
        for s in 0..path.len() - 1 {
            for (i, &r) in diff.roots().iter().enumerate() {
                if i == zero || i == target {
                    continue;
                }
                let d = point_segment_distance(r, path[s], path[s + 1]);
                if d < threshold {
                    return Err(ScanError::PathTooClose { zero: i, clearance: d });
                }
            }
        }
    }
    Ok(path)
}

fn dedupe(diff: &PolynomialDifferential, mut candidates: Vec<SaddleRecord>) -> Vec<SaddleRecord> {
    candidates.sort_by(|a, b| {
        (a.zero_a, a.zero_b)
            .cmp(&(b.zero_a, b.zero_b))
            .then(a.theta.partial_cmp(&b.theta).unwrap())
    });
    let scale = diff.scale();
    let mut out: Vec<SaddleRecord> = Vec::new();
    for c in candidates {
        let dup = out.iter().any(|r| {
            r.zero_a == c.zero_a
                && r.zero_b == c.zero_b
                && phase_distance_mod1(r.theta, c.theta) < 1e-5
                && (r.period - c.period).norm() < 1e-5 * scale
        });
        if !dup {
            out.push(c);
        }
    }
    out
}

/// A choice of basis saddles whose periods coordinatize the lattice.
#[derive(Debug, Clone)]
pub struct PeriodFrame {
    /// Indices into the record list this frame was built from.
    pub basis_records: Vec<usize>,
    /// Zero pairs of the basis saddles.
    pub basis: Vec<(usize, usize)>,
    /// Basis periods (phase in (0, 1], ordered by decreasing phase).
    pub periods: Vec<Complex64>,
}

impl PeriodFrame {
    /// Smallest |sum n_i Z_i| over nonzero integer vectors with entries
    /// bounded by 4; classification is reliable when this is well above the
    /// classification tolerance.
    pub fn separation(&self) -> f64 {
        let r = self.periods.len();
        let mut best = f64::INFINITY;
        let mut n = vec![-4i64; r];
        loop {
            if n.iter().any(|&x| x != 0) {
                let z = self
                    .periods
                    .iter()
                    .zip(&n)
                    .fold(Complex64::new(0.0, 0.0), |acc, (&p, &c)| acc + p * c as f64);
                best = best.min(z.norm());
            }
            let mut i = 0;
            loop {
                if i == r {
                    return best;
                }
                n[i] += 1;
                if n[i] <= 4 {
                    break;
                }
                n[i] = -4;
                i += 1;
            }
        }
    }

    /// Express a period as an integer combination of the basis periods.
    pub fn classify(
        &self,
        period: Complex64,
        scale: f64,
        config: &ScannerConfig,
    ) -> Result<ClassVector, ScanError> {
        let r = self.periods.len();
        let mut best: Option<(f64, Vec<i64>)> = None;
        let mut n = vec![-4i64; r];
        loop {
            let z = self
                .periods
                .iter()
                .zip(&n)
                .fold(Complex64::new(0.0, 0.0), |acc, (&p, &c)| acc + p * c as f64);
            let residual = (z - period).norm();
            if best.as_ref().map_or(true, |(b, _)| residual < *b) {
                best = Some((residual, n.clone()));
            }
            let mut i = 0;
            let mut done = false;
            loop {
                if i == r {
                    done = true;
                    break;
                }
                n[i] += 1;
                if n[i] <= 4 {
                    break;
                }
                n[i] = -4;
                i += 1;
            }
            if done {
                break;
            }
        }
        let (residual, coeffs) = best.expect("nonempty search");
        if residual > config.class_tol * scale {
            return Err(ScanError::ClassificationFailed(format!(
                "{period} (best residual {residual:e})"
            )));
        }
        Ok(ClassVector(coeffs))
    }

    /// The measured pairing on the frame basis. For rank up to two the sign
    /// convention is pinned by which side of the wall the window sees; the
    /// triangulation route (`wkb::skew_via_wkb`) must agree where both
    /// apply.
    pub fn lattice(
        &self,
        diff: &PolynomialDifferential,
        records: &[SaddleRecord],
        _config: &ScannerConfig,
    ) -> Result<ClassLattice, ScanError> {
        let rank = diff.rank();
        match rank {
            1 => Ok(ClassLattice::zero_form(1).map_err(crate::wallcrossing::WcfError::from)?),
            2 => {
                let classes: Vec<&ClassVector> = records
                    .iter()
                    .filter(|r| !r.closed)
                    .filter_map(|r| r.class.as_ref())
                    .collect();
                let count = classes.len();
                // basis is ordered by decreasing phase: on the two-saddle
                // side the pairing of (higher, lower) is +1, on the
                // three-saddle side it is -1
                let sign = match count {
                    2 => 1,
                    3 => -1,
                    _ => {
                        return Err(ScanError::RankUnsupported(
                            "infer a rank-2 pairing from this saddle count",
                            count,
                        ))
                    }
                };
                Ok(ClassLattice::new(2, vec![vec![0, sign], vec![-sign, 0]])
                    .map_err(crate::wallcrossing::WcfError::from)?)
            }
            r => Err(ScanError::RankUnsupported(
                "infer the pairing without a triangulation sweep",
                r,
            )),
        }
    }
}

/// Pick a period basis among the records: decreasing phase order, first
/// subset whose frame separates well and classifies every record with small
/// non-negative coordinates. Classifications are written back into the
/// records.
pub fn choose_frame(
    diff: &PolynomialDifferential,
    records: &mut [SaddleRecord],
    config: &ScannerConfig,
) -> Result<PeriodFrame, ScanError> {
    let rank = diff.rank();
    let mut order: Vec<usize> = (0..records.len()).filter(|&i| !records[i].closed).collect();
    order.sort_by(|&a, &b| records[b].theta.partial_cmp(&records[a].theta).unwrap());
    if order.len() < rank {
        return Err(ScanError::NoBasis);
    }
    let scale = diff.scale();
    let subsets = k_subsets(order.len(), rank);
    'subset: for subset in subsets {
        let chosen: Vec<usize> = subset.iter().map(|&i| order[i]).collect();
        let frame = PeriodFrame {
            basis_records: chosen.clone(),
            basis: chosen.iter().map(|&i| (records[i].zero_a, records[i].zero_b)).collect(),
            periods: chosen.iter().map(|&i| records[i].period).collect(),
        };
        if frame.separation() < 20.0 * config.class_tol * scale {
            continue;
        }
        let mut classes: Vec<ClassVector> = Vec::with_capacity(records.len());
        for r in records.iter() {
            match frame.classify(r.period, scale, config) {
                Ok(c) if c.in_cone() && !c.is_zero() => classes.push(c),
                _ => continue 'subset,
            }
        }
        for (r, c) in records.iter_mut().zip(classes) {
            r.class = Some(c);
        }
        return Ok(frame);
    }
    Err(ScanError::NoBasis)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Probe for closed trajectories at each detected saddle phase; any loop
/// found is a cylinder and contributes -2 to the count of its class. The
/// polynomial family on the sphere is expected to produce none.
pub fn detect_cylinders(
    diff: &PolynomialDifferential,
    records: &[SaddleRecord],
    frame: &PeriodFrame,
    config: &ScannerConfig,
) -> Result<Vec<ClassVector>, ScanError> {
    let mut found: Vec<ClassVector> = Vec::new();
    let scale = diff.scale();
    let mut phases: Vec<f64> = records.iter().map(|r| r.theta).collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    phases.dedup_by(|a, b| phase_distance_mod1(*a, *b) < 1e-7);
    for &theta in &phases {
        let roots = diff.roots();
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let start = 0.5 * (roots[i] + roots[j]);
                if super::trace::nearest_zero(diff, start).0 < 10.0 * config.hit_tol {
                    continue;
                }
                let w = diff.poly().eval(start).sqrt();
                let traj = trace(
                    diff,
                    &TraceRequest { start, theta, initial_branch: w, watch_return: true },
                    config,
                )?;
                if let Termination::Closed { flat_length } = traj.termination {
                    let period = normalize_period(
                        Complex64::from_polar(
                            2.0 * flat_length,
                            std::f64::consts::PI * theta,
                        ),
                    );
                    if let Ok(class) = frame.classify(period, scale, config) {
                        if !found.contains(&class) {
                            found.push(class);
                        }
                    }
                }
            }
        }
    }
    Ok(found)
}
