//! WKB triangulations of the polygon: at a non-active phase, one generic
//! trajectory per horizontal strip connects two boundary directions at
//! infinity; those chords are the internal arcs of a triangulation of the
//! (k+2)-gon whose vertices are the distinguished directions.

use super::saddles::{phase_distance_mod1, SaddleRecord};
use super::trace::{separatrix_directions, trace, trace_separatrix, Termination, TraceRequest};
use super::{PolynomialDifferential, ScanError, ScannerConfig};
use crate::conventions::Orientation;
use crate::lattice::ClassLattice;
use crate::surface::{ExchangeMatrix, Label, TaggedTriangulation, Triangle};
use num::complex::Complex64;
use std::collections::{BTreeMap, BTreeSet};

/// Diagonals of the polygon cut out by the generic trajectories at `theta`.
pub fn wkb_diagonals(
    diff: &PolynomialDifferential,
    theta: f64,
    config: &ScannerConfig,
) -> Result<Vec<(usize, usize)>, ScanError> {
    let n_poly = diff.boundary_marked();
    // active phases are excluded: every separatrix must escape
    for zero in 0..diff.roots().len() {
        let dirs = separatrix_directions(diff, zero, theta);
        for d in dirs {
            let traj = trace_separatrix(diff, zero, d, theta, config)?;
            match traj.termination {
                Termination::Escaped { .. } => {}
                Termination::HitZero { .. } => return Err(ScanError::ActivePhase(theta)),
                _ => return Err(ScanError::StepLimit),
            }
        }
    }
    let mut diagonals: BTreeSet<(usize, usize)> = BTreeSet::new();
    let eta = 0.35f64;
    for zero in 0..diff.roots().len() {
        let z0 = diff.roots()[zero];
        let dirs = separatrix_directions(diff, zero, theta);
        for d in dirs {
            for side in [eta, -eta] {
                let start = z0
                    + d * Complex64::from_polar(
                        config.start_offset * diff.scale(),
                        side,
                    );
                let w = diff.poly().eval(start).sqrt();
                let mut ends = Vec::with_capacity(2);
                for branch in [w, -w] {
                    let traj = trace(
                        diff,
                        &TraceRequest {
                            start,
                            theta,
                            initial_branch: branch,
                            watch_return: false,
                        },
                        config,
                    )?;
                    match traj.termination {
                        Termination::Escaped { direction } => ends.push(direction),
                        Termination::HitZero { .. } => {
                            return Err(ScanError::ActivePhase(theta))
                        }
                        _ => return Err(ScanError::StepLimit),
                    }
                }
                let (a, b) = (ends[0].min(ends[1]), ends[0].max(ends[1]));
                if a == b {
                    continue;
                }
                // adjacent directions bound a half plane, not a strip
                let adjacent = b == a + 1 || (a == 0 && b == n_poly - 1);
                if !adjacent {
                    diagonals.insert((a, b));
                }
            }
        }
    }
    let diagonals: Vec<(usize, usize)> = diagonals.into_iter().collect();
    let expected = diff.rank();
    if diagonals.len() != expected {
        return Err(ScanError::ArcCount { expected, found: diagonals.len() });
    }
    // non-crossing check
    for (i, &(a, b)) in diagonals.iter().enumerate() {
        for &(c, d) in &diagonals[i + 1..] {
            let between = |x: usize, lo: usize, hi: usize| x > lo && x < hi;
            if between(c, a, b) != between(d, a, b) && c != a && c != b && d != a && d != b {
                return Err(ScanError::BadArcs(format!(
                    "diagonals ({a},{b}) and ({c},{d}) cross"
                )));
            }
        }
    }
    Ok(diagonals)
}

fn edge_label(n_poly: usize, u: usize, v: usize) -> Label {
    let (a, b) = (u.min(v), u.max(v));
    if b == a + 1 {
        format!("b{a}")
    } else if a == 0 && b == n_poly - 1 {
        format!("b{b}")
    } else {
        format!("a{a}_{b}")
    }
}

pub fn diagonal_label(d: (usize, usize)) -> Label {
    format!("a{}_{}", d.0.min(d.1), d.0.max(d.1))
}

/// Assemble the triangulation of the polygon with the given diagonals,
/// triples listed in the cyclic order fixed by the builders' convention.
pub fn polygon_triangulation(
    n_poly: usize,
    diagonals: &[(usize, usize)],
) -> Result<TaggedTriangulation, ScanError> {
    let chords: BTreeSet<(usize, usize)> =
        diagonals.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let region: Vec<usize> = (0..n_poly).collect();
    split_region(&region, &chords, &mut faces)?;
    if faces.len() != n_poly - 2 {
        return Err(ScanError::BadArcs(format!(
            "expected {} faces, found {}",
            n_poly - 2,
            faces.len()
        )));
    }
    let mut tris = Vec::with_capacity(faces.len());
    for [u, v, w] in faces {
        tris.push(Triangle {
            edges: [
                edge_label(n_poly, u, v),
                edge_label(n_poly, v, w),
                edge_label(n_poly, w, u),
            ],
            corners: [v, w, u],
        });
    }
    let names: BTreeMap<usize, String> = (0..n_poly).map(|i| (i, format!("v{i}"))).collect();
    Ok(TaggedTriangulation::from_parts(tris, BTreeMap::new(), names))
}

fn split_region(
    region: &[usize],
    chords: &BTreeSet<(usize, usize)>,
    faces: &mut Vec<[usize; 3]>,
) -> Result<(), ScanError> {
    if region.len() < 3 {
        return Err(ScanError::BadArcs("degenerate region".into()));
    }
    if region.len() == 3 {
        faces.push([region[0], region[1], region[2]]);
        return Ok(());
    }
    let m = region.len();
    for i in 0..m {
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue; // adjacent around the cycle
            }
            let key = (region[i].min(region[j]), region[i].max(region[j]));
            if chords.contains(&key) {
                let first: Vec<usize> = region[i..=j].to_vec();
                let mut second: Vec<usize> = region[j..].to_vec();
                second.extend_from_slice(&region[..=i]);
                split_region(&first, chords, faces)?;
                split_region(&second, chords, faces)?;
                return Ok(());
            }
        }
    }
    Err(ScanError::BadArcs(
        "diagonal set does not triangulate the polygon".into(),
    ))
}

/// The full triangulation at a non-active phase.
pub fn wkb_triangulation(
    diff: &PolynomialDifferential,
    theta: f64,
    config: &ScannerConfig,
) -> Result<(TaggedTriangulation, Vec<(usize, usize)>), ScanError> {
    let diagonals = wkb_diagonals(diff, theta, config)?;
    let t = polygon_triangulation(diff.boundary_marked(), &diagonals)?;
    Ok((t, diagonals))
}

/// Sweep the window from below the first saddle phase upward, recording
/// which arc flips at each saddle. Returns the reference triangulation and
/// the flipped-arc label for each record index.
pub fn flip_sweep(
    diff: &PolynomialDifferential,
    records: &[SaddleRecord],
    window: (f64, f64),
    config: &ScannerConfig,
) -> Result<(TaggedTriangulation, Vec<(usize, Label)>), ScanError> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].theta.partial_cmp(&records[b].theta).unwrap());
    let mut phases: Vec<f64> = Vec::with_capacity(order.len() + 2);
    phases.push(window.0);
    phases.extend(order.iter().map(|&i| records[i].theta));
    phases.push(window.1);
    let midpoint = |i: usize| 0.5 * (phases[i] + phases[i + 1]);
    let (reference, mut diagonals) = wkb_triangulation(diff, midpoint(0), config)?;
    let mut flips: Vec<(usize, Label)> = Vec::new();
    for (step, &rec_idx) in order.iter().enumerate() {
        let (_, next_diagonals) = wkb_triangulation(diff, midpoint(step + 1), config)?;
        let gone: Vec<(usize, usize)> = diagonals
            .iter()
            .copied()
            .filter(|d| !next_diagonals.contains(d))
            .collect();
        if gone.len() != 1 {
            return Err(ScanError::BadArcs(format!(
                "saddle at phase {} flips {} arcs",
                records[rec_idx].theta,
                gone.len()
            )));
        }
        flips.push((rec_idx, diagonal_label(gone[0])));
        diagonals = next_diagonals;
    }
    Ok((reference, flips))
}

/// Pairing of the basis classes read off the reference WKB triangulation:
/// each basis saddle corresponds to the arc it flips, and the exchange
/// matrix of the reference triangulation evaluated on those arcs is the
/// measured pairing. Requires every basis flip arc to be an arc of the
/// reference triangulation.
pub fn skew_via_wkb(
    diff: &PolynomialDifferential,
    records: &[SaddleRecord],
    basis_records: &[usize],
    window: (f64, f64),
    config: &ScannerConfig,
    orientation: Orientation,
) -> Result<ClassLattice, ScanError> {
    let (reference, flips) = flip_sweep(diff, records, window, config)?;
    let b = ExchangeMatrix::of(&reference, orientation).map_err(crate::wallcrossing::WcfError::from)?;
    let arcs = b.arcs().to_vec();
    let mut positions = Vec::with_capacity(basis_records.len());
    for &rec in basis_records {
        let label = flips
            .iter()
            .find(|(i, _)| *i == rec)
            .map(|(_, l)| l.clone())
            .ok_or_else(|| {
                ScanError::BadArcs(format!("basis record {rec} never flips in the window"))
            })?;
        let pos = arcs.iter().position(|a| *a == label).ok_or_else(|| {
            ScanError::BadArcs(format!(
                "flip arc {label} is not an arc of the reference triangulation"
            ))
        })?;
        positions.push(pos);
    }
    let rank = basis_records.len();
    let mut skew = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        for j in 0..rank {
            skew[i][j] = b.entry(positions[i], positions[j]);
        }
    }
    Ok(ClassLattice::new(rank, skew).map_err(crate::wallcrossing::WcfError::from)?)
}

/// The triangulation is constant between consecutive saddle phases; used by
/// the scanner invariants.
pub fn wkb_constant_on_gap(
    diff: &PolynomialDifferential,
    gap: (f64, f64),
    config: &ScannerConfig,
) -> Result<bool, ScanError> {
    let (lo, hi) = gap;
    let t1 = wkb_diagonals(diff, lo + (hi - lo) / 3.0, config)?;
    let t2 = wkb_diagonals(diff, lo + 2.0 * (hi - lo) / 3.0, config)?;
    Ok(t1 == t2)
}

/// Phases of the record list, sorted and deduplicated modulo 1.
pub fn saddle_phases(records: &[SaddleRecord]) -> Vec<f64> {
    let mut phases: Vec<f64> = records.iter().map(|r| r.theta).collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    phases.dedup_by(|a, b| phase_distance_mod1(*a, *b) < 1e-7);
    phases
}
