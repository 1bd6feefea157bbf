//! Numerical extraction of BPS data from polynomial differentials
//! P(z) dz^2 on the sphere (simple zeros, one pole at infinity): trajectory
//! tracing, saddle detection by separatrix bisection, period quadrature,
//! WKB triangulations of the polygon, and assembled count structures.

pub mod continuation;
pub mod poly;
pub mod quad;
pub mod saddles;
pub mod trace;
pub mod wkb;

pub use continuation::continue_frame;
pub use poly::Poly;
pub use saddles::{find_saddles, PeriodFrame, SaddleRecord};
pub use trace::{Termination, Trajectory};
pub use wkb::wkb_triangulation;

use crate::lattice::{CentralCharge, ClassVector, QuadraticRefinement, RationalComplex};
use crate::wallcrossing::{BpsStructure, WcfError};
use num::complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("polynomial degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("no zero of order > 1 allowed: two roots at distance {distance:e}")]
    RootsTooClose { distance: f64 },
    #[error("polynomial degree must be at least 2 for saddle connections")]
    DegreeTooSmall,
    #[error("integration path is empty")]
    EmptyPath,
    #[error("integration path passes within {clearance:e} of zero {zero}")]
    PathTooClose { zero: usize, clearance: f64 },
    #[error("square-root branch jumped by more than half its magnitude")]
    BranchJump,
    #[error("trajectory exhausted the step limit")]
    StepLimit,
    #[error("could not resolve an escape-label jump near phase {0} (refine the grid)")]
    UnresolvedJump(f64),
    #[error("saddle at phase {theta} fails the phase/period consistency bound: {error:e}")]
    PhaseInconsistent { theta: f64, error: f64 },
    #[error("phase {0} is active (a saddle sits on it)")]
    ActivePhase(f64),
    #[error("expected {expected} trajectory arcs, found {found}")]
    ArcCount { expected: usize, found: usize },
    #[error("traced arcs do not triangulate the polygon: {0}")]
    BadArcs(String),
    #[error("no integer class within tolerance for period {0}")]
    ClassificationFailed(String),
    #[error("period frame is degenerate: smallest combination has size {0:e}")]
    DegenerateFrame(f64),
    #[error("no admissible period basis among the detected saddles")]
    NoBasis,
    #[error("window must have length at most 1, got {0}")]
    WindowTooLong(f64),
    #[error("cannot {0} with rank-{1} data")]
    RankUnsupported(&'static str, usize),
    #[error(transparent)]
    Wcf(#[from] Box<WcfError>),
}

impl From<WcfError> for ScanError {
    fn from(e: WcfError) -> Self {
        ScanError::Wcf(Box::new(e))
    }
}

/// Tolerances and controls, all overridable from the command line.
#[derive(Debug, Clone)]
pub struct ScannerConfig {
    /// Minimal distance between roots (simple-zero requirement).
    pub root_tol: f64,
    /// Distance at which a trajectory counts as hitting a zero.
    pub hit_tol: f64,
    /// Phase resolution of the saddle bisection.
    pub bisect_tol: f64,
    /// Absolute tolerance of period quadrature.
    pub quad_tol: f64,
    /// Residual bound for integer classification of periods.
    pub class_tol: f64,
    /// Bound for the phase/period consistency of a saddle record.
    pub phase_tol: f64,
    /// Required clearance of integration paths from other zeros.
    pub path_tol: f64,
    /// Number of grid points per unit phase window in the separatrix scan.
    pub grid: usize,
    /// Escape radius factor: R = factor * (1 + max |root|).
    pub escape_factor: f64,
    /// Offset (relative to the scale) of separatrix trace starts.
    pub start_offset: f64,
    /// Hard cap on trajectory steps.
    pub max_steps: usize,
}

impl Default for ScannerConfig {
    fn default() -> Self {
        ScannerConfig {
            root_tol: 1e-9,
            hit_tol: 1e-6,
            bisect_tol: 1e-8,
            quad_tol: 1e-10,
            class_tol: 1e-6,
            phase_tol: 1e-6,
            path_tol: 1e-3,
            grid: 180,
            escape_factor: 10.0,
            start_offset: 1e-4,
            max_steps: 40_000,
        }
    }
}

/// A polynomial quadratic differential P(z) dz^2 with simple roots.
#[derive(Debug, Clone)]
pub struct PolynomialDifferential {
    poly: Poly,
    roots: Vec<Complex64>,
}

impl PolynomialDifferential {
    pub fn new(poly: Poly, config: &ScannerConfig) -> Result<Self, ScanError> {
        if poly.degree() < 2 {
            return Err(ScanError::DegreeTooSmall);
        }
        let roots = poly.roots(config.root_tol)?;
        Ok(PolynomialDifferential { poly, roots })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    /// Degree k of P.
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// Pole order at infinity.
    pub fn pole_order(&self) -> usize {
        self.degree() + 4
    }

    /// Marked points on the boundary of the blown-up disk.
    pub fn boundary_marked(&self) -> usize {
        self.degree() + 2
    }

    /// Rank of the charge lattice.
    pub fn rank(&self) -> usize {
        self.degree() - 1
    }

    /// Geometric scale: 1 + the largest root modulus.
    pub fn scale(&self) -> f64 {
        1.0 + self.roots.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub fn escape_radius(&self, config: &ScannerConfig) -> f64 {
        config.escape_factor * self.scale()
    }
}

/// Normalize a period to the representative with phase in (0, 1].
pub fn normalize_period(z: Complex64) -> Complex64 {
    let phase = z.im.atan2(z.re) / std::f64::consts::PI;
    if phase <= 0.0 || (phase - 1.0).abs() < f64::EPSILON {
        -z
    } else {
        z
    }
}

/// Scan outcome: deduplicated saddle records, the chosen period frame, the
/// assembled BPS structure, and any detected cylinder classes.
#[derive(Debug)]
pub struct ScanResult {
    pub saddles: Vec<SaddleRecord>,
    pub frame: PeriodFrame,
    pub bps: BpsStructure,
    pub cylinders: Vec<ClassVector>,
}

/// Full pipeline: detect saddles in the window, choose a period basis,
/// classify, and assemble the measured BPS structure.
pub fn scan(
    diff: &PolynomialDifferential,
    window: (f64, f64),
    config: &ScannerConfig,
) -> Result<ScanResult, ScanError> {
    let mut records = find_saddles(diff, window, config)?;
    let frame = saddles::choose_frame(diff, &mut records, config)?;
    let cylinders = saddles::detect_cylinders(diff, &records, &frame, config)?;
    let bps = assemble_bps(diff, &records, &frame, &cylinders, config)?;
    Ok(ScanResult { saddles: records, frame, bps, cylinders })
}

/// Build the measured structure from classified records: counts are one per
/// non-closed saddle pair and minus two per cylinder class; closed saddles
/// (equal endpoints) contribute nothing. Signs are -1 on the basis classes,
/// which are classes of non-closed saddle connections.
pub fn assemble_bps(
    diff: &PolynomialDifferential,
    records: &[SaddleRecord],
    frame: &PeriodFrame,
    cylinders: &[ClassVector],
    config: &ScannerConfig,
) -> Result<BpsStructure, ScanError> {
    use std::collections::BTreeMap;
    let rank = diff.rank();
    let mut omega: BTreeMap<ClassVector, i64> = BTreeMap::new();
    for r in records {
        if r.closed {
            continue;
        }
        let class = r.class.clone().ok_or_else(|| {
            ScanError::ClassificationFailed(format!("{:?} unclassified", (r.zero_a, r.zero_b)))
        })?;
        *omega.entry(class).or_insert(0) += 1;
    }
    for c in cylinders {
        *omega.entry(c.clone()).or_insert(0) -= 2;
    }
    let charge = CentralCharge::new(
        frame
            .periods
            .iter()
            .map(|z| RationalComplex::from_f64(z.re, z.im).expect("finite period"))
            .collect(),
        true,
    )
    .map_err(WcfError::from)?;
    let lattice = frame.lattice(diff, records, config)?;
    let bps = BpsStructure::new(
        lattice,
        charge,
        omega.into_iter().collect(),
        QuadraticRefinement::all_negative(rank),
        1e-9,
    )?;
    for (_, count) in bps.support() {
        debug_assert!(count.abs() <= 2);
    }
    Ok(bps)
}

#[cfg(test)]
mod tests;
