use super::*;
use crate::conventions::DEFAULT_ORIENTATION;
use num::complex::Complex64;

fn diff_of(coeffs: &[f64]) -> (PolynomialDifferential, ScannerConfig) {
    let config = ScannerConfig::default();
    let p = Poly::from_real_descending(coeffs).unwrap();
    (PolynomialDifferential::new(p, &config).unwrap(), config)
}

#[test]
fn square_scan_finds_the_single_saddle() {
    let (diff, config) = diff_of(&[1.0, 0.0, -1.0]);
    let result = scan(&diff, (0.0, 1.0), &config).unwrap();
    assert_eq!(result.saddles.len(), 1);
    let s = &result.saddles[0];
    assert_eq!((s.zero_a, s.zero_b), (0, 1));
    assert!(
        (s.theta - 0.5).abs() < 1e-6,
        "saddle phase {} should be 1/2",
        s.theta
    );
    assert!(
        (s.period.norm() - std::f64::consts::PI).abs() < 1e-6,
        "|Z| = {} should be pi",
        s.period.norm()
    );
    assert!(!s.closed);
    assert_eq!(s.class, Some(crate::ClassVector(vec![1])));
    assert!(result.cylinders.is_empty());
    // Omega = 1 on the saddle class
    let support: Vec<(crate::ClassVector, i64)> =
        result.bps.support().map(|(c, v)| (c.clone(), v)).collect();
    assert_eq!(support, vec![(crate::ClassVector(vec![1]), 1)]);
}

#[test]
fn degenerate_polynomial_rejected() {
    let config = ScannerConfig::default();
    // z^3 has a triple root
    let p = Poly::from_real_descending(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        PolynomialDifferential::new(p, &config),
        Err(ScanError::RootsTooClose { .. })
    ));
    let linear = Poly::from_real_descending(&[1.0, 0.0]).unwrap();
    assert!(matches!(
        PolynomialDifferential::new(linear, &config),
        Err(ScanError::DegreeTooSmall)
    ));
}

#[test]
fn empty_window_empty_result() {
    let (diff, config) = diff_of(&[1.0, 0.0, -1.0]);
    let records = find_saddles(&diff, (0.2, 0.2), &config).unwrap();
    assert!(records.is_empty());
}

/// Two sides of the rank-2 wall in the cubic family: inside the marginal
/// stability curve (|t| small) a half-plane window sees the two basis
/// saddles; outside it the sum class becomes a saddle as well.
pub fn a2_wall_pair() -> (Complex64, Complex64, (f64, f64)) {
    (Complex64::new(0.0, 0.45), Complex64::new(0.0, 3.0), (0.05, 0.45))
}

fn a2_poly(t: Complex64) -> Poly {
    Poly::from_descending(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-3.0, 0.0),
        t,
    ])
    .unwrap()
}

#[test]
fn a2_family_counts_jump_across_the_wall() {
    // P = z^3 - 3z + t: the saddle count in the window is 2 on one side of
    // the wall and 3 on the other
    let config = ScannerConfig::default();
    let (t_a, t_b, window) = a2_wall_pair();
    let mut counts = Vec::new();
    for t in [t_a, t_b] {
        let diff = PolynomialDifferential::new(a2_poly(t), &config).unwrap();
        let records = find_saddles(&diff, window, &config).unwrap();
        counts.push(records.iter().filter(|r| !r.closed).count());
    }
    assert_eq!(counts, vec![2, 3]);
}

#[test]
fn a2_scan_classifies_sum_class() {
    let config = ScannerConfig::default();
    let (_, t_b, window) = a2_wall_pair();
    let diff = PolynomialDifferential::new(a2_poly(t_b), &config).unwrap();
    let result = scan(&diff, window, &config).unwrap();
    let mut classes: Vec<Vec<i64>> = result
        .saddles
        .iter()
        .filter(|r| !r.closed)
        .map(|r| r.class.clone().unwrap().0)
        .collect();
    classes.sort();
    assert_eq!(classes, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
    // the pairing of the outer classes on the three-saddle side
    let skew = result.bps.lattice().skew_rows().to_vec();
    assert_eq!(skew, vec![vec![0, -1], vec![1, 0]]);
    // every count is 1 and phases match periods
    for (_, v) in result.bps.support() {
        assert_eq!(v, 1);
    }
    for r in &result.saddles {
        let phase = r.period.im.atan2(r.period.re) / std::f64::consts::PI;
        assert!(saddles::phase_distance_mod1(phase, r.theta) < config.phase_tol);
    }
}

#[test]
fn rotation_equivariance() {
    // saddles of e^{-2 i pi t0} P at phase th are saddles of P at th + t0
    let (diff, config) = diff_of(&[1.0, 0.0, -1.0]);
    let t0 = 0.2;
    let c = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * t0);
    let rotated = PolynomialDifferential::new(diff.poly().scale(c), &config).unwrap();
    let base = find_saddles(&diff, (0.0, 1.0), &config).unwrap();
    let rot = find_saddles(&rotated, (0.0, 1.0), &config).unwrap();
    assert_eq!(base.len(), rot.len());
    for (b, r) in base.iter().zip(&rot) {
        assert!(
            saddles::phase_distance_mod1(r.theta + t0, b.theta) < 1e-6,
            "rotated phase {} vs base {}",
            r.theta,
            b.theta
        );
        assert!((r.period.norm() - b.period.norm()).abs() < 1e-8);
    }
}

#[test]
fn scaling_multiplies_periods() {
    let (diff, config) = diff_of(&[1.0, 0.0, -1.0]);
    let c = 2.5f64;
    let scaled =
        PolynomialDifferential::new(diff.poly().scale(Complex64::new(c * c, 0.0)), &config)
            .unwrap();
    let base = find_saddles(&diff, (0.0, 1.0), &config).unwrap();
    let big = find_saddles(&scaled, (0.0, 1.0), &config).unwrap();
    assert_eq!(base.len(), big.len());
    for (b, s) in base.iter().zip(&big) {
        assert!((s.period.norm() - c * b.period.norm()).abs() < 1e-7);
    }
}

#[test]
fn wkb_square_has_one_diagonal_that_flips() {
    let (diff, config) = diff_of(&[1.0, 0.0, -1.0]);
    // saddle at phase 1/2; below it one diagonal, above it the other
    let (t1, d1) = wkb_triangulation(&diff, 0.25, &config).unwrap();
    let (t2, d2) = wkb_triangulation(&diff, 0.75, &config).unwrap();
    assert_eq!(d1.len(), 1);
    assert_eq!(d2.len(), 1);
    assert_ne!(d1, d2, "crossing the saddle phase must flip the diagonal");
    t1.validate(&crate::MarkedBorderedSurface::disk(4).unwrap()).unwrap();
    t2.validate(&crate::MarkedBorderedSurface::disk(4).unwrap()).unwrap();
    // determinism
    let (_, d1_again) = wkb_triangulation(&diff, 0.25, &config).unwrap();
    assert_eq!(d1, d1_again);
    // active phase rejected
    assert!(matches!(
        wkb_triangulation(&diff, 0.5, &config),
        Err(ScanError::ActivePhase(_))
    ));
}

#[test]
fn wkb_pentagon_for_cubic() {
    let config = ScannerConfig::default();
    let p = Poly::from_real_descending(&[1.0, 0.0, -3.0, 0.1]).unwrap();
    let diff = PolynomialDifferential::new(p, &config).unwrap();
    let records = find_saddles(&diff, (0.02, 0.98), &config).unwrap();
    let phases = wkb::saddle_phases(&records);
    assert!(!phases.is_empty());
    // generic phase inside the first gap
    let theta = 0.5 * (0.02 + phases[0]);
    let (t, diagonals) = wkb_triangulation(&diff, theta, &config).unwrap();
    assert_eq!(diagonals.len(), 2);
    t.validate(&crate::MarkedBorderedSurface::disk(5).unwrap()).unwrap();
    // constant within gaps
    assert!(wkb::wkb_constant_on_gap(&diff, (0.02, phases[0]), &config).unwrap());
}

#[test]
fn skew_via_wkb_matches_count_convention_on_a2() {
    let config = ScannerConfig::default();
    let (t_a, t_b, window) = a2_wall_pair();
    for t in [t_a, t_b] {
        let diff = PolynomialDifferential::new(a2_poly(t), &config).unwrap();
        let result = scan(&diff, window, &config).unwrap();
        let sweep = wkb::skew_via_wkb(
            &diff,
            &result.saddles,
            &result.frame.basis_records,
            window,
            &config,
            DEFAULT_ORIENTATION,
        )
        .unwrap();
        assert_eq!(
            sweep.skew_rows(),
            result.bps.lattice().skew_rows(),
            "triangulation pairing disagrees with the wall-side convention at t={t}"
        );
    }
}

#[test]
fn gauss_manin_continuation_tracks_periods() {
    let config = ScannerConfig::default();
    let (t_a, t_b, window) = a2_wall_pair();
    let p_a = a2_poly(t_a);
    let diff_a = PolynomialDifferential::new(p_a.clone(), &config).unwrap();
    let result_a = scan(&diff_a, window, &config).unwrap();
    // continue to itself along a loop of zero length: identity
    let same = continue_frame(&diff_a, &result_a.frame, &p_a, 5, &config).unwrap();
    for (a, b) in result_a.frame.periods.iter().zip(&same.periods) {
        assert!((a - b).norm() < 1e-8);
    }
    // continue across the wall and back: periods return
    let p_b = a2_poly(t_b);
    let forward = continue_frame(&diff_a, &result_a.frame, &p_b, 20, &config).unwrap();
    let diff_b = PolynomialDifferential::new(p_b.clone(), &config).unwrap();
    let back = continue_frame(&diff_b, &forward, &p_a, 20, &config).unwrap();
    for (a, b) in result_a.frame.periods.iter().zip(&back.periods) {
        assert!((a - b).norm() < 1e-7, "{a} vs {b}");
    }
    // the continued periods at the far end match the saddles measured there:
    // additivity of the period map across the wall
    let result_b = scan(&diff_b, window, &config).unwrap();
    for record in &result_b.saddles {
        let class = result_b.frame.classify(record.period, diff_b.scale(), &config).unwrap();
        // the same period must be an integer combination of the continued
        // frame as well (possibly different coordinates)
        let via_continued = forward_classify(&forward, record.period, diff_b.scale(), &config);
        assert!(via_continued.is_some(), "period {} unclassifiable", record.period);
        let _ = class;
    }
}

fn forward_classify(
    frame: &saddles::PeriodFrame,
    period: Complex64,
    scale: f64,
    config: &ScannerConfig,
) -> Option<crate::ClassVector> {
    frame.classify(period, scale, config).ok()
}
