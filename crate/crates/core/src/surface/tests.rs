use super::*;
use crate::conventions::{Orientation, DEFAULT_ORIENTATION};
use crate::lattice::ClassVector;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

#[test]
fn pentagon_fan_validates() {
    let (surface, t) = polygon_fan(5);
    assert_eq!(t.arcs(), vec!["a2".to_string(), "a3".to_string()]);
    assert_eq!(t.triangles().len(), 3);
    t.validate(&surface).unwrap();
}

#[test]
fn square_single_arc() {
    let (surface, t) = polygon_fan(4);
    t.validate(&surface).unwrap();
    let b = ExchangeMatrix::of(&t, DEFAULT_ORIENTATION).unwrap();
    assert_eq!(b.rank(), 1);
    assert_eq!(b.entry(0, 0), 0);
}

#[test]
fn arc_multiplicity_rejected() {
    let triples = vec![
        ["a".into(), "b0".into(), "b1".into()],
        ["a".into(), "b2".into(), "b3".into()],
        ["a".into(), "b4".into(), "b5".into()],
    ];
    let err = TaggedTriangulation::from_triples(triples, BTreeMap::new()).unwrap_err();
    assert!(matches!(err, SurfaceError::ArcMultiplicity { count: 3, .. }));
}

#[test]
fn closed_once_marked_torus_excluded() {
    // two triangles glued along all three edges: the once-punctured torus
    let triples = vec![
        ["a".into(), "b".into(), "c".into()],
        ["a".into(), "b".into(), "c".into()],
    ];
    let t = TaggedTriangulation::from_triples(triples, BTreeMap::new()).unwrap();
    let surface = MarkedBorderedSurface { genus: 1, boundary_marked: vec![], punctures: 1 };
    assert_eq!(t.validate(&surface), Err(SurfaceError::ExcludedSurface));
    assert_eq!(
        MarkedBorderedSurface::new(1, vec![], 1),
        Err(SurfaceError::ExcludedSurface)
    );
}

#[test]
fn pentagon_fan_exchange_matrix() {
    let (_, t) = polygon_fan(5);
    let b = ExchangeMatrix::of(&t, DEFAULT_ORIENTATION).unwrap();
    assert_eq!(b.arcs(), &["a2".to_string(), "a3".to_string()]);
    assert_eq!(b.entry(0, 1), 1);
    assert_eq!(b.entry(1, 0), -1);
    let rev = ExchangeMatrix::of(&t, Orientation::Reversed).unwrap();
    assert_eq!(rev.entry(0, 1), -1);
}

#[test]
fn annulus_exchange_matrix() {
    let (surface, t) = annulus_one_one();
    t.validate(&surface).unwrap();
    let b = ExchangeMatrix::of(&t, DEFAULT_ORIENTATION).unwrap();
    assert_eq!(b.entry(0, 1).abs(), 2);
    assert_eq!(b.entry(0, 1), -b.entry(1, 0));
}

#[test]
fn punctured_polygon_validates() {
    let (surface, t) = punctured_polygon_star(3);
    t.validate(&surface).unwrap();
    let recon = t.reconstruct().unwrap();
    assert_eq!(recon.punctures.len(), 1);
    assert_eq!(recon.arcs.len(), 3);
}

#[test]
fn flip_involutive_on_pentagon() {
    let (_, t) = polygon_fan(5);
    for arc in t.arcs() {
        let once = t.flip(&arc).unwrap();
        let twice = once.flip(&arc).unwrap();
        assert!(twice.same_as(&t), "flip of {arc} not involutive");
        assert!(!once.same_as(&t));
    }
}

#[test]
fn pentagon_flip_graph_is_five_cycle() {
    let (_, t) = polygon_fan(5);
    let (vertices, edges) = enumerate_flip_graph(&t, 100).unwrap();
    assert_eq!(vertices, 5);
    assert_eq!(edges.len(), 5);
    // every vertex has degree 2
    let mut degree = vec![0usize; vertices];
    for (a, b) in &edges {
        degree[*a] += 1;
        degree[*b] += 1;
    }
    assert!(degree.iter().all(|&d| d == 2));
}

#[test]
fn pentagon_flip_sequences() {
    let (_, t) = polygon_fan(5);
    assert_eq!(flip_sequence(&t, &t, 10).unwrap(), Some(vec![]));
    let one = t.flip(&"a2".to_string()).unwrap();
    assert_eq!(flip_sequence(&t, &one, 10).unwrap().unwrap().len(), 1);
    // opposite vertices of the 5-cycle are two flips apart
    let two = one.flip(&"a3".to_string()).unwrap();
    let d = flip_sequence(&t, &two, 10).unwrap().unwrap().len();
    assert_eq!(d, 2);
    // bound exhaustion reports not-found
    assert_eq!(flip_sequence(&t, &two, 1).unwrap(), None);
}

#[test]
fn once_punctured_triangle_tagged_flips() {
    let (surface, star) = punctured_polygon_star(3);
    // flip r1 to the chord; then flipping r0 folds the chord around p0
    let chord = star.flip(&"r1".to_string()).unwrap();
    chord.validate(&surface).unwrap();
    let folded = chord.flip(&"r0".to_string()).unwrap();
    folded.validate(&surface).unwrap();
    let recon = folded.reconstruct().unwrap();
    assert_eq!(recon.self_folded.len(), 1, "expected a self-folded triangle");
    // flipping the inner edge goes through the signed representative
    let marker = &recon.self_folded[0];
    let through = folded.flip(&marker.inner).unwrap();
    through.validate(&surface).unwrap();
    assert_eq!(through.reconstruct().unwrap().self_folded.len(), 0);
    let back = through.flip(&marker.inner).unwrap();
    assert!(back.same_as(&folded));
    // and the encircling edge unfolds directly
    let unfolded = folded.flip(&marker.encircling).unwrap();
    assert_eq!(unfolded.reconstruct().unwrap().self_folded.len(), 0);
    let refolded = unfolded.flip(&marker.encircling).unwrap();
    assert!(refolded.same_as(&folded));
}

#[test]
fn random_flips_involutive_and_bounded() {
    let mut rng = StdRng::seed_from_u64(7);
    let starts: Vec<TaggedTriangulation> = vec![
        polygon_fan(5).1,
        polygon_fan(7).1,
        annulus_one_one().1,
        punctured_polygon_star(3).1,
        punctured_polygon_star(4).1,
    ];
    for start in starts {
        let mut state = start;
        for _ in 0..60 {
            let arcs = state.arcs();
            let arc = arcs[rng.gen_range(0..arcs.len())].clone();
            let flipped = state.flip(&arc).unwrap();
            let back = flipped.flip(&arc).unwrap();
            assert!(back.same_as(&state), "flip of {arc} not involutive");
            let b = ExchangeMatrix::of(&flipped, DEFAULT_ORIENTATION).unwrap();
            assert!(b.max_abs_entry() <= 2);
            state = flipped;
        }
    }
}

#[test]
fn flips_agree_with_matrix_mutation() {
    // flipping arc k transforms the pairing matrix by the standard mutation
    // rule; this ties the adjacency count to the transformation formulas.
    let mutate = |b: &ExchangeMatrix, k: usize| -> Vec<Vec<i64>> {
        let n = b.rank();
        let mut out = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                out[i][j] = if i == k || j == k {
                    -b.entry(i, j)
                } else {
                    let bik = b.entry(i, k);
                    let bkj = b.entry(k, j);
                    b.entry(i, j)
                        + if bik > 0 { bik * bkj.max(0) } else { 0 }
                        - if bik < 0 { -bik * (-bkj).max(0) } else { 0 }
                };
            }
        }
        out
    };
    let mut rng = StdRng::seed_from_u64(11);
    for start in [polygon_fan(6).1, polygon_fan(7).1, punctured_polygon_star(4).1] {
        let mut state = start;
        for _ in 0..40 {
            let arcs = state.arcs();
            let pick = arcs[rng.gen_range(0..arcs.len())].clone();
            let b = ExchangeMatrix::of(&state, DEFAULT_ORIENTATION).unwrap();
            let k = arcs.iter().position(|a| *a == pick).unwrap();
            let flipped = state.flip(&pick).unwrap();
            let b2 = ExchangeMatrix::of(&flipped, DEFAULT_ORIENTATION).unwrap();
            // labels persist, so arc order is unchanged
            assert_eq!(b2.arcs(), b.arcs());
            let expected = mutate(&b, k);
            for i in 0..b.rank() {
                for j in 0..b.rank() {
                    assert_eq!(
                        b2.entry(i, j),
                        expected[i][j],
                        "mutation mismatch at ({i},{j}) flipping {pick}"
                    );
                }
            }
            state = flipped;
        }
    }
}

#[test]
fn euler_form_examples() {
    // one arrow 0 -> 1
    let q = Quiver { vertices: 2, arrows: vec![(0, 1)] };
    let e0 = ClassVector::unit(2, 0);
    let e1 = ClassVector::unit(2, 1);
    assert_eq!(euler_skew_form(&q, &e0, &e1).unwrap(), -1);
    assert_eq!(euler_skew_form(&q, &e0, &e0).unwrap(), 0);
    let kronecker = Quiver { vertices: 2, arrows: vec![(0, 1), (0, 1)] };
    assert_eq!(euler_skew_form(&kronecker, &e0, &e1).unwrap(), -2);
}

#[test]
fn quiver_from_matrix_examples() {
    let b = ExchangeMatrix::from_matrix(
        crate::matrix::IntMatrix::from_rows(vec![vec![0, 1], vec![-1, 0]]).unwrap(),
    )
    .unwrap();
    let q = quiver_from_matrix(&b);
    assert_eq!(q.arrows.len(), 1);
    let zero = ExchangeMatrix::from_matrix(crate::matrix::IntMatrix::identity(2)); // not antisym
    assert!(zero.is_err());
    let zero = ExchangeMatrix::from_matrix(
        crate::matrix::IntMatrix::from_rows(vec![vec![0, 0], vec![0, 0]]).unwrap(),
    )
    .unwrap();
    assert!(quiver_from_matrix(&zero).arrows.is_empty());
    let kron = ExchangeMatrix::from_matrix(
        crate::matrix::IntMatrix::from_rows(vec![vec![0, 2], vec![-2, 0]]).unwrap(),
    )
    .unwrap();
    assert_eq!(quiver_from_matrix(&kron).arrows.len(), 2);
}

#[test]
fn quiver_euler_form_matches_exchange_pairing() {
    // no 2-cycles: the quiver encoding reproduces the pairing
    for (_, t) in [polygon_fan(5), polygon_fan(6), annulus_one_one()] {
        let b = ExchangeMatrix::of(&t, DEFAULT_ORIENTATION).unwrap();
        let q = quiver_from_matrix(&b);
        let n = b.rank();
        for i in 0..n {
            for j in 0..n {
                let e_i = ClassVector::unit(n, i);
                let e_j = ClassVector::unit(n, j);
                assert_eq!(euler_skew_form(&q, &e_i, &e_j).unwrap(), b.entry(i, j));
            }
        }
    }
}

#[test]
fn json_roundtrip_of_triples() {
    let (_, t) = punctured_polygon_star(3);
    let rebuilt = TaggedTriangulation::from_triples(
        t.triples(),
        t.signing_by_name(),
    )
    .unwrap();
    assert!(rebuilt.same_as(&t));
}
