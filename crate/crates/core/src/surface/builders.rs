//! Deterministic constructors for the small test families: polygons,
//! the one-marked-point annulus, and once-punctured polygons.
//!
//! Edge triples are listed in the cyclic order that the adjacency rules of
//! [`super::ExchangeMatrix`] treat as clockwise; the polygon constructors
//! below fix that convention for the whole crate (see `conventions`).

use super::{Label, MarkedBorderedSurface, TaggedTriangulation, Triangle, VertexId};
use std::collections::BTreeMap;

fn names(n: usize, punctures: &[(VertexId, String)]) -> BTreeMap<VertexId, String> {
    let mut m: BTreeMap<VertexId, String> = (0..n).map(|i| (i, format!("v{i}"))).collect();
    for (v, name) in punctures {
        m.insert(*v, name.clone());
    }
    m
}

/// Fan triangulation of a disk with `m >= 3` boundary marked points:
/// vertices v0..v{m-1} around the boundary, all arcs based at v0.
/// Boundary segment `b{i}` joins v{i} to v{i+1}; arc `a{i}` joins v0 to v{i}.
pub fn polygon_fan(m: usize) -> (MarkedBorderedSurface, TaggedTriangulation) {
    assert!(m >= 3);
    let surface = MarkedBorderedSurface::disk(m as u32).unwrap();
    let edge = |i: usize, j: usize| -> Label {
        // the chord between vertices i < j (boundary if adjacent)
        if j == i + 1 {
            format!("b{i}")
        } else if i == 0 && j == m - 1 {
            format!("b{}", m - 1)
        } else {
            assert!(i == 0);
            format!("a{j}")
        }
    };
    let mut tris = Vec::new();
    for i in 1..m - 1 {
        // triangle v0, v_i, v_{i+1}, traversed v0 -> v_i -> v_{i+1}
        let e_left = edge(0, i);
        let e_bot = edge(i, i + 1);
        let e_right = edge(0, i + 1);
        tris.push(Triangle {
            edges: [e_left, e_bot, e_right],
            corners: [i, i + 1, 0],
        });
    }
    let t = TaggedTriangulation::from_parts(tris, BTreeMap::new(), names(m, &[]));
    (surface, t)
}

/// Annulus with one marked point on each boundary component. Vertices:
/// v0 on the outer boundary, v1 on the inner one; arcs `a0`, `a1`.
pub fn annulus_one_one() -> (MarkedBorderedSurface, TaggedTriangulation) {
    let surface = MarkedBorderedSurface::new(0, vec![1, 1], 0).unwrap();
    let a0: Label = "a0".into();
    let a1: Label = "a1".into();
    let s_out: Label = "b_out".into();
    let s_in: Label = "b_in".into();
    // Cut along a0 and a1: the two triangles of the flat strip model.
    let tris = vec![
        Triangle { edges: [a0.clone(), s_in.clone(), a1.clone()], corners: [1, 1, 0] },
        Triangle { edges: [a1.clone(), a0.clone(), s_out.clone()], corners: [1, 0, 0] },
    ];
    let t = TaggedTriangulation::from_parts(tris, BTreeMap::new(), names(2, &[]));
    (surface, t)
}

/// Once-punctured disk with `m >= 3` boundary marked points, triangulated
/// as the star of the puncture: arcs `r{i}` from v{i} to the puncture p0.
pub fn punctured_polygon_star(m: usize) -> (MarkedBorderedSurface, TaggedTriangulation) {
    assert!(m >= 3);
    let surface = MarkedBorderedSurface::new(0, vec![m as u32], 1).unwrap();
    let p: VertexId = m;
    let mut tris = Vec::new();
    for i in 0..m {
        let j = (i + 1) % m;
        // triangle v_i, v_j, p, traversed v_i -> v_j -> p
        tris.push(Triangle {
            edges: [format!("b{i}"), format!("r{j}"), format!("r{i}")],
            corners: [j, p, i],
        });
    }
    let signing = BTreeMap::from([(p, 1i8)]);
    let t = TaggedTriangulation::from_parts(tris, signing, names(m, &[(p, "p0".into())]));
    (surface, t)
}
