//! Marked bordered surfaces and tagged triangulations.
//!
//! A triangulation is stored as oriented edge triples (each triangle's edges
//! in the clockwise order induced by the surface orientation) plus a signing
//! on punctures. Corner vertices are reconstructed from the gluing, so the
//! serialized form carries only labels. Tagged triangulations are
//! represented by a signed triangulation normalized so valency-one punctures
//! carry sign +1.

mod builders;
mod exchange;
mod flips;

pub use builders::{annulus_one_one, polygon_fan, punctured_polygon_star};
pub use exchange::{euler_skew_form, quiver_from_matrix, ExchangeMatrix, Quiver};
pub use flips::{enumerate_flip_graph, flip_sequence};

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type Label = String;
pub type VertexId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum SurfaceError {
    #[error("boundary component {0} has no marked points")]
    EmptyBoundaryComponent(usize),
    #[error("a closed surface with exactly one marked point is excluded")]
    ExcludedSurface,
    #[error("arc multiplicity: edge {label} occurs in {count} triangle slots")]
    ArcMultiplicity { label: Label, count: usize },
    #[error("triangulation does not match the declared surface: {0}")]
    SurfaceMismatch(String),
    #[error("unknown arc label {0}")]
    UnknownArc(Label),
    #[error("edge {0} is a boundary segment and cannot be flipped")]
    BoundaryFlip(Label),
    #[error("signing references unknown puncture {0}")]
    UnknownPuncture(Label),
    #[error("signing value for {0} must be +1 or -1")]
    BadSign(Label),
    #[error("inconsistent self-folded data: {0}")]
    SelfFolded(String),
    #[error("triangulation is empty")]
    Empty,
}

/// Topological type of a marked bordered surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedBorderedSurface {
    pub genus: u32,
    /// Marked points on each boundary component.
    pub boundary_marked: Vec<u32>,
    pub punctures: u32,
}

impl MarkedBorderedSurface {
    pub fn new(
        genus: u32,
        boundary_marked: Vec<u32>,
        punctures: u32,
    ) -> Result<Self, SurfaceError> {
        for (i, &m) in boundary_marked.iter().enumerate() {
            if m == 0 {
                return Err(SurfaceError::EmptyBoundaryComponent(i));
            }
        }
        let total_marked: u32 = boundary_marked.iter().sum::<u32>() + punctures;
        if boundary_marked.is_empty() && total_marked == 1 {
            return Err(SurfaceError::ExcludedSurface);
        }
        Ok(MarkedBorderedSurface { genus, boundary_marked, punctures })
    }

    pub fn disk(marked: u32) -> Result<Self, SurfaceError> {
        Self::new(0, vec![marked], 0)
    }
}

/// One triangle: edge labels in clockwise order; `corners[i]` is the vertex
/// between `edges[i]` and `edges[(i+1) % 3]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    pub edges: [Label; 3],
    pub corners: [VertexId; 3],
}

/// A signed triangulation representing a tagged triangulation.
#[derive(Debug, Clone)]
pub struct TaggedTriangulation {
    pub(crate) tris: Vec<Triangle>,
    /// Signs on punctures, keyed by vertex id.
    pub(crate) signing: BTreeMap<VertexId, i8>,
    /// Printable vertex names (stable across flips within one object).
    pub(crate) vertex_names: BTreeMap<VertexId, String>,
}

/// A self-folded triangle's inner and encircling edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfFoldedMarker {
    pub triangle: usize,
    pub inner: Label,
    pub encircling: Label,
    pub puncture: VertexId,
}

/// Combinatorial facts reconstructed from the gluing.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub arcs: Vec<Label>,
    pub boundary_segments: Vec<Label>,
    pub vertex_count: usize,
    pub boundary_cycles: Vec<Vec<Label>>,
    /// Vertices not on any boundary cycle.
    pub punctures: Vec<VertexId>,
    /// Arc-end valency per vertex.
    pub valency: BTreeMap<VertexId, usize>,
    pub self_folded: Vec<SelfFoldedMarker>,
    pub genus: i64,
}

impl TaggedTriangulation {
    /// Build from bare edge triples: corners are reconstructed from the
    /// gluing, boundary vertices named `v0, v1, ...` per boundary walk and
    /// punctures `p0, p1, ...` ordered by their smallest incident edge label.
    pub fn from_triples(
        triples: Vec<[Label; 3]>,
        signing: BTreeMap<Label, i8>,
    ) -> Result<Self, SurfaceError> {
        if triples.is_empty() {
            return Err(SurfaceError::Empty);
        }
        let slots = collect_slots(&triples)?;
        // Union-find over corners: corner (t, i) carries the head vertex of
        // the half-edge at slot (t, i).
        let n_corners = triples.len() * 3;
        let mut uf = UnionFind::new(n_corners);
        for (label, slot_list) in &slots {
            if slot_list.len() == 2 {
                let (t1, i1) = slot_list[0];
                let (t2, i2) = slot_list[1];
                // head of one traversal is the tail of the other
                uf.union(corner_index(t1, i1), corner_index(t2, (i2 + 2) % 3));
                uf.union(corner_index(t2, i2), corner_index(t1, (i1 + 2) % 3));
            }
            let _ = label;
        }
        let mut tris = Vec::with_capacity(triples.len());
        for (t, triple) in triples.iter().enumerate() {
            let corners = [
                uf.find(corner_index(t, 0)),
                uf.find(corner_index(t, 1)),
                uf.find(corner_index(t, 2)),
            ];
            tris.push(Triangle { edges: triple.clone(), corners });
        }
        let mut tri = TaggedTriangulation {
            tris,
            signing: BTreeMap::new(),
            vertex_names: BTreeMap::new(),
        };
        tri.compact_vertices();
        tri.assign_names()?;
        // signing comes keyed by printable puncture names
        let name_to_vertex: BTreeMap<String, VertexId> =
            tri.vertex_names.iter().map(|(v, n)| (n.clone(), *v)).collect();
        let recon = tri.reconstruct()?;
        for (name, sign) in signing {
            if sign != 1 && sign != -1 {
                return Err(SurfaceError::BadSign(name));
            }
            let v = *name_to_vertex
                .get(&name)
                .ok_or_else(|| SurfaceError::UnknownPuncture(name.clone()))?;
            if !recon.punctures.contains(&v) {
                return Err(SurfaceError::UnknownPuncture(name));
            }
            tri.signing.insert(v, sign);
        }
        for &p in &recon.punctures {
            tri.signing.entry(p).or_insert(1);
        }
        tri.normalize();
        Ok(tri)
    }

    /// Internal constructor for builders that already know the corners.
    pub(crate) fn from_parts(
        tris: Vec<Triangle>,
        signing: BTreeMap<VertexId, i8>,
        vertex_names: BTreeMap<VertexId, String>,
    ) -> Self {
        let mut t = TaggedTriangulation { tris, signing, vertex_names };
        t.normalize();
        t
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.tris
    }

    pub fn triples(&self) -> Vec<[Label; 3]> {
        self.tris.iter().map(|t| t.edges.clone()).collect()
    }

    pub fn signing_by_name(&self) -> BTreeMap<String, i8> {
        self.signing
            .iter()
            .map(|(v, s)| (self.vertex_name(*v), *s))
            .collect()
    }

    pub fn vertex_name(&self, v: VertexId) -> String {
        self.vertex_names.get(&v).cloned().unwrap_or_else(|| format!("v?{v}"))
    }

    /// Internal arcs, sorted by label.
    pub fn arcs(&self) -> Vec<Label> {
        let slots = collect_slots(&self.triples()).expect("validated");
        let mut arcs: Vec<Label> = slots
            .iter()
            .filter(|(_, s)| s.len() == 2)
            .map(|(l, _)| l.clone())
            .collect();
        arcs.sort();
        arcs
    }

    pub fn boundary_segments(&self) -> Vec<Label> {
        let slots = collect_slots(&self.triples()).expect("validated");
        let mut bs: Vec<Label> = slots
            .iter()
            .filter(|(_, s)| s.len() == 1)
            .map(|(l, _)| l.clone())
            .collect();
        bs.sort();
        bs
    }

    fn compact_vertices(&mut self) {
        let mut remap: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for t in &self.tris {
            for &c in &t.corners {
                let next = remap.len();
                remap.entry(c).or_insert(next);
            }
        }
        for t in &mut self.tris {
            for c in &mut t.corners {
                *c = remap[c];
            }
        }
        self.signing = self.signing.iter().map(|(v, s)| (remap[v], *s)).collect();
        self.vertex_names =
            self.vertex_names.iter().filter_map(|(v, n)| Some((*remap.get(v)?, n.clone()))).collect();
    }

    fn assign_names(&mut self) -> Result<(), SurfaceError> {
        let recon = self.reconstruct()?;
        self.vertex_names.clear();
        let mut counter = 0usize;
        // boundary vertices in boundary-walk order
        for cycle in &recon.boundary_cycles {
            for label in cycle {
                // head vertex of this boundary segment's unique slot
                let (t, i) = self.slot_of(label).expect("boundary label exists");
                let v = self.tris[t].corners[i];
                self.vertex_names.entry(v).or_insert_with(|| {
                    let name = format!("v{counter}");
                    name
                });
                counter += 1;
            }
        }
        // punctures ordered by smallest incident edge label
        let mut punctures: Vec<(Label, VertexId)> = recon
            .punctures
            .iter()
            .map(|&p| {
                let mut best: Option<Label> = None;
                for t in &self.tris {
                    for i in 0..3 {
                        if t.corners[i] == p {
                            for e in &t.edges {
                                if best.as_ref().map_or(true, |b| e < b) {
                                    best = Some(e.clone());
                                }
                            }
                        }
                    }
                }
                (best.unwrap_or_default(), p)
            })
            .collect();
        punctures.sort();
        for (i, (_, p)) in punctures.iter().enumerate() {
            self.vertex_names.insert(*p, format!("p{i}"));
        }
        Ok(())
    }

    fn slot_of(&self, label: &Label) -> Option<(usize, usize)> {
        for (t, tri) in self.tris.iter().enumerate() {
            for i in 0..3 {
                if &tri.edges[i] == label {
                    return Some((t, i));
                }
            }
        }
        None
    }

    pub(crate) fn all_slots(&self, label: &Label) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, tri) in self.tris.iter().enumerate() {
            for i in 0..3 {
                if &tri.edges[i] == label {
                    out.push((t, i));
                }
            }
        }
        out
    }

    /// Reconstruct vertex/boundary/self-folded structure from the stored
    /// triangles.
    pub fn reconstruct(&self) -> Result<Reconstruction, SurfaceError> {
        let triples = self.triples();
        let slots = collect_slots(&triples)?;
        let mut arcs = Vec::new();
        let mut boundary = Vec::new();
        for (label, s) in &slots {
            match s.len() {
                1 => boundary.push(label.clone()),
                2 => arcs.push(label.clone()),
                n => return Err(SurfaceError::ArcMultiplicity { label: label.clone(), count: n }),
            }
        }
        arcs.sort();
        boundary.sort();

        let vertices: BTreeSet<VertexId> =
            self.tris.iter().flat_map(|t| t.corners.iter().copied()).collect();

        // boundary walks: each boundary slot's head must be the tail of a
        // unique next boundary slot
        let boundary_slots: Vec<(Label, usize, usize)> = boundary
            .iter()
            .map(|l| {
                let (t, i) = self.slot_of(l).unwrap();
                (l.clone(), t, i)
            })
            .collect();
        let mut cycles: Vec<Vec<Label>> = Vec::new();
        let mut used: BTreeSet<Label> = BTreeSet::new();
        for (start_label, _, _) in &boundary_slots {
            if used.contains(start_label) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut current = start_label.clone();
            loop {
                used.insert(current.clone());
                cycle.push(current.clone());
                let (t, i) = self.slot_of(&current).unwrap();
                let head = self.tris[t].corners[i];
                // the unique boundary slot whose tail is this head
                let next = boundary_slots.iter().find(|(_, t2, i2)| {
                    self.tris[*t2].corners[(i2 + 2) % 3] == head
                });
                match next {
                    Some((l, _, _)) if l == start_label || used.contains(l) => break,
                    Some((l, _, _)) => current = l.clone(),
                    None => break,
                }
            }
            cycles.push(cycle);
        }

        let boundary_vertices: BTreeSet<VertexId> = boundary_slots
            .iter()
            .flat_map(|(_, t, i)| {
                [self.tris[*t].corners[*i], self.tris[*t].corners[(i + 2) % 3]]
            })
            .collect();
        let punctures: Vec<VertexId> =
            vertices.iter().copied().filter(|v| !boundary_vertices.contains(v)).collect();

        // arc-end valencies
        let mut valency: BTreeMap<VertexId, usize> = BTreeMap::new();
        for v in &vertices {
            valency.insert(*v, 0);
        }
        for label in &arcs {
            let all = self.all_slots(label);
            let (t, i) = all[0];
            let head = self.tris[t].corners[i];
            let tail = self.tris[t].corners[(i + 2) % 3];
            *valency.get_mut(&head).unwrap() += 1;
            *valency.get_mut(&tail).unwrap() += 1;
        }

        // self-folded triangles: a repeated edge label in one triple
        let mut self_folded = Vec::new();
        for (t, tri) in self.tris.iter().enumerate() {
            let e = &tri.edges;
            let repeated = if e[0] == e[1] {
                Some((0, 2))
            } else if e[1] == e[2] {
                Some((1, 0))
            } else if e[0] == e[2] {
                Some((2, 1))
            } else {
                None
            };
            if let Some((first_slot, other)) = repeated {
                let inner = e[first_slot].clone();
                let encircling = e[other].clone();
                if inner == encircling {
                    return Err(SurfaceError::SelfFolded(format!(
                        "triangle {t} repeats a single label three times"
                    )));
                }
                // corner between the two inner slots
                let puncture = tri.corners[first_slot];
                self_folded.push(SelfFoldedMarker { triangle: t, inner, encircling, puncture });
            }
        }

        let v = vertices.len() as i64;
        let e = (arcs.len() + boundary.len()) as i64;
        let f = self.tris.len() as i64;
        let chi = v - e + f;
        let b = cycles.len() as i64;
        // chi = 2 - 2g - b
        let genus = (2 - b - chi) / 2;

        Ok(Reconstruction {
            arcs,
            boundary_segments: boundary,
            vertex_count: vertices.len(),
            boundary_cycles: cycles,
            punctures,
            valency,
            self_folded,
            genus,
        })
    }

    /// Check the triangulation against a declared surface type.
    pub fn validate(&self, surface: &MarkedBorderedSurface) -> Result<(), SurfaceError> {
        let recon = self.reconstruct()?;
        let total_marked =
            surface.boundary_marked.iter().sum::<u32>() + surface.punctures;
        if surface.boundary_marked.is_empty() && total_marked == 1 {
            return Err(SurfaceError::ExcludedSurface);
        }
        if recon.boundary_cycles.is_empty() && recon.vertex_count == 1 {
            return Err(SurfaceError::ExcludedSurface);
        }
        if recon.genus < 0 {
            return Err(SurfaceError::SurfaceMismatch(format!(
                "negative reconstructed genus {}",
                recon.genus
            )));
        }
        if recon.genus as u32 != surface.genus {
            return Err(SurfaceError::SurfaceMismatch(format!(
                "genus {} vs declared {}",
                recon.genus, surface.genus
            )));
        }
        let mut counts: Vec<u32> =
            recon.boundary_cycles.iter().map(|c| c.len() as u32).collect();
        counts.sort_unstable();
        let mut declared = surface.boundary_marked.clone();
        declared.sort_unstable();
        if counts != declared {
            return Err(SurfaceError::SurfaceMismatch(format!(
                "boundary marked points {counts:?} vs declared {declared:?}"
            )));
        }
        if recon.punctures.len() as u32 != surface.punctures {
            return Err(SurfaceError::SurfaceMismatch(format!(
                "{} punctures vs declared {}",
                recon.punctures.len(),
                surface.punctures
            )));
        }
        for marker in &recon.self_folded {
            let val = recon.valency[&marker.puncture];
            if val != 1 {
                return Err(SurfaceError::SelfFolded(format!(
                    "enclosed vertex of {} has valency {val}",
                    marker.inner
                )));
            }
        }
        for v in self.signing.keys() {
            if !recon.punctures.contains(v) {
                return Err(SurfaceError::UnknownPuncture(self.vertex_name(*v)));
            }
        }
        Ok(())
    }

    /// Canonicalize the signed representative: valency-one punctures carry
    /// sign +1; flipping such a sign exchanges the roles (and labels) of the
    /// inner and encircling edges of its self-folded triangle.
    pub(crate) fn normalize(&mut self) {
        let recon = match self.reconstruct() {
            Ok(r) => r,
            Err(_) => return,
        };
        let mut swaps: Vec<(Label, Label)> = Vec::new();
        for marker in &recon.self_folded {
            let sign = self.signing.get(&marker.puncture).copied().unwrap_or(1);
            if recon.valency[&marker.puncture] == 1 && sign == -1 {
                self.signing.insert(marker.puncture, 1);
                swaps.push((marker.inner.clone(), marker.encircling.clone()));
            }
        }
        for (a, b) in swaps {
            self.swap_labels(&a, &b);
        }
    }

    pub(crate) fn swap_labels(&mut self, a: &Label, b: &Label) {
        for t in &mut self.tris {
            for e in &mut t.edges {
                if e == a {
                    *e = b.clone();
                } else if e == b {
                    *e = a.clone();
                }
            }
        }
    }

    /// Label-sensitive structural equality of normalized representatives.
    pub fn same_as(&self, other: &TaggedTriangulation) -> bool {
        canonical_multiset(self) == canonical_multiset(other)
    }
}

fn canonical_multiset(t: &TaggedTriangulation) -> (Vec<[Label; 3]>, BTreeMap<String, i8>) {
    let mut tris: Vec<[Label; 3]> = t
        .triples()
        .into_iter()
        .map(|e| min_rotation(&e))
        .collect();
    tris.sort();
    let signing = t
        .signing
        .iter()
        .filter(|(_, &s)| s == -1)
        .map(|(v, s)| (t.vertex_name(*v), *s))
        .collect();
    (tris, signing)
}

pub(crate) fn min_rotation(e: &[Label; 3]) -> [Label; 3] {
    let r0 = e.clone();
    let r1 = [e[1].clone(), e[2].clone(), e[0].clone()];
    let r2 = [e[2].clone(), e[0].clone(), e[1].clone()];
    let mut best = r0;
    if r1 < best {
        best = r1;
    }
    if r2 < best {
        best = r2;
    }
    best
}

fn corner_index(t: usize, i: usize) -> usize {
    t * 3 + i
}

fn collect_slots(
    triples: &[[Label; 3]],
) -> Result<BTreeMap<Label, Vec<(usize, usize)>>, SurfaceError> {
    let mut slots: BTreeMap<Label, Vec<(usize, usize)>> = BTreeMap::new();
    for (t, triple) in triples.iter().enumerate() {
        for (i, label) in triple.iter().enumerate() {
            slots.entry(label.clone()).or_default().push((t, i));
        }
    }
    for (label, s) in &slots {
        if s.len() > 2 {
            return Err(SurfaceError::ArcMultiplicity { label: label.clone(), count: s.len() });
        }
    }
    Ok(slots)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests;
