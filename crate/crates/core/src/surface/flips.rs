//! Flips of tagged arcs and breadth-first search on the flip graph.

use super::{min_rotation, Label, SurfaceError, TaggedTriangulation, Triangle};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

impl TaggedTriangulation {
    /// Flip the tagged arc `k`. The replacing arc inherits the label `k`, so
    /// flip sequences can be replayed by label. Flipping the inner edge of a
    /// self-folded triangle is performed on the equivalent signed
    /// representative (flip the encircling edge, invert the enclosed
    /// puncture's sign, exchange the two labels).
    pub fn flip(&self, k: &Label) -> Result<TaggedTriangulation, SurfaceError> {
        let slots = self.all_slots(k);
        match slots.len() {
            0 => return Err(SurfaceError::UnknownArc(k.clone())),
            1 => return Err(SurfaceError::BoundaryFlip(k.clone())),
            2 => {}
            n => return Err(SurfaceError::ArcMultiplicity { label: k.clone(), count: n }),
        }
        let (t1, i1) = slots[0];
        let (t2, i2) = slots[1];
        let mut out = self.clone();
        if t1 == t2 {
            // inner edge of a self-folded triangle
            let tri = &self.tris[t1];
            let other = (0..3).find(|&i| tri.edges[i] != *k).ok_or_else(|| {
                SurfaceError::SelfFolded(format!("triangle {t1} repeats {k} three times"))
            })?;
            let encircling = tri.edges[other].clone();
            // enclosed puncture = corner between the two inner slots
            let puncture_slot = (0..3)
                .find(|&i| tri.edges[i] == *k && tri.edges[(i + 1) % 3] == *k)
                .expect("adjacent repeated slots");
            let puncture = tri.corners[puncture_slot];
            out = out.generic_flip(&encircling)?;
            let sign = out.signing.get(&puncture).copied().unwrap_or(1);
            out.signing.insert(puncture, -sign);
            out.swap_labels(k, &encircling);
        } else {
            let _ = (i1, i2);
            out = out.generic_flip(k)?;
        }
        out.normalize();
        Ok(out)
    }

    /// Quadrilateral surgery on the two distinct triangles containing `k`.
    fn generic_flip(&self, k: &Label) -> Result<TaggedTriangulation, SurfaceError> {
        let slots = self.all_slots(k);
        let (t1, i1) = slots[0];
        let (t2, i2) = slots[1];
        debug_assert_ne!(t1, t2);
        let rot1 = rotate_last(&self.tris[t1], i1);
        let rot2 = rotate_last(&self.tris[t2], i2);
        // rot1 = (a, b, k) with corners [P1, Q2, Q0]; rot2 = (c, d, k) with
        // corners [P3, Q0, Q2]; the shared corners must match up.
        debug_assert_eq!(rot1.corners[1], rot2.corners[2], "gluing mismatch at {k}");
        debug_assert_eq!(rot1.corners[2], rot2.corners[1], "gluing mismatch at {k}");
        let (a, b) = (rot1.edges[0].clone(), rot1.edges[1].clone());
        let (c, d) = (rot2.edges[0].clone(), rot2.edges[1].clone());
        let (p1, q2, q0) = (rot1.corners[0], rot1.corners[1], rot1.corners[2]);
        let p3 = rot2.corners[0];
        let mut out = self.clone();
        out.tris[t1] = Triangle { edges: [b, c, k.clone()], corners: [q2, p3, p1] };
        out.tris[t2] = Triangle { edges: [d, a, k.clone()], corners: [q0, p1, p3] };
        Ok(out)
    }
}

fn rotate_last(t: &Triangle, slot: usize) -> Triangle {
    // rotate so the given slot becomes position 2
    let shift = (slot + 1) % 3;
    Triangle {
        edges: [
            t.edges[shift].clone(),
            t.edges[(shift + 1) % 3].clone(),
            t.edges[(shift + 2) % 3].clone(),
        ],
        corners: [t.corners[shift], t.corners[(shift + 1) % 3], t.corners[(shift + 2) % 3]],
    }
}

/// Key identifying a tagged triangulation up to renaming of its internal
/// arcs (boundary labels stay fixed). Signs are attached to the renamed
/// labels of the arcs incident to each negatively signed puncture, which
/// pins them without trusting vertex numbering across objects.
fn canonical_key(t: &TaggedTriangulation) -> String {
    let arcs = t.arcs();
    let mut best: Option<String> = None;
    let perms = permutations(arcs.len());
    for perm in &perms {
        let rename: BTreeMap<&Label, String> =
            arcs.iter().enumerate().map(|(i, a)| (a, format!("#{}", perm[i]))).collect();
        let map_label = |l: &Label| -> String {
            rename.get(l).cloned().unwrap_or_else(|| l.clone())
        };
        let mut tris: Vec<[String; 3]> = t
            .tris
            .iter()
            .map(|tri| {
                min_rotation(&[
                    map_label(&tri.edges[0]),
                    map_label(&tri.edges[1]),
                    map_label(&tri.edges[2]),
                ])
            })
            .collect();
        tris.sort();
        let mut neg: Vec<String> = Vec::new();
        for (v, s) in &t.signing {
            if *s == -1 {
                let mut incident: BTreeSet<String> = BTreeSet::new();
                for tri in &t.tris {
                    for i in 0..3 {
                        let head = tri.corners[i];
                        let tail = tri.corners[(i + 2) % 3];
                        if head == *v || tail == *v {
                            incident.insert(map_label(&tri.edges[i]));
                        }
                    }
                }
                neg.push(format!("{incident:?}"));
            }
        }
        neg.sort();
        let key = format!("{tris:?}|{neg:?}");
        if best.as_ref().map_or(true, |b| key < *b) {
            best = Some(key);
        }
    }
    best.unwrap_or_default()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..n {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Breadth-first search for a shortest flip sequence taking `from` to `to`
/// (compared up to arc relabeling). Ties are broken by flipping arcs in
/// lexicographic label order. Returns `None` when no sequence of at most
/// `bound` flips works.
pub fn flip_sequence(
    from: &TaggedTriangulation,
    to: &TaggedTriangulation,
    bound: usize,
) -> Result<Option<Vec<Label>>, SurfaceError> {
    let target = canonical_key(to);
    if canonical_key(from) == target {
        return Ok(Some(Vec::new()));
    }
    let mut seen: BTreeSet<String> = BTreeSet::new();
    seen.insert(canonical_key(from));
    let mut queue: VecDeque<(TaggedTriangulation, Vec<Label>)> = VecDeque::new();
    queue.push_back((from.clone(), Vec::new()));
    while let Some((state, path)) = queue.pop_front() {
        if path.len() >= bound {
            continue;
        }
        for arc in state.arcs() {
            let next = state.flip(&arc)?;
            let key = canonical_key(&next);
            let mut next_path = path.clone();
            next_path.push(arc);
            if key == target {
                return Ok(Some(next_path));
            }
            if seen.insert(key) {
                queue.push_back((next, next_path));
            }
        }
    }
    Ok(None)
}

/// Exhaustively enumerate the flip graph component of `start`:
/// returns (number of vertices, adjacency as index pairs). Aborts via error
/// once more than `cap` vertices appear.
pub fn enumerate_flip_graph(
    start: &TaggedTriangulation,
    cap: usize,
) -> Result<(usize, Vec<(usize, usize)>), SurfaceError> {
    let mut keys: BTreeMap<String, usize> = BTreeMap::new();
    let mut states: Vec<TaggedTriangulation> = Vec::new();
    keys.insert(canonical_key(start), 0);
    states.push(start.clone());
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut frontier = vec![0usize];
    while let Some(idx) = frontier.pop() {
        let state = states[idx].clone();
        for arc in state.arcs() {
            let next = state.flip(&arc)?;
            let key = canonical_key(&next);
            let j = match keys.get(&key) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    if j >= cap {
                        return Err(SurfaceError::SurfaceMismatch(format!(
                            "flip graph exceeds cap {cap}"
                        )));
                    }
                    keys.insert(key, j);
                    states.push(next);
                    frontier.push(j);
                    j
                }
            };
            if idx != j {
                edges.insert((idx.min(j), idx.max(j)));
            }
        }
    }
    Ok((states.len(), edges.into_iter().collect()))
}
