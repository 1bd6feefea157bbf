//! Exchange matrices from triangle adjacency, quivers, and the
//! skew-symmetrized Euler form.

use super::{SurfaceError, TaggedTriangulation};
use crate::conventions::Orientation;
use crate::lattice::{ClassLattice, ClassVector, LatticeError};
use crate::matrix::IntMatrix;

/// The antisymmetric pairing matrix of a tagged triangulation over its
/// internal arcs (sorted by label): `entry(i, j)` is the pairing of the
/// classes attached to arcs i and j.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeMatrix {
    arcs: Vec<super::Label>,
    b: IntMatrix,
}

impl ExchangeMatrix {
    /// Adjacency count: for each non-self-folded triangle, an ordered pair
    /// of edges contributes +1 when the second follows the first in the
    /// stored cyclic order (and -1 the other way around), with self-folded
    /// inner edges replaced by their encircling edge first.
    pub fn of(
        t: &TaggedTriangulation,
        orientation: Orientation,
    ) -> Result<ExchangeMatrix, SurfaceError> {
        let recon = t.reconstruct()?;
        let arcs = recon.arcs.clone();
        let n = arcs.len();
        let index = |label: &super::Label| arcs.iter().position(|a| a == label);
        // inner self-folded edge -> encircling edge
        let project = |label: &super::Label| -> super::Label {
            for m in &recon.self_folded {
                if &m.inner == label {
                    return m.encircling.clone();
                }
            }
            label.clone()
        };
        let projected: Vec<super::Label> = arcs.iter().map(project).collect();
        let mut b = IntMatrix::identity(n);
        for i in 0..n {
            b.set(i, i, 0);
        }
        let self_folded_tris: Vec<usize> =
            recon.self_folded.iter().map(|m| m.triangle).collect();
        for (ti, tri) in t.tris.iter().enumerate() {
            if self_folded_tris.contains(&ti) {
                continue;
            }
            for a in 0..3 {
                let first = &tri.edges[a];
                let second = &tri.edges[(a + 1) % 3];
                if first == second {
                    continue;
                }
                for i in 0..n {
                    if &projected[i] != first {
                        continue;
                    }
                    for j in 0..n {
                        if &projected[j] != second || i == j {
                            continue;
                        }
                        // second follows first: contributes to <gamma_j, gamma_i>
                        b.set(j, i, b.get(j, i) + 1);
                        b.set(i, j, b.get(i, j) - 1);
                    }
                }
            }
        }
        if orientation == Orientation::Reversed {
            for i in 0..n {
                for j in 0..n {
                    if i < j {
                        let v = b.get(i, j);
                        b.set(i, j, -v);
                        b.set(j, i, v);
                    }
                }
            }
        }
        let _ = index;
        Ok(ExchangeMatrix { arcs, b })
    }

    pub fn from_matrix(m: IntMatrix) -> Result<ExchangeMatrix, LatticeError> {
        // validated through the lattice constructor
        let lattice = ClassLattice::new(m.size(), m.rows())?;
        let arcs = (0..m.size()).map(|i| format!("a{i}")).collect();
        let _ = lattice;
        Ok(ExchangeMatrix { arcs, b: m })
    }

    pub fn arcs(&self) -> &[super::Label] {
        &self.arcs
    }

    pub fn rank(&self) -> usize {
        self.arcs.len()
    }

    /// Pairing of the classes attached to arcs `i` and `j`.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.b.get(i, j)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.b
    }

    /// The lattice carrying this pairing.
    pub fn lattice(&self) -> ClassLattice {
        ClassLattice::new(self.rank(), self.b.rows()).expect("antisymmetric by construction")
    }

    pub fn max_abs_entry(&self) -> i64 {
        let n = self.rank();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.b.get(i, j).abs())
            .max()
            .unwrap_or(0)
    }
}

/// A directed multigraph on lattice basis indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: usize,
    /// (source, target) with multiplicity given by repetition.
    pub arrows: Vec<(usize, usize)>,
}

/// Arrows from positive pairing entries: `entry(j, i) > 0` yields that many
/// arrows i -> j, so the skew Euler form of the quiver reproduces the
/// pairing.
pub fn quiver_from_matrix(b: &ExchangeMatrix) -> Quiver {
    let n = b.rank();
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let m = b.entry(j, i);
            for _ in 0..m.max(0) {
                arrows.push((i, j));
            }
        }
    }
    Quiver { vertices: n, arrows }
}

/// Skew-symmetrized Euler pairing of a quiver:
/// (a, b) = sum_i a_i b_i - sum_{arrows i->j} a_i b_j, antisymmetrized.
pub fn euler_skew_form(
    q: &Quiver,
    a: &ClassVector,
    b: &ClassVector,
) -> Result<i64, LatticeError> {
    if a.0.len() != q.vertices || b.0.len() != q.vertices {
        return Err(LatticeError::DimensionMismatch {
            rank: q.vertices,
            len: a.0.len().max(b.0.len()),
        });
    }
    let form = |x: &ClassVector, y: &ClassVector| -> i64 {
        let diag: i64 = x.0.iter().zip(&y.0).map(|(p, q)| p * q).sum();
        let arrows: i64 = q.arrows.iter().map(|&(i, j)| x.0[i] * y.0[j]).sum();
        diag - arrows
    };
    Ok(form(a, b) - form(b, a))
}
