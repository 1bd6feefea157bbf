//! Substitution automorphisms of a truncated torus algebra: a unimodular
//! lattice part A and one unit-constant multiplier series per basis
//! direction, acting on characters by x^g -> x^{Ag} * prod_i F_i^{g_i}.
//!
//! Maps are stored by this action (the pullback on characters). Composition
//! `compose(f, g)` returns f o g as maps of the torus, i.e. the substitution
//! of g applied after the substitution of f on characters.

use crate::matrix::{IntMatrix, MatrixError};
use crate::series::{ConeSeries, Monomial, SeriesError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("lattice part must be unimodular (det {det})")]
    NotUnimodular { det: i64 },
    #[error("expected {expected} multipliers, got {got}")]
    MultiplierCount { expected: usize, got: usize },
    #[error("multiplier {index} has constant term {term}, expected 1")]
    MultiplierNotUnit { index: usize, term: String },
    #[error("maps have different ranks: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("maps have different truncation degrees: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error(
        "composition would re-expand a multiplier through a lattice part that \
         does not preserve the positive cone"
    )]
    ConeUnsafe,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Where two maps first disagree, for readable certificates.
#[derive(Debug, Clone, PartialEq)]
pub enum MapDifference {
    LatticePart { column: usize, left: Vec<i64>, right: Vec<i64> },
    Multiplier { index: usize, exponent: Monomial, left: String, right: String },
}

impl std::fmt::Display for MapDifference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MapDifference::LatticePart { column, left, right } => write!(
                f,
                "lattice parts differ on basis vector {column}: {left:?} vs {right:?}"
            ),
            MapDifference::Multiplier { index, exponent, left, right } => write!(
                f,
                "multiplier {index} differs at exponent {exponent:?}: {left} vs {right}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BirationalTorusMap {
    lattice_part: IntMatrix,
    multipliers: Vec<ConeSeries>,
    degree: u32,
}

impl BirationalTorusMap {
    pub fn new(
        lattice_part: IntMatrix,
        multipliers: Vec<ConeSeries>,
        degree: u32,
    ) -> Result<Self, MapError> {
        let n = lattice_part.size();
        let det = lattice_part.det();
        if det != 1 && det != -1 {
            return Err(MapError::NotUnimodular { det });
        }
        if multipliers.len() != n {
            return Err(MapError::MultiplierCount { expected: n, got: multipliers.len() });
        }
        for (i, m) in multipliers.iter().enumerate() {
            if m.rank() != n {
                return Err(MapError::RankMismatch(n, m.rank()));
            }
            if m.degree() != degree {
                return Err(MapError::DegreeMismatch(degree, m.degree()));
            }
            if !m.has_unit_constant_term() {
                return Err(MapError::MultiplierNotUnit {
                    index: i,
                    term: m.constant_term().to_string(),
                });
            }
        }
        Ok(BirationalTorusMap { lattice_part, multipliers, degree })
    }

    pub fn identity(rank: usize, degree: u32) -> Self {
        BirationalTorusMap {
            lattice_part: IntMatrix::identity(rank),
            multipliers: (0..rank).map(|_| ConeSeries::one(rank, degree)).collect(),
            degree,
        }
    }

    /// Pure monomial substitution x^g -> x^{Mg}.
    pub fn from_lattice(m: IntMatrix, degree: u32) -> Result<Self, MapError> {
        let n = m.size();
        Self::new(m, (0..n).map(|_| ConeSeries::one(n, degree)).collect(), degree)
    }

    pub fn rank(&self) -> usize {
        self.lattice_part.size()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn lattice_part(&self) -> &IntMatrix {
        &self.lattice_part
    }

    pub fn multipliers(&self) -> &[ConeSeries] {
        &self.multipliers
    }

    pub fn is_identity(&self) -> bool {
        self.lattice_part.is_identity()
            && self.multipliers.iter().all(|m| *m == ConeSeries::one(self.rank(), self.degree))
    }

    pub fn has_trivial_multipliers(&self) -> bool {
        self.multipliers.iter().all(|m| *m == ConeSeries::one(self.rank(), self.degree))
    }

    /// prod_i F_i^{p_i} for an integer exponent vector p.
    pub fn multiplier_product(&self, powers: &[i64]) -> Result<ConeSeries, MapError> {
        let mut acc = ConeSeries::one(self.rank(), self.degree);
        for (i, &p) in powers.iter().enumerate() {
            if p != 0 {
                acc = acc.mul(&self.multipliers[i].pow_unit(p)?)?;
            }
        }
        Ok(acc)
    }

    /// Action on the character of class g: returns (Ag, prod F_i^{g_i}).
    pub fn apply_class(&self, g: &[i64]) -> Result<(Vec<i64>, ConeSeries), MapError> {
        let image = self.lattice_part.mul_vec(g)?;
        let tail = self.multiplier_product(g)?;
        Ok((image, tail))
    }

    /// Push a cone series through the substitution. Exact at the shared
    /// truncation only when the lattice part preserves the positive cone
    /// (every column non-negative), which makes total degree non-decreasing.
    fn apply_series(&self, s: &ConeSeries) -> Result<ConeSeries, MapError> {
        let n = self.rank();
        let mut out = ConeSeries::zero(n, self.degree);
        for (mono, coeff) in s.terms() {
            let g: Vec<i64> = mono.iter().map(|&e| e as i64).collect();
            let (image, tail) = self.apply_class(&g)?;
            let exps: Option<Monomial> =
                image.iter().map(|&c| u32::try_from(c).ok()).collect();
            let exps = exps.ok_or(MapError::ConeUnsafe)?;
            let term = ConeSeries::monomial(n, self.degree, exps)?.scale(coeff);
            out = out.add(&term.mul(&tail)?)?;
        }
        Ok(out)
    }

    fn preserves_cone(&self) -> bool {
        let n = self.rank();
        (0..n).all(|j| self.lattice_part.column(j).iter().all(|&c| c >= 0))
    }

    /// f.compose(g) = f o g (apply g to a point first, then f). On
    /// characters, f's substitution applies first and g's substitution is
    /// pushed through the result.
    ///
    /// Valid when g's lattice part preserves the cone, or when f has trivial
    /// multipliers (pure monomial relabelings compose with anything).
    pub fn compose(&self, g: &BirationalTorusMap) -> Result<BirationalTorusMap, MapError> {
        let f = self;
        if f.rank() != g.rank() {
            return Err(MapError::RankMismatch(f.rank(), g.rank()));
        }
        if f.degree != g.degree {
            return Err(MapError::DegreeMismatch(f.degree, g.degree));
        }
        let n = f.rank();
        if !f.has_trivial_multipliers() && !g.preserves_cone() {
            return Err(MapError::ConeUnsafe);
        }
        let lattice = g.lattice_part.mul(&f.lattice_part)?;
        let mut multipliers = Vec::with_capacity(n);
        for j in 0..n {
            let mu = f.lattice_part.column(j);
            let mut tail = g.multiplier_product(&mu)?;
            if !f.has_trivial_multipliers() {
                tail = tail.mul(&g.apply_series(&f.multipliers[j])?)?;
            }
            multipliers.push(tail);
        }
        BirationalTorusMap::new(lattice, multipliers, f.degree)
    }

    /// The map whose character action is self's action precomposed with the
    /// monomial substitution x^g -> x^{Mg}; used to correct flip-path
    /// transition maps by a lattice identification.
    pub fn compose_lattice_pullback(&self, m: &IntMatrix) -> Result<BirationalTorusMap, MapError> {
        let n = self.rank();
        if m.size() != n {
            return Err(MapError::RankMismatch(n, m.size()));
        }
        let lattice = self.lattice_part.mul(m)?;
        let mut multipliers = Vec::with_capacity(n);
        for j in 0..n {
            multipliers.push(self.multiplier_product(&m.column(j))?);
        }
        BirationalTorusMap::new(lattice, multipliers, self.degree)
    }

    /// Compare lattice parts exactly and multiplier coefficients through the
    /// shared truncation degree.
    pub fn difference(&self, other: &BirationalTorusMap) -> Result<Option<MapDifference>, MapError> {
        if self.rank() != other.rank() {
            return Err(MapError::RankMismatch(self.rank(), other.rank()));
        }
        if self.degree != other.degree {
            return Err(MapError::DegreeMismatch(self.degree, other.degree));
        }
        for j in 0..self.rank() {
            if self.lattice_part.column(j) != other.lattice_part.column(j) {
                return Ok(Some(MapDifference::LatticePart {
                    column: j,
                    left: self.lattice_part.column(j),
                    right: other.lattice_part.column(j),
                }));
            }
        }
        for (i, (a, b)) in self.multipliers.iter().zip(&other.multipliers).enumerate() {
            if let Some((m, ca, cb)) = a.first_difference(b) {
                return Ok(Some(MapDifference::Multiplier {
                    index: i,
                    exponent: m,
                    left: ca.to_string(),
                    right: cb.to_string(),
                }));
            }
        }
        Ok(None)
    }

    pub fn equal_to(&self, other: &BirationalTorusMap) -> Result<bool, MapError> {
        Ok(self.difference(other)?.is_none())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat_int;

    fn one_plus_xk(rank: usize, d: u32, k: usize, pow: i64) -> ConeSeries {
        let mut e = vec![0u32; rank];
        e[k] = 1;
        ConeSeries::one(rank, d)
            .add(&ConeSeries::monomial(rank, d, e).unwrap())
            .unwrap()
            .pow_unit(pow)
            .unwrap()
    }

    /// x_b -> x_b (1 + x_k)^{<b, e_k>} for the standard rank-2 pairing.
    fn kappa_like(d: u32, k: usize) -> BirationalTorusMap {
        let skew: [[i64; 2]; 2] = [[0, 1], [-1, 0]];
        let mults = (0..2)
            .map(|i| one_plus_xk(2, d, k, skew[i][k]))
            .collect();
        BirationalTorusMap::new(IntMatrix::identity(2), mults, d).unwrap()
    }

    #[test]
    fn identity_acts_trivially() {
        let id = BirationalTorusMap::identity(2, 5);
        let (img, tail) = id.apply_class(&[3, -2]).unwrap();
        assert_eq!(img, vec![3, -2]);
        assert_eq!(tail, ConeSeries::one(2, 5));
        assert!(id.is_identity());
    }

    #[test]
    fn kappa_action_on_characters() {
        let d = 6;
        let m = kappa_like(d, 1);
        let (img, tail) = m.apply_class(&[1, 0]).unwrap();
        assert_eq!(img, vec![1, 0]);
        assert_eq!(tail, one_plus_xk(2, d, 1, 1));
    }

    #[test]
    fn compose_with_identity() {
        let d = 6;
        let f = kappa_like(d, 1);
        let id = BirationalTorusMap::identity(2, d);
        assert!(f.compose(&id).unwrap().equal_to(&f).unwrap());
        assert!(id.compose(&f).unwrap().equal_to(&f).unwrap());
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let d = 6;
        let f = kappa_like(d, 1);
        let skew: [[i64; 2]; 2] = [[0, 1], [-1, 0]];
        let inv_mults = (0..2).map(|i| one_plus_xk(2, d, 1, -skew[i][1])).collect();
        let finv = BirationalTorusMap::new(IntMatrix::identity(2), inv_mults, d).unwrap();
        assert!(f.compose(&finv).unwrap().is_identity());
        assert!(finv.compose(&f).unwrap().is_identity());
    }

    #[test]
    fn composition_order_matters() {
        // Two kappa-type maps at different classes do not commute.
        let d = 6;
        let f = kappa_like(d, 0);
        let g = kappa_like(d, 1);
        let fg = f.compose(&g).unwrap();
        let gf = g.compose(&f).unwrap();
        assert!(!fg.equal_to(&gf).unwrap());
    }

    #[test]
    fn pentagon_identity_for_substitutions() {
        // With <g1,g2> = 1 and T_g: x_b -> x_b (1 + x_g)^{<b,g>}, one has
        // T_{g1} o T_{g2} = T_{g2} o T_{g1+g2} o T_{g1}.
        let d = 8;
        let skew = |a: &[i64], b: &[i64]| a[0] * b[1] - a[1] * b[0];
        let factor = |class: &[i64; 2]| {
            let e: Monomial = class.iter().map(|&c| c as u32).collect();
            let base = ConeSeries::one(2, d)
                .add(&ConeSeries::monomial(2, d, e).unwrap())
                .unwrap();
            let mults = (0..2usize)
                .map(|i| {
                    let unit = [i as i64 == 0, i as i64 == 1];
                    let b = [unit[0] as i64, unit[1] as i64];
                    base.pow_unit(skew(&b, class)).unwrap()
                })
                .collect();
            BirationalTorusMap::new(IntMatrix::identity(2), mults, d).unwrap()
        };
        let t1 = factor(&[1, 0]);
        let t2 = factor(&[0, 1]);
        let t12 = factor(&[1, 1]);
        let lhs = t1.compose(&t2).unwrap();
        let rhs = t2.compose(&t12).unwrap().compose(&t1).unwrap();
        assert!(lhs.equal_to(&rhs).unwrap(), "{:?}", lhs.difference(&rhs).unwrap());
    }

    #[test]
    fn cone_unsafe_composition_rejected() {
        let d = 4;
        let neg = IntMatrix::from_rows(vec![vec![-1, 0], vec![0, 1]]).unwrap();
        let g = BirationalTorusMap::from_lattice(neg, d).unwrap();
        let f = kappa_like(d, 1);
        // g's lattice part leaves the cone and f has nontrivial multipliers.
        assert_eq!(f.compose(&g).unwrap_err(), MapError::ConeUnsafe);
        // The other order is fine: f's multipliers never pass through g.
        assert!(g.compose(&f).is_ok());
    }

    #[test]
    fn lattice_pullback_correction() {
        let d = 4;
        let neg = IntMatrix::from_rows(vec![vec![-1]]).unwrap();
        let mu = BirationalTorusMap::from_lattice(neg.clone(), d).unwrap();
        let corrected = mu.compose_lattice_pullback(&neg.inverse_unimodular().unwrap()).unwrap();
        assert!(corrected.is_identity());
    }

    #[test]
    fn difference_reports_first_mismatch() {
        let d = 4;
        let f = kappa_like(d, 1);
        let g = BirationalTorusMap::identity(2, d);
        match f.difference(&g).unwrap() {
            Some(MapDifference::Multiplier { index, exponent, .. }) => {
                assert_eq!(index, 0);
                assert_eq!(exponent, vec![0, 1]);
            }
            other => panic!("unexpected difference {other:?}"),
        }
        let mut skew = vec![vec![0i64, 1], vec![-1, 0]];
        skew[0][1] = 1;
        let mults = vec![
            ConeSeries::one(2, d).add(&ConeSeries::monomial(2, d, vec![0, 1]).unwrap()).unwrap(),
            ConeSeries::one(2, d),
        ];
        let h = BirationalTorusMap::new(IntMatrix::identity(2), mults, d).unwrap();
        // same multiplier as f at index 0 with exponent +1 vs f's +1: equal? f's
        // multiplier 0 is (1+x2)^{skew[0][1]} = 1 + x2, so h == f.
        assert!(h.equal_to(&f).unwrap());
        let scale = rat_int(1);
        let _ = scale;
    }
}
