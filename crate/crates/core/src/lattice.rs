//! The charge lattice: an integer lattice with an antisymmetric pairing,
//! central charges valued in the complex plane, rays, and quadratic
//! refinements (consistent sign assignments used to identify the twisted
//! torus with the ordinary one).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed as _, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice rank must be positive")]
    ZeroRank,
    #[error("skew matrix is not antisymmetric at ({i},{j})")]
    NotAntisymmetric { i: usize, j: usize },
    #[error("skew matrix row {row} has length {len}, expected {rank}")]
    RaggedSkew { row: usize, len: usize, rank: usize },
    #[error("dimension mismatch: lattice rank {rank}, vector length {len}")]
    DimensionMismatch { rank: usize, len: usize },
    #[error("central charge value {index} lies outside the closed upper half plane")]
    NotUpperHalfPlane { index: usize },
    #[error("value too close to the origin for a ray")]
    NearOrigin,
}

/// A free abelian group of finite rank with an antisymmetric integer pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassLattice {
    rank: usize,
    skew: Vec<Vec<i64>>,
}

impl ClassLattice {
    pub fn new(rank: usize, skew: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        if rank == 0 {
            return Err(LatticeError::ZeroRank);
        }
        if skew.len() != rank {
            return Err(LatticeError::RaggedSkew { row: 0, len: skew.len(), rank });
        }
        for (i, row) in skew.iter().enumerate() {
            if row.len() != rank {
                return Err(LatticeError::RaggedSkew { row: i, len: row.len(), rank });
            }
        }
        for i in 0..rank {
            for j in 0..rank {
                if skew[i][j] != -skew[j][i] {
                    return Err(LatticeError::NotAntisymmetric { i, j });
                }
            }
        }
        Ok(ClassLattice { rank, skew })
    }

    /// Rank-n lattice with zero pairing.
    pub fn zero_form(rank: usize) -> Result<Self, LatticeError> {
        Self::new(rank, vec![vec![0; rank]; rank])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn skew_rows(&self) -> &[Vec<i64>] {
        &self.skew
    }

    /// Pairing of basis vectors e_i, e_j.
    pub fn skew_basis(&self, i: usize, j: usize) -> i64 {
        self.skew[i][j]
    }

    /// The antisymmetric pairing a^T . skew . b.
    pub fn skew_pair(&self, a: &ClassVector, b: &ClassVector) -> Result<i64, LatticeError> {
        self.check_len(a)?;
        self.check_len(b)?;
        let mut acc: i64 = 0;
        for i in 0..self.rank {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                acc += a.0[i] * self.skew[i][j] * b.0[j];
            }
        }
        Ok(acc)
    }

    pub fn check_len(&self, v: &ClassVector) -> Result<(), LatticeError> {
        if v.0.len() != self.rank {
            return Err(LatticeError::DimensionMismatch { rank: self.rank, len: v.0.len() });
        }
        Ok(())
    }
}

/// An element of the charge lattice in the fixed basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassVector(pub Vec<i64>);

impl ClassVector {
    pub fn zero(rank: usize) -> Self {
        ClassVector(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        ClassVector(v)
    }

    pub fn add(&self, other: &ClassVector) -> ClassVector {
        ClassVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> ClassVector {
        ClassVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, m: i64) -> ClassVector {
        ClassVector(self.0.iter().map(|a| a * m).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// All coordinates non-negative (lies in the positive cone).
    pub fn in_cone(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    /// Largest m > 0 with self = m * primitive; 0 for the zero vector.
    pub fn divisibility(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &a| num::integer::gcd(g, a.abs()))
    }

    pub fn div_exact(&self, m: i64) -> Option<ClassVector> {
        if m == 0 {
            return None;
        }
        let mut out = Vec::with_capacity(self.0.len());
        for &a in &self.0 {
            if a % m != 0 {
                return None;
            }
            out.push(a / m);
        }
        Some(ClassVector(out))
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Exact complex number with rational real and imaginary parts.
///
/// Periods measured in floating point convert exactly (every f64 is
/// rational), while hand-entered charges stay exact, so ray membership can
/// be decided by sign tests instead of angle arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl RationalComplex {
    pub fn from_f64(re: f64, im: f64) -> Option<Self> {
        Some(RationalComplex {
            re: BigRational::from_float(re)?,
            im: BigRational::from_float(im)?,
        })
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        RationalComplex {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    pub fn abs_f64(&self) -> f64 {
        let (re, im) = self.to_f64_pair();
        re.hypot(im)
    }

    /// Argument divided by pi, normalized to (-1, 1].
    pub fn phase(&self) -> f64 {
        let (re, im) = self.to_f64_pair();
        let mut p = im.atan2(re) / std::f64::consts::PI;
        if p <= -1.0 {
            p += 2.0;
        }
        p
    }

    fn add(&self, other: &RationalComplex) -> RationalComplex {
        RationalComplex { re: &self.re + &other.re, im: &self.im + &other.im }
    }

    fn scale(&self, m: i64) -> RationalComplex {
        let f = BigRational::from_integer(BigInt::from(m));
        RationalComplex { re: &self.re * &f, im: &self.im * &f }
    }

    /// Exact test: both on one ray from the origin (same direction).
    pub fn same_ray_exact(&self, other: &RationalComplex) -> bool {
        if self.zero() || other.zero() {
            return false;
        }
        let cross = &self.re * &other.im - &self.im * &other.re;
        if !cross.is_zero() {
            return false;
        }
        let dot = &self.re * &other.re + &self.im * &other.im;
        dot.is_positive()
    }

    /// Membership of the closed upper half plane H+ = { r e^{i pi t} : r > 0, 0 < t <= 1 }.
    pub fn in_upper_half_plane(&self) -> bool {
        self.im.is_positive() || (self.im.is_zero() && self.re.is_negative())
    }
}

/// A homomorphism from the lattice to the complex numbers, given on the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralCharge {
    values: Vec<RationalComplex>,
    upper_half_plane: bool,
}

impl CentralCharge {
    pub fn new(values: Vec<RationalComplex>, upper_half_plane: bool) -> Result<Self, LatticeError> {
        if upper_half_plane {
            for (i, v) in values.iter().enumerate() {
                if !v.in_upper_half_plane() {
                    return Err(LatticeError::NotUpperHalfPlane { index: i });
                }
            }
        }
        Ok(CentralCharge { values, upper_half_plane })
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn upper_half_plane(&self) -> bool {
        self.upper_half_plane
    }

    pub fn basis_values(&self) -> &[RationalComplex] {
        &self.values
    }

    /// Z(g) = sum_i g_i Z(e_i), exact.
    pub fn eval(&self, g: &ClassVector) -> Result<RationalComplex, LatticeError> {
        if g.0.len() != self.values.len() {
            return Err(LatticeError::DimensionMismatch {
                rank: self.values.len(),
                len: g.0.len(),
            });
        }
        let mut acc = RationalComplex::from_ints(0, 0);
        for (gi, zi) in g.0.iter().zip(&self.values) {
            if *gi != 0 {
                acc = acc.add(&zi.scale(*gi));
            }
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, g: &ClassVector) -> Result<(f64, f64), LatticeError> {
        Ok(self.eval(g)?.to_f64_pair())
    }
}

/// A ray R_{>0} e^{i pi theta}, stored by its phase theta in (-1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub phase: f64,
    pub tolerance: f64,
}

impl Ray {
    pub fn new(phase: f64, tolerance: f64) -> Self {
        Ray { phase: normalize_phase(phase), tolerance }
    }

    /// Ray through a nonzero complex number.
    pub fn of(re: f64, im: f64, tolerance: f64) -> Result<Self, LatticeError> {
        if re.hypot(im) <= tolerance {
            return Err(LatticeError::NearOrigin);
        }
        Ok(Ray::new(im.atan2(re) / std::f64::consts::PI, tolerance))
    }

    /// Equality of rays: phases agree modulo 2 within tolerance.
    pub fn contains_phase(&self, phase: f64) -> bool {
        phase_distance(self.phase, phase) < self.tolerance
    }

    pub fn same_ray(&self, other: &Ray) -> bool {
        self.contains_phase(other.phase)
    }
}

/// Normalize a phase (units of pi) to (-1, 1].
pub fn normalize_phase(mut p: f64) -> f64 {
    while p > 1.0 {
        p -= 2.0;
    }
    while p <= -1.0 {
        p += 2.0;
    }
    p
}

/// Distance between phases modulo 2 (units of pi).
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(2.0);
    if d > 1.0 {
        d = 2.0 - d;
    }
    d
}

/// A sign assignment on the lattice obeying the twisted multiplicativity rule
/// xi(a+b) = (-1)^{<a,b>} xi(a) xi(b), determined by its values on the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticRefinement {
    basis_signs: Vec<i8>,
}

impl QuadraticRefinement {
    pub fn new(basis_signs: Vec<i8>) -> Option<Self> {
        if basis_signs.iter().all(|&s| s == 1 || s == -1) {
            Some(QuadraticRefinement { basis_signs })
        } else {
            None
        }
    }

    /// All basis signs -1: the canonical choice when every basis class is the
    /// class of a non-closed saddle connection.
    pub fn all_negative(rank: usize) -> Self {
        QuadraticRefinement { basis_signs: vec![-1; rank] }
    }

    pub fn basis_signs(&self) -> &[i8] {
        &self.basis_signs
    }

    /// Extension to the whole lattice. Writing g = sum g_i e_i and expanding
    /// the twisted rule gives the closed form
    /// xi(g) = prod_i xi_i^{g_i} * (-1)^{sum_{i<j} g_i g_j <e_i, e_j>},
    /// which is independent of the decomposition order.
    pub fn refine(&self, lattice: &ClassLattice, g: &ClassVector) -> Result<i8, LatticeError> {
        lattice.check_len(g)?;
        if self.basis_signs.len() != lattice.rank() {
            return Err(LatticeError::DimensionMismatch {
                rank: lattice.rank(),
                len: self.basis_signs.len(),
            });
        }
        let mut parity: i64 = 0;
        for (i, &gi) in g.0.iter().enumerate() {
            if gi % 2 != 0 && self.basis_signs[i] == -1 {
                parity += 1;
            }
        }
        let mut cross: i64 = 0;
        for i in 0..g.0.len() {
            for j in i + 1..g.0.len() {
                cross += g.0[i] * g.0[j] * lattice.skew_basis(i, j);
            }
        }
        Ok(if (parity + cross) % 2 == 0 { 1 } else { -1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat2(s: i64) -> ClassLattice {
        ClassLattice::new(2, vec![vec![0, s], vec![-s, 0]]).unwrap()
    }

    #[test]
    fn skew_pair_reads_matrix() {
        let l = lat2(1);
        let a = ClassVector(vec![1, 0]);
        let b = ClassVector(vec![0, 1]);
        assert_eq!(l.skew_pair(&a, &b).unwrap(), 1);
        assert_eq!(l.skew_pair(&b, &a).unwrap(), -1);
        assert_eq!(l.skew_pair(&a, &a).unwrap(), 0);
    }

    #[test]
    fn skew_pair_bilinear() {
        let l = lat2(2);
        let a = ClassVector(vec![1, 1]);
        let b = ClassVector(vec![2, 0]);
        assert_eq!(l.skew_pair(&a, &b).unwrap(), -4);
    }

    #[test]
    fn rank_zero_rejected() {
        assert_eq!(ClassLattice::new(0, vec![]), Err(LatticeError::ZeroRank));
    }

    #[test]
    fn non_antisymmetric_rejected() {
        assert!(ClassLattice::new(2, vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(ClassLattice::new(2, vec![vec![1, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn charge_evaluation() {
        // Z = (i, 1+i)
        let z = CentralCharge::new(
            vec![RationalComplex::from_ints(0, 1), RationalComplex::from_ints(1, 1)],
            false,
        )
        .unwrap();
        assert_eq!(z.eval(&ClassVector(vec![1, 0])).unwrap(), RationalComplex::from_ints(0, 1));
        assert_eq!(z.eval(&ClassVector(vec![1, 1])).unwrap(), RationalComplex::from_ints(1, 2));
        assert_eq!(
            z.eval(&ClassVector(vec![-1, 0])).unwrap(),
            RationalComplex::from_ints(0, -1)
        );
    }

    #[test]
    fn charge_additive() {
        let z = CentralCharge::new(
            vec![RationalComplex::from_ints(2, 3), RationalComplex::from_ints(-1, 5)],
            false,
        )
        .unwrap();
        let a = ClassVector(vec![3, -2]);
        let b = ClassVector(vec![-1, 7]);
        let lhs = z.eval(&a.add(&b)).unwrap();
        let za = z.eval(&a).unwrap();
        let zb = z.eval(&b).unwrap();
        assert_eq!(lhs.re, &za.re + &zb.re);
        assert_eq!(lhs.im, &za.im + &zb.im);
    }

    #[test]
    fn upper_half_plane_checked() {
        // 1 + 0i has phase 0, outside H+.
        let bad = CentralCharge::new(vec![RationalComplex::from_ints(1, 0)], true);
        assert!(bad.is_err());
        // -1 + 0i has phase 1, inside.
        assert!(CentralCharge::new(vec![RationalComplex::from_ints(-1, 0)], true).is_ok());
    }

    #[test]
    fn ray_phases() {
        let tol = 1e-9;
        assert!((Ray::of(0.0, 1.0, tol).unwrap().phase - 0.5).abs() < 1e-12);
        assert!((Ray::of(-3.0, 0.0, tol).unwrap().phase - 1.0).abs() < 1e-12);
        assert!((Ray::of(1.0, 1.0, tol).unwrap().phase - 0.25).abs() < 1e-12);
        assert!(Ray::of(0.0, 0.0, tol).is_err());
    }

    #[test]
    fn ray_equality_wraps() {
        let r = Ray::new(1.0, 1e-9);
        assert!(r.contains_phase(-1.0 + 1e-12));
        assert!(!r.contains_phase(0.0));
    }

    #[test]
    fn refine_forced_values() {
        let l = lat2(1);
        let xi = QuadraticRefinement::all_negative(2);
        // xi(e1+e2) = (-1)^1 * (-1)(-1) = -1
        assert_eq!(xi.refine(&l, &ClassVector(vec![1, 1])).unwrap(), -1);
        // xi(0) = +1
        assert_eq!(xi.refine(&l, &ClassVector(vec![0, 0])).unwrap(), 1);
        // xi(2 e1) = (-1)^0 * (-1)^2 = +1
        assert_eq!(xi.refine(&l, &ClassVector(vec![2, 0])).unwrap(), 1);
    }

    #[test]
    fn refine_twisted_multiplicativity() {
        let l = ClassLattice::new(
            3,
            vec![vec![0, 1, -2], vec![-1, 0, 3], vec![2, -3, 0]],
        )
        .unwrap();
        let xi = QuadraticRefinement::new(vec![-1, 1, -1]).unwrap();
        let vs = [
            ClassVector(vec![1, 0, 0]),
            ClassVector(vec![0, 2, -1]),
            ClassVector(vec![3, -1, 2]),
            ClassVector(vec![-2, 1, 1]),
        ];
        for a in &vs {
            for b in &vs {
                let lhs = xi.refine(&l, &a.add(b)).unwrap() as i64;
                let sign = if l.skew_pair(a, b).unwrap() % 2 == 0 { 1 } else { -1 };
                let rhs = sign
                    * xi.refine(&l, a).unwrap() as i64
                    * xi.refine(&l, b).unwrap() as i64;
                assert_eq!(lhs, rhs, "failed at a={a:?} b={b:?}");
            }
        }
    }

    #[test]
    fn same_ray_exact_test() {
        let a = RationalComplex::from_ints(1, 2);
        let b = RationalComplex::from_ints(2, 4);
        let c = RationalComplex::from_ints(-1, -2);
        assert!(a.same_ray_exact(&b));
        assert!(!a.same_ray_exact(&c));
    }
}
