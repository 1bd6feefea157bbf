//! Truncated formal series over the positive cone of the charge lattice,
//! with exact rational coefficients. Identity checking happens here: two
//! automorphisms agree to a given order iff the series of their actions do.
//!
//! Monomials are exponent vectors in N^n; everything of total degree above
//! the truncation bound is discarded eagerly, so results at degree D are
//! exact and independent of any larger truncation.

use crate::lattice::{ClassLattice, ClassVector, LatticeError};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Marker for a series without a truncation bound (exact polynomials).
pub const UNTRUNCATED: u32 = u32::MAX;

pub type Monomial = Vec<u32>;
pub type Coeff = BigRational;

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("series ranks differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("truncation degrees differ: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("constant term is {0}, expected 1")]
    ConstantTermNotOne(String),
    #[error("series has a constant term where none is allowed")]
    UnexpectedConstantTerm,
    #[error("exponent vector leaves the positive cone")]
    OutsideCone,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub fn rat_int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

fn total_degree(m: &[u32]) -> u64 {
    m.iter().map(|&e| e as u64).sum()
}

/// A truncated formal series sum_m c_m x^m with m ranging over the cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeSeries {
    rank: usize,
    degree: u32,
    terms: BTreeMap<Monomial, Coeff>,
}

impl ConeSeries {
    pub fn zero(rank: usize, degree: u32) -> Self {
        ConeSeries { rank, degree, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize, degree: u32) -> Self {
        let mut s = Self::zero(rank, degree);
        s.add_term(vec![0; rank], Coeff::one());
        s
    }

    /// The single monomial x^g for g in the cone.
    pub fn monomial(rank: usize, degree: u32, exps: Monomial) -> Result<Self, SeriesError> {
        if exps.len() != rank {
            return Err(SeriesError::RankMismatch(rank, exps.len()));
        }
        let mut s = Self::zero(rank, degree);
        s.add_term(exps, Coeff::one());
        Ok(s)
    }

    pub fn monomial_of_class(
        rank: usize,
        degree: u32,
        class: &ClassVector,
    ) -> Result<Self, SeriesError> {
        let exps: Option<Monomial> =
            class.0.iter().map(|&c| u32::try_from(c).ok()).collect();
        let exps = exps.ok_or(SeriesError::OutsideCone)?;
        Self::monomial(rank, degree, exps)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeff(&vec![0; self.rank])
    }

    pub fn has_unit_constant_term(&self) -> bool {
        self.constant_term().is_one()
    }

    /// Insert c x^m, combining with an existing coefficient and dropping
    /// anything beyond the truncation degree.
    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        if self.degree != UNTRUNCATED && total_degree(&m) > self.degree as u64 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &ConeSeries) -> Result<(), SeriesError> {
        if self.rank != other.rank {
            return Err(SeriesError::RankMismatch(self.rank, other.rank));
        }
        if self.degree != other.degree {
            return Err(SeriesError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    pub fn add(&self, other: &ConeSeries) -> Result<ConeSeries, SeriesError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ConeSeries) -> Result<ConeSeries, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ConeSeries {
        let mut out = ConeSeries::zero(self.rank, self.degree);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> ConeSeries {
        if c.is_zero() {
            return ConeSeries::zero(self.rank, self.degree);
        }
        let mut out = ConeSeries::zero(self.rank, self.degree);
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    /// Truncated convolution product.
    pub fn mul(&self, other: &ConeSeries) -> Result<ConeSeries, SeriesError> {
        self.check_compatible(other)?;
        let mut out = ConeSeries::zero(self.rank, self.degree);
        let cap = self.degree as u64;
        for (ma, ca) in &self.terms {
            let da = total_degree(ma);
            for (mb, cb) in &other.terms {
                if self.degree != UNTRUNCATED && da + total_degree(mb) > cap {
                    continue;
                }
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        Ok(out)
    }

    /// Integer power of a series with constant term 1; negative powers go
    /// through the geometric-series inverse.
    pub fn pow_unit(&self, m: i64) -> Result<ConeSeries, SeriesError> {
        if !self.has_unit_constant_term() {
            return Err(SeriesError::ConstantTermNotOne(self.constant_term().to_string()));
        }
        if m == 0 {
            return Ok(ConeSeries::one(self.rank, self.degree));
        }
        let base = if m > 0 { self.clone() } else { self.invert_unit()? };
        let mut exp = m.unsigned_abs();
        let mut acc = ConeSeries::one(self.rank, self.degree);
        let mut sq = base;
        loop {
            if exp & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            sq = sq.mul(&sq)?;
        }
        Ok(acc)
    }

    /// Inverse of a series with constant term 1: 1/(1+n) = sum (-n)^k.
    pub fn invert_unit(&self) -> Result<ConeSeries, SeriesError> {
        if !self.has_unit_constant_term() {
            return Err(SeriesError::ConstantTermNotOne(self.constant_term().to_string()));
        }
        if self.degree == UNTRUNCATED {
            // Inverses of polynomials are genuinely infinite; callers expand
            // at a finite degree instead.
            return Err(SeriesError::DegreeMismatch(UNTRUNCATED, UNTRUNCATED));
        }
        let mut nilpotent = self.clone();
        nilpotent.terms.remove(&vec![0; self.rank]);
        let mut acc = ConeSeries::one(self.rank, self.degree);
        let mut pw = ConeSeries::one(self.rank, self.degree);
        for k in 1..=self.degree as u64 {
            pw = pw.mul(&nilpotent)?;
            if pw.is_zero() {
                break;
            }
            let signed = if k % 2 == 0 { pw.clone() } else { pw.neg() };
            acc = acc.add(&signed)?;
        }
        Ok(acc)
    }

    /// Re-truncate to a (smaller or larger) degree bound.
    pub fn truncated(&self, degree: u32) -> ConeSeries {
        let mut out = ConeSeries::zero(self.rank, degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Divide every monomial by x^shift; errors if some exponent would go
    /// negative. Used to read off multipliers from flows.
    pub fn shift_down(&self, shift: &[u32]) -> Result<ConeSeries, SeriesError> {
        let mut out = ConeSeries::zero(self.rank, self.degree);
        for (m, c) in &self.terms {
            let mut shifted = Vec::with_capacity(self.rank);
            for (a, b) in m.iter().zip(shift) {
                if a < b {
                    return Err(SeriesError::OutsideCone);
                }
                shifted.push(a - b);
            }
            out.add_term(shifted, c.clone());
        }
        Ok(out)
    }

    /// First monomial (lexicographic) at which two series differ.
    pub fn first_difference(&self, other: &ConeSeries) -> Option<(Monomial, Coeff, Coeff)> {
        let mut keys: Vec<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let a = self.coeff(k);
            let b = other.coeff(k);
            if a != b {
                return Some((k.clone(), a, b));
            }
        }
        None
    }

    /// Poisson bracket in the basepoint chart: {x^a, x^b} = <a,b> x^{a+b},
    /// extended bilinearly. The pairing of cone monomials is the lattice one.
    pub fn poisson_bracket(
        &self,
        other: &ConeSeries,
        lattice: &ClassLattice,
    ) -> Result<ConeSeries, SeriesError> {
        self.check_compatible(other)?;
        if lattice.rank() != self.rank {
            return Err(SeriesError::RankMismatch(lattice.rank(), self.rank));
        }
        let mut out = ConeSeries::zero(self.rank, self.degree);
        let cap = self.degree as u64;
        for (ma, ca) in &self.terms {
            let da = total_degree(ma);
            let va = ClassVector(ma.iter().map(|&e| e as i64).collect());
            for (mb, cb) in &other.terms {
                if self.degree != UNTRUNCATED && da + total_degree(mb) > cap {
                    continue;
                }
                let vb = ClassVector(mb.iter().map(|&e| e as i64).collect());
                let pair = lattice.skew_pair(&va, &vb)?;
                if pair == 0 {
                    continue;
                }
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb * rat_int(pair));
            }
        }
        Ok(out)
    }

    /// Time-1 Hamiltonian flow applied to a series:
    /// exp{H, -}(target) = sum_k {H,-}^k(target) / k!.
    ///
    /// H must have no constant term, so each bracket raises total degree and
    /// the sum is finite at any truncation.
    pub fn exp_flow(
        hamiltonian: &ConeSeries,
        target: &ConeSeries,
        lattice: &ClassLattice,
    ) -> Result<ConeSeries, SeriesError> {
        if !hamiltonian.constant_term().is_zero() {
            return Err(SeriesError::UnexpectedConstantTerm);
        }
        if hamiltonian.degree == UNTRUNCATED {
            return Err(SeriesError::DegreeMismatch(UNTRUNCATED, UNTRUNCATED));
        }
        let mut acc = target.clone();
        let mut bracket = target.clone();
        let mut factorial = Coeff::one();
        for k in 1..=hamiltonian.degree as u64 {
            bracket = hamiltonian.poisson_bracket(&bracket, lattice)?;
            if bracket.is_zero() {
                break;
            }
            factorial *= rat_int(k as i64);
            acc = acc.add(&bracket.scale(&(Coeff::one() / &factorial)))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for ConeSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}
