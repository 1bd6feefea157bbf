//! The quantum torus: series over the cone with Laurent-polynomial
//! coefficients in q^{1/2}, the star product twisted by (-q^{1/2}) to the
//! pairing, quantum integers, the plethystic exponential, refined ray
//! factors, and the q^{1/2} -> 1 specialization back to the classical maps.

use crate::lattice::{ClassLattice, ClassVector, QuadraticRefinement};
use crate::series::{Coeff, ConeSeries, Monomial, SeriesError};
use crate::torusmap::BirationalTorusMap;
use crate::wallcrossing::WcfError;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error("series ranks differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("truncation degrees differ: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("constant term present where none is allowed")]
    UnexpectedConstantTerm,
    #[error("classes {0} and {1} in one slope have pairing {2}, violating genericity")]
    NonGenericSlope(String, String, i64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Laurent polynomial in q^{1/2} with exact rational coefficients,
/// stored by doubled exponent (key k holds the coefficient of q^{k/2}).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentQ {
    coeffs: BTreeMap<i64, Coeff>,
}

impl LaurentQ {
    pub fn zero() -> Self {
        LaurentQ { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, Coeff::one())
    }

    /// c * q^{doubled/2}
    pub fn monomial(doubled: i64, c: Coeff) -> Self {
        let mut l = LaurentQ::zero();
        l.add_term(doubled, c);
        l
    }

    pub fn from_int(n: i64) -> Self {
        Self::monomial(0, crate::series::rat_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Coeff)> {
        self.coeffs.iter()
    }

    /// Coefficient of q^{doubled/2}.
    pub fn coeff_at(&self, doubled: i64) -> Coeff {
        self.coeffs.get(&doubled).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_term(&mut self, doubled: i64, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(doubled) {
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

    pub fn add(&self, other: &LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        for (&k, c) in &other.coeffs {
            out.add_term(k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> LaurentQ {
        LaurentQ { coeffs: self.coeffs.iter().map(|(&k, c)| (k, -c.clone())).collect() }
    }

    pub fn mul(&self, other: &LaurentQ) -> LaurentQ {
        let mut out = LaurentQ::zero();
        for (&ka, ca) in &self.coeffs {
            for (&kb, cb) in &other.coeffs {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> LaurentQ {
        if c.is_zero() {
            return LaurentQ::zero();
        }
        LaurentQ { coeffs: self.coeffs.iter().map(|(&k, v)| (k, v * c)).collect() }
    }

    /// Substitute q^{1/2} -> q^{n/2} (exponent scaling).
    pub fn substitute_power(&self, n: i64) -> LaurentQ {
        let mut out = LaurentQ::zero();
        for (&k, c) in &self.coeffs {
            out.add_term(k * n, c.clone());
        }
        out
    }

    /// Evaluate at q^{1/2} = 1.
    pub fn at_one(&self) -> Coeff {
        self.coeffs.values().fold(Coeff::zero(), |acc, c| acc + c)
    }
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                k if k % 2 == 0 => write!(f, "{c}*q^{}", k / 2)?,
                k => write!(f, "{c}*q^({k}/2)")?,
            }
        }
        Ok(())
    }
}

/// The quantum integer [n]_t = (t^n - 1)/(t - 1), with t = q^{t_doubled/2};
/// extended to negative n by the same rational function.
pub fn quantum_integer(n: i64, t_doubled: i64) -> LaurentQ {
    let mut out = LaurentQ::zero();
    if n >= 0 {
        for k in 0..n {
            out.add_term(k * t_doubled, Coeff::one());
        }
    } else {
        for k in 1..=(-n) {
            out.add_term(-k * t_doubled, -Coeff::one());
        }
    }
    out
}

/// Truncated series over the positive cone with LaurentQ coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QTorusSeries {
    rank: usize,
    degree: u32,
    terms: BTreeMap<Monomial, LaurentQ>,
}

impl QTorusSeries {
    pub fn zero(rank: usize, degree: u32) -> Self {
        QTorusSeries { rank, degree, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize, degree: u32) -> Self {
        let mut s = Self::zero(rank, degree);
        s.add_term(vec![0; rank], LaurentQ::one());
        s
    }

    pub fn monomial_of_class(
        rank: usize,
        degree: u32,
        class: &ClassVector,
        coeff: LaurentQ,
    ) -> Result<Self, QuantumError> {
        let exps: Option<Monomial> = class.0.iter().map(|&c| u32::try_from(c).ok()).collect();
        let exps = exps.ok_or(SeriesError::OutsideCone)?;
        if exps.len() != rank {
            return Err(QuantumError::RankMismatch(rank, exps.len()));
        }
        let mut s = Self::zero(rank, degree);
        s.add_term(exps, coeff);
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &LaurentQ)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[u32]) -> LaurentQ {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> LaurentQ {
        self.coeff(&vec![0; self.rank])
    }

    pub fn add_term(&mut self, m: Monomial, c: LaurentQ) {
        if c.is_zero() {
            return;
        }
        if m.iter().map(|&e| e as u64).sum::<u64>() > self.degree as u64 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &QTorusSeries) -> Result<QTorusSeries, QuantumError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> QTorusSeries {
        QTorusSeries {
            rank: self.rank,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    fn check(&self, other: &QTorusSeries) -> Result<(), QuantumError> {
        if self.rank != other.rank {
            return Err(QuantumError::RankMismatch(self.rank, other.rank));
        }
        if self.degree != other.degree {
            return Err(QuantumError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    /// Star product: x^a * x^b = (-q^{1/2})^{<a,b>} x^{a+b}, extended
    /// bilinearly and truncated.
    pub fn star_mul(
        &self,
        other: &QTorusSeries,
        lattice: &ClassLattice,
    ) -> Result<QTorusSeries, QuantumError> {
        self.check(other)?;
        let mut out = QTorusSeries::zero(self.rank, self.degree);
        for (ma, ca) in &self.terms {
            let da: u64 = ma.iter().map(|&e| e as u64).sum();
            let va = ClassVector(ma.iter().map(|&e| e as i64).collect());
            for (mb, cb) in &other.terms {
                let db: u64 = mb.iter().map(|&e| e as u64).sum();
                if da + db > self.degree as u64 {
                    continue;
                }
                let vb = ClassVector(mb.iter().map(|&e| e as i64).collect());
                let pair = lattice.skew_pair(&va, &vb).map_err(SeriesError::from)?;
                let mut c = ca.mul(cb).substitute_shift(pair);
                if pair % 2 != 0 {
                    c = c.neg();
                }
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// Substitute q^{1/2} = 1 coefficientwise.
    pub fn classical_limit(&self) -> ConeSeries {
        let mut out = ConeSeries::zero(self.rank, self.degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.at_one());
        }
        out
    }

    /// Specialize q^{1/2} = 1 and transport each monomial by its sign under
    /// the refinement: the combination under which star products become
    /// ordinary products.
    pub fn classical_limit_transported(
        &self,
        lattice: &ClassLattice,
        xi: &QuadraticRefinement,
    ) -> Result<ConeSeries, WcfError> {
        let mut out = ConeSeries::zero(self.rank, self.degree);
        for (m, c) in &self.terms {
            let class = ClassVector(m.iter().map(|&e| e as i64).collect());
            let sign = xi.refine(lattice, &class)?;
            let v = c.at_one();
            out.add_term(m.clone(), if sign > 0 { v } else { -v });
        }
        Ok(out)
    }
}

impl LaurentQ {
    fn substitute_shift(&self, doubled_shift: i64) -> LaurentQ {
        let mut out = LaurentQ::zero();
        for (&k, c) in &self.coeffs {
            out.add_term(k + doubled_shift, c.clone());
        }
        out
    }
}

/// Check that all pairs in a family of classes Poisson-commute (the
/// genericity hypothesis for classes of one slope).
fn check_slope_generic(
    lattice: &ClassLattice,
    classes: &[ClassVector],
) -> Result<(), QuantumError> {
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            let p = lattice.skew_pair(a, b).map_err(SeriesError::from)?;
            if p != 0 {
                return Err(QuantumError::NonGenericSlope(a.to_string(), b.to_string(), p));
            }
        }
    }
    Ok(())
}

/// Plethystic exponential of a finite sum of single-class terms with
/// pairwise commuting classes: EXP(f(q^{1/2}) x_g) =
/// exp(sum_{n >= 1} f(q^{n/2}) x_{ng} / n), extended multiplicatively.
pub fn plethystic_exp(
    input: &[(ClassVector, LaurentQ)],
    lattice: &ClassLattice,
    degree: u32,
) -> Result<QTorusSeries, QuantumError> {
    let rank = lattice.rank();
    for (class, _) in input {
        if class.is_zero() {
            return Err(QuantumError::UnexpectedConstantTerm);
        }
    }
    let classes: Vec<ClassVector> = input.iter().map(|(c, _)| c.clone()).collect();
    check_slope_generic(lattice, &classes)?;
    let mut acc = QTorusSeries::one(rank, degree);
    for (class, f) in input {
        let base_degree: i64 = class.0.iter().sum();
        if base_degree == 0 {
            return Err(QuantumError::UnexpectedConstantTerm);
        }
        // exponent series E = sum_n f(q^{n/2}) x_{n class} / n
        let mut exponent = QTorusSeries::zero(rank, degree);
        let mut n = 1i64;
        while n * base_degree <= degree as i64 {
            let coeff = f.substitute_power(n).scale(&(Coeff::one() / crate::series::rat_int(n)));
            let term =
                QTorusSeries::monomial_of_class(rank, degree, &class.scale(n), coeff)?;
            exponent = exponent.add(&term)?;
            n += 1;
        }
        // exp(E): powers of E involve a single class line, so the star
        // product reduces to the ordinary one
        let mut single = QTorusSeries::one(rank, degree);
        let mut power = QTorusSeries::one(rank, degree);
        let mut factorial = Coeff::one();
        for k in 1..=(degree as i64 / base_degree) {
            power = power.star_mul(&exponent, lattice)?;
            factorial *= crate::series::rat_int(k);
            let scaled = QTorusSeries {
                rank,
                degree,
                terms: power
                    .terms
                    .iter()
                    .map(|(m, c)| (m.clone(), c.scale(&(Coeff::one() / &factorial))))
                    .collect(),
            };
            single = single.add(&scaled)?;
        }
        acc = acc.star_mul(&single, lattice)?;
    }
    Ok(acc)
}

/// A star-conjugation automorphism of the quantum torus with identity
/// lattice part: x_{e_j} maps to x_{e_j} * multipliers[j].
#[derive(Debug, Clone, PartialEq)]
pub struct QTorusMap {
    multipliers: Vec<QTorusSeries>,
    degree: u32,
}

impl QTorusMap {
    pub fn identity(rank: usize, degree: u32) -> Self {
        QTorusMap {
            multipliers: (0..rank).map(|_| QTorusSeries::one(rank, degree)).collect(),
            degree,
        }
    }

    pub fn multipliers(&self) -> &[QTorusSeries] {
        &self.multipliers
    }

    pub fn rank(&self) -> usize {
        self.multipliers.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_identity(&self) -> bool {
        self.multipliers.iter().all(|m| {
            m.terms.len() == 1 && m.constant_term().is_one()
        })
    }

    /// The image of the basis character x_{e_j} as a series (the star
    /// product with the multiplier carried out).
    pub fn apply_basis(
        &self,
        j: usize,
        lattice: &ClassLattice,
    ) -> Result<QTorusSeries, QuantumError> {
        let rank = self.rank();
        let basis = QTorusSeries::monomial_of_class(
            rank,
            self.degree,
            &ClassVector::unit(rank, j),
            LaurentQ::one(),
        )?;
        basis.star_mul(&self.multipliers[j], lattice)
    }

    /// Specialize at q^{1/2} = 1 and express on the basepoint chart fixed by
    /// the refinement. The star cocycle degenerates to the twisted-torus
    /// sign, which the transport absorbs, leaving an ordinary substitution
    /// automorphism with multipliers sum_m M_j[m](1) xi(m) x^m.
    pub fn classical_limit(
        &self,
        lattice: &ClassLattice,
        xi: &QuadraticRefinement,
    ) -> Result<BirationalTorusMap, WcfError> {
        let mut multipliers = Vec::with_capacity(self.rank());
        for m in &self.multipliers {
            multipliers.push(m.classical_limit_transported(lattice, xi)?);
        }
        Ok(BirationalTorusMap::new(
            crate::matrix::IntMatrix::identity(self.rank()),
            multipliers,
            self.degree,
        )?)
    }
}

/// The refined ray factor for a single slope: the automorphism acting on
/// basis characters by
/// x_b -> x_b * EXP(-sum_g q^{-1/2} [<b,g>]_{q^{-1}} Omega_g(q^{-1/2}) x_g),
/// with Omega given as Laurent polynomials in q^{1/2}.
pub fn refined_factor(
    lattice: &ClassLattice,
    slope_classes: &[(ClassVector, LaurentQ)],
    degree: u32,
) -> Result<QTorusMap, QuantumError> {
    let rank = lattice.rank();
    let classes: Vec<ClassVector> = slope_classes.iter().map(|(c, _)| c.clone()).collect();
    check_slope_generic(lattice, &classes)?;
    let mut multipliers = Vec::with_capacity(rank);
    for j in 0..rank {
        let e_j = ClassVector::unit(rank, j);
        let mut input = Vec::new();
        for (class, omega_q) in slope_classes {
            let pairing = lattice.skew_pair(&e_j, class).map_err(SeriesError::from)?;
            if pairing == 0 || omega_q.is_zero() {
                continue;
            }
            // -q^{-1/2} [pairing]_{q^{-1}} Omega(q^{-1/2})
            let coeff = LaurentQ::monomial(-1, Coeff::one())
                .mul(&quantum_integer(pairing, -2))
                .mul(&omega_q.substitute_power(-1))
                .neg();
            input.push((class.clone(), coeff));
        }
        multipliers.push(plethystic_exp(&input, lattice, degree)?);
    }
    Ok(QTorusMap { multipliers, degree })
}

#[cfg(test)]
mod tests;
