//! BPS structures and their wall-crossing data: the DT transform of the
//! integer counts, ray factors in closed form and as Hamiltonian flows,
//! clockwise sector products, and the comparison verdicts used by `verify`.
//!
//! All maps live on the basepoint chart of the twisted torus: the sign
//! twist enters only through the quadratic refinement evaluated on the
//! support classes.

mod cluster;

pub use cluster::{cluster_iota, cluster_kappa, flip_path_map, mu_single, FlipPathMap};

use crate::lattice::{
    normalize_phase, phase_distance, CentralCharge, ClassLattice, ClassVector, LatticeError,
    QuadraticRefinement, Ray,
};
use crate::series::{rat_int, Coeff, ConeSeries, SeriesError};
use crate::torusmap::{BirationalTorusMap, MapError};
use num::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WcfError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Surface(#[from] crate::surface::SurfaceError),
    #[error(transparent)]
    Matrix(#[from] crate::matrix::MatrixError),
    #[error("support class {0} is zero")]
    ZeroClass(String),
    #[error("support class {0} has mixed signs; choose a basis adapted to the cone")]
    NotInCone(String),
    #[error("conflicting counts for class {0}")]
    ConflictingOmega(String),
    #[error("classes {0} and {1} lie on one ray but are not proportional")]
    NonGenericRay(String, String),
    #[error("the divisor table does not invert to integers at {0}")]
    NonIntegerInversion(String),
    #[error("sector must satisfy 0 < width <= 1, got {0}")]
    BadSector(f64),
    #[error("boundary ray at phase {0} is active")]
    ActiveBoundary(f64),
    #[error("the zero class has no Donaldson-Thomas invariant")]
    DtOfZero,
}

/// A finitely supported BPS structure: lattice, central charge, integer
/// counts on cone representatives, and the sign assignment identifying the
/// twisted torus with the ordinary one.
#[derive(Debug, Clone)]
pub struct BpsStructure {
    lattice: ClassLattice,
    charge: CentralCharge,
    omega: BTreeMap<ClassVector, i64>,
    refinement: QuadraticRefinement,
    ray_tolerance: f64,
}

impl BpsStructure {
    /// `ray_tolerance` of zero requests exact ray comparisons (appropriate
    /// for hand-entered charges); a positive value groups rays numerically.
    pub fn new(
        lattice: ClassLattice,
        charge: CentralCharge,
        omega: Vec<(ClassVector, i64)>,
        refinement: QuadraticRefinement,
        ray_tolerance: f64,
    ) -> Result<Self, WcfError> {
        let mut table = BTreeMap::new();
        for (class, count) in omega {
            if count == 0 {
                continue;
            }
            lattice.check_len(&class)?;
            if class.is_zero() {
                return Err(WcfError::ZeroClass(class.to_string()));
            }
            // Counts are attached to +-class pairs; store the cone side.
            let rep = if class.in_cone() {
                class
            } else if class.neg().in_cone() {
                class.neg()
            } else {
                return Err(WcfError::NotInCone(class.to_string()));
            };
            if let Some(&old) = table.get(&rep) {
                if old != count {
                    return Err(WcfError::ConflictingOmega(rep.to_string()));
                }
            }
            table.insert(rep, count);
        }
        let s = BpsStructure { lattice, charge, omega: table, refinement, ray_tolerance };
        s.check_generic()?;
        Ok(s)
    }

    fn check_generic(&self) -> Result<(), WcfError> {
        let classes: Vec<&ClassVector> = self.omega.keys().collect();
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                if self.same_ray(a, b)? && !proportional(a, b) {
                    return Err(WcfError::NonGenericRay(a.to_string(), b.to_string()));
                }
            }
        }
        Ok(())
    }

    fn same_ray(&self, a: &ClassVector, b: &ClassVector) -> Result<bool, WcfError> {
        if self.ray_tolerance == 0.0 {
            let za = self.charge.eval(a)?;
            let zb = self.charge.eval(b)?;
            Ok(za.same_ray_exact(&zb))
        } else {
            let pa = self.charge.eval(a)?.phase();
            let pb = self.charge.eval(b)?.phase();
            Ok(phase_distance(pa, pb) < self.ray_tolerance)
        }
    }

    pub fn lattice(&self) -> &ClassLattice {
        &self.lattice
    }

    pub fn charge(&self) -> &CentralCharge {
        &self.charge
    }

    pub fn refinement(&self) -> &QuadraticRefinement {
        &self.refinement
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn support(&self) -> impl Iterator<Item = (&ClassVector, i64)> {
        self.omega.iter().map(|(k, &v)| (k, v))
    }

    /// The count for a class, using Omega(g) = Omega(-g).
    pub fn omega(&self, g: &ClassVector) -> i64 {
        if let Some(&v) = self.omega.get(g) {
            return v;
        }
        self.omega.get(&g.neg()).copied().unwrap_or(0)
    }

    /// DT(g) = sum over m > 0 dividing g of Omega(g/m) / m^2.
    pub fn dt_from_omega(&self, g: &ClassVector) -> Result<Coeff, WcfError> {
        if g.is_zero() {
            return Err(WcfError::DtOfZero);
        }
        self.lattice.check_len(g)?;
        let div = g.divisibility();
        let mut acc = Coeff::zero();
        for m in 1..=div {
            if div % m != 0 {
                continue;
            }
            if let Some(alpha) = g.div_exact(m) {
                let count = self.omega(&alpha);
                if count != 0 {
                    acc += rat_int(count) / rat_int(m * m);
                }
            }
        }
        Ok(acc)
    }

    /// Active rays, highest phase first. Phases lie in (0, 1] because the
    /// support sits in the positive cone over an upper-half-plane charge.
    pub fn active_rays(&self) -> Result<Vec<ActiveRay<'_>>, WcfError> {
        let mut rays: Vec<ActiveRay<'_>> = Vec::new();
        let tol = self.comparison_tolerance();
        'outer: for (class, count) in self.support() {
            for ray in rays.iter_mut() {
                if self.same_ray(class, ray.classes[0].0)? {
                    ray.classes.push((class, count));
                    continue 'outer;
                }
            }
            let phase = self.charge.eval(class)?.phase();
            rays.push(ActiveRay { ray: Ray::new(phase, tol), classes: vec![(class, count)] });
        }
        for ray in rays.iter_mut() {
            ray.classes.sort_by_key(|(c, _)| (*c).clone());
        }
        rays.sort_by(|a, b| b.ray.phase.partial_cmp(&a.ray.phase).unwrap());
        Ok(rays)
    }

    fn comparison_tolerance(&self) -> f64 {
        if self.ray_tolerance == 0.0 {
            1e-9
        } else {
            self.ray_tolerance
        }
    }

    fn classes_on(&self, ray: &Ray) -> Result<Vec<(&ClassVector, i64)>, WcfError> {
        let mut found = Vec::new();
        for (class, count) in self.support() {
            let phase = self.charge.eval(class)?.phase();
            if ray.contains_phase(phase) {
                found.push((class, count));
            }
        }
        found.sort_by_key(|(c, _)| (*c).clone());
        for (i, (a, _)) in found.iter().enumerate() {
            for (b, _) in &found[i + 1..] {
                if !proportional(a, b) {
                    return Err(WcfError::NonGenericRay(a.to_string(), b.to_string()));
                }
            }
        }
        Ok(found)
    }

    /// Height of a ray: the smallest |Z| over supported classes on it.
    pub fn height(&self, ray: &Ray) -> Result<Option<f64>, WcfError> {
        let classes = self.classes_on(ray)?;
        let mut best: Option<f64> = None;
        for (class, _) in classes {
            let z = self.charge.eval(class)?.abs_f64();
            best = Some(match best {
                Some(b) => b.min(z),
                None => z,
            });
        }
        Ok(best)
    }

    /// Generating series of DT invariants on a ray, to total degree `degree`.
    pub fn dt_series(&self, ray: &Ray, degree: u32) -> Result<ConeSeries, WcfError> {
        let mut out = ConeSeries::zero(self.rank(), degree);
        let classes = self.classes_on(ray)?;
        if classes.is_empty() {
            return Ok(out);
        }
        let primitive = primitive_of_group(&classes);
        let base_degree: i64 = primitive.0.iter().sum();
        let mut m = 1i64;
        while m * base_degree <= degree as i64 {
            let class = primitive.scale(m);
            let dt = self.dt_from_omega(&class)?;
            if !dt.is_zero() {
                let mono = ConeSeries::monomial_of_class(self.rank(), degree, &class)?;
                out = out.add(&mono.scale(&dt))?;
            }
            m += 1;
        }
        Ok(out)
    }

    /// Closed-form ray factor: the substitution
    /// x_b -> x_b * prod_{Z(g) on ray} (1 - xi(g) x_g)^{Omega(g) <b, g>}.
    /// The identity map for a non-active ray.
    pub fn ks_factor(&self, ray: &Ray, degree: u32) -> Result<BirationalTorusMap, WcfError> {
        let n = self.rank();
        let classes = self.classes_on(ray)?;
        let mut multipliers = vec![ConeSeries::one(n, degree); n];
        for (class, count) in classes {
            let sign = self.refinement.refine(&self.lattice, class)?;
            let mono = ConeSeries::monomial_of_class(n, degree, class)?;
            let base = if sign > 0 {
                ConeSeries::one(n, degree).sub(&mono)?
            } else {
                ConeSeries::one(n, degree).add(&mono)?
            };
            for (i, mult) in multipliers.iter_mut().enumerate() {
                let pairing = self.lattice.skew_pair(&ClassVector::unit(n, i), class)?;
                let exponent = count * pairing;
                if exponent != 0 {
                    *mult = mult.mul(&base.pow_unit(exponent)?)?;
                }
            }
        }
        Ok(BirationalTorusMap::new(
            crate::matrix::IntMatrix::identity(n),
            multipliers,
            degree,
        )?)
    }

    /// The same factor built as the time-1 flow of the transported DT
    /// generating series. Agrees with `ks_factor` to the truncation order.
    pub fn flow_factor(&self, ray: &Ray, degree: u32) -> Result<BirationalTorusMap, WcfError> {
        let n = self.rank();
        let inner = degree + 1;
        // Hamiltonian on the basepoint chart: each monomial picks up the sign
        // of its class under the refinement.
        let plain = self.dt_series(ray, inner)?;
        let mut hamiltonian = ConeSeries::zero(n, inner);
        for (mono, coeff) in plain.terms() {
            let class = ClassVector(mono.iter().map(|&e| e as i64).collect());
            let sign = self.refinement.refine(&self.lattice, &class)?;
            let signed = if sign > 0 { coeff.clone() } else { -coeff.clone() };
            hamiltonian.add_term(mono.clone(), signed);
        }
        let mut multipliers = Vec::with_capacity(n);
        for i in 0..n {
            let mut shift = vec![0u32; n];
            shift[i] = 1;
            let target = ConeSeries::monomial(n, inner, shift.clone())?;
            let flowed = ConeSeries::exp_flow(&hamiltonian, &target, &self.lattice)?;
            multipliers.push(flowed.shift_down(&shift)?.truncated(degree));
        }
        Ok(BirationalTorusMap::new(
            crate::matrix::IntMatrix::identity(n),
            multipliers,
            degree,
        )?)
    }

    /// Product of the ray factors over all active rays in the sector, taken
    /// in clockwise order (strictly decreasing phase).
    pub fn sector_product(
        &self,
        sector: &SectorSpec,
        degree: u32,
    ) -> Result<BirationalTorusMap, WcfError> {
        sector.validate()?;
        let tol = self.comparison_tolerance();
        let rays = self.active_rays()?;
        let mut inside: Vec<&ActiveRay<'_>> = Vec::new();
        for ray in &rays {
            let phase = ray.ray.phase;
            if phase_distance(phase, sector.end_phase) < tol
                || phase_distance(phase, sector.start_phase) < tol
            {
                return Err(WcfError::ActiveBoundary(phase));
            }
            if sector.contains(phase) {
                inside.push(ray);
            }
        }
        // active_rays is sorted by decreasing phase, but sector membership is
        // computed modulo 2; order by decreasing offset from the lower
        // boundary so wrap-around sectors compose clockwise too.
        inside.sort_by(|a, b| {
            let oa = (a.ray.phase - sector.end_phase).rem_euclid(2.0);
            let ob = (b.ray.phase - sector.end_phase).rem_euclid(2.0);
            ob.partial_cmp(&oa).unwrap()
        });
        let mut acc = BirationalTorusMap::identity(self.rank(), degree);
        for ray in inside {
            acc = acc.compose(&self.ks_factor(&ray.ray, degree)?)?;
        }
        Ok(acc)
    }
}

/// An active ray with the supported classes sitting on it.
#[derive(Debug)]
pub struct ActiveRay<'a> {
    pub ray: Ray,
    pub classes: Vec<(&'a ClassVector, i64)>,
}

/// A convex sector swept clockwise from `start_phase` down to `end_phase`
/// (phases in units of pi, width at most a half turn of the double cover).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSpec {
    pub start_phase: f64,
    pub end_phase: f64,
}

impl SectorSpec {
    pub fn new(start_phase: f64, end_phase: f64) -> Self {
        SectorSpec { start_phase, end_phase }
    }

    pub fn width(&self) -> f64 {
        self.start_phase - self.end_phase
    }

    pub fn validate(&self) -> Result<(), WcfError> {
        if self.width() <= 0.0 || self.width() > 1.0 {
            return Err(WcfError::BadSector(self.width()));
        }
        Ok(())
    }

    /// Open-sector membership modulo 2.
    pub fn contains(&self, phase: f64) -> bool {
        let offset = (phase - self.end_phase).rem_euclid(2.0);
        offset > 0.0 && offset < self.width()
    }

    /// Split at an interior phase into two adjacent sectors (clockwise order:
    /// the first piece has the higher phases).
    pub fn split_at(&self, phase: f64) -> (SectorSpec, SectorSpec) {
        let p = normalize_phase(phase);
        (SectorSpec::new(self.start_phase, p), SectorSpec::new(p, self.end_phase))
    }
}

/// Invert the divisor sum: recover the integer counts from a DT table given
/// on all divisors of `g` (Moebius inversion).
pub fn omega_from_dt(
    table: &BTreeMap<ClassVector, Coeff>,
    g: &ClassVector,
) -> Result<i64, WcfError> {
    if g.is_zero() {
        return Err(WcfError::DtOfZero);
    }
    let div = g.divisibility();
    let mut acc = Coeff::zero();
    for m in 1..=div {
        if div % m != 0 {
            continue;
        }
        let mu = moebius(m);
        if mu == 0 {
            continue;
        }
        if let Some(alpha) = g.div_exact(m) {
            if let Some(dt) = table.get(&alpha) {
                acc += rat_int(mu) * dt / rat_int(m * m);
            }
        }
    }
    if !acc.denom().is_one() {
        return Err(WcfError::NonIntegerInversion(g.to_string()));
    }
    let numer = acc.numer();
    use num::ToPrimitive;
    numer.to_i64().ok_or_else(|| WcfError::NonIntegerInversion(g.to_string()))
}

fn moebius(n: i64) -> i64 {
    let mut n = n;
    let mut factors = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            factors += 1;
        }
        p += 1;
    }
    if n > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

fn proportional(a: &ClassVector, b: &ClassVector) -> bool {
    for i in 0..a.0.len() {
        for j in 0..a.0.len() {
            if a.0[i] * b.0[j] != a.0[j] * b.0[i] {
                return false;
            }
        }
    }
    true
}

fn primitive_of_group(classes: &[(&ClassVector, i64)]) -> ClassVector {
    // All classes are positive multiples of a common primitive vector.
    let first = classes[0].0;
    let d = first.divisibility();
    first.div_exact(d).expect("divisibility divides")
}

/// Single-class ray factor with an explicitly supplied sign in place of the
/// refinement value: x_b -> x_b (1 - sign * x_class)^{count <b, class>}.
/// Tampering with one sign this way (without adjusting the others as a
/// quadratic refinement would) is the negative control for the rank-2
/// wall-crossing identity.
pub fn ray_factor_with_sign(
    lattice: &ClassLattice,
    class: &ClassVector,
    count: i64,
    sign: i8,
    degree: u32,
) -> Result<BirationalTorusMap, WcfError> {
    let n = lattice.rank();
    let mono = ConeSeries::monomial_of_class(n, degree, class)?;
    let base = if sign > 0 {
        ConeSeries::one(n, degree).sub(&mono)?
    } else {
        ConeSeries::one(n, degree).add(&mono)?
    };
    let mut multipliers = Vec::with_capacity(n);
    for i in 0..n {
        let pairing = lattice.skew_pair(&ClassVector::unit(n, i), class)?;
        multipliers.push(base.pow_unit(count * pairing)?);
    }
    Ok(BirationalTorusMap::new(
        crate::matrix::IntMatrix::identity(n),
        multipliers,
        degree,
    )?)
}

/// Outcome of comparing two torus maps to a truncation order.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub equal: bool,
    pub certificate: String,
}

/// Compare two maps and produce a one-line certificate.
pub fn wcf_check(
    left: &BirationalTorusMap,
    right: &BirationalTorusMap,
    degree: u32,
) -> Result<Verdict, WcfError> {
    let left = truncate_map(left, degree)?;
    let right = truncate_map(right, degree)?;
    Ok(match left.difference(&right)? {
        None => Verdict { equal: true, certificate: format!("equal to order {degree}") },
        Some(diff) => Verdict { equal: false, certificate: diff.to_string() },
    })
}

fn truncate_map(map: &BirationalTorusMap, degree: u32) -> Result<BirationalTorusMap, WcfError> {
    if map.degree() == degree {
        return Ok(map.clone());
    }
    let mults = map.multipliers().iter().map(|m| m.truncated(degree)).collect();
    Ok(BirationalTorusMap::new(map.lattice_part().clone(), mults, degree)?)
}
