//! Transition maps between torus charts of adjacent tagged triangulations,
//! and their composites along flip paths.
//!
//! A single flip factors as a monomial chart identification (`cluster_iota`)
//! followed by a birational automorphism (`cluster_kappa`). Composites along
//! a path are computed in exact rational-function arithmetic (monomial
//! prefactor times a ratio of cone polynomials) and only expanded into a
//! truncated substitution map at the end, so no intermediate truncation can
//! corrupt low-order coefficients.

use super::WcfError;
use crate::matrix::IntMatrix;
use crate::series::{ConeSeries, SeriesError, UNTRUNCATED};
use crate::surface::{ExchangeMatrix, Label, SurfaceError, TaggedTriangulation};
use crate::torusmap::BirationalTorusMap;
use num::{One, Zero};

/// kappa_k: the automorphism x_g -> x_g (1 + x_{e_k})^{<g, e_k>}.
pub fn cluster_kappa(
    b: &ExchangeMatrix,
    k: usize,
    degree: u32,
) -> Result<BirationalTorusMap, WcfError> {
    let n = b.rank();
    let mut ek = vec![0u32; n];
    ek[k] = 1;
    let base = ConeSeries::one(n, degree).add(&ConeSeries::monomial(n, degree, ek)?)?;
    let mut multipliers = Vec::with_capacity(n);
    for i in 0..n {
        multipliers.push(base.pow_unit(b.entry(i, k))?);
    }
    Ok(BirationalTorusMap::new(IntMatrix::identity(n), multipliers, degree)?)
}

/// iota_k: the monomial isomorphism x_{e_k} -> x_{-e_k},
/// x_{e_j} -> x_{e_j + [<e_k, e_j>]_+ e_k}.
pub fn cluster_iota(
    b: &ExchangeMatrix,
    k: usize,
    degree: u32,
) -> Result<BirationalTorusMap, WcfError> {
    Ok(BirationalTorusMap::from_lattice(iota_matrix(b, k), degree)?)
}

fn iota_matrix(b: &ExchangeMatrix, k: usize) -> IntMatrix {
    let n = b.rank();
    let mut m = IntMatrix::identity(n);
    m.set(k, k, -1);
    for j in 0..n {
        if j != k {
            m.set(k, j, b.entry(k, j).max(0));
        }
    }
    m
}

/// The full transition map of one flip, mu_k = iota_k o kappa_k.
pub fn mu_single(
    b: &ExchangeMatrix,
    k: usize,
    degree: u32,
) -> Result<BirationalTorusMap, WcfError> {
    Ok(cluster_iota(b, k, degree)?.compose(&cluster_kappa(b, k, degree)?)?)
}

/// The composite transition map along a flip path, plus the accumulated
/// monomial chart identification for comparisons against sector products.
#[derive(Debug, Clone)]
pub struct FlipPathMap {
    /// Total transition map between the first and last charts.
    pub transition: BirationalTorusMap,
    /// Pullback matrix of the composite of the iota identifications.
    pub gauss_manin_pullback: IntMatrix,
    /// Arc labels indexing the torus basis (sorted labels of the start).
    pub basis_arcs: Vec<Label>,
    pub final_triangulation: TaggedTriangulation,
}

impl FlipPathMap {
    /// The transition map with the chart identification undone; for a single
    /// flip this is kappa alone, which is what a wall-crossing sector
    /// product is compared against.
    pub fn comparison_map(&self) -> Result<BirationalTorusMap, WcfError> {
        let inv = self.gauss_manin_pullback.inverse_unimodular()?;
        Ok(self.transition.compose_lattice_pullback(&inv)?)
    }
}

/// Compose mu along `arcs`, recomputing the exchange matrix after each flip.
pub fn flip_path_map(
    start: &TaggedTriangulation,
    arcs: &[Label],
    degree: u32,
    orientation: crate::conventions::Orientation,
) -> Result<FlipPathMap, WcfError> {
    let basis_arcs = start.arcs();
    let n = basis_arcs.len();
    let mut images: Vec<RatChar> = (0..n).map(|j| RatChar::character(n, j)).collect();
    let mut gm = IntMatrix::identity(n);
    let mut current = start.clone();
    for arc in arcs {
        let b = ExchangeMatrix::of(&current, orientation)?;
        let k = basis_arcs
            .iter()
            .position(|a| a == arc)
            .ok_or_else(|| WcfError::Surface(SurfaceError::UnknownArc(arc.clone())))?;
        let mut next_images = Vec::with_capacity(n);
        for j in 0..n {
            if j == k {
                next_images.push(images[k].pow(-1)?);
            } else {
                let mut img = images[j].clone();
                let up = b.entry(k, j).max(0);
                if up != 0 {
                    img = img.mul(&images[k].pow(up)?)?;
                }
                let exp = b.entry(j, k);
                if exp != 0 {
                    let one_plus = RatChar::one(n).add(&images[k])?;
                    img = img.mul(&one_plus.pow(exp)?)?;
                }
                next_images.push(img);
            }
        }
        images = next_images;
        gm = gm.mul(&iota_matrix(&b, k))?;
        current = current.flip(arc)?;
    }
    let mut columns = Vec::with_capacity(n);
    let mut multipliers = Vec::with_capacity(n);
    for img in &images {
        let (class, tail) = img.expand(degree)?;
        columns.push(class);
        multipliers.push(tail);
    }
    let mut lattice = IntMatrix::identity(n);
    for (j, col) in columns.iter().enumerate() {
        for i in 0..n {
            lattice.set(i, j, col[i]);
        }
    }
    let transition = BirationalTorusMap::new(lattice, multipliers, degree)?;
    Ok(FlipPathMap { transition, gauss_manin_pullback: gm, basis_arcs, final_triangulation: current })
}

/// A character image in exact form: x^class * num / den, where num and den
/// are polynomials supported on the positive cone.
#[derive(Debug, Clone)]
struct RatChar {
    class: Vec<i64>,
    num: ConeSeries,
    den: ConeSeries,
}

impl RatChar {
    fn one(n: usize) -> Self {
        RatChar {
            class: vec![0; n],
            num: ConeSeries::one(n, UNTRUNCATED),
            den: ConeSeries::one(n, UNTRUNCATED),
        }
    }

    fn character(n: usize, j: usize) -> Self {
        let mut class = vec![0i64; n];
        class[j] = 1;
        RatChar { class, num: ConeSeries::one(n, UNTRUNCATED), den: ConeSeries::one(n, UNTRUNCATED) }
    }

    fn mul(&self, other: &RatChar) -> Result<RatChar, WcfError> {
        Ok(RatChar {
            class: self.class.iter().zip(&other.class).map(|(a, b)| a + b).collect(),
            num: self.num.mul(&other.num)?,
            den: self.den.mul(&other.den)?,
        })
    }

    fn inv(&self) -> Result<RatChar, WcfError> {
        if self.num.is_zero() {
            return Err(WcfError::Series(SeriesError::UnexpectedConstantTerm));
        }
        Ok(RatChar {
            class: self.class.iter().map(|a| -a).collect(),
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    fn pow(&self, m: i64) -> Result<RatChar, WcfError> {
        let n = self.class.len();
        let base = if m >= 0 { self.clone() } else { self.inv()? };
        let mut acc = RatChar::one(n);
        for _ in 0..m.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    fn add(&self, other: &RatChar) -> Result<RatChar, WcfError> {
        // common monomial prefactor: componentwise minimum of the classes
        let base: Vec<i64> =
            self.class.iter().zip(&other.class).map(|(a, b)| *a.min(b)).collect();
        let lift = |r: &RatChar, scale_den: &ConeSeries| -> Result<ConeSeries, WcfError> {
            let shift: Vec<u32> = r
                .class
                .iter()
                .zip(&base)
                .map(|(c, m)| u32::try_from(c - m).expect("min is a lower bound"))
                .collect();
            let mono = ConeSeries::monomial(r.class.len(), UNTRUNCATED, shift)?;
            Ok(r.num.mul(scale_den)?.mul(&mono)?)
        };
        let num = lift(self, &other.den)?.add(&lift(other, &self.den)?)?;
        Ok(RatChar { class: base, num, den: self.den.mul(&other.den)? })
    }

    /// Normalize and expand to a unit-constant multiplier at the given
    /// truncation: returns (lattice class, tail series with constant 1).
    fn expand(&self, degree: u32) -> Result<(Vec<i64>, ConeSeries), WcfError> {
        let n = self.class.len();
        let strip = |p: &ConeSeries| -> (Vec<u32>, ConeSeries) {
            let mut min: Option<Vec<u32>> = None;
            for (mono, _) in p.terms() {
                min = Some(match min {
                    None => mono.clone(),
                    Some(m) => m.iter().zip(mono).map(|(a, b)| (*a).min(*b)).collect(),
                });
            }
            let min = min.unwrap_or_else(|| vec![0; n]);
            let stripped = p.shift_down(&min).expect("min divides all terms");
            (min, stripped)
        };
        let (num_shift, num) = strip(&self.num);
        let (den_shift, den) = strip(&self.den);
        let c_num = num.constant_term();
        let c_den = den.constant_term();
        if c_num.is_zero() || c_den.is_zero() {
            return Err(WcfError::Series(SeriesError::ConstantTermNotOne(
                "0 (image is not expandable around its leading monomial)".into(),
            )));
        }
        if c_num != c_den {
            return Err(WcfError::Series(SeriesError::ConstantTermNotOne(
                (c_num / c_den).to_string(),
            )));
        }
        let mut class = self.class.clone();
        for i in 0..n {
            class[i] += num_shift[i] as i64 - den_shift[i] as i64;
        }
        let unit = |p: ConeSeries| -> ConeSeries {
            let c = p.constant_term();
            p.truncated(degree).scale(&(crate::series::Coeff::one() / c))
        };
        let tail = unit(num).mul(&unit(den).invert_unit()?)?;
        Ok((class, tail))
    }
}
