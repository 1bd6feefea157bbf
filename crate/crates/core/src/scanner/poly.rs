//! Complex polynomials with simple-root finding (Durand-Kerner with Newton
//! polishing).

use super::ScanError;
use num::complex::Complex64;

/// Polynomial with complex coefficients, stored leading-first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Coefficients leading-first; leading coefficient must be nonzero.
    pub fn from_descending(coeffs: Vec<Complex64>) -> Result<Self, ScanError> {
        if coeffs.is_empty() || coeffs[0].norm() == 0.0 {
            return Err(ScanError::ZeroLeadingCoefficient);
        }
        Ok(Poly { coeffs })
    }

    pub fn from_real_descending(coeffs: &[f64]) -> Result<Self, ScanError> {
        Self::from_descending(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeffs_descending(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        let n = self.degree();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate().take(n) {
            let power = (n - i) as f64;
            acc = acc * z + c * power;
        }
        acc
    }

    /// Multiply by a constant.
    pub fn scale(&self, c: Complex64) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&a| a * c).collect() }
    }

    /// Coefficientwise convex combination with another polynomial of the
    /// same degree (parameter paths in coefficient space).
    pub fn lerp(&self, other: &Poly, t: f64) -> Result<Poly, ScanError> {
        if self.degree() != other.degree() {
            return Err(ScanError::DegreeMismatch(self.degree(), other.degree()));
        }
        Poly::from_descending(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a * (1.0 - t) + b * t)
                .collect(),
        )
    }

    /// All roots by Durand-Kerner iteration, Newton-polished. Errors when
    /// two roots come closer than `separation_tol` (simple roots required).
    pub fn roots(&self, separation_tol: f64) -> Result<Vec<Complex64>, ScanError> {
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        // normalize to monic for the iteration
        let lead = self.coeffs[0];
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let radius = 1.0
            + monic.iter().skip(1).map(|c| c.norm()).fold(0.0f64, f64::max);
        let seed = Complex64::new(0.4, 0.9);
        let mut zs: Vec<Complex64> = (0..n)
            .map(|k| radius * seed.powu(k as u32 + 1))
            .collect();
        let eval_monic = |z: Complex64| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for &c in &monic {
                acc = acc * z + c;
            }
            acc
        };
        for _ in 0..600 {
            let mut max_step = 0.0f64;
            for k in 0..n {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if j != k {
                        denom *= zs[k] - zs[j];
                    }
                }
                if denom.norm() == 0.0 {
                    // perturb coincident iterates
                    zs[k] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                    max_step = f64::MAX;
                    continue;
                }
                let step = eval_monic(zs[k]) / denom;
                zs[k] -= step;
                max_step = max_step.max(step.norm());
            }
            if max_step < 1e-14 * radius {
                break;
            }
        }
        // Newton polish
        for z in zs.iter_mut() {
            for _ in 0..4 {
                let d = self.eval_derivative(*z);
                if d.norm() == 0.0 {
                    break;
                }
                *z -= self.eval(*z) / d;
            }
        }
        let mut roots = zs;
        roots.sort_by(|a, b| {
            (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite roots")
        });
        // iterates around a multiple root only cluster to sqrt(epsilon)
        // accuracy, so the degeneracy threshold cannot be tighter than that
        let threshold = separation_tol.max(1e-7 * radius);
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let d = (roots[i] - roots[j]).norm();
                if d <= threshold {
                    return Err(ScanError::RootsTooClose { distance: d });
                }
            }
        }
        Ok(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_quadratic() {
        let p = Poly::from_real_descending(&[1.0, 0.0, -1.0]).unwrap();
        let roots = p.roots(1e-9).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_of_cubic() {
        let p = Poly::from_real_descending(&[1.0, 0.0, -3.0, 0.0]).unwrap();
        let roots = p.roots(1e-9).unwrap();
        let s3 = 3.0f64.sqrt();
        for expected in [-s3, 0.0, s3] {
            assert!(
                roots.iter().any(|r| (r - Complex64::new(expected, 0.0)).norm() < 1e-10),
                "missing root {expected}"
            );
        }
    }

    #[test]
    fn repeated_root_rejected() {
        // (z-1)^2 = z^2 - 2z + 1
        let p = Poly::from_real_descending(&[1.0, -2.0, 1.0]).unwrap();
        assert!(matches!(p.roots(1e-9), Err(ScanError::RootsTooClose { .. })));
    }

    #[test]
    fn complex_coefficients() {
        // (z - i)(z + 2) = z^2 + (2 - i) z - 2i
        let p = Poly::from_descending(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, -1.0),
            Complex64::new(0.0, -2.0),
        ])
        .unwrap();
        let roots = p.roots(1e-9).unwrap();
        assert!(roots.iter().any(|r| (r - Complex64::new(0.0, 1.0)).norm() < 1e-10));
        assert!(roots.iter().any(|r| (r - Complex64::new(-2.0, 0.0)).norm() < 1e-10));
    }

    #[test]
    fn derivative_evaluation() {
        let p = Poly::from_real_descending(&[1.0, 0.0, -3.0, 0.5]).unwrap();
        // p' = 3z^2 - 3
        let z = Complex64::new(2.0, 1.0);
        let expected = 3.0 * z * z - 3.0;
        assert!((p.eval_derivative(z) - expected).norm() < 1e-12);
    }
}
