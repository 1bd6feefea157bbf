use super::*;
use crate::lattice::{CentralCharge, RationalComplex};
use crate::series::rat_int;
use crate::wallcrossing::BpsStructure;
use crate::Ray;

fn a2_lattice() -> ClassLattice {
    ClassLattice::new(2, vec![vec![0, 1], vec![-1, 0]]).unwrap()
}

fn xg(rank: usize, d: u32, class: &[i64], coeff: LaurentQ) -> QTorusSeries {
    QTorusSeries::monomial_of_class(rank, d, &ClassVector(class.to_vec()), coeff).unwrap()
}

#[test]
fn quantum_integers() {
    assert!(quantum_integer(0, 2).is_zero());
    assert!(quantum_integer(1, 2).is_one());
    // [3]_t = 1 + t + t^2 with t = q
    let q3 = quantum_integer(3, 2);
    assert_eq!(q3.coeff_at(0), rat_int(1));
    assert_eq!(q3.coeff_at(2), rat_int(1));
    assert_eq!(q3.coeff_at(4), rat_int(1));
    // [-2]_t = -(t^{-1} + t^{-2})
    let qm = quantum_integer(-2, 2);
    assert_eq!(qm.coeff_at(-2), rat_int(-1));
    assert_eq!(qm.coeff_at(-4), rat_int(-1));
    // quasi-classical value: [n]_t at t = 1 is n
    for n in -4i64..5 {
        assert_eq!(quantum_integer(n, -2).at_one(), rat_int(n));
    }
}

#[test]
fn star_product_rules() {
    let lat = a2_lattice();
    let d = 6;
    let xa = xg(2, d, &[1, 0], LaurentQ::one());
    let xb = xg(2, d, &[0, 1], LaurentQ::one());
    // <a,b> = 1: x_a * x_b = -q^{1/2} x_{a+b}
    let p = xa.star_mul(&xb, &lat).unwrap();
    let c = p.coeff(&[1, 1]);
    assert_eq!(c.coeff_at(1), rat_int(-1));
    // commutation: x_a * x_b = q^{<a,b>} x_b * x_a
    let q = xb.star_mul(&xa, &lat).unwrap();
    let mut shifted = LaurentQ::zero();
    for (&k, v) in q.coeff(&[1, 1]).terms() {
        shifted.add_term(k + 2, v.clone());
    }
    assert_eq!(p.coeff(&[1, 1]), shifted);
    // zero pairing: ordinary product
    let zero_lat = ClassLattice::zero_form(2).unwrap();
    let p0 = xa.star_mul(&xb, &zero_lat).unwrap();
    assert!(p0.coeff(&[1, 1]).is_one());
}

#[test]
fn star_commutation_on_samples() {
    let lat = ClassLattice::new(2, vec![vec![0, 2], vec![-2, 0]]).unwrap();
    let d = 8;
    let pairs = [([1i64, 0], [0i64, 1]), ([1, 1], [2, 0]), ([2, 1], [1, 2])];
    for (a, b) in pairs {
        let xa = xg(2, d, &a, LaurentQ::monomial(1, rat_int(3)));
        let xb = xg(2, d, &b, LaurentQ::monomial(-3, rat_int(2)));
        let ab = xa.star_mul(&xb, &lat).unwrap();
        let ba = xb.star_mul(&xa, &lat).unwrap();
        let pair = lat
            .skew_pair(&ClassVector(a.to_vec()), &ClassVector(b.to_vec()))
            .unwrap();
        // multiply ba by q^{pair}
        let mut expect = QTorusSeries::zero(2, d);
        for (m, c) in ba.terms() {
            let mut shifted = LaurentQ::zero();
            for (&k, v) in c.terms() {
                shifted.add_term(k + 2 * pair, v.clone());
            }
            expect.add_term(m.clone(), shifted);
        }
        assert_eq!(ab, expect);
    }
}

#[test]
fn plethystic_exp_geometric() {
    let lat = ClassLattice::zero_form(1).unwrap();
    let g = ClassVector(vec![1]);
    // EXP(0) = 1
    let e0 = plethystic_exp(&[], &lat, 4).unwrap();
    assert!(e0.constant_term().is_one());
    assert_eq!(e0.terms().count(), 1);
    // EXP(x_g) = 1/(1 - x_g): all coefficients 1
    let e = plethystic_exp(&[(g.clone(), LaurentQ::one())], &lat, 4).unwrap();
    for k in 0..=4u32 {
        assert!(e.coeff(&[k]).is_one(), "coefficient of x^{k}");
    }
    // EXP(q^{1/2} x_g) at D=3: 1 + q^{1/2} x + q x^2 + q^{3/2} x^3
    let eq = plethystic_exp(&[(g, LaurentQ::monomial(1, rat_int(1)))], &lat, 3).unwrap();
    for k in 1..=3i64 {
        let c = eq.coeff(&[k as u32]);
        assert_eq!(c.coeff_at(k), rat_int(1), "x^{k} coefficient");
        assert_eq!(c.terms().count(), 1);
    }
}

#[test]
fn plethystic_exp_is_homomorphism_on_commuting_supports() {
    // rank 2, zero pairing between e1 and e2 lines
    let lat = ClassLattice::zero_form(2).unwrap();
    let d = 5;
    let f = (ClassVector(vec![1, 0]), LaurentQ::monomial(1, rat_int(2)));
    let g = (ClassVector(vec![0, 1]), LaurentQ::monomial(-1, rat_int(1)));
    let joint = plethystic_exp(&[f.clone(), g.clone()], &lat, d).unwrap();
    let split = plethystic_exp(&[f], &lat, d)
        .unwrap()
        .star_mul(&plethystic_exp(&[g], &lat, d).unwrap(), &lat)
        .unwrap();
    assert_eq!(joint, split);
}

#[test]
fn plethystic_exp_rejects_constant_and_noncommuting() {
    let lat = a2_lattice();
    assert!(matches!(
        plethystic_exp(&[(ClassVector(vec![0, 0]), LaurentQ::one())], &lat, 4),
        Err(QuantumError::UnexpectedConstantTerm)
    ));
    let err = plethystic_exp(
        &[
            (ClassVector(vec![1, 0]), LaurentQ::one()),
            (ClassVector(vec![0, 1]), LaurentQ::one()),
        ],
        &lat,
        4,
    );
    assert!(matches!(err, Err(QuantumError::NonGenericSlope(_, _, 1))));
}

#[test]
fn refined_factor_single_class() {
    // Omega = 1 constant, <e1, g> with g = e2: multiplier for e1 is
    // EXP(-q^{-1/2} x_g) = 1 - q^{-1/2} x_g
    let lat = a2_lattice();
    let d = 5;
    let m = refined_factor(&lat, &[(ClassVector(vec![0, 1]), LaurentQ::one())], d).unwrap();
    let m0 = &m.multipliers()[0];
    assert!(m0.constant_term().is_one());
    assert_eq!(m0.coeff(&[0, 1]).coeff_at(-1), rat_int(-1));
    // x_{e2} itself is fixed ([0]_t = 0)
    assert!(m.multipliers()[1].constant_term().is_one());
    assert_eq!(m.multipliers()[1].terms().count(), 1);
    // Omega = 0: identity
    let id = refined_factor(&lat, &[(ClassVector(vec![0, 1]), LaurentQ::zero())], d).unwrap();
    assert!(id.is_identity());
}

#[test]
fn refined_factor_image_is_qless_for_unit_pairing() {
    // x_b * EXP(-q^{-1/2} x_g) = x_b + x_{b+g} when <b, g> = 1: the q's
    // cancel between the quantum integer and the star cocycle.
    let lat = a2_lattice();
    let d = 5;
    let m = refined_factor(&lat, &[(ClassVector(vec![0, 1]), LaurentQ::one())], d).unwrap();
    let image = m.apply_basis(0, &lat).unwrap();
    assert!(image.coeff(&[1, 0]).is_one());
    assert!(image.coeff(&[1, 1]).is_one(), "got {}", image.coeff(&[1, 1]));
}

#[test]
fn classical_limit_of_refined_factor_matches_ks_factor() {
    // the q -> 1 limit after transport equals the closed-form factor
    let lat = a2_lattice();
    let d = 6;
    let xi = QuadraticRefinement::all_negative(2);
    for omega in [1i64, 2, -2] {
        let m = refined_factor(
            &lat,
            &[(ClassVector(vec![0, 1]), LaurentQ::from_int(omega))],
            d,
        )
        .unwrap();
        let classical = m.classical_limit(&lat, &xi).unwrap();
        let z = CentralCharge::new(
            vec![
                RationalComplex::from_f64(-0.5, 0.8).unwrap(),
                RationalComplex::from_f64(0.6, 0.7).unwrap(),
            ],
            true,
        )
        .unwrap();
        let s = BpsStructure::new(
            lat.clone(),
            z,
            vec![(ClassVector(vec![0, 1]), omega)],
            xi.clone(),
            1e-9,
        )
        .unwrap();
        let phase = (0.7f64).atan2(0.6) / std::f64::consts::PI;
        let ks = s.ks_factor(&Ray::new(phase, 1e-9), d).unwrap();
        assert!(
            classical.equal_to(&ks).unwrap(),
            "omega={omega}: {:?}",
            classical.difference(&ks).unwrap()
        );
    }
}

#[test]
fn transported_specialization_is_multiplicative() {
    let lat = a2_lattice();
    let xi = QuadraticRefinement::all_negative(2);
    let d = 6;
    let samples = [
        xg(2, d, &[1, 0], LaurentQ::one()),
        xg(2, d, &[0, 1], LaurentQ::monomial(1, rat_int(2))),
        xg(2, d, &[1, 1], LaurentQ::monomial(-1, rat_int(1)))
            .add(&QTorusSeries::one(2, d))
            .unwrap(),
    ];
    for a in &samples {
        for b in &samples {
            let prod = a.star_mul(b, &lat).unwrap();
            let lhs = prod.classical_limit_transported(&lat, &xi).unwrap();
            let rhs = a
                .classical_limit_transported(&lat, &xi)
                .unwrap()
                .mul(&b.classical_limit_transported(&lat, &xi).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn identity_map_classical_limit() {
    let lat = a2_lattice();
    let xi = QuadraticRefinement::all_negative(2);
    let id = QTorusMap::identity(2, 4);
    let classical = id.classical_limit(&lat, &xi).unwrap();
    assert!(classical.is_identity());
}
