use std::collections::BTreeMap;

use cybe_core::bdquad::*;
use cybe_core::classify::{enumerate_triples, AffineDiagram};
use cybe_core::linalg;
use cybe_core::loopalg::{LoopAlgebra, LoopElement, Part};
use cybe_core::trigtensor::{self, cybe, r0, skew, twist_residual, Laurent2};
use cybe_core::Scalar;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn untwisted(t: &str, rank: usize) -> LoopAlgebra {
    let mut s = vec![0; rank + 1];
    s[0] = 1;
    LoopAlgebra::build(t, None, s).unwrap()
}

fn gamma(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
    pairs.iter().copied().collect()
}

fn all_quadruples(alg: &LoopAlgebra) -> Vec<BDQuadruple> {
    let d = AffineDiagram::from_algebra(alg);
    enumerate_triples(&d).unwrap().into_iter().map(|g| canonical_quadruple(alg, g).unwrap()).collect()
}

#[test]
fn trivial_quadruple_is_valid() {
    let alg = untwisted("A2", 2);
    let mut q = BDQuadruple::trivial(2);
    assert!(validate(&alg, &q).is_valid());
    // with Γ₁ empty any skew t_𝔥 passes
    q.t_h[0][1] = Scalar::frac(3, 7);
    q.t_h[1][0] = Scalar::frac(-3, 7);
    assert!(validate(&alg, &q).is_valid());
}

#[test]
fn a2_single_edge_passes_conditions_one_and_two() {
    let alg = untwisted("A2", 2);
    let g = gamma(&[(1, 2)]);
    assert!(check_lengths(&alg, &g).ok);
    assert!(check_nilpotent(&g).ok);
    assert!(validate(&alg, &canonical_quadruple(&alg, g).unwrap()).is_valid());
}

#[test]
fn identity_gamma_never_escapes() {
    let alg = untwisted("A2", 2);
    let q = BDQuadruple::new(gamma(&[(1, 1)]), linalg::zeros(2, 2));
    let rep = validate(&alg, &q);
    assert!(!rep.nilpotent.ok);
    assert_eq!(rep.nilpotent.witness, Some(Witness::Orbit(1)));
}

#[test]
fn structural_failures() {
    let alg = untwisted("A1", 1);
    assert!(!validate(&alg, &BDQuadruple::new(gamma(&[(0, 1), (1, 0)]), linalg::zeros(1, 1))).structure.ok);
    assert!(!validate(&alg, &BDQuadruple::new(gamma(&[(0, 5)]), linalg::zeros(1, 1))).structure.ok);
    let a2 = untwisted("A2", 2);
    assert!(!validate(&a2, &BDQuadruple::new(gamma(&[(0, 2), (1, 2)]), linalg::zeros(2, 2))).structure.ok);
    // t_𝔥 not skew
    let mut t = linalg::zeros(2, 2);
    t[0][1] = Scalar::one();
    assert!(!validate(&a2, &BDQuadruple::new(BTreeMap::new(), t)).cartan.ok);
}

#[test]
fn lengths_witness_on_b2() {
    // α₀ long, α₂ short
    let alg = untwisted("B2", 2);
    let rep = check_lengths(&alg, &gamma(&[(0, 2)]));
    assert_eq!(rep.witness, Some(Witness::Pair(0, 0)));
}

#[test]
fn wrong_t_h_reports_residual() {
    let alg = untwisted("A2", 2);
    let mut q = canonical_quadruple(&alg, gamma(&[(1, 2)])).unwrap();
    q.t_h[0][1] += &Scalar::one();
    q.t_h[1][0] -= &Scalar::one();
    assert!(matches!(check_cartan(&alg, &q).witness, Some(Witness::Residual(1, _))));
}

#[test]
fn homogeneous_dimension_is_skew_forms_on_the_free_part() {
    // Each condition cuts one dimension from the skew forms on 𝔥: with
    // ℓ = n + 1 − |Γ₁| free nodes this leaves (ℓ−1)(ℓ−2)/2.
    for (t, rank) in [("A1", 1), ("A2", 2), ("A3", 3), ("C2", 2)] {
        let alg = untwisted(t, rank);
        for g in enumerate_triples(&AffineDiagram::from_algebra(&alg)).unwrap() {
            let sol = th_solution_space(&alg, &g).unwrap();
            let l = (rank + 1 - g.len()) as i64;
            assert_eq!(sol.homogeneous.len() as i64, (l - 1) * (l - 2) / 2, "{t} {g:?}");
            assert!(check_cartan(&alg, &BDQuadruple::new(g.clone(), sol.particular.clone())).ok);
            for h in &sol.homogeneous {
                let t_h: linalg::Mat = sol.particular.iter().zip(h).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
                assert!(check_cartan(&alg, &BDQuadruple::new(g.clone(), t_h)).ok);
            }
        }
    }
}

#[test]
fn empty_gamma_dimensions() {
    assert_eq!(th_solution_space(&untwisted("A1", 1), &BTreeMap::new()).unwrap().homogeneous.len(), 0);
    assert_eq!(th_solution_space(&untwisted("A2", 2), &BTreeMap::new()).unwrap().homogeneous.len(), 1);
    assert_eq!(th_solution_space(&untwisted("A2", 2), &gamma(&[(1, 2)])).unwrap().homogeneous.len(), 0);
}

#[test]
fn canonical_t_h_has_minimum_support() {
    let alg = untwisted("A3", 3);
    let g = gamma(&[(1, 2)]);
    let sol = th_solution_space(&alg, &g).unwrap();
    let support = |m: &linalg::Mat| m.iter().flatten().filter(|x| !x.is_zero()).count();
    let best = support(&sol.particular);
    // every shift by a single homogeneous generator with small coefficients is no sparser
    for h in &sol.homogeneous {
        for c in -3i64..=3 {
            let c = Scalar::from_i64(c);
            let m: linalg::Mat = sol.particular.iter().zip(h).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + &(y * &c)).collect()).collect();
            assert!(support(&m) >= best);
        }
    }
}

#[test]
fn theta_on_a2_edge() {
    let alg = untwisted("A2", 2);
    let th = ThetaGamma::new(&alg, &gamma(&[(1, 2)])).unwrap();
    assert_eq!(th.apply(&alg.x_plus(1)), alg.x_plus(2));
    assert_eq!(th.apply(&alg.x_minus(1)), alg.x_minus(2));
    assert!(th.apply(&alg.x_plus(2)).is_zero());
    assert!(th.power(&alg.x_plus(1), 2).is_zero());
    let empty = ThetaGamma::new(&alg, &BTreeMap::new()).unwrap();
    for (l, a) in alg.basis_upto(2) {
        assert!(empty.apply(&LoopElement::basis(l, a)).is_zero());
    }
}

#[test]
fn theta_respects_brackets() {
    let alg = untwisted("A3", 3);
    let th = ThetaGamma::new(&alg, &gamma(&[(1, 2), (2, 3)])).unwrap();
    let gens = [alg.x_plus(1), alg.x_plus(2), alg.x_minus(1), alg.x_minus(2), alg.h_gen(1)];
    for x in &gens[..4] {
        for y in &gens[..4] {
            let br = alg.bracket(x, y);
            if trigtensor::project(&alg, &br, Part::Cartan).is_zero() {
                assert_eq!(th.apply(&br), alg.bracket(&th.apply(x), &th.apply(y)));
            }
        }
    }
}

#[test]
fn twist_of_empty_gamma_is_t_h() {
    let alg = untwisted("A2", 2);
    let mut q = BDQuadruple::trivial(2);
    q.t_h[0][1] = Scalar::frac(1, 5);
    q.t_h[1][0] = Scalar::frac(-1, 5);
    assert_eq!(build_twist(&alg, &q).unwrap(), cartan_tensor(&alg, &q.t_h));
}

#[test]
fn a1_twist_is_a_single_wedge() {
    let alg = untwisted("A1", 1);
    let q = canonical_quadruple(&alg, gamma(&[(1, 0)])).unwrap();
    let t = build_twist(&alg, &q).unwrap();
    let root = alg.root_basis_vector(&[0, 1]).unwrap();
    let (b, bm) = alg.root_vector(root.0, root.1).unwrap();
    let th = ThetaGamma::new(&alg, &q.gamma).unwrap();
    let img = th.apply(&b);
    // θ(b_α) sits in degree 1 with finite part −α
    for &(l, a) in img.terms.keys() {
        assert_eq!(l, 1);
        assert_eq!(alg.root_coeffs(l, a), vec![1, 0]);
    }
    assert_eq!(t, cartan_tensor(&alg, &q.t_h).add(&Laurent2::wedge(&bm, &img)));
}

#[test]
fn enumerated_twists_solve_cybe() {
    for (name, rank) in [("A1", 1), ("A2", 2), ("C2", 2)] {
        let alg = untwisted(name, rank);
        let r = r0(&alg);
        for q in all_quadruples(&alg) {
            let t = build_twist(&alg, &q).unwrap();
            assert!(twist_residual(&alg, &r, &t).unwrap().is_zero(), "{name} {:?}", q.gamma);
            let full = r.add_poly(&t);
            assert!(skew(&full).is_zero());
            assert!(cybe(&alg, &full).is_zero());
        }
    }
}

#[test]
fn closed_form_operator_matches_residue() {
    for (name, rank) in [("A1", 1), ("A2", 2)] {
        let alg = untwisted(name, rank);
        for q in all_quadruples(&alg) {
            let data = QuadrupleData::new(&alg, &q).unwrap();
            assert!(compare_operators(&data, 3).is_empty(), "{name} {:?}", q.gamma);
        }
    }
}

#[test]
fn trivial_operator_is_r0() {
    let alg = untwisted("A2", 2);
    let data = QuadrupleData::new(&alg, &BDQuadruple::trivial(2)).unwrap();
    for (l, a) in alg.basis_upto(2) {
        let f = LoopElement::basis(l, a);
        assert_eq!(data.r_q(&f), trigtensor::residue_operator(&alg, &Laurent2::zero(), &f));
    }
}

#[test]
fn negative_part_expands_finitely() {
    // on 𝔑₋ the operator is Σ θ_{γ⁻¹}^j projected back
    let alg = untwisted("A3", 3);
    let q = canonical_quadruple(&alg, gamma(&[(1, 2), (2, 3)])).unwrap();
    let data = QuadrupleData::new(&alg, &q).unwrap();
    let f = alg.x_minus(3);
    let want = f.add(&alg.x_minus(2)).add(&alg.x_minus(1));
    assert_eq!(data.r_q(&f), want);
}

#[test]
fn cayley_images() {
    let alg = untwisted("A2", 2);
    for q in all_quadruples(&alg) {
        let data = QuadrupleData::new(&alg, &q).unwrap();
        let c = cayley(&data, 2);
        assert!(c.contained && c.spans, "{:?}", q.gamma);
        assert_eq!(c.h1.len() + c.h2.len() >= alg.n(), true);
    }
    let data = QuadrupleData::new(&alg, &BDQuadruple::trivial(2)).unwrap();
    let c = cayley(&data, 2);
    assert_eq!((c.h1.len(), c.h2.len()), (2, 2));
}

#[test]
fn isotropy_on_enumerated_quadruples() {
    let alg = untwisted("A1", 1);
    for q in all_quadruples(&alg) {
        let data = QuadrupleData::new(&alg, &q).unwrap();
        let rep = w_isotropy(&data, 2);
        assert!(rep.ok(), "{:?} {:?}", q.gamma, rep);
        assert!(rep.pairs_checked > 0);
    }
}

#[test]
fn invalid_quadruple_has_no_twist() {
    let alg = untwisted("A2", 2);
    let mut q = canonical_quadruple(&alg, gamma(&[(1, 2)])).unwrap();
    q.t_h[0][1] += &Scalar::one();
    q.t_h[1][0] -= &Scalar::one();
    assert!(build_twist(&alg, &q).is_err());
    assert!(QuadrupleData::new(&alg, &q).is_err());
}

#[test]
fn manin_identity_for_zero_twist_valid_twist_and_non_twist() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let pick = |alg: &LoopAlgebra, rng: &mut rand_chacha::ChaCha8Rng| {
        let b = alg.basis_upto(1);
        let (l, a) = b[rng.gen_range(0..b.len())];
        LoopElement::basis(l, a)
    };
    let a2 = untwisted("A2", 2);
    let valid = build_twist(&a2, &canonical_quadruple(&a2, gamma(&[(1, 2)])).unwrap()).unwrap();
    let r = r0(&a2);
    for t in [Laurent2::zero(), valid] {
        for _ in 0..20 {
            let fs = [pick(&a2, &mut rng), pick(&a2, &mut rng), pick(&a2, &mut rng)];
            let (lhs, rhs) = manin_identity(&a2, &r, &t, [&fs[0], &fs[1], &fs[2]]).unwrap();
            assert!(lhs.is_zero() && rhs.is_zero());
            assert!(manin_skew_residual(&a2, &t, &fs[0], &fs[1]).is_zero());
        }
    }
    let a1 = untwisted("A1", 1);
    let bad = Laurent2::wedge(&a1.x_plus(1), &a1.x_minus(1));
    let r = r0(&a1);
    let b = a1.basis_upto(0);
    let mut nonzero = false;
    for x in &b {
        for y in &b {
            for z in &b {
                let fs = [LoopElement::basis(x.0, x.1), LoopElement::basis(y.0, y.1), LoopElement::basis(z.0, z.1)];
                let (lhs, rhs) = manin_identity(&a1, &r, &bad, [&fs[0], &fs[1], &fs[2]]).unwrap();
                assert_eq!(lhs, rhs);
                nonzero |= !lhs.is_zero();
            }
        }
    }
    assert!(nonzero);
}

#[test]
fn quasi_trig_first_line_is_r0_plus_twist() {
    // sl(2), trivial quadruple: yC/(x−y) + C_𝔥/2 + C_− is r₀
    let a1 = untwisted("A1", 1);
    assert_eq!(quasi_trig_formula(&a1, &BDQuadruple::trivial(1)).unwrap(), r0(&a1));
    let alg = untwisted("A2", 2);
    let q = canonical_quadruple(&alg, gamma(&[(1, 2)])).unwrap();
    let want = r0(&alg).add_poly(&build_twist(&alg, &q).unwrap());
    assert_eq!(quasi_trig_formula(&alg, &q).unwrap(), want);
    assert!(quasi_trig_formula(&alg, &canonical_quadruple(&alg, gamma(&[(0, 1)])).unwrap()).is_err());
    let graded = LoopAlgebra::build("A2", None, vec![1, 1, 1]).unwrap();
    assert!(quasi_trig_formula(&graded, &BDQuadruple::trivial(2)).is_err());
}

#[test]
fn quasi_trig_second_line_halves_the_twist() {
    // The −½(…) rearrangement reproduces r₀ but scales every twist term by ½.
    let alg = untwisted("A2", 2);
    let trivial = BDQuadruple::trivial(2);
    assert_eq!(quasi_trig_formula_symmetric(&alg, &trivial).unwrap(), r0(&alg));
    let q = canonical_quadruple(&alg, gamma(&[(1, 2)])).unwrap();
    let t = build_twist(&alg, &q).unwrap();
    let got = quasi_trig_formula_symmetric(&alg, &q).unwrap();
    assert_eq!(got, r0(&alg).add_poly(&t.scale(&Scalar::frac(1, 2))));
    assert_ne!(got, quasi_trig_formula(&alg, &q).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn twist_ignores_root_vector_scaling(seed in 0u64..10_000, which in 0usize..3) {
        let (alg, g) = match which {
            0 => (untwisted("A1", 1), gamma(&[(1, 0)])),
            1 => (untwisted("A2", 2), gamma(&[(1, 2)])),
            _ => (untwisted("A3", 3), gamma(&[(1, 2), (2, 3)])),
        };
        let q = canonical_quadruple(&alg, g).unwrap();
        let base = build_twist(&alg, &q).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let table: Vec<i64> = (0..64).map(|_| {
            let v: i64 = rng.gen_range(1..9);
            if rng.gen_bool(0.5) { v } else { -v }
        }).collect();
        let scale = |c: &[i64]| {
            let h = c.iter().enumerate().fold(7usize, |h, (i, x)| h.wrapping_mul(31).wrapping_add((i as i64 * 5 + x) as usize));
            Scalar::frac(table[h % 64], table[(h / 64) % 64].abs())
        };
        prop_assert_eq!(build_twist_scaled(&alg, &q, &scale).unwrap(), base);
    }
}
