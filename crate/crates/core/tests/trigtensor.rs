use cybe_core::loopalg::{LoopAlgebra, LoopElement, Part};
use cybe_core::trigtensor::*;
use cybe_core::{Error, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn build(t: &str, nu: Option<Vec<usize>>, s: Vec<i64>) -> LoopAlgebra {
    LoopAlgebra::build(t, nu, s).unwrap()
}

fn samples() -> Vec<LoopAlgebra> {
    vec![
        build("A1", None, vec![1, 0]),
        build("A1", None, vec![1, 1]),
        build("A2", None, vec![1, 1, 1]),
        build("A2", Some(vec![1, 0]), vec![1, 1]),
    ]
}

fn random_element(alg: &LoopAlgebra, rng: &mut impl Rng, d: i64) -> LoopElement {
    let basis = alg.basis_upto(d);
    let mut f = LoopElement::zero();
    for _ in 0..rng.gen_range(1..4) {
        let (l, a) = basis[rng.gen_range(0..basis.len())];
        f.add_term(l, a, Scalar::frac(rng.gen_range(-5..6), rng.gen_range(1..4)));
    }
    f
}

#[test]
fn r0_solves_cybe_on_twisted_diagrams() {
    for alg in [build("D4", Some(vec![2, 1, 3, 0]), vec![1, 0, 0]), build("A3", Some(vec![2, 1, 0]), vec![1, 0, 0]), build("C2", None, vec![1, 1, 1])] {
        let r = r0(&alg);
        assert!(skew(&r).is_zero());
        assert!(cybe(&alg, &r).is_zero());
    }
}

#[test]
fn taylor_expansion_is_the_dual_basis_sum() {
    for alg in samples() {
        let n = 4;
        let mut want = Laurent2::zero();
        let ch = &alg.st.u_gram_inv;
        for (p, row) in ch.iter().enumerate() {
            for (q, v) in row.iter().enumerate() {
                want.add_term((0, 0, alg.st.cartan[p], alg.st.cartan[q]), v * &Scalar::frac(1, 2));
            }
        }
        for (l, a) in alg.basis_upto(n) {
            if alg.part(l, a) == Part::Positive {
                want = want.add(&Laurent2::tensor(&alg.dual(l, a), &LoopElement::basis(l, a)));
            }
        }
        let got = taylor(&r0(&alg), n);
        assert_eq!(got, want, "m = {}", alg.m);
    }
}

#[test]
fn residue_operator_matches_series() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for alg in samples() {
        let e = alg.x_plus(0);
        let t = Laurent2::wedge(&e, &alg.x_minus(1)).add(&Laurent2::wedge(&alg.h_gen(1), &alg.x_plus(1).shift(alg.m)));
        for twist in [Laurent2::zero(), t] {
            let r = r0(&alg).add_poly(&twist);
            for _ in 0..10 {
                let f = random_element(&alg, &mut rng, 3);
                assert_eq!(residue_operator(&alg, &twist, &f), residue_by_series(&alg, &r, &f));
            }
        }
    }
}

#[test]
fn r0_operator_is_half_cartan_plus_negative() {
    let alg = build("A2", None, vec![1, 0, 0]);
    for (l, a) in alg.basis_upto(2) {
        let f = LoopElement::basis(l, a);
        let want = match alg.part(l, a) {
            Part::Cartan => f.scale(&Scalar::frac(1, 2)),
            Part::Negative => f.clone(),
            Part::Positive => LoopElement::zero(),
        };
        assert_eq!(residue_operator(&alg, &Laurent2::zero(), &f), want);
    }
}

#[test]
fn standard_cobracket_on_generators() {
    for alg in [build("A1", None, vec![1, 0]), build("A2", None, vec![1, 0, 0])] {
        let r = r0(&alg);
        for i in 0..=alg.n() {
            assert!(cobracket(&alg, &alg.h_gen(i), &r).unwrap().is_zero());
            let c = alg.coroot(i);
            let half = alg.st.h_form(&c, &c) * Scalar::frac(1, 2);
            for x in [alg.x_plus(i), alg.x_minus(i)] {
                let want = Laurent2::wedge(&alg.h_gen(i), &x).scale(&half);
                assert_eq!(cobracket(&alg, &x, &r).unwrap(), want);
            }
        }
    }
}

#[test]
fn cybe_and_twist_residual_agree() {
    let alg = build("A1", None, vec![1, 0]);
    let r = r0(&alg);
    let t = Laurent2::wedge(&alg.x_plus(1), &alg.x_minus(1));
    let lhs = cybe(&alg, &r.add_poly(&t));
    assert!(!lhs.is_zero());
    assert_eq!(lhs, clear3(r.m, &twist_residual(&alg, &r, &t).unwrap()));
}

#[test]
fn twist_residual_needs_skew_input() {
    let alg = build("A1", None, vec![1, 0]);
    let t = Laurent2::tensor(&alg.x_plus(1), &alg.x_minus(1));
    assert!(matches!(twist_residual(&alg, &r0(&alg), &t), Err(Error::Invalid(_))));
}

#[test]
fn random_points_agree_with_symbolic() {
    let alg = build("A2", None, vec![1, 1, 1]);
    let r = r0(&alg);
    assert_eq!(verify_cybe(&alg, &r, 0, 3, 5).unwrap(), CybeVerdict::ZeroAtPoints(3));
    let bad = r.add_poly(&Laurent2::wedge(&alg.x_plus(1), &alg.x_minus(2)));
    assert_eq!(verify_cybe(&alg, &bad, 0, 3, 5).unwrap(), CybeVerdict::NonZero);
    assert_eq!(verify_cybe(&alg, &r, 1000, 3, 5).unwrap(), CybeVerdict::Zero);
}

#[test]
fn evaluation_matches_expansion() {
    // r(x, y) at y → small: compare with the Taylor polynomial at a point
    let alg = build("A1", None, vec![1, 0]);
    let r = r0(&alg);
    let (x, y) = (Scalar::from_i64(3), Scalar::from_i64(2));
    let val = evaluate2(&r, &x, &y).unwrap();
    // r₀ = C/(x/y − 1) + C_𝔥/2 + C_−
    let ratio = &x / &y;
    let inv = (&ratio - &Scalar::one()).inv().unwrap();
    let c = casimir_adapted(&alg);
    let parts = casimir_components(&alg);
    for ((a, b), v) in &val {
        let mut want = c.get(&(*a, *b)).map(|w| w * &inv).unwrap_or_default();
        want += &parts.h.get(&(*a, *b)).map(|w| w * &Scalar::frac(1, 2)).unwrap_or_default();
        want += &parts.minus.get(&(*a, *b)).cloned().unwrap_or_default();
        assert_eq!(*v, want);
    }
    assert!(evaluate2(&r, &x, &x).is_err());
}

#[test]
fn fraction_with_leftover_pole_is_rejected() {
    // x/((x/y) − 1) has total degree 1 and does not reduce
    let mut num = Laurent2::zero();
    num.add_term((1, 0, 0, 0), Scalar::one());
    assert!(matches!(TwoPointTensor::from_fraction(1, Laurent2::zero(), &num), Err(Error::PoleRemains(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cobracket_is_a_skew_cocycle(which in 0usize..4, seed in 0u64..1000) {
        let alg = &samples()[which];
        let r = r0(alg);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = random_element(alg, &mut rng, 2);
        let g = random_element(alg, &mut rng, 2);
        let df = cobracket(alg, &f, &r).unwrap();
        let dg = cobracket(alg, &g, &r).unwrap();
        prop_assert!(df.is_skew());
        prop_assert!(delta_left(alg, &r, &df).unwrap().alt().is_zero());
        let lhs = cobracket(alg, &alg.bracket(&f, &g), &r).unwrap();
        prop_assert_eq!(lhs, act2(alg, &f, &dg).sub(&act2(alg, &g, &df)));
    }

    #[test]
    fn wedge_and_flip(which in 0usize..4, seed in 0u64..1000) {
        let alg = &samples()[which];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = random_element(alg, &mut rng, 2);
        let g = random_element(alg, &mut rng, 2);
        let w = Laurent2::wedge(&f, &g);
        prop_assert!(w.is_skew());
        prop_assert_eq!(w.flip().flip(), w.clone());
        prop_assert_eq!(w.add(&Laurent2::wedge(&g, &f)), Laurent2::zero());
    }
}
