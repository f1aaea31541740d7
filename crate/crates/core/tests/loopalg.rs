use cybe_core::loopalg::{LoopAlgebra, LoopElement, Part};
use cybe_core::Scalar;
use proptest::prelude::*;

fn build(t: &str, nu: Option<Vec<usize>>, s: Vec<i64>) -> LoopAlgebra {
    LoopAlgebra::build(t, nu, s).unwrap()
}

fn samples() -> Vec<LoopAlgebra> {
    vec![
        build("A1", None, vec![1, 0]),
        build("A1", None, vec![1, 1]),
        build("A2", None, vec![1, 1, 1]),
        build("B2", None, vec![1, 0, 0]),
        build("G2", None, vec![0, 1, 0]),
        build("A2", Some(vec![1, 0]), vec![1, 1]),
        build("A3", Some(vec![2, 1, 0]), vec![1, 0, 0]),
        build("D4", Some(vec![2, 1, 3, 0]), vec![1, 0, 0]),
    ]
}

fn element(alg: &LoopAlgebra, picks: &[(usize, i64)]) -> LoopElement {
    let basis = alg.basis_upto(2);
    let mut f = LoopElement::zero();
    for &(i, c) in picks {
        let (l, a) = basis[i % basis.len()];
        f.add_term(l, a, Scalar::from_i64(c));
    }
    f
}

#[test]
fn tabulated_affine_cartan_matrices() {
    let cases: Vec<(LoopAlgebra, Vec<Vec<i64>>)> = vec![
        (build("A1", None, vec![1, 0]), vec![vec![2, -2], vec![-2, 2]]),
        (build("A2", None, vec![1, 0, 0]), vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]),
        // a_ij = 2(α_i, α_j)/(α_j, α_j); α₀ = −θ is long and meets the short node α₂
        (build("B2", None, vec![1, 0, 0]), vec![vec![2, 0, -2], vec![0, 2, -2], vec![-1, -1, 2]]),
        (build("A2", Some(vec![1, 0]), vec![1, 0]), vec![vec![2, -4], vec![-1, 2]]),
    ];
    for (alg, want) in cases {
        assert_eq!(alg.st.affine_cartan, want, "{:?}", alg.st.marks);
    }
}

#[test]
fn marks_span_the_left_kernel() {
    let expect: Vec<(LoopAlgebra, Vec<i64>)> = vec![
        (build("A1", None, vec![1, 0]), vec![1, 1]),
        (build("A2", Some(vec![1, 0]), vec![1, 0]), vec![1, 2]),
        (build("B2", None, vec![1, 0, 0]), vec![1, 1, 2]),
        (build("C2", None, vec![1, 0, 0]), vec![1, 2, 1]),
        (build("D4", Some(vec![2, 1, 3, 0]), vec![1, 0, 0]), vec![1, 2, 1]),
        (build("D4", Some(vec![0, 1, 3, 2]), vec![1, 0, 0, 0]), vec![1, 1, 1, 1]),
    ];
    for (alg, marks) in expect {
        assert_eq!(alg.st.marks, marks);
        let a = &alg.st.affine_cartan;
        for j in 0..a.len() {
            let s: i64 = (0..a.len()).map(|i| marks[i] * a[i][j]).sum();
            assert_eq!(s, 0);
        }
    }
}

#[test]
fn order_formula() {
    for alg in samples() {
        let sum: i64 = alg.st.marks.iter().zip(&alg.s).map(|(a, s)| a * s).sum();
        assert_eq!(alg.m, alg.order_nu() * sum);
    }
}

#[test]
fn graded_pieces_partition_the_algebra() {
    for alg in samples() {
        let total: usize = (0..alg.m).map(|k| alg.graded_piece(k).len()).sum();
        assert_eq!(total, alg.dim());
    }
}

#[test]
fn bad_gradings_rejected() {
    assert!(LoopAlgebra::build("A1", None, vec![0, 0]).is_err());
    assert!(LoopAlgebra::build("A1", None, vec![1]).is_err());
    assert!(LoopAlgebra::build("A1", None, vec![-1, 2]).is_err());
    assert!(LoopAlgebra::build("A1", None, vec![5000, 0]).is_err());
    assert!(LoopAlgebra::build("A2", Some(vec![0, 0]), vec![1, 0]).is_err());
}

#[test]
fn brackets_are_graded_and_consistent() {
    for alg in samples() {
        let b = alg.basis_upto(1);
        for &(l1, a1) in &b {
            for &(l2, a2) in &b {
                let br = alg.bracket(&LoopElement::basis(l1, a1), &LoopElement::basis(l2, a2));
                for &(l, a) in br.terms.keys() {
                    assert_eq!(l, l1 + l2);
                    assert!(alg.is_consistent(l, a));
                    let c: Vec<i64> = alg.root_coeffs(l1, a1).iter().zip(alg.root_coeffs(l2, a2)).map(|(x, y)| x + y).collect();
                    assert_eq!(alg.root_coeffs(l, a), c);
                }
            }
        }
    }
}

#[test]
fn root_decomposition_signs() {
    for alg in samples() {
        for (l, a) in alg.basis_upto(3) {
            let c = alg.root_coeffs(l, a);
            let part = alg.part(l, a);
            if c.iter().all(|x| *x == 0) {
                assert_eq!(part, Part::Cartan);
            } else if c.iter().all(|x| *x >= 0) {
                assert_eq!(part, Part::Positive);
                assert!(l >= 0);
            } else {
                assert!(c.iter().all(|x| *x <= 0));
                assert_eq!(part, Part::Negative);
                assert!(l <= 0);
            }
            assert_eq!(alg.s_height(&c), l);
        }
    }
}

#[test]
fn chevalley_generators() {
    for alg in samples() {
        let n = alg.n();
        for i in 0..=n {
            for j in 0..=n {
                let br = alg.bracket(&alg.x_plus(i), &alg.x_minus(j));
                if i == j {
                    assert_eq!(br, alg.h_gen(i));
                } else {
                    assert!(br.is_zero());
                }
                // [H_i, X_j^+] = α_j(H_i) X_j^+
                let h = alg.h_gen(i);
                let u = alg.cartan_coords(&h);
                let aj: Scalar = alg.st.alpha_on_u[j].iter().zip(&u).map(|(x, y)| x * y).sum();
                assert_eq!(alg.bracket(&h, &alg.x_plus(j)), alg.x_plus(j).scale(&aj));
                assert_eq!(alg.bracket(&h, &alg.x_minus(j)), alg.x_minus(j).scale(&-&aj));
            }
        }
    }
}

#[test]
fn sl2_root_vectors() {
    let alg = build("A1", None, vec![1, 0]);
    let (b, bm) = alg.root_vector(0, alg.root_basis_vector(&[0, 1]).unwrap().1).unwrap();
    // Killing form: B(e, f) = 4, so the dual of e is f/4
    assert_eq!(b, alg.x_plus(1));
    let f = alg.bracket(&alg.x_plus(1), &alg.x_minus(1));
    assert_eq!(f, alg.h_gen(1));
    assert_eq!(alg.form(&b, &bm), Scalar::one());
    let fl = alg.root_basis_vector(&[0, -1]).unwrap();
    assert_eq!(bm, LoopElement::basis(fl.0, fl.1).scale(&Scalar::frac(1, 4)));
}

#[test]
fn root_vectors_are_dual() {
    for alg in samples() {
        for (l, a) in alg.basis_upto(2) {
            if alg.st.basis[a].is_weight_zero() {
                assert!(alg.root_vector(l, a).is_err());
                continue;
            }
            let (b, bm) = alg.root_vector(l, a).unwrap();
            assert_eq!(alg.form(&b, &bm), Scalar::one());
        }
    }
}

#[test]
fn parabolic_membership_untwisted() {
    // S = Π∖{α₀} with s = (1,0,…): the parabolic is 𝔤[z]
    let alg = build("A2", None, vec![1, 0, 0]);
    let span = alg.parabolic_span(&[1, 2], 2).unwrap();
    let expect: Vec<(i64, usize)> = alg.basis_upto(2).into_iter().filter(|&(l, _)| l >= 0).collect();
    let mut span_sorted = span.clone();
    span_sorted.sort();
    let mut e = expect.clone();
    e.sort();
    assert_eq!(span_sorted, e);
    assert!(alg.parabolic_span(&[0, 1, 2], 2).is_err());
    assert!(alg.parabolic_span(&[7], 2).is_err());
}

#[test]
fn parabolic_membership_is_a_subalgebra() {
    let alg = build("B2", None, vec![1, 1, 1]);
    let s = [0usize, 2];
    let span = alg.parabolic_span(&s, 3).unwrap();
    for &(l1, a1) in &span {
        for &(l2, a2) in &span {
            if (l1 + l2).abs() > 3 {
                continue;
            }
            let br = alg.bracket(&LoopElement::basis(l1, a1), &LoopElement::basis(l2, a2));
            assert!(alg.parabolic_contains(&s, &br));
        }
    }
}

#[test]
fn adapted_vectors_are_nu_eigenvectors() {
    for alg in samples() {
        let nu = alg.st.nu_matrix();
        let dim = alg.dim();
        for a in 0..dim {
            let v = alg.st.adapted_to_chevalley(a).to_dense(dim);
            let w = cybe_core::linalg::mat_vec(&nu, &v);
            let k = v.iter().position(|x| !x.is_zero()).unwrap();
            let lam = &w[k] / &v[k];
            let scaled: Vec<Scalar> = v.iter().map(|x| x * &lam).collect();
            assert_eq!(w, scaled);
            assert!(lam.pow(alg.order_nu() as u32).is_one());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jacobi_and_invariance(which in 0usize..8,
                             x in prop::collection::vec((0usize..200, -3i64..4), 1..4),
                             y in prop::collection::vec((0usize..200, -3i64..4), 1..4),
                             z in prop::collection::vec((0usize..200, -3i64..4), 1..4)) {
        let alg = &samples()[which];
        let (f, g, h) = (element(alg, &x), element(alg, &y), element(alg, &z));
        let j = alg.bracket(&f, &alg.bracket(&g, &h))
            .add(&alg.bracket(&g, &alg.bracket(&h, &f)))
            .add(&alg.bracket(&h, &alg.bracket(&f, &g)));
        prop_assert!(j.is_zero());
        prop_assert_eq!(alg.form(&alg.bracket(&f, &g), &h), alg.form(&f, &alg.bracket(&g, &h)));
        prop_assert_eq!(alg.form(&f, &g), alg.form(&g, &f));
        prop_assert_eq!(alg.bracket(&f, &g), alg.bracket(&g, &f).scale(&Scalar::from_i64(-1)));
    }
}
