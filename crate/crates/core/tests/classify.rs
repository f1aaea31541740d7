use std::collections::{BTreeMap, BTreeSet};

use cybe_core::bdquad::{build_twist, canonical_quadruple, validate, BDQuadruple};
use cybe_core::classify::*;
use cybe_core::loopalg::LoopAlgebra;
use cybe_core::simplelie::{CartanType, Series};
use cybe_core::trigtensor::{cybe, r0};
use cybe_core::Scalar;
use proptest::prelude::*;

fn untwisted(t: &str) -> LoopAlgebra {
    let rank = CartanType::parse(t).unwrap().rank;
    let mut s = vec![0; rank + 1];
    s[0] = 1;
    LoopAlgebra::build(t, None, s).unwrap()
}

fn diagram(t: &str) -> AffineDiagram {
    AffineDiagram::untwisted(CartanType::parse(t).unwrap()).unwrap()
}

fn gamma(pairs: &[(usize, usize)]) -> Triple {
    pairs.iter().copied().collect()
}

#[test]
fn automorphism_group_orders() {
    let cases = [
        ("A1", 2),
        ("A2", 6),
        ("A3", 8),
        ("A4", 10),
        ("B2", 2),
        ("B3", 2),
        ("C3", 2),
        ("D4", 24),
        ("D5", 8),
        ("E6", 6),
        ("E7", 2),
        ("E8", 1),
        ("F4", 1),
        ("G2", 1),
    ];
    for (t, order) in cases {
        let d = diagram(t);
        let g = diagram_automorphisms(&d);
        assert_eq!(g.len(), order, "{t}");
        assert!(g.iter().all(|th| th.is_automorphism_of(&d)));
        assert_eq!(g[0], DiagramAutomorphism::identity(d.nodes()));
    }
}

#[test]
fn untwisted_diagram_matches_the_loop_algebra() {
    for t in ["A2", "B2", "C3", "G2", "D4"] {
        let a = diagram(t);
        let b = AffineDiagram::from_algebra(&untwisted(t));
        assert_eq!(a.cartan, b.cartan, "{t}");
        assert!(a.same_form_up_to_scale(&b), "{t}");
    }
}

#[test]
fn group_is_closed() {
    for t in ["A3", "D4", "E6"] {
        let d = diagram(t);
        let g: BTreeSet<DiagramAutomorphism> = diagram_automorphisms(&d).into_iter().collect();
        for a in &g {
            assert!(g.contains(&a.inverse()));
            assert_eq!(a.compose(&a.inverse()), DiagramAutomorphism::identity(d.nodes()));
            for b in &g {
                assert!(g.contains(&a.compose(b)));
            }
        }
    }
}

#[test]
fn action_preserves_validity_and_composes() {
    let alg = untwisted("A2");
    let d = AffineDiagram::from_algebra(&alg);
    let group = diagram_automorphisms(&d);
    for g in enumerate_triples(&d).unwrap() {
        let q = canonical_quadruple(&alg, g).unwrap();
        for a in &group {
            let qa = act(&alg, a, &q).unwrap();
            assert!(validate(&alg, &qa).is_valid());
            for b in &group {
                let lhs = act(&alg, &a.compose(b), &q).unwrap();
                let rhs = act(&alg, a, &act(&alg, b, &q).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn equivalence_witness_is_symmetric() {
    let alg = untwisted("A2");
    let d = AffineDiagram::from_algebra(&alg);
    let qs: Vec<BDQuadruple> = enumerate_triples(&d).unwrap().into_iter().map(|g| canonical_quadruple(&alg, g).unwrap()).collect();
    for q in &qs {
        for q2 in &qs {
            let fwd = equivalence_witness(&alg, q, q2, MatchMode::Family).unwrap();
            let back = equivalence_witness(&alg, q2, q, MatchMode::Family).unwrap();
            assert_eq!(fwd.is_some(), back.is_some());
            if let Some(th) = fwd {
                assert_eq!(act_on_triple(&th, &q.gamma), q2.gamma);
            }
        }
    }
}

#[test]
fn equivalence_rejects_foreign_quadruples() {
    let alg = untwisted("A2");
    let q = BDQuadruple::trivial(2);
    assert!(equivalence_witness(&alg, &q, &BDQuadruple::trivial(3), MatchMode::Exact).is_err());
}

#[test]
fn exact_mode_sees_t_h() {
    let alg = untwisted("A2");
    let q = BDQuadruple::trivial(2);
    let mut q2 = BDQuadruple::trivial(2);
    q2.t_h[0][1] = Scalar::one();
    q2.t_h[1][0] = Scalar::from_i64(-1);
    assert!(equivalence_witness(&alg, &q, &q2, MatchMode::Exact).unwrap().is_none());
    // the homogeneous family on Γ₁ = ∅ is all of Λ²𝔥
    assert!(equivalence_witness(&alg, &q, &q2, MatchMode::Family).unwrap().is_some());
}

#[test]
fn orbits_partition_the_triples() {
    for t in ["A1", "A2", "A3", "C2", "D4"] {
        let d = diagram(t);
        let order = diagram_automorphisms(&d).len();
        let triples = enumerate_triples(&d).unwrap();
        let orbits = enumerate_representatives(&d).unwrap();
        assert_eq!(orbits.iter().map(|o| o.size).sum::<usize>(), triples.len(), "{t}");
        for o in &orbits {
            assert_eq!(order % o.size, 0);
            let g: Triple = o.representative.iter().copied().collect();
            assert!(triple_is_valid(&d, &g));
        }
    }
}

#[test]
fn small_triple_counts() {
    // A1: ∅, 0→1, 1→0
    assert_eq!(enumerate_triples(&diagram("A1")).unwrap().len(), 3);
    let a2 = enumerate_triples(&diagram("A2")).unwrap();
    assert!(a2.contains(&gamma(&[(1, 2)])));
    assert!(a2.contains(&gamma(&[(0, 1), (1, 2)])));
    assert!(!a2.contains(&gamma(&[(1, 1)])));
    // G2 has three distinct root lengths on its affine diagram, so only the
    // trivial triple and α₀ ↔ long simple root survive
    let g2 = enumerate_triples(&diagram("G2")).unwrap();
    assert!(g2.iter().all(|g| g.len() <= 1));
}

#[test]
fn enumerated_twists_are_cybe_solutions() {
    for t in ["A1", "A2", "C2"] {
        let alg = untwisted(t);
        let r = r0(&alg);
        for g in enumerate_triples(&AffineDiagram::from_algebra(&alg)).unwrap() {
            let q = canonical_quadruple(&alg, g).unwrap();
            assert!(cybe(&alg, &r.add_poly(&build_twist(&alg, &q).unwrap())).is_zero());
        }
    }
}

#[test]
fn reachability() {
    let a2 = diagram("A2");
    assert!(quasi_trig_reachable(&a2, &[0, 1]).is_some());
    assert!(quasi_trig_reachable(&a2, &[0, 1, 2]).is_none());
    let e8 = diagram("E8");
    assert!(quasi_trig_reachable(&e8, &[0]).is_none());
    assert!(quasi_trig_reachable(&e8, &[1, 2]).is_some());
    let th = quasi_trig_reachable(&diagram("D4"), &[0, 1]).unwrap();
    assert!(th.apply(0) != 0 && th.apply(1) != 0);
}

#[test]
fn affine_node_orbits() {
    assert_eq!(affine_node_orbit(&diagram("A3")), (0..4).collect());
    assert_eq!(affine_node_orbit(&diagram("B4")), [0, 1].into_iter().collect());
    assert_eq!(affine_node_orbit(&diagram("D6")), [0, 1, 5, 6].into_iter().collect());
    assert_eq!(affine_node_orbit(&diagram("E7")), [0, 7].into_iter().collect());
    assert_eq!(affine_node_orbit(&diagram("G2")), [0].into_iter().collect());
}

// Scan every proper subset, not only those containing the affine orbit.
fn census_by_brute_force(t: &str) -> Option<Vec<usize>> {
    let d = diagram(t);
    let n = d.nodes();
    let mut subsets: Vec<Vec<usize>> = (0u32..(1 << n)).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>()).filter(|s| s.len() < n).collect();
    subsets.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    subsets.into_iter().find(|g1| quasi_trig_reachable(&d, g1).is_none() && admits_triple(&d, g1))
}

#[test]
fn census_matches_brute_force() {
    for t in ["A1", "A3", "B2", "B3", "B4", "B5", "C3", "D4", "D5", "D6", "G2", "F4"] {
        let e = census_entry(CartanType::parse(t).unwrap()).unwrap();
        assert_eq!(e.witness_gamma1, census_by_brute_force(t), "{t}");
        assert_eq!(e.good, e.witness_gamma1.is_none());
    }
}

#[test]
fn census_rows() {
    let rows = type_census(&[Series::A, Series::C], 4).unwrap();
    assert!(rows.iter().all(|r| r.good));
    let e = census_entry(CartanType::parse("B4").unwrap()).unwrap();
    assert_eq!(e.witness_gamma1, Some(vec![0, 1]));
    let e = census_entry(CartanType::parse("E8").unwrap()).unwrap();
    assert_eq!(e.witness_gamma1, Some(vec![0]));
    for t in ["B3", "D4", "D5"] {
        assert!(census_entry(CartanType::parse(t).unwrap()).unwrap().good, "{t}");
    }
}

#[test]
fn parabolic_check_on_a2() {
    let alg = untwisted("A2");
    let q = canonical_quadruple(&alg, gamma(&[(1, 2)])).unwrap();
    let flipped = canonical_quadruple(&alg, gamma(&[(2, 1)])).unwrap();
    // the reflection fixing α₀ swaps 1 and 2 and preserves {1,2}
    assert!(parabolic_restriction_check(&alg, &q, &flipped, &[1, 2]).unwrap());
    // 1→0 is only reached by rotations that move α₀
    let moved = canonical_quadruple(&alg, gamma(&[(2, 0)])).unwrap();
    assert!(equivalence_witness(&alg, &q, &moved, MatchMode::Family).unwrap().is_some());
    assert!(parabolic_restriction_check(&alg, &q, &moved, &[0, 1, 2]).unwrap());
    assert!(!parabolic_restriction_check(&alg, &q, &moved, &[1, 2]).unwrap());
    // Γ₁ = {1} does not fit in S = {2}
    assert!(parabolic_restriction_check(&alg, &q, &flipped, &[2]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn acting_on_triples_preserves_validity(perm_idx in 0usize..6, mask in 0u32..8, images in prop::collection::vec(0usize..3, 3)) {
        let d = diagram("A2");
        let th = &diagram_automorphisms(&d)[perm_idx];
        let g: BTreeMap<usize, usize> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| (i, images[i])).collect();
        let moved = act_on_triple(th, &g);
        prop_assert_eq!(triple_is_valid(&d, &g), triple_is_valid(&d, &moved));
        prop_assert_eq!(act_on_triple(&th.inverse(), &moved), g);
    }
}
