//! Affine Dynkin diagram symmetries, their action on quadruples, orbit
//! enumeration and the quasi-trigonometric census.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bdquad::{self, BDQuadruple};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::loopalg::LoopAlgebra;
use crate::scalar::Scalar;
use crate::simplelie::{build_root_system, CartanType, Series};

/// Default cap on the number of affine nodes for exhaustive searches.
pub const NODE_CAP: usize = 13;

/// Affine Cartan matrix together with `B(α_i^∨, α_j^∨)`, `α^∨` the B-dual
/// of `α`, up to a common factor.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineDiagram {
    pub label: String,
    pub cartan: Vec<Vec<i64>>,
    pub form: Vec<Vec<Scalar>>,
}

impl AffineDiagram {
    pub fn nodes(&self) -> usize {
        self.cartan.len()
    }

    pub fn from_algebra(alg: &LoopAlgebra) -> AffineDiagram {
        let n1 = alg.n() + 1;
        let form = (0..n1).map(|i| (0..n1).map(|j| bdquad::coroot_form(alg, i, j)).collect()).collect();
        let label = if alg.order_nu() == 1 { format!("{}^(1)", alg.st.g.rs.ty) } else { format!("{}^({})", alg.st.g.rs.ty, alg.order_nu()) };
        AffineDiagram { label, cartan: alg.st.affine_cartan.clone(), form }
    }

    /// Untwisted extended diagram computed from the finite root system with
    /// `α₀ = −θ`; no loop algebra is built.
    pub fn untwisted(ty: CartanType) -> Result<AffineDiagram> {
        let rs = build_root_system(ty)?;
        let n = rs.rank();
        let theta = rs.highest_root();
        let mut roots: Vec<Vec<i64>> = vec![theta.iter().map(|x| -x).collect()];
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            roots.push(e);
        }
        let ip = |a: &[i64], b: &[i64]| Scalar::from_rational(rs.inner(a, b));
        let len: Vec<Scalar> = roots.iter().map(|r| ip(r, r)).collect();
        let mut cartan = vec![vec![0i64; n + 1]; n + 1];
        let mut form = vec![vec![Scalar::zero(); n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=n {
                let p = ip(&roots[i], &roots[j]);
                let a = Scalar::from_i64(2) * &p / &len[j];
                cartan[i][j] = a.to_i64().ok_or_else(|| Error::Inconsistent("non-integral Cartan entry".into()))?;
                form[i][j] = p;
            }
        }
        Ok(AffineDiagram { label: format!("{ty}^(1)"), cartan, form })
    }

    /// Whether `form` agrees with `other` up to a nonzero common factor.
    pub fn same_form_up_to_scale(&self, other: &AffineDiagram) -> bool {
        if self.nodes() != other.nodes() {
            return false;
        }
        let ratio = &self.form[0][0] / &other.form[0][0];
        (0..self.nodes()).all(|i| (0..self.nodes()).all(|j| self.form[i][j] == &ratio * &other.form[i][j]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DiagramAutomorphism {
    pub perm: Vec<usize>,
}

impl DiagramAutomorphism {
    pub fn identity(n: usize) -> DiagramAutomorphism {
        DiagramAutomorphism { perm: (0..n).collect() }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DiagramAutomorphism) -> DiagramAutomorphism {
        DiagramAutomorphism { perm: other.perm.iter().map(|&i| self.perm[i]).collect() }
    }

    pub fn inverse(&self) -> DiagramAutomorphism {
        let mut p = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            p[j] = i;
        }
        DiagramAutomorphism { perm: p }
    }

    pub fn is_automorphism_of(&self, d: &AffineDiagram) -> bool {
        let n = d.nodes();
        self.perm.len() == n
            && crate::simplelie::is_permutation(&self.perm)
            && (0..n).all(|i| (0..n).all(|j| d.cartan[self.perm[i]][self.perm[j]] == d.cartan[i][j]))
    }
}

/// All permutations preserving the affine Cartan matrix, sorted.
pub fn diagram_automorphisms(d: &AffineDiagram) -> Vec<DiagramAutomorphism> {
    let n = d.nodes();
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(d: &AffineDiagram, k: usize, perm: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<DiagramAutomorphism>) {
        let n = d.nodes();
        if k == n {
            out.push(DiagramAutomorphism { perm: perm.clone() });
            return;
        }
        for c in 0..n {
            if used[c] || d.cartan[c][c] != d.cartan[k][k] {
                continue;
            }
            if (0..k).all(|j| d.cartan[c][perm[j]] == d.cartan[k][j] && d.cartan[perm[j]][c] == d.cartan[j][k]) {
                perm[k] = c;
                used[c] = true;
                rec(d, k + 1, perm, used, out);
                used[c] = false;
            }
        }
        perm[k] = usize::MAX;
    }
    rec(d, 0, &mut perm, &mut used, &mut out);
    out.sort();
    out
}

/// Combinatorial part `(Γ₁, Γ₂, γ)`.
pub type Triple = BTreeMap<usize, usize>;

pub fn act_on_triple(th: &DiagramAutomorphism, g: &Triple) -> Triple {
    g.iter().map(|(&i, &j)| (th.apply(i), th.apply(j))).collect()
}

/// Matrix `M` on 𝔥 (u-coordinates) with `M α_i^∨ = α_{ϑ(i)}^∨`.
pub fn cartan_action(alg: &LoopAlgebra, th: &DiagramAutomorphism) -> Result<Mat> {
    let n = alg.n();
    let cor: Vec<Vec<Scalar>> = (0..=n).map(|i| alg.coroot(i)).collect();
    let idx = linalg::independent_subset(&cor);
    if idx.len() != n {
        return Err(Error::Inconsistent("coroots do not span 𝔥".into()));
    }
    // M C = C' with C the chosen coroots as columns
    let c: Mat = linalg::transpose(&idx.iter().map(|&i| cor[i].clone()).collect::<Vec<_>>());
    let cp: Mat = linalg::transpose(&idx.iter().map(|&i| cor[th.apply(i)].clone()).collect::<Vec<_>>());
    let cinv = linalg::inverse(&c).ok_or_else(|| Error::Inconsistent("singular coroot matrix".into()))?;
    let m = linalg::mat_mul(&cp, &cinv);
    for i in 0..=n {
        if linalg::mat_vec(&m, &cor[i]) != cor[th.apply(i)] {
            return Err(Error::invalid("permutation does not act linearly on the coroots"));
        }
    }
    Ok(m)
}

/// `ϑ(Q)`: `ϑγϑ⁻¹` and `(ϑ⊗ϑ)t_𝔥`.
pub fn act(alg: &LoopAlgebra, th: &DiagramAutomorphism, q: &BDQuadruple) -> Result<BDQuadruple> {
    let d = AffineDiagram::from_algebra(alg);
    if !th.is_automorphism_of(&d) {
        return Err(Error::invalid(format!("{:?} is not a diagram automorphism", th.perm)));
    }
    let m = cartan_action(alg, th)?;
    let t = linalg::mat_mul(&linalg::mat_mul(&m, &q.t_h), &linalg::transpose(&m));
    Ok(BDQuadruple { gamma: act_on_triple(th, &q.gamma), t_h: t })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchMode {
    /// `act(ϑ, Q) = Q′` exactly.
    Exact,
    /// `t_𝔥` compared as affine solution families.
    Family,
}

fn in_affine_family(alg: &LoopAlgebra, gamma: &Triple, diff: &Mat) -> Result<bool> {
    let sol = bdquad::th_solution_space(alg, gamma)?;
    let n = alg.n();
    let flat = |m: &Mat| -> Vec<Scalar> { (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).map(|(p, q)| m[p][q].clone()).collect() };
    let target = flat(diff);
    if target.iter().all(|x| x.is_zero()) {
        return Ok(true);
    }
    if sol.homogeneous.is_empty() {
        return Ok(false);
    }
    let cols: Vec<Vec<Scalar>> = sol.homogeneous.iter().map(flat).collect();
    let a = linalg::transpose(&cols);
    Ok(linalg::solve(&a, &target, cols.len()).is_some())
}

/// Some `ϑ` with `act(ϑ, Q) = Q′` (exactly, or up to the `t_𝔥` family).
pub fn equivalence_witness(alg: &LoopAlgebra, q: &BDQuadruple, q2: &BDQuadruple, mode: MatchMode) -> Result<Option<DiagramAutomorphism>> {
    Ok(equivalence_witnesses(alg, q, q2, mode)?.into_iter().next())
}

pub fn equivalence_witnesses(alg: &LoopAlgebra, q: &BDQuadruple, q2: &BDQuadruple, mode: MatchMode) -> Result<Vec<DiagramAutomorphism>> {
    let n = alg.n();
    for x in [q, q2] {
        if x.t_h.len() != n || x.t_h.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("quadruple does not belong to this diagram"));
        }
    }
    let d = AffineDiagram::from_algebra(alg);
    let mut out = Vec::new();
    for th in diagram_automorphisms(&d) {
        if act_on_triple(&th, &q.gamma) != q2.gamma {
            continue;
        }
        let moved = act(alg, &th, q)?;
        let ok = match mode {
            MatchMode::Exact => moved.t_h == q2.t_h,
            MatchMode::Family => {
                let diff: Mat = moved.t_h.iter().zip(&q2.t_h).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
                in_affine_family(alg, &q2.gamma, &diff)?
            }
        };
        if ok {
            out.push(th);
        }
    }
    Ok(out)
}

/// Conditions 1–2 on a combinatorial triple.
pub fn triple_is_valid(d: &AffineDiagram, g: &Triple) -> bool {
    let n = d.nodes();
    if g.len() >= n || g.iter().any(|(&i, &j)| i >= n || j >= n) {
        return false;
    }
    let img: BTreeSet<usize> = g.values().copied().collect();
    if img.len() != g.len() {
        return false;
    }
    for (&i, &gi) in g {
        for (&j, &gj) in g {
            if d.form[gi][gj] != d.form[i][j] {
                return false;
            }
        }
    }
    bdquad::check_nilpotent(g).ok
}

/// Every valid triple on the diagram, sorted.
pub fn enumerate_triples(d: &AffineDiagram) -> Result<Vec<Triple>> {
    let n = d.nodes();
    if n > NODE_CAP {
        return Err(Error::Limit(format!("{} nodes exceed the enumeration cap {NODE_CAP}", n)));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) - 1 {
        let g1: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        isometric_maps(d, &g1, usize::MAX, &mut |g| {
            out.push(g.clone());
            true
        });
    }
    out.sort();
    Ok(out)
}

/// Backtrack over injective, form-preserving, nilpotent `γ: Γ₁ → Π`; calls
/// `visit` on each and stops once it returns false or `limit` maps were found.
fn isometric_maps(d: &AffineDiagram, g1: &[usize], limit: usize, visit: &mut dyn FnMut(&Triple) -> bool) -> usize {
    let n = d.nodes();
    let mut found = 0;
    let mut cur = Triple::new();
    let mut used = vec![false; n];
    fn escapes(cur: &Triple, g1: &[usize], start: usize) -> bool {
        // a cycle can only close among assigned nodes
        let mut x = start;
        for _ in 0..=g1.len() {
            match cur.get(&x) {
                Some(&y) => x = y,
                None => return true,
            }
        }
        false
    }
    fn rec(d: &AffineDiagram, g1: &[usize], k: usize, cur: &mut Triple, used: &mut Vec<bool>, found: &mut usize, limit: usize, visit: &mut dyn FnMut(&Triple) -> bool) -> bool {
        if k == g1.len() {
            *found += 1;
            return visit(cur) && *found < limit;
        }
        let i = g1[k];
        for c in 0..d.nodes() {
            if used[c] || c == i || d.form[c][c] != d.form[i][i] {
                continue;
            }
            if !cur.iter().all(|(&j, &gj)| d.form[c][gj] == d.form[i][j]) {
                continue;
            }
            cur.insert(i, c);
            if escapes(cur, g1, i) {
                used[c] = true;
                let go = rec(d, g1, k + 1, cur, used, found, limit, visit);
                used[c] = false;
                if !go {
                    cur.remove(&i);
                    return false;
                }
            }
            cur.remove(&i);
        }
        true
    }
    rec(d, g1, 0, &mut cur, &mut used, &mut found, limit, visit);
    found
}

/// Whether some valid triple has first set `Γ₁`.
pub fn admits_triple(d: &AffineDiagram, g1: &[usize]) -> bool {
    g1.len() < d.nodes() && isometric_maps(d, g1, 1, &mut |_| false) > 0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orbit {
    pub representative: Vec<(usize, usize)>,
    pub size: usize,
}

/// Orbits of valid triples under the diagram group; representatives are the
/// lexicographically least member.
pub fn enumerate_representatives(d: &AffineDiagram) -> Result<Vec<Orbit>> {
    let triples = enumerate_triples(d)?;
    let group = diagram_automorphisms(d);
    let mut seen: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let mut out = Vec::new();
    for t in &triples {
        let key: Vec<(usize, usize)> = t.iter().map(|(a, b)| (*a, *b)).collect();
        if seen.contains(&key) {
            continue;
        }
        let orbit: BTreeSet<Vec<(usize, usize)>> = group.iter().map(|th| act_on_triple(th, t).into_iter().collect()).collect();
        let rep = orbit.iter().next().unwrap().clone();
        out.push(Orbit { representative: rep, size: orbit.len() });
        seen.extend(orbit);
    }
    out.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(out)
}

/// An automorphism `ϑ` with `0 ∉ ϑ(Γ₁)`, if one exists.
pub fn quasi_trig_reachable(d: &AffineDiagram, g1: &[usize]) -> Option<DiagramAutomorphism> {
    diagram_automorphisms(d).into_iter().find(|th| g1.iter().all(|&i| th.apply(i) != 0))
}

/// The orbit of the affine node under the diagram group.
pub fn affine_node_orbit(d: &AffineDiagram) -> BTreeSet<usize> {
    diagram_automorphisms(d).iter().map(|th| th.inverse().apply(0)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusEntry {
    #[serde(rename = "type")]
    pub ty: String,
    pub rank: usize,
    pub good: bool,
    pub witness_gamma1: Option<Vec<usize>>,
}

/// Looks for a `Γ₁` that occurs in some valid triple and cannot be moved off
/// the affine node. `Γ₁` is unreachable exactly when it contains the orbit of
/// the affine node, so only those supersets are scanned.
pub fn census_entry(ty: CartanType) -> Result<CensusEntry> {
    let d = AffineDiagram::untwisted(ty)?;
    let n = d.nodes();
    if n > NODE_CAP {
        return Err(Error::Limit(format!("{ty}: {n} nodes exceed the census cap {NODE_CAP}")));
    }
    let orbit = affine_node_orbit(&d);
    let rest: Vec<usize> = (0..n).filter(|i| !orbit.contains(i)).collect();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for mask in 0u32..(1 << rest.len()) {
        let mut g1: Vec<usize> = orbit.iter().copied().collect();
        g1.extend(rest.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i));
        g1.sort();
        if g1.len() < n {
            candidates.push(g1);
        }
    }
    candidates.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    let witness = candidates.into_iter().find(|g1| admits_triple(&d, g1));
    Ok(CensusEntry { ty: ty.to_string(), rank: ty.rank, good: witness.is_none(), witness_gamma1: witness })
}

/// Census over the given series letters and ranks `≤ max_rank`.
pub fn type_census(series: &[Series], max_rank: usize) -> Result<Vec<CensusEntry>> {
    let mut out = Vec::new();
    for &s in series {
        for r in 1..=max_rank {
            if let Ok(ty) = CartanType::new(s, r) {
                out.push(census_entry(ty)?);
            }
        }
    }
    Ok(out)
}

/// Whether some equivalence witness between `Q` and `Q′` preserves `S`.
pub fn parabolic_restriction_check(alg: &LoopAlgebra, q: &BDQuadruple, q2: &BDQuadruple, s: &[usize]) -> Result<bool> {
    let set: BTreeSet<usize> = s.iter().copied().collect();
    for x in [q, q2] {
        if x.gamma.keys().any(|i| !set.contains(i)) {
            return Err(Error::invalid("Γ₁ is not contained in S"));
        }
    }
    let ws = equivalence_witnesses(alg, q, q2, MatchMode::Family)?;
    Ok(ws.iter().any(|th| set.iter().map(|&i| th.apply(i)).collect::<BTreeSet<_>>() == set))
}
