//! Belavin–Drinfeld quadruples on the diagram of a loop algebra and the
//! twists, operators and Lagrangian subalgebras built from them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::loopalg::{LoopAlgebra, LoopElement, Part};
use crate::scalar::Scalar;
use crate::trigtensor::{self, casimir_components, Laurent2, TwoPointTensor};

/// `(Γ₁, Γ₂, γ, t_𝔥)`; `t_h` is an `n × n` matrix in the basis `u_1..u_n` of 𝔥.
#[derive(Clone, Debug, PartialEq)]
pub struct BDQuadruple {
    pub gamma: BTreeMap<usize, usize>,
    pub t_h: Mat,
}

impl BDQuadruple {
    pub fn new(gamma: BTreeMap<usize, usize>, t_h: Mat) -> BDQuadruple {
        BDQuadruple { gamma, t_h }
    }

    pub fn gamma1(&self) -> Vec<usize> {
        self.gamma.keys().copied().collect()
    }

    pub fn gamma2(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.gamma.values().copied().collect();
        v.sort();
        v
    }

    /// Quadruple with empty Γ's and `t_𝔥 = 0`.
    pub fn trivial(n: usize) -> BDQuadruple {
        BDQuadruple { gamma: BTreeMap::new(), t_h: linalg::zeros(n, n) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Pair(usize, usize),
    Orbit(usize),
    Residual(usize, Vec<Scalar>),
    Message(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub ok: bool,
    pub witness: Option<Witness>,
}

impl ConditionReport {
    fn pass() -> ConditionReport {
        ConditionReport { ok: true, witness: None }
    }

    fn fail(w: Witness) -> ConditionReport {
        ConditionReport { ok: false, witness: Some(w) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub structure: ConditionReport,
    pub lengths: ConditionReport,
    pub nilpotent: ConditionReport,
    pub cartan: ConditionReport,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.structure.ok && self.lengths.ok && self.nilpotent.ok && self.cartan.ok
    }
}

/// `B(α_i^∨, α_j^∨)` for affine nodes.
pub fn coroot_form(alg: &LoopAlgebra, i: usize, j: usize) -> Scalar {
    alg.st.h_form(&alg.coroot(i), &alg.coroot(j))
}

pub fn check_structure(n: usize, gamma: &BTreeMap<usize, usize>) -> ConditionReport {
    let nodes = n + 1;
    if gamma.keys().chain(gamma.values()).any(|&i| i >= nodes) {
        return ConditionReport::fail(Witness::Message("node index out of range".into()));
    }
    let image: BTreeSet<usize> = gamma.values().copied().collect();
    if image.len() != gamma.len() {
        return ConditionReport::fail(Witness::Message("γ is not injective".into()));
    }
    if gamma.len() >= nodes {
        return ConditionReport::fail(Witness::Message("Γ₁ and Γ₂ must be proper subsets".into()));
    }
    ConditionReport::pass()
}

pub fn check_lengths(alg: &LoopAlgebra, gamma: &BTreeMap<usize, usize>) -> ConditionReport {
    for (&i, &gi) in gamma {
        for (&j, &gj) in gamma {
            if j < i {
                continue;
            }
            if coroot_form(alg, gi, gj) != coroot_form(alg, i, j) {
                return ConditionReport::fail(Witness::Pair(i, j));
            }
        }
    }
    ConditionReport::pass()
}

pub fn check_nilpotent(gamma: &BTreeMap<usize, usize>) -> ConditionReport {
    for &i in gamma.keys() {
        let mut x = i;
        let mut steps = 0;
        while let Some(&y) = gamma.get(&x) {
            x = y;
            steps += 1;
            if steps > gamma.len() {
                return ConditionReport::fail(Witness::Orbit(i));
            }
        }
    }
    ConditionReport::pass()
}

/// `C_𝔥` in u-coordinates.
pub fn casimir_h(alg: &LoopAlgebra) -> Mat {
    alg.st.u_gram_inv.clone()
}

/// `(α_{γ(i)} ⊗ 1 + 1 ⊗ α_i)(T)` as a vector in u-coordinates.
pub fn cartan_residual(alg: &LoopAlgebra, i: usize, gi: usize, t: &Mat) -> Vec<Scalar> {
    let n = alg.n();
    let ag = &alg.st.alpha_on_u[gi];
    let ai = &alg.st.alpha_on_u[i];
    let mut out = vec![Scalar::zero(); n];
    for p in 0..n {
        for q in 0..n {
            if t[p][q].is_zero() {
                continue;
            }
            out[q] += &(&t[p][q] * &ag[p]);
            out[p] += &(&t[p][q] * &ai[q]);
        }
    }
    out
}

pub fn check_cartan(alg: &LoopAlgebra, q: &BDQuadruple) -> ConditionReport {
    let n = alg.n();
    if q.t_h.len() != n || q.t_h.iter().any(|r| r.len() != n) {
        return ConditionReport::fail(Witness::Message(format!("t_h must be {n}×{n}")));
    }
    for p in 0..n {
        for r in 0..n {
            if q.t_h[p][r] != -&q.t_h[r][p] {
                return ConditionReport::fail(Witness::Message("t_h is not skew-symmetric".into()));
            }
        }
    }
    let ch = casimir_h(alg);
    let half = Scalar::frac(1, 2);
    let t: Mat = (0..n).map(|p| (0..n).map(|r| &q.t_h[p][r] + &(&ch[p][r] * &half)).collect()).collect();
    for (&i, &gi) in &q.gamma {
        let res = cartan_residual(alg, i, gi, &t);
        if res.iter().any(|x| !x.is_zero()) {
            return ConditionReport::fail(Witness::Residual(i, res));
        }
    }
    ConditionReport::pass()
}

pub fn validate(alg: &LoopAlgebra, q: &BDQuadruple) -> ValidationReport {
    let structure = check_structure(alg.n(), &q.gamma);
    if !structure.ok {
        let skip = ConditionReport::fail(Witness::Message("structure invalid".into()));
        return ValidationReport { structure, lengths: skip.clone(), nilpotent: skip.clone(), cartan: skip };
    }
    ValidationReport { structure, lengths: check_lengths(alg, &q.gamma), nilpotent: check_nilpotent(&q.gamma), cartan: check_cartan(alg, q) }
}

/// Affine solution space of condition 3 in the skew-symmetric matrices.
#[derive(Clone, Debug)]
pub struct ThSolution {
    pub particular: Mat,
    pub homogeneous: Vec<Mat>,
}

fn skew_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            v.push((p, q));
        }
    }
    v
}

fn skew_from(n: usize, pairs: &[(usize, usize)], x: &[Scalar]) -> Mat {
    let mut m = linalg::zeros(n, n);
    for (k, &(p, q)) in pairs.iter().enumerate() {
        m[p][q] = x[k].clone();
        m[q][p] = -&x[k];
    }
    m
}

pub fn th_solution_space(alg: &LoopAlgebra, gamma: &BTreeMap<usize, usize>) -> Result<ThSolution> {
    let n = alg.n();
    let pairs = skew_pairs(n);
    let ch = casimir_h(alg);
    let half = Scalar::frac(1, 2);
    let half_ch: Mat = ch.iter().map(|r| r.iter().map(|x| x * &half).collect()).collect();
    let mut rows: Mat = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for (&i, &gi) in gamma {
        let cols: Vec<Vec<Scalar>> = pairs
            .iter()
            .map(|&(p, q)| {
                let mut e = linalg::zeros(n, n);
                e[p][q] = Scalar::one();
                e[q][p] = Scalar::from_i64(-1);
                cartan_residual(alg, i, gi, &e)
            })
            .collect();
        let c = cartan_residual(alg, i, gi, &half_ch);
        for r in 0..n {
            rows.push(cols.iter().map(|col| col[r].clone()).collect());
            rhs.push(-&c[r]);
        }
    }
    let nv = pairs.len();
    if rows.is_empty() {
        rows.push(vec![Scalar::zero(); nv]);
        rhs.push(Scalar::zero());
    }
    let particular = minimum_support_solution(&rows, &rhs, nv)
        .ok_or_else(|| Error::Inconsistent("condition 3 has no skew solution".into()))?;
    let homogeneous = linalg::nullspace(&rows, nv).iter().map(|v| skew_from(n, &pairs, v)).collect();
    Ok(ThSolution { particular: skew_from(n, &pairs, &particular), homogeneous })
}

/// Solution of `A x = b` with the fewest nonzero entries; ties broken by
/// the lexicographically smallest support.
pub fn minimum_support_solution(a: &Mat, b: &[Scalar], nv: usize) -> Option<Vec<Scalar>> {
    let general = linalg::solve(a, b, nv)?;
    if nv > 16 {
        return Some(general);
    }
    for size in 0..=nv {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let sub: Mat = a.iter().map(|r| comb.iter().map(|&c| r[c].clone()).collect()).collect();
            if let Some(x) = linalg::solve(&sub, b, size) {
                let mut full = vec![Scalar::zero(); nv];
                for (k, &c) in comb.iter().enumerate() {
                    full[c] = x[k].clone();
                }
                return Some(full);
            }
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if comb[i] < nv - size + i {
                    comb[i] += 1;
                    for j in i + 1..size {
                        comb[j] = comb[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    Some(general)
}

/// Quadruple with the canonical `t_𝔥`.
pub fn canonical_quadruple(alg: &LoopAlgebra, gamma: BTreeMap<usize, usize>) -> Result<BDQuadruple> {
    let sol = th_solution_space(alg, &gamma)?;
    Ok(BDQuadruple { gamma, t_h: sol.particular })
}

/// The partial isomorphism `θ_γ` on the root vectors of `𝔖^{Γ₁}`, zero elsewhere.
#[derive(Clone, Debug)]
pub struct ThetaGamma {
    images: BTreeMap<(i64, usize), LoopElement>,
    /// Positive roots spanned by Γ₁ in Π-coordinates.
    pub positive_roots: Vec<Vec<i64>>,
}

impl ThetaGamma {
    pub fn new(alg: &LoopAlgebra, gamma: &BTreeMap<usize, usize>) -> Result<ThetaGamma> {
        let n1 = alg.n() + 1;
        let mut images = BTreeMap::new();
        let mut positive_roots = Vec::new();
        for sign in [1i64, -1] {
            let gen = |i: usize| if sign > 0 { alg.x_plus(i) } else { alg.x_minus(i) };
            let mut found: BTreeMap<Vec<i64>, (LoopElement, LoopElement)> = BTreeMap::new();
            let mut queue = VecDeque::new();
            for (&i, &gi) in gamma {
                let mut c = vec![0; n1];
                c[i] = sign;
                let pair = (gen(i), gen(gi));
                found.insert(c.clone(), pair);
                queue.push_back(c);
            }
            while let Some(c) = queue.pop_front() {
                let (x, tx) = found[&c].clone();
                for (&i, &gi) in gamma {
                    let y = alg.bracket(&gen(i), &x);
                    if y.is_zero() {
                        continue;
                    }
                    let ty = alg.bracket(&gen(gi), &tx);
                    let mut c2 = c.clone();
                    c2[i] += sign;
                    if let Some((x0, tx0)) = found.get(&c2) {
                        let (k, v) = x0.terms.iter().next().unwrap();
                        let lam = &y.get(k.0, k.1) / v;
                        if y != x0.scale(&lam) || ty != tx0.scale(&lam) {
                            return Err(Error::Inconsistent("θ_γ is not a homomorphism; γ does not preserve lengths".into()));
                        }
                    } else {
                        found.insert(c2.clone(), (y, ty));
                        queue.push_back(c2);
                    }
                }
            }
            for (c, (x, tx)) in found {
                if x.terms.len() != 1 {
                    return Err(Error::Inconsistent("root space of a finite-type root is not a line".into()));
                }
                let (k, v) = x.terms.iter().next().unwrap();
                images.insert(*k, tx.scale(&v.inv().unwrap()));
                if sign > 0 {
                    positive_roots.push(c);
                }
            }
        }
        positive_roots.sort_by_key(|c| (c.iter().sum::<i64>(), c.clone()));
        Ok(ThetaGamma { images, positive_roots })
    }

    pub fn apply(&self, f: &LoopElement) -> LoopElement {
        let mut out = LoopElement::zero();
        for (k, v) in &f.terms {
            if let Some(img) = self.images.get(k) {
                out = out.add(&img.scale(v));
            }
        }
        out
    }

    pub fn power(&self, f: &LoopElement, j: usize) -> LoopElement {
        let mut x = f.clone();
        for _ in 0..j {
            x = self.apply(&x);
        }
        x
    }

    /// Powers `θ^1 f, θ^2 f, …` until zero.
    pub fn orbit(&self, f: &LoopElement) -> Vec<LoopElement> {
        let mut out = Vec::new();
        let mut x = self.apply(f);
        while !x.is_zero() {
            out.push(x.clone());
            x = self.apply(&x);
            if out.len() > self.images.len() + 1 {
                panic!("θ_γ is not nilpotent");
            }
        }
        out
    }

    pub fn domain(&self) -> impl Iterator<Item = &(i64, usize)> {
        self.images.keys()
    }
}

pub fn cartan_tensor(alg: &LoopAlgebra, t: &Mat) -> Laurent2 {
    let mut out = Laurent2::zero();
    for (p, row) in t.iter().enumerate() {
        for (q, v) in row.iter().enumerate() {
            out.add_term((0, 0, alg.st.cartan[p], alg.st.cartan[q]), v.clone());
        }
    }
    out
}

/// `t_Q` with root vectors rescaled by `scale(α)` (`b_α ↦ λ b_α`, `b_{−α} ↦ b_{−α}/λ`).
pub fn build_twist_scaled(alg: &LoopAlgebra, q: &BDQuadruple, scale: &dyn Fn(&[i64]) -> Scalar) -> Result<Laurent2> {
    let rep = validate(alg, q);
    if !rep.is_valid() {
        return Err(Error::invalid(format!("invalid quadruple: {rep:?}")));
    }
    let theta = ThetaGamma::new(alg, &q.gamma)?;
    let mut t = cartan_tensor(alg, &q.t_h);
    for c in &theta.positive_roots {
        let (l, a) = alg.root_basis_vector(c).ok_or_else(|| Error::Inconsistent("Φ₁ root space is not a line".into()))?;
        let (b, bm) = alg.root_vector(l, a)?;
        let lam = scale(c);
        let b = b.scale(&lam);
        let bm = bm.scale(&lam.inv().ok_or_else(|| Error::invalid("zero rescaling"))?);
        for img in theta.orbit(&b) {
            t = t.add(&Laurent2::wedge(&bm, &img));
        }
    }
    Ok(t)
}

/// `t_Q = t_𝔥 + Σ_{α∈Φ₁⁺} Σ_{j≥1} b_{−α} ∧ θ_γ^j(b_α)`.
pub fn build_twist(alg: &LoopAlgebra, q: &BDQuadruple) -> Result<Laurent2> {
    build_twist_scaled(alg, q, &|_| Scalar::one())
}

/// `ψ(t_𝔥)` on 𝔥 in u-coordinates: `T·G`.
pub fn psi_h(alg: &LoopAlgebra, t_h: &Mat) -> Mat {
    linalg::mat_mul(t_h, &alg.st.u_gram)
}

/// Everything needed to evaluate the closed-form operator `R_Q`.
#[derive(Clone, Debug)]
pub struct QuadrupleData {
    pub alg: LoopAlgebra,
    pub q: BDQuadruple,
    pub theta: ThetaGamma,
    pub theta_inv: ThetaGamma,
    pub twist: Laurent2,
    psi: Mat,
}

impl QuadrupleData {
    pub fn new(alg: &LoopAlgebra, q: &BDQuadruple) -> Result<QuadrupleData> {
        let twist = build_twist(alg, q)?;
        let inv: BTreeMap<usize, usize> = q.gamma.iter().map(|(a, b)| (*b, *a)).collect();
        Ok(QuadrupleData {
            alg: alg.clone(),
            q: q.clone(),
            theta: ThetaGamma::new(alg, &q.gamma)?,
            theta_inv: ThetaGamma::new(alg, &inv)?,
            twist,
            psi: psi_h(alg, &q.t_h),
        })
    }

    fn h_map(&self, f: &LoopElement, shift: &Scalar) -> LoopElement {
        let u = self.alg.cartan_coords(f);
        let mut v = linalg::mat_vec(&self.psi, &u);
        for (x, y) in v.iter_mut().zip(&u) {
            *x += &(y * shift);
        }
        self.alg.cartan_element(&v)
    }

    /// `θ⁺(θ⁺ − π₊)⁻¹ + (ψ(t_𝔥) + id/2) + (π₋ − θ⁻_{γ⁻¹})⁻¹`.
    pub fn r_q(&self, f: &LoopElement) -> LoopElement {
        let alg = &self.alg;
        let fp = trigtensor::project(alg, f, Part::Positive);
        let fh = trigtensor::project(alg, f, Part::Cartan);
        let fm = trigtensor::project(alg, f, Part::Negative);
        // (θ⁺ − 1)⁻¹ = −Σ_{j≥0} θ^j on 𝔑₊
        let mut inv = fp.clone();
        for x in self.theta.orbit(&fp) {
            inv = inv.add(&x);
        }
        let first = trigtensor::project(alg, &self.theta.apply(&inv), Part::Positive).scale(&Scalar::from_i64(-1));
        // (1 − θ⁻_{γ⁻¹})⁻¹ = Σ_{j≥0} θ_{γ⁻¹}^j on 𝔑₋
        let mut third = fm.clone();
        for x in self.theta_inv.orbit(&fm) {
            third = third.add(&trigtensor::project(alg, &x, Part::Negative));
        }
        first.add(&self.h_map(&fh, &Scalar::frac(1, 2))).add(&third)
    }

    /// `R_t` of the twist `t_Q` via the projection formula.
    pub fn r_t(&self, f: &LoopElement) -> LoopElement {
        trigtensor::residue_operator(&self.alg, &self.twist, f)
    }

    /// Degree bound that covers all images of basis vectors of degree ≤ d.
    pub fn image_reach(&self) -> i64 {
        self.theta
            .domain()
            .chain(self.theta_inv.domain())
            .map(|&(l, a)| {
                let img = self.theta.apply(&LoopElement::basis(l, a)).add(&self.theta_inv.apply(&LoopElement::basis(l, a)));
                img.terms.keys().map(|(l2, _)| (l2 - l).abs()).max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
            * (self.q.gamma.len() as i64 + 1)
    }
}

/// Compare `R_Q` with `R_{t_Q}` on every basis vector of degree ≤ d. Returns the mismatches.
pub fn compare_operators(data: &QuadrupleData, d: i64) -> Vec<(i64, usize)> {
    data.alg
        .basis_upto(d)
        .into_iter()
        .filter(|&(l, a)| {
            let f = LoopElement::basis(l, a);
            data.r_q(&f) != data.r_t(&f)
        })
        .collect()
}

fn image_h(psi: &Mat, shift: &Scalar) -> Mat {
    psi.iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, x)| if i == j { x + shift } else { x.clone() }).collect())
        .collect()
}

/// Images of `R_Q − 1` and `R_Q` together with the predicted decompositions.
#[derive(Clone, Debug)]
pub struct CayleyData {
    pub c1: Vec<LoopElement>,
    pub c2: Vec<LoopElement>,
    /// Bases of `𝔥₁ = im(ψ(t_𝔥) − id/2)` and `𝔥₂ = im(ψ(t_𝔥) + id/2)` in u-coordinates.
    pub h1: Vec<Vec<Scalar>>,
    pub h2: Vec<Vec<Scalar>>,
    /// Every image lies in the predicted direct sum.
    pub contained: bool,
    /// The predicted sums, truncated at the degree bound, lie in the span of the images.
    pub spans: bool,
}

fn column_space(m: &Mat) -> Vec<Vec<Scalar>> {
    let cols = linalg::transpose(m);
    let keep = linalg::independent_subset(&cols);
    keep.into_iter().map(|i| cols[i].clone()).collect()
}

fn in_span(basis: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    let mut m: Mat = basis.to_vec();
    let r = linalg::rank(&m);
    m.push(v.to_vec());
    linalg::rank(&m) == r
}

fn supported_on(c: &[i64], set: &[usize]) -> bool {
    c.iter().enumerate().all(|(i, x)| *x == 0 || set.contains(&i))
}

fn dense(keys: &[(i64, usize)], f: &LoopElement) -> Option<Vec<Scalar>> {
    if f.terms.keys().any(|k| !keys.contains(k)) {
        return None;
    }
    Some(keys.iter().map(|k| f.get(k.0, k.1)).collect())
}

pub fn cayley(data: &QuadrupleData, d: i64) -> CayleyData {
    let alg = &data.alg;
    let half = Scalar::frac(1, 2);
    let h1 = column_space(&image_h(&data.psi, &-&half));
    let h2 = column_space(&image_h(&data.psi, &half));
    let g1 = data.q.gamma1();
    let g2 = data.q.gamma2();
    let reach = d + data.image_reach();
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for (l, a) in alg.basis_upto(reach) {
        let f = LoopElement::basis(l, a);
        let r = data.r_q(&f);
        c1.push(r.sub(&f));
        c2.push(r);
    }
    let member = |x: &LoopElement, first: bool| -> bool {
        for &(l, a) in x.terms.keys() {
            let c = alg.root_coeffs(l, a);
            let ok = match (alg.part(l, a), first) {
                (Part::Positive, true) => true,
                (Part::Negative, true) => supported_on(&c, &g1),
                (Part::Positive, false) => supported_on(&c, &g2),
                (Part::Negative, false) => true,
                (Part::Cartan, _) => true,
            };
            if !ok {
                return false;
            }
        }
        let u = alg.cartan_coords(x);
        in_span(if first { &h1 } else { &h2 }, &u)
    };
    let contained = c1.iter().all(|x| member(x, true)) && c2.iter().all(|x| member(x, false));
    // predicted vectors of degree ≤ d
    let keys = alg.basis_upto(reach);
    let img1: Vec<Vec<Scalar>> = c1.iter().filter_map(|x| dense(&keys, x)).collect();
    let img2: Vec<Vec<Scalar>> = c2.iter().filter_map(|x| dense(&keys, x)).collect();
    let mut spans = true;
    let basis1 = independent(&img1);
    let basis2 = independent(&img2);
    for (l, a) in alg.basis_upto(d) {
        let f = LoopElement::basis(l, a);
        let c = alg.root_coeffs(l, a);
        let (in1, in2) = match alg.part(l, a) {
            Part::Positive => (true, supported_on(&c, &g2)),
            Part::Negative => (supported_on(&c, &g1), true),
            Part::Cartan => (false, false),
        };
        if in1 && !in_span(&basis1, &dense(&keys, &f).unwrap()) {
            spans = false;
        }
        if in2 && !in_span(&basis2, &dense(&keys, &f).unwrap()) {
            spans = false;
        }
    }
    for (hs, basis) in [(&h1, &basis1), (&h2, &basis2)] {
        for v in hs.iter() {
            if !in_span(basis, &dense(&keys, &alg.cartan_element(v)).unwrap()) {
                spans = false;
            }
        }
    }
    CayleyData { c1, c2, h1, h2, contained, spans }
}

fn independent(vs: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let mut m: Mat = vs.to_vec();
    let piv = linalg::rref(&mut m);
    m.truncate(piv.len());
    m
}

/// Form on `L × L`: `B(f₁,f₂) − B(g₁,g₂)`.
pub fn double_form(alg: &LoopAlgebra, a: &(LoopElement, LoopElement), b: &(LoopElement, LoopElement)) -> Scalar {
    alg.form(&a.0, &b.0) - alg.form(&a.1, &b.1)
}

/// `((R − 1) f, R f)`.
pub fn w_element(data: &QuadrupleData, f: &LoopElement) -> (LoopElement, LoopElement) {
    let r = data.r_q(f);
    (r.sub(f), r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsotropyReport {
    pub pairs_checked: usize,
    pub failures: Vec<((i64, usize), (i64, usize))>,
    pub diagonal_trivial: bool,
    pub membership_failures: Vec<(i64, usize)>,
}

impl IsotropyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.diagonal_trivial && self.membership_failures.is_empty()
    }
}

/// Check `θ_Q([x]) = [y]` for a pair `(x, y) ∈ C¹ × C²`.
pub fn theta_q_holds(data: &QuadrupleData, x: &LoopElement, y: &LoopElement) -> bool {
    let alg = &data.alg;
    let g1 = data.q.gamma1();
    let g2 = data.q.gamma2();
    let xp = trigtensor::project(alg, x, Part::Positive);
    let yp = trigtensor::project(alg, y, Part::Positive);
    if data.theta.apply(&xp) != yp {
        return false;
    }
    let xm = trigtensor::project(alg, x, Part::Negative);
    let ym = trigtensor::project(alg, y, Part::Negative);
    if xm.terms.keys().any(|&(l, a)| !supported_on(&alg.root_coeffs(l, a), &g1)) {
        return false;
    }
    let mut ym2 = LoopElement::zero();
    for (&(l, a), v) in &ym.terms {
        if supported_on(&alg.root_coeffs(l, a), &g2) {
            ym2.add_term(l, a, v.clone());
        }
    }
    if data.theta.apply(&xm) != ym2 {
        return false;
    }
    // 𝔥 part: x_h ≡ (ψ − 1/2)h mod ker(ψ + 1/2), y_h ≡ (ψ + 1/2)h mod ker(ψ − 1/2)
    let n = alg.n();
    let half = Scalar::frac(1, 2);
    let minus = image_h(&data.psi, &-&half);
    let plus = image_h(&data.psi, &half);
    let k_plus = linalg::nullspace(&plus, n);
    let k_minus = linalg::nullspace(&minus, n);
    let xh = alg.cartan_coords(x);
    let yh = alg.cartan_coords(y);
    // unknowns: h (n), coefficients on k_plus, coefficients on k_minus
    let nv = n + k_plus.len() + k_minus.len();
    let mut rows: Mat = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..n {
        let mut row = vec![Scalar::zero(); nv];
        row[..n].clone_from_slice(&minus[r]);
        for (j, k) in k_plus.iter().enumerate() {
            row[n + j] = k[r].clone();
        }
        rows.push(row);
        rhs.push(xh[r].clone());
    }
    for r in 0..n {
        let mut row = vec![Scalar::zero(); nv];
        row[..n].clone_from_slice(&plus[r]);
        for (j, k) in k_minus.iter().enumerate() {
            row[n + k_plus.len() + j] = k[r].clone();
        }
        rows.push(row);
        rhs.push(yh[r].clone());
    }
    linalg::solve(&rows, &rhs, nv).is_some()
}

pub fn w_isotropy(data: &QuadrupleData, d: i64) -> IsotropyReport {
    let basis = data.alg.basis_upto(d);
    let elems: Vec<(LoopElement, LoopElement)> = basis.iter().map(|&(l, a)| w_element(data, &LoopElement::basis(l, a))).collect();
    let mut failures = Vec::new();
    let mut pairs = 0;
    for (i, wi) in elems.iter().enumerate() {
        for (j, wj) in elems.iter().enumerate().skip(i) {
            pairs += 1;
            if !double_form(&data.alg, wi, wj).is_zero() {
                failures.push((basis[i], basis[j]));
            }
        }
    }
    // (f,f) ∈ W forces f = 0: the second minus the first component recovers f
    let diagonal_trivial = elems.iter().zip(&basis).all(|((x, y), &(l, a))| y.sub(x) == LoopElement::basis(l, a));
    let membership_failures = elems.iter().zip(&basis).filter(|((x, y), _)| !theta_q_holds(data, x, y)).map(|(_, k)| *k).collect();
    IsotropyReport { pairs_checked: pairs, failures, diagonal_trivial, membership_failures }
}

/// `T(w) = Σ B(y^i, w) x_i` on `W₀` for `t = Σ x_i ⊗ y^i`, written on `f` with `w = ((R₀−1)f, R₀f)`.
pub fn manin_t(alg: &LoopAlgebra, t: &Laurent2, f: &LoopElement) -> (LoopElement, LoopElement) {
    // 𝓑((y,y), ((R₀−1)f, R₀f)) = −B(y, f)
    let v = trigtensor::psi(alg, t, f).scale(&Scalar::from_i64(-1));
    (v.clone(), v)
}

fn w0(alg: &LoopAlgebra, f: &LoopElement) -> (LoopElement, LoopElement) {
    let r = trigtensor::residue_operator(alg, &Laurent2::zero(), f);
    (r.sub(f), r)
}

fn pair_sub(a: &(LoopElement, LoopElement), b: &(LoopElement, LoopElement)) -> (LoopElement, LoopElement) {
    (a.0.sub(&b.0), a.1.sub(&b.1))
}

/// Both sides of `𝓑(w₁⊗w₂⊗w₃, CYB(t) − Alt((δ⊗1)t)) = −𝓑([Tw₁−w₁, Tw₂−w₂], Tw₃−w₃)`.
pub fn manin_identity(alg: &LoopAlgebra, r0: &TwoPointTensor, t: &Laurent2, fs: [&LoopElement; 3]) -> Result<(Scalar, Scalar)> {
    let res = trigtensor::twist_residual(alg, r0, t)?;
    // 𝓑(w_f, (a,a)) = −B(f, a)
    let mut lhs = Scalar::zero();
    for ((e, idx), v) in &res.terms {
        let mut prod = v.clone();
        for k in 0..3 {
            let b = alg.form(fs[k], &LoopElement::basis(e[k], idx[k]));
            if b.is_zero() {
                prod = Scalar::zero();
                break;
            }
            prod = &prod * &(-&b);
        }
        lhs += &prod;
    }
    let mut legs = Vec::new();
    for f in fs {
        let w = w0(alg, f);
        legs.push(pair_sub(&manin_t(alg, t, f), &w));
    }
    let br = (alg.bracket(&legs[0].0, &legs[1].0), alg.bracket(&legs[0].1, &legs[1].1));
    let rhs = -double_form(alg, &br, &legs[2]);
    Ok((lhs, rhs))
}

/// `B(Tw₁, w₂) + B(w₁, Tw₂)` in the double.
pub fn manin_skew_residual(alg: &LoopAlgebra, t: &Laurent2, f1: &LoopElement, f2: &LoopElement) -> Scalar {
    double_form(alg, &manin_t(alg, t, f1), &w0(alg, f2)) + double_form(alg, &w0(alg, f1), &manin_t(alg, t, f2))
}

fn require_identity(alg: &LoopAlgebra) -> Result<()> {
    let mut s = vec![0; alg.n() + 1];
    s[0] = 1;
    if alg.order_nu() != 1 || alg.s != s {
        return Err(Error::Unsupported("the quasi-trigonometric formula needs σ = id".into()));
    }
    Ok(())
}

fn finite_root_wedges(alg: &LoopAlgebra) -> Result<Laurent2> {
    let mut out = Laurent2::zero();
    for a in 0..alg.dim() {
        if alg.grade(a) == 0 && alg.part(0, a) == Part::Positive {
            let (b, bm) = alg.root_vector(0, a)?;
            out = out.add(&Laurent2::wedge(&b, &bm));
        }
    }
    Ok(out)
}

/// First line: `yC/(x−y) + C_𝔥/2 + C_− + t_𝔥 + Σ b_{−α} ∧ θ^j b_α`.
pub fn quasi_trig_formula(alg: &LoopAlgebra, q: &BDQuadruple) -> Result<TwoPointTensor> {
    require_identity(alg)?;
    if q.gamma.contains_key(&0) {
        return Err(Error::invalid("Γ₁ must avoid the affine node"));
    }
    let parts = casimir_components(alg);
    let mut poly = Laurent2::zero();
    for ((a, b), v) in &parts.h {
        poly.add_term((0, 0, *a, *b), v * &Scalar::frac(1, 2));
    }
    for ((a, b), v) in &parts.minus {
        poly.add_term((0, 0, *a, *b), v.clone());
    }
    poly = poly.add(&build_twist(alg, q)?);
    Ok(TwoPointTensor { m: 1, poly, pole: vec![parts.total()] })
}

/// Second line: `−½((y+x)/(y−x) C + Σ_{α∈Φ⁺} b_α ∧ b_{−α} − t_𝔥 + Σ θ^j b_α ∧ b_{−α})`.
pub fn quasi_trig_formula_symmetric(alg: &LoopAlgebra, q: &BDQuadruple) -> Result<TwoPointTensor> {
    require_identity(alg)?;
    let c = trigtensor::casimir_adapted(alg);
    let mut inner = TwoPointTensor::zero(1);
    // (y+x)/(y−x) = −1 − 2/((x/y) − 1)
    for ((a, b), v) in &c {
        inner.poly.add_term((0, 0, *a, *b), -v);
        inner.pole[0].insert((*a, *b), v * &Scalar::from_i64(-2));
    }
    inner.poly = inner.poly.add(&finite_root_wedges(alg)?).sub(&cartan_tensor(alg, &q.t_h));
    let theta = ThetaGamma::new(alg, &q.gamma)?;
    for cr in &theta.positive_roots {
        let (l, a) = alg.root_basis_vector(cr).unwrap();
        let (b, bm) = alg.root_vector(l, a)?;
        for img in theta.orbit(&b) {
            inner.poly = inner.poly.add(&Laurent2::wedge(&img, &bm));
        }
    }
    Ok(inner.scale(&Scalar::frac(-1, 2)))
}
