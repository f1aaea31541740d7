//! Two- and three-point tensors over a loop algebra and the σ-trigonometric
//! r-matrix `r₀^σ`.
//!
//! Every tensor coefficient is indexed by adapted basis vectors of the
//! underlying [`TwistedStructure`](crate::loopalg::TwistedStructure). A
//! [`TwoPointTensor`] is `P(x,y) + N(x/y) / ((x/y)^m − 1)` with `P` a
//! Laurent polynomial and `N = Σ_{k<m} (x/y)^k Q_k`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::linalg;
use crate::loopalg::{LoopAlgebra, LoopElement, Part};
use crate::scalar::Scalar;

pub type Key2 = (i64, i64, usize, usize);
pub type Key3 = ([i64; 3], [usize; 3]);
pub type Coeffs2 = BTreeMap<(usize, usize), Scalar>;

/// Finite Laurent tensor `Σ c x^p y^q a ⊗ b`, i.e. an element of `L^σ ⊗ L^σ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Laurent2 {
    pub terms: BTreeMap<Key2, Scalar>,
}

impl Laurent2 {
    pub fn zero() -> Laurent2 {
        Laurent2::default()
    }

    pub fn add_term(&mut self, k: Key2, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Laurent2) -> Laurent2 {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(*k, v.clone());
        }
        out
    }

    pub fn sub(&self, o: &Laurent2) -> Laurent2 {
        self.add(&o.scale(&Scalar::from_i64(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Laurent2 {
        if c.is_zero() {
            return Laurent2::zero();
        }
        Laurent2 { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// `f ⊗ g`.
    pub fn tensor(f: &LoopElement, g: &LoopElement) -> Laurent2 {
        let mut out = Laurent2::zero();
        for ((p, a), x) in &f.terms {
            for ((q, b), y) in &g.terms {
                out.add_term((*p, *q, *a, *b), x * y);
            }
        }
        out
    }

    /// `f ∧ g = f ⊗ g − g ⊗ f`.
    pub fn wedge(f: &LoopElement, g: &LoopElement) -> Laurent2 {
        Laurent2::tensor(f, g).sub(&Laurent2::tensor(g, f))
    }

    /// `τ`: swap both the tensor legs and the variables.
    pub fn flip(&self) -> Laurent2 {
        Laurent2 { terms: self.terms.iter().map(|((p, q, a, b), v)| ((*q, *p, *b, *a), v.clone())).collect() }
    }

    pub fn is_skew(&self) -> bool {
        self.add(&self.flip()).is_zero()
    }

    /// Multiply by `x^dx y^dy`.
    pub fn shift(&self, dx: i64, dy: i64) -> Laurent2 {
        Laurent2 { terms: self.terms.iter().map(|((p, q, a, b), v)| ((p + dx, q + dy, *a, *b), v.clone())).collect() }
    }

    /// `(φ ⊗ ψ)` for maps given on basis vectors.
    pub fn map_legs(&self, phi: &mut dyn FnMut(i64, usize) -> Result<LoopElement>) -> Result<Laurent2> {
        let mut out = Laurent2::zero();
        let mut cache: BTreeMap<(i64, usize), LoopElement> = BTreeMap::new();
        for ((p, q, a, b), v) in &self.terms {
            for key in [(*p, *a), (*q, *b)] {
                if !cache.contains_key(&key) {
                    cache.insert(key, phi(key.0, key.1)?);
                }
            }
            let t = Laurent2::tensor(&cache[&(*p, *a)], &cache[&(*q, *b)]);
            out = out.add(&t.scale(v));
        }
        Ok(out)
    }

    /// Left and right legs as lists of loop elements, `Σ_i left_i ⊗ right_i`.
    pub fn legs(&self) -> Vec<(LoopElement, LoopElement)> {
        self.terms.iter().map(|((p, q, a, b), v)| (LoopElement::term(*p, *a, v.clone()), LoopElement::basis(*q, *b))).collect()
    }
}

/// Finite Laurent tensor in three variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Laurent3 {
    pub terms: BTreeMap<Key3, Scalar>,
}

impl Laurent3 {
    pub fn zero() -> Laurent3 {
        Laurent3::default()
    }

    pub fn add_term(&mut self, k: Key3, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Laurent3) -> Laurent3 {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(*k, v.clone());
        }
        out
    }

    pub fn sub(&self, o: &Laurent3) -> Laurent3 {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(*k, -v);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Laurent3 {
        if c.is_zero() {
            return Laurent3::zero();
        }
        Laurent3 { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// `x1⊗x2⊗x3 + x2⊗x3⊗x1 + x3⊗x1⊗x2`.
    pub fn alt(&self) -> Laurent3 {
        let mut out = Laurent3::zero();
        for ((e, i), v) in &self.terms {
            out.add_term((*e, *i), v.clone());
            out.add_term(([e[1], e[2], e[0]], [i[1], i[2], i[0]]), v.clone());
            out.add_term(([e[2], e[0], e[1]], [i[2], i[0], i[1]]), v.clone());
        }
        out
    }

    /// Multiply by `(x_i/x_j)^m − 1`.
    pub fn mul_denominator(&self, i: usize, j: usize, m: i64) -> Laurent3 {
        let mut out = self.scale(&Scalar::from_i64(-1));
        for ((e, idx), v) in &self.terms {
            let mut e2 = *e;
            e2[i] += m;
            e2[j] -= m;
            out.add_term((e2, *idx), v.clone());
        }
        out
    }
}

/// `r(x,y) = poly + Σ_k (x/y)^k pole[k] / ((x/y)^m − 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPointTensor {
    pub m: i64,
    pub poly: Laurent2,
    pub pole: Vec<Coeffs2>,
}

impl TwoPointTensor {
    pub fn zero(m: i64) -> TwoPointTensor {
        TwoPointTensor { m, poly: Laurent2::zero(), pole: vec![Coeffs2::new(); m as usize] }
    }

    pub fn from_poly(m: i64, poly: Laurent2) -> TwoPointTensor {
        TwoPointTensor { m, poly, pole: vec![Coeffs2::new(); m as usize] }
    }

    pub fn has_pole(&self) -> bool {
        self.pole.iter().any(|q| !q.is_empty())
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero() && !self.has_pole()
    }

    pub fn add(&self, o: &TwoPointTensor) -> TwoPointTensor {
        assert_eq!(self.m, o.m);
        let mut out = self.clone();
        out.poly = out.poly.add(&o.poly);
        for (k, q) in o.pole.iter().enumerate() {
            for (ab, v) in q {
                add_coeff(&mut out.pole[k], *ab, v.clone());
            }
        }
        out
    }

    pub fn add_poly(&self, t: &Laurent2) -> TwoPointTensor {
        let mut out = self.clone();
        out.poly = out.poly.add(t);
        out
    }

    pub fn sub(&self, o: &TwoPointTensor) -> TwoPointTensor {
        self.add(&o.scale(&Scalar::from_i64(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> TwoPointTensor {
        TwoPointTensor {
            m: self.m,
            poly: self.poly.scale(c),
            pole: self.pole.iter().map(|q| q.iter().map(|(k, v)| (*k, v * c)).filter(|(_, v)| !v.is_zero()).collect()).collect(),
        }
    }

    /// Pole numerator as a Laurent tensor `Σ_k x^k y^{−k} Q_k`.
    pub fn pole_numerator(&self) -> Laurent2 {
        let mut out = Laurent2::zero();
        for (k, q) in self.pole.iter().enumerate() {
            let k = k as i64;
            for ((a, b), v) in q {
                out.add_term((k, -k, *a, *b), v.clone());
            }
        }
        out
    }

    /// `P·((x/y)^m − 1) + N`.
    pub fn cleared(&self) -> Laurent2 {
        let mut out = self.poly.shift(self.m, -self.m).sub(&self.poly);
        out = out.add(&self.pole_numerator());
        out
    }

    /// Monomials `(dx, dy)` appearing anywhere in the tensor (pole slot `k` counts as `(k, −k)`).
    pub fn monomials(&self) -> BTreeSet<(i64, i64)> {
        let mut s: BTreeSet<(i64, i64)> = self.poly.terms.keys().map(|(p, q, _, _)| (*p, *q)).collect();
        for (k, q) in self.pole.iter().enumerate() {
            if !q.is_empty() {
                s.insert((k as i64, -(k as i64)));
            }
        }
        s
    }

    /// Write `num(x,y) / ((x/y)^m − 1)` in normal form. Fails when a
    /// homogeneous component of nonzero total degree leaves a remainder.
    pub fn from_fraction(m: i64, poly: Laurent2, num: &Laurent2) -> Result<TwoPointTensor> {
        let mut out = TwoPointTensor::from_poly(m, poly);
        let mut groups: BTreeMap<(i64, usize, usize), BTreeMap<i64, Scalar>> = BTreeMap::new();
        for ((p, q, a, b), v) in &num.terms {
            groups.entry((p + q, *a, *b)).or_default().insert(*p, v.clone());
        }
        for ((d, a, b), g) in groups {
            let mut rem: BTreeMap<i64, Scalar> = BTreeMap::new();
            for (p, v) in &g {
                let e = rem.entry(p.rem_euclid(m)).or_default();
                *e += v;
            }
            rem.retain(|_, v| !v.is_zero());
            if d != 0 && !rem.is_empty() {
                return Err(Error::PoleRemains(format!("pole survives in total degree {d}")));
            }
            // (g − rem)/(u^m − 1) with u = x/y
            let mut work = g.clone();
            for (j, v) in &rem {
                let e = work.entry(*j).or_default();
                *e -= v;
            }
            work.retain(|_, v| !v.is_zero());
            let min_p = work.keys().next().copied().unwrap_or(0);
            while let Some((&top, c)) = work.iter().next_back().map(|(k, v)| (k, v.clone())) {
                work.remove(&top);
                let low = top - m;
                out.poly.add_term((low, d - low, a, b), c.clone());
                let e = work.entry(low).or_default();
                *e += &c;
                if e.is_zero() {
                    work.remove(&low);
                }
                if low < min_p {
                    return Err(Error::Inconsistent("division by (x/y)^m − 1 left a remainder".into()));
                }
            }
            for (j, v) in rem {
                add_coeff(&mut out.pole[j as usize], (a, b), v);
            }
        }
        Ok(out)
    }

    /// Canonical form: every pole slot reduced and the polynomial part merged.
    pub fn normalized(&self) -> Result<TwoPointTensor> {
        TwoPointTensor::from_fraction(self.m, self.poly.clone(), &self.pole_numerator())
    }

    /// `τ r(y,x)` in normal form.
    pub fn flipped(&self) -> TwoPointTensor {
        // τN(y/x)/((y/x)^m − 1) = −Σ_k (x/y)^{m−k} τQ_k / ((x/y)^m − 1)
        let mut num = Laurent2::zero();
        for (k, q) in self.pole.iter().enumerate() {
            let e = self.m - k as i64;
            for ((a, b), v) in q {
                num.add_term((e, -e, *b, *a), -v);
            }
        }
        TwoPointTensor::from_fraction(self.m, self.poly.flip(), &num).expect("degree-zero numerator always reduces")
    }
}

fn add_coeff(map: &mut Coeffs2, k: (usize, usize), c: Scalar) {
    if c.is_zero() {
        return;
    }
    let e = map.entry(k).or_default();
    *e += &c;
    if e.is_zero() {
        map.remove(&k);
    }
}

/// Projections of the Casimir element attached to a grading.
#[derive(Clone, Debug)]
pub struct CasimirParts {
    /// `C_k^σ` for `k = 0..m`, indexed by the grade of the left leg.
    pub by_grade: Vec<Coeffs2>,
    pub h: Coeffs2,
    pub minus: Coeffs2,
    pub plus: Coeffs2,
}

impl CasimirParts {
    pub fn total(&self) -> Coeffs2 {
        let mut out = Coeffs2::new();
        for c in &self.by_grade {
            for (k, v) in c {
                add_coeff(&mut out, *k, v.clone());
            }
        }
        out
    }
}

/// Casimir element `Σ (G⁻¹)_{ab} x_a ⊗ x_b` of the adapted basis, inverted block by block.
pub fn casimir_adapted(alg: &LoopAlgebra) -> Coeffs2 {
    let st = &alg.st;
    let dim = st.dim();
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for a in 0..dim {
        for (b, _) in st.gram_row(a) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, *b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..dim {
        let r = find(&mut parent, a);
        blocks.entry(r).or_default().push(a);
    }
    let mut out = Coeffs2::new();
    for idx in blocks.values() {
        let g: linalg::Mat = idx.iter().map(|&a| idx.iter().map(|&b| st.form_basis(a, b)).collect()).collect();
        let inv = linalg::inverse(&g).expect("invariant form is nondegenerate");
        for (p, &a) in idx.iter().enumerate() {
            for (q, &b) in idx.iter().enumerate() {
                add_coeff(&mut out, (a, b), inv[p][q].clone());
            }
        }
    }
    out
}

pub fn casimir_components(alg: &LoopAlgebra) -> CasimirParts {
    let c = casimir_adapted(alg);
    let m = alg.m as usize;
    let mut parts = CasimirParts { by_grade: vec![Coeffs2::new(); m], h: Coeffs2::new(), minus: Coeffs2::new(), plus: Coeffs2::new() };
    for ((a, b), v) in c {
        let k = alg.grade(a) as usize;
        parts.by_grade[k].insert((a, b), v.clone());
        if k == 0 {
            match alg.part(0, a) {
                Part::Cartan => parts.h.insert((a, b), v),
                Part::Negative => parts.minus.insert((a, b), v),
                Part::Positive => parts.plus.insert((a, b), v),
            };
        }
    }
    parts
}

fn constant(c: &Coeffs2, scale: &Scalar) -> Laurent2 {
    let mut out = Laurent2::zero();
    for ((a, b), v) in c {
        out.add_term((0, 0, *a, *b), v * scale);
    }
    out
}

/// `r₀^σ = C_𝔥/2 + C_−^σ + Σ_k (x/y)^k C_k^σ / ((x/y)^m − 1)`.
pub fn r0(alg: &LoopAlgebra) -> TwoPointTensor {
    let parts = casimir_components(alg);
    let poly = constant(&parts.h, &Scalar::frac(1, 2)).add(&constant(&parts.minus, &Scalar::one()));
    TwoPointTensor { m: alg.m, poly, pole: parts.by_grade }
}

/// `r(x,y) + τ r(y,x)` in normal form.
pub fn skew(r: &TwoPointTensor) -> TwoPointTensor {
    r.add(&r.flipped()).normalized().expect("normalization of a sum cannot fail")
}

fn bracket_into(alg: &LoopAlgebra, a: usize, b: usize) -> &[(usize, Scalar)] {
    alg.st.bracket_basis(a, b)
}

/// `[A^{12}, B^{13}] + [A^{12}, C^{23}] + [B^{13}, C^{23}]`, each term optionally
/// multiplied by the missing denominator.
fn cyb_terms(alg: &LoopAlgebra, a12: &Laurent2, b13: &Laurent2, c23: &Laurent2) -> (Laurent3, Laurent3, Laurent3) {
    let mut t1 = Laurent3::zero();
    let mut t2 = Laurent3::zero();
    let mut t3 = Laurent3::zero();
    for ((p1, p2, a1, a2), v) in &a12.terms {
        for ((q1, q3, b1, b3), w) in &b13.terms {
            let br = bracket_into(alg, *a1, *b1);
            if br.is_empty() {
                continue;
            }
            let vw = v * w;
            for (k, c) in br {
                t1.add_term(([p1 + q1, *p2, *q3], [*k, *a2, *b3]), &vw * c);
            }
        }
        for ((q2, q3, c2, c3), w) in &c23.terms {
            let br = bracket_into(alg, *a2, *c2);
            if br.is_empty() {
                continue;
            }
            let vw = v * w;
            for (k, c) in br {
                t2.add_term(([*p1, p2 + q2, *q3], [*a1, *k, *c3]), &vw * c);
            }
        }
    }
    for ((p1, p3, b1, b3), v) in &b13.terms {
        for ((q2, q3, c2, c3), w) in &c23.terms {
            let br = bracket_into(alg, *b3, *c3);
            if br.is_empty() {
                continue;
            }
            let vw = v * w;
            for (k, c) in br {
                t3.add_term(([*p1, *q2, p3 + q3], [*b1, *c2, *k]), &vw * c);
            }
        }
    }
    (t1, t2, t3)
}

/// `CYB(r)` multiplied by `((x₁/x₂)^m−1)((x₁/x₃)^m−1)((x₂/x₃)^m−1)`.
pub fn cybe(alg: &LoopAlgebra, r: &TwoPointTensor) -> Laurent3 {
    let c = r.cleared();
    let (t1, t2, t3) = cyb_terms(alg, &c, &c, &c);
    let m = r.m;
    t1.mul_denominator(1, 2, m).add(&t2.mul_denominator(0, 2, m)).add(&t3.mul_denominator(0, 1, m))
}

/// `CYB(t)` for a finite tensor.
pub fn cyb_finite(alg: &LoopAlgebra, t: &Laurent2) -> Laurent3 {
    let (a, b, c) = cyb_terms(alg, t, t, t);
    a.add(&b).add(&c)
}

/// Multiply a three-point tensor by all three denominators.
pub fn clear3(m: i64, t: &Laurent3) -> Laurent3 {
    t.mul_denominator(0, 1, m).mul_denominator(0, 2, m).mul_denominator(1, 2, m)
}

/// `[f(x) ⊗ 1 + 1 ⊗ f(y), T]` on a Laurent tensor.
pub fn act2(alg: &LoopAlgebra, f: &LoopElement, t: &Laurent2) -> Laurent2 {
    let mut out = Laurent2::zero();
    for ((l, c), fv) in &f.terms {
        for ((p, q, a, b), v) in &t.terms {
            let fvv = fv * v;
            for (k, w) in bracket_into(alg, *c, *a) {
                out.add_term((p + l, *q, *k, *b), &fvv * w);
            }
            for (k, w) in bracket_into(alg, *c, *b) {
                out.add_term((*p, q + l, *a, *k), &fvv * w);
            }
        }
    }
    out
}

/// `δ(f)(x,y) = [f(x)⊗1 + 1⊗f(y), r(x,y)]` as a finite tensor.
pub fn cobracket(alg: &LoopAlgebra, f: &LoopElement, r: &TwoPointTensor) -> Result<Laurent2> {
    alg.check(f)?;
    let poly = act2(alg, f, &r.poly);
    let num = act2(alg, f, &r.pole_numerator());
    let out = TwoPointTensor::from_fraction(r.m, poly, &num)?;
    if out.has_pole() {
        return Err(Error::PoleRemains("cobracket keeps a pole; r is not equivariant".into()));
    }
    Ok(out.poly)
}

/// `(δ ⊗ 1) t`.
pub fn delta_left(alg: &LoopAlgebra, r: &TwoPointTensor, t: &Laurent2) -> Result<Laurent3> {
    let mut out = Laurent3::zero();
    let mut cache: BTreeMap<(i64, usize), Laurent2> = BTreeMap::new();
    for ((p, q, a, b), v) in &t.terms {
        if !cache.contains_key(&(*p, *a)) {
            cache.insert((*p, *a), cobracket(alg, &LoopElement::basis(*p, *a), r)?);
        }
        for ((p1, p2, a1, a2), w) in &cache[&(*p, *a)].terms {
            out.add_term(([*p1, *p2, *q], [*a1, *a2, *b]), v * w);
        }
    }
    Ok(out)
}

/// `CYB(t) − Alt((δ₀ ⊗ 1) t)`.
pub fn twist_residual(alg: &LoopAlgebra, r0: &TwoPointTensor, t: &Laurent2) -> Result<Laurent3> {
    if !t.is_skew() {
        return Err(Error::invalid("twist candidate is not skew-symmetric"));
    }
    Ok(cyb_finite(alg, t).sub(&delta_left(alg, r0, t)?.alt()))
}

/// `Ψ(t)(f) = Σ B(b, f) a` for `t = Σ a ⊗ b`.
pub fn psi(alg: &LoopAlgebra, t: &Laurent2, f: &LoopElement) -> LoopElement {
    let mut out = LoopElement::zero();
    for ((p, q, a, b), v) in &t.terms {
        let mut acc = Scalar::zero();
        for (c, g) in alg.st.gram_row(*b) {
            if let Some(x) = f.terms.get(&(-q, *c)) {
                acc += &(g * x);
            }
        }
        if !acc.is_zero() {
            out.add_term(*p, *a, &acc * v);
        }
    }
    out
}

pub fn project(alg: &LoopAlgebra, f: &LoopElement, part: Part) -> LoopElement {
    let mut out = LoopElement::zero();
    for ((l, a), v) in &f.terms {
        if alg.part(*l, *a) == part {
            out.add_term(*l, *a, v.clone());
        }
    }
    out
}

/// `R_t(f) = π_𝔥(f)/2 + π_−(f) + Ψ(t)(f)`.
pub fn residue_operator(alg: &LoopAlgebra, t: &Laurent2, f: &LoopElement) -> LoopElement {
    project(alg, f, Part::Cartan)
        .scale(&Scalar::frac(1, 2))
        .add(&project(alg, f, Part::Negative))
        .add(&psi(alg, t, f))
}

/// `res_{y=0} y⁻¹ ψ(r(z,y))(f(y))`, expanding the pole as `Σ_{ℓ≥1} (y/z)^{ℓm}`.
pub fn residue_by_series(alg: &LoopAlgebra, r: &TwoPointTensor, f: &LoopElement) -> LoopElement {
    let tr = |terms: &mut Vec<Key2Val>, p: i64, q: i64, a: usize, b: usize, v: &Scalar| terms.push((p, q, a, b, v.clone()));
    let mut terms: Vec<Key2Val> = Vec::new();
    for ((p, q, a, b), v) in &r.poly.terms {
        tr(&mut terms, *p, *q, *a, *b, v);
    }
    let reach = f.max_abs_degree() + r.m + 1;
    let mut l = 1;
    while l * r.m <= reach + r.m {
        for (k, qk) in r.pole.iter().enumerate() {
            let k = k as i64;
            for ((a, b), v) in qk {
                tr(&mut terms, k - l * r.m, l * r.m - k, *a, *b, v);
            }
        }
        l += 1;
    }
    let mut out = LoopElement::zero();
    for (p, q, a, b, v) in terms {
        for (c, g) in alg.st.gram_row(b) {
            if let Some(x) = f.terms.get(&(-q, *c)) {
                out.add_term(p, a, &(&v * g) * x);
            }
        }
    }
    out
}

type Key2Val = (i64, i64, usize, usize, Scalar);

/// Terms of the expansion of `r` around `y = 0` up to `y^n`.
pub fn taylor(r: &TwoPointTensor, n: i64) -> Laurent2 {
    let mut out = Laurent2::zero();
    for ((p, q, a, b), v) in &r.poly.terms {
        if *q <= n {
            out.add_term((*p, *q, *a, *b), v.clone());
        }
    }
    let mut l = 1;
    while l * r.m - (r.m - 1) <= n {
        for (k, qk) in r.pole.iter().enumerate() {
            let k = k as i64;
            let dy = l * r.m - k;
            if dy > n {
                continue;
            }
            for ((a, b), v) in qk {
                out.add_term((k - l * r.m, dy, *a, *b), v.clone());
            }
        }
        l += 1;
    }
    out
}

/// Evaluate `r(x,y)` at a point with `x^m ≠ y^m`; the result is a `𝔤⊗𝔤` coefficient map.
pub fn evaluate2(r: &TwoPointTensor, x: &Scalar, y: &Scalar) -> Result<Coeffs2> {
    let u = x / y;
    let d = u.powi(r.m) - Scalar::one();
    let dinv = d.inv().ok_or_else(|| Error::invalid("evaluation point lies on the pole"))?;
    let mut out = Coeffs2::new();
    for ((p, q, a, b), v) in &r.poly.terms {
        add_coeff(&mut out, (*a, *b), &(v * &x.powi(*p)) * &y.powi(*q));
    }
    for (k, qk) in r.pole.iter().enumerate() {
        let w = &u.powi(k as i64) * &dinv;
        for ((a, b), v) in qk {
            add_coeff(&mut out, (*a, *b), v * &w);
        }
    }
    Ok(out)
}

/// `CYB(r)(x₁,x₂,x₃)` at a single point, uncleared.
pub fn cybe_at(alg: &LoopAlgebra, r: &TwoPointTensor, pt: [&Scalar; 3]) -> Result<BTreeMap<[usize; 3], Scalar>> {
    let r12 = evaluate2(r, pt[0], pt[1])?;
    let r13 = evaluate2(r, pt[0], pt[2])?;
    let r23 = evaluate2(r, pt[1], pt[2])?;
    let mut out: BTreeMap<[usize; 3], Scalar> = BTreeMap::new();
    let mut put = |k: [usize; 3], c: Scalar| {
        if c.is_zero() {
            return;
        }
        let e = out.entry(k).or_default();
        *e += &c;
    };
    for ((a1, a2), v) in &r12 {
        for ((b1, b3), w) in &r13 {
            for (k, c) in bracket_into(alg, *a1, *b1) {
                put([*k, *a2, *b3], &(v * w) * c);
            }
        }
        for ((c2, c3), w) in &r23 {
            for (k, c) in bracket_into(alg, *a2, *c2) {
                put([*a1, *k, *c3], &(v * w) * c);
            }
        }
    }
    for ((b1, b3), v) in &r13 {
        for ((c2, c3), w) in &r23 {
            for (k, c) in bracket_into(alg, *b3, *c3) {
                put([*b1, *c2, *k], &(v * w) * c);
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Outcome of a CYBE check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CybeVerdict {
    /// Cleared residual is identically zero.
    Zero,
    /// Vanishes at every sampled point.
    ZeroAtPoints(usize),
    NonZero,
}

impl CybeVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, CybeVerdict::NonZero)
    }
}

/// Symbolic check for `dim 𝔤 ≤ symbolic_dim`, random exact points otherwise.
pub fn verify_cybe(alg: &LoopAlgebra, r: &TwoPointTensor, symbolic_dim: usize, points: usize, seed: u64) -> Result<CybeVerdict> {
    if alg.dim() <= symbolic_dim {
        return Ok(if cybe(alg, r).is_zero() { CybeVerdict::Zero } else { CybeVerdict::NonZero });
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < points {
        let pt: Vec<Scalar> = (0..3).map(|_| Scalar::frac(rng.gen_range(1..=97), rng.gen_range(1..=89))).collect();
        let pw: Vec<Scalar> = pt.iter().map(|x| x.powi(r.m)).collect();
        if pw[0] == pw[1] || pw[0] == pw[2] || pw[1] == pw[2] {
            continue;
        }
        if !cybe_at(alg, r, [&pt[0], &pt[1], &pt[2]])?.is_empty() {
            return Ok(CybeVerdict::NonZero);
        }
        done += 1;
    }
    Ok(CybeVerdict::ZeroAtPoints(points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_r0_shape() {
        let alg = LoopAlgebra::build("A1", None, vec![1, 0]).unwrap();
        let r = r0(&alg);
        assert_eq!(r.m, 1);
        assert!(skew(&r).is_zero());
        assert!(cybe(&alg, &r).is_zero());
    }

    #[test]
    fn fraction_normal_form() {
        // (x/y)^2 / ((x/y) − 1) = (x/y) + 1 + 1/((x/y) − 1)
        let mut num = Laurent2::zero();
        num.add_term((2, -2, 0, 0), Scalar::one());
        let t = TwoPointTensor::from_fraction(1, Laurent2::zero(), &num).unwrap();
        assert_eq!(t.poly.terms.len(), 2);
        assert_eq!(t.pole[0].get(&(0, 0)), Some(&Scalar::one()));
        let mut bad = Laurent2::zero();
        bad.add_term((1, 0, 0, 0), Scalar::one());
        assert!(TwoPointTensor::from_fraction(1, Laurent2::zero(), &bad).is_err());
    }
}
