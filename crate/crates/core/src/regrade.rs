//! Regrading between loop algebras of the same `ν`, the element `μ`
//! relating their standard r-matrices, and the three families of regular
//! equivalences.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::classify::DiagramAutomorphism;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::loopalg::{LoopAlgebra, LoopElement};
use crate::scalar::Scalar;
use crate::trigtensor::{self, r0, Laurent2, TwoPointTensor};

fn same_structure(a: &LoopAlgebra, b: &LoopAlgebra) -> Result<()> {
    let (x, y) = (&a.st, &b.st);
    if x.g.rs.ty != y.g.rs.ty || x.nu != y.nu {
        return Err(Error::invalid("gradings must share the simple type and ν"));
    }
    Ok(())
}

/// `G^{s′}_s`: `z^l x ↦ z^{hgt_{s′}} x` for the root of `z^l x`.
pub fn regrade_map(from: &LoopAlgebra, to: &LoopAlgebra, f: &LoopElement) -> Result<LoopElement> {
    same_structure(from, to)?;
    from.check(f)?;
    let mut out = LoopElement::zero();
    for (&(l, a), v) in &f.terms {
        let c = from.root_coeffs(l, a);
        out.add_term(to.s_height(&c), a, v.clone());
    }
    Ok(out)
}

pub fn regrade_tensor(from: &LoopAlgebra, to: &LoopAlgebra, t: &Laurent2) -> Result<Laurent2> {
    t.map_legs(&mut |l, a| regrade_map(from, to, &LoopElement::basis(l, a)))
}

/// `μ ∈ 𝔥` (u-coordinates) with `α_i(μ) = s′_i/|σ′| − s_i/|σ|` for all affine nodes.
pub fn solve_mu(from: &LoopAlgebra, to: &LoopAlgebra) -> Result<Vec<Scalar>> {
    same_structure(from, to)?;
    let n = from.n();
    let a: Mat = from.st.alpha_on_u.clone();
    let b: Vec<Scalar> = (0..=n).map(|i| Scalar::frac(to.s[i], to.m) - Scalar::frac(from.s[i], from.m)).collect();
    let mu = linalg::solve(&a, &b, n).ok_or_else(|| Error::Inconsistent("no μ solves the regrading system".into()))?;
    if linalg::mat_vec(&a, &mu) != b {
        return Err(Error::Inconsistent("μ does not satisfy every node equation".into()));
    }
    Ok(mu)
}

/// `coefficient · exp(p u + q v)` in tensor slot `(i, j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentialMonomial {
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "ser_display")]
    pub coefficient: Scalar,
    #[serde(serialize_with = "ser_display")]
    pub p: BigRational,
    #[serde(serialize_with = "ser_display")]
    pub q: BigRational,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Debug)]
pub struct ExponentReport {
    pub mu: Vec<Scalar>,
    pub lhs: Vec<ExponentialMonomial>,
    pub rhs: Vec<ExponentialMonomial>,
}

impl ExponentReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn rational(x: &Scalar) -> Result<BigRational> {
    x.to_rational().cloned().ok_or_else(|| Error::Unsupported("irrational exponent".into()))
}

fn weight_at(alg: &LoopAlgebra, a: usize, mu: &[Scalar]) -> Scalar {
    alg.st.weight_on_u(&alg.st.basis[a].alpha).iter().zip(mu).map(|(x, y)| x * y).sum()
}

/// Compares the Taylor terms of `r₀` in the two gradings after
/// `x = e^{u/|σ|}, y = e^{v/|σ|}` and the twist by `e^{u ad μ} ⊗ e^{v ad μ}`.
/// Terms are kept while the second leg has `from`-degree at most `bound`.
pub fn exponent_identity(from: &LoopAlgebra, to: &LoopAlgebra, bound: i64) -> Result<ExponentReport> {
    let mu = solve_mu(from, to)?;
    let m = Scalar::from_i64(from.m);
    let m2 = Scalar::from_i64(to.m);
    let left = trigtensor::taylor(&r0(from), bound);
    let mut reach = 0;
    let mut lhs = Vec::new();
    for (&(dx, dy, i, j), v) in &left.terms {
        reach = reach.max(to.s_height(&from.root_coeffs(dy, j)));
        let p = &Scalar::from_i64(dx) / &m + weight_at(from, i, &mu);
        let q = &Scalar::from_i64(dy) / &m + weight_at(from, j, &mu);
        lhs.push(ExponentialMonomial { i, j, coefficient: v.clone(), p: rational(&p)?, q: rational(&q)? });
    }
    let right = trigtensor::taylor(&r0(to), reach);
    let mut rhs = Vec::new();
    for (&(dx, dy, i, j), v) in &right.terms {
        if from.s_height(&to.root_coeffs(dy, j)) > bound {
            continue;
        }
        let p = &Scalar::from_i64(dx) / &m2;
        let q = &Scalar::from_i64(dy) / &m2;
        rhs.push(ExponentialMonomial { i, j, coefficient: v.clone(), p: rational(&p)?, q: rational(&q)? });
    }
    let key = |e: &ExponentialMonomial| (e.i, e.j, e.p.clone(), e.q.clone());
    lhs.sort_by_key(key);
    rhs.sort_by_key(key);
    Ok(ExponentReport { mu, lhs, rhs })
}

/// Every monomial `x^a y^b` of `r` has `a + b = 0`.
pub fn quotient_dependence(r: &TwoPointTensor) -> bool {
    r.monomials().iter().all(|(a, b)| a + b == 0)
}

pub fn quotient_dependence_poly(t: &Laurent2) -> bool {
    t.terms.keys().all(|(a, b, _, _)| a + b == 0)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Equivalence {
    /// `exp(ad n)` for `n` of nonzero finite weight.
    ExpAd(LoopElement),
    /// `f(z) ↦ f(az)`.
    Rescale(Scalar),
    /// Generator map `z^{±s_i} X_i^± ↦ z^{±s_{ϑ(i)}} X_{ϑ(i)}^±`.
    Diagram(DiagramAutomorphism),
}

const EXP_CAP: usize = 64;

/// Automorphism of the loop algebra realizing an [`Equivalence`].
pub struct LoopAutomorphism<'a> {
    alg: &'a LoopAlgebra,
    kind: Equivalence,
    cache: BTreeMap<Vec<i64>, BTreeMap<(i64, usize), LoopElement>>,
    cartan: Option<Mat>,
}

impl<'a> LoopAutomorphism<'a> {
    pub fn new(alg: &'a LoopAlgebra, kind: &Equivalence) -> Result<LoopAutomorphism<'a>> {
        match kind {
            Equivalence::ExpAd(n) => {
                alg.check(n)?;
                if n.terms.keys().any(|&(_, a)| alg.st.basis[a].is_weight_zero()) {
                    return Err(Error::invalid("exp(ad n) needs every term of n to have nonzero weight"));
                }
            }
            Equivalence::Rescale(a) => {
                if a.is_zero() {
                    return Err(Error::invalid("rescaling by zero"));
                }
            }
            Equivalence::Diagram(th) => {
                let d = crate::classify::AffineDiagram::from_algebra(alg);
                if !th.is_automorphism_of(&d) {
                    return Err(Error::invalid(format!("{:?} is not a diagram automorphism", th.perm)));
                }
            }
        }
        let mut out = LoopAutomorphism { alg, kind: kind.clone(), cache: BTreeMap::new(), cartan: None };
        if let Equivalence::Diagram(th) = kind {
            out.cartan = Some(crate::classify::cartan_action(alg, th)?);
        }
        Ok(out)
    }

    pub fn apply(&mut self, f: &LoopElement) -> Result<LoopElement> {
        self.alg.check(f)?;
        match self.kind.clone() {
            Equivalence::ExpAd(n) => {
                let mut out = f.clone();
                let mut term = f.clone();
                for j in 1..=EXP_CAP {
                    term = self.alg.bracket(&n, &term).scale(&Scalar::frac(1, j as i64));
                    if term.is_zero() {
                        return Ok(out);
                    }
                    out = out.add(&term);
                }
                Err(Error::Limit("exp(ad n) did not terminate; n is not ad-nilpotent".into()))
            }
            Equivalence::Rescale(a) => {
                let mut out = LoopElement::zero();
                for (&(l, b), v) in &f.terms {
                    out.add_term(l, b, v * &a.powi(l));
                }
                Ok(out)
            }
            Equivalence::Diagram(th) => {
                let mut out = LoopElement::zero();
                for (&(l, a), v) in &f.terms {
                    let img = self.diagram_image(&th, l, a)?;
                    out = out.add(&img.scale(v));
                }
                Ok(out)
            }
        }
    }

    fn diagram_image(&mut self, th: &DiagramAutomorphism, l: i64, a: usize) -> Result<LoopElement> {
        let c = self.alg.root_coeffs(l, a);
        if !self.cache.contains_key(&c) {
            let map = self.root_space_images(th, &c)?;
            self.cache.insert(c.clone(), map);
        }
        self.cache[&c].get(&(l, a)).cloned().ok_or_else(|| Error::Inconsistent("basis vector outside its root space".into()))
    }

    /// Images of the whole root space with Π-coefficients `c`, obtained from
    /// brackets with the simple generators.
    fn root_space_images(&mut self, th: &DiagramAutomorphism, c: &[i64]) -> Result<BTreeMap<(i64, usize), LoopElement>> {
        let alg = self.alg;
        let (deg, space) = alg.root_space(c);
        let mut out = BTreeMap::new();
        if space.is_empty() {
            return Ok(out);
        }
        if c.iter().all(|x| *x == 0) {
            let m = self.cartan.as_ref().unwrap();
            for (j, &a) in alg.st.cartan.iter().enumerate() {
                let mut e = vec![Scalar::zero(); alg.n()];
                e[j] = Scalar::one();
                out.insert((0, a), alg.cartan_element(&linalg::mat_vec(m, &e)));
            }
            return Ok(out);
        }
        let sign = if c.iter().all(|x| *x >= 0) {
            1
        } else if c.iter().all(|x| *x <= 0) {
            -1
        } else {
            return Err(Error::Inconsistent("root with mixed signs".into()));
        };
        let gen = |i: usize| if sign > 0 { alg.x_plus(i) } else { alg.x_minus(i) };
        let height: i64 = c.iter().sum::<i64>().abs();
        if height == 1 {
            let i = c.iter().position(|x| *x != 0).unwrap();
            let x = gen(i);
            let (k, v) = x.terms.iter().next().unwrap();
            let img = gen(th.apply(i)).scale(&v.inv().unwrap());
            out.insert(*k, img);
            return Ok(out);
        }
        let mut vecs: Vec<LoopElement> = Vec::new();
        let mut imgs: Vec<LoopElement> = Vec::new();
        for i in 0..c.len() {
            if c[i] * sign <= 0 {
                continue;
            }
            let mut c2 = c.to_vec();
            c2[i] -= sign;
            let (d2, sub) = alg.root_space(&c2);
            for b in sub {
                let w = LoopElement::basis(d2, b);
                let v = alg.bracket(&gen(i), &w);
                if v.is_zero() {
                    continue;
                }
                let wi = self.diagram_image(th, d2, b)?;
                vecs.push(v);
                imgs.push(alg.bracket(&gen(th.apply(i)), &wi));
            }
        }
        let cols: Vec<Vec<Scalar>> = vecs.iter().map(|v| space.iter().map(|&a| v.get(deg, a)).collect()).collect();
        let mat = linalg::transpose(&cols);
        for (k, &a) in space.iter().enumerate() {
            let mut e = vec![Scalar::zero(); space.len()];
            e[k] = Scalar::one();
            let x = linalg::solve(&mat, &e, cols.len()).ok_or_else(|| Error::Inconsistent("root space not generated by brackets".into()))?;
            let mut img = LoopElement::zero();
            for (coef, im) in x.iter().zip(&imgs) {
                if !coef.is_zero() {
                    img = img.add(&im.scale(coef));
                }
            }
            out.insert((deg, a), img);
        }
        Ok(out)
    }

    pub fn apply_tensor(&mut self, t: &Laurent2) -> Result<Laurent2> {
        t.map_legs(&mut |l, a| self.apply(&LoopElement::basis(l, a)))
    }
}

/// `(φ(x) ⊗ φ(y)) r(x, y)`.
pub fn apply_equivalence(alg: &LoopAlgebra, phi: &Equivalence, r: &TwoPointTensor) -> Result<TwoPointTensor> {
    let mut map = LoopAutomorphism::new(alg, phi)?;
    match phi {
        Equivalence::Rescale(a) => {
            let mut out = r.clone();
            out.poly = Laurent2::zero();
            for (&(p, q, i, j), v) in &r.poly.terms {
                out.poly.add_term((p, q, i, j), v * &a.powi(p + q));
            }
            Ok(out)
        }
        Equivalence::ExpAd(_) => {
            let poly = map.apply_tensor(&r.poly)?;
            let num = map.apply_tensor(&r.pole_numerator())?;
            TwoPointTensor::from_fraction(r.m, poly, &num)
        }
        Equivalence::Diagram(_) => {
            // r₀ is fixed as a formal series; only the difference moves
            let base = r0(alg);
            let diff = r.sub(&base).normalized()?;
            if diff.has_pole() {
                return Err(Error::Unsupported("diagram maps are applied to r₀ + t with t polynomial".into()));
            }
            Ok(base.add_poly(&map.apply_tensor(&diff.poly)?))
        }
    }
}

/// Basis vectors of degree ≤ d where `R_{t′} φ ≠ φ R_t`.
pub fn check_conjugation(alg: &LoopAlgebra, phi: &Equivalence, t: &Laurent2, t2: &Laurent2, d: i64) -> Result<Vec<(i64, usize)>> {
    let mut map = LoopAutomorphism::new(alg, phi)?;
    let mut bad = Vec::new();
    for (l, a) in alg.basis_upto(d) {
        let f = LoopElement::basis(l, a);
        let lhs = trigtensor::residue_operator(alg, t2, &map.apply(&f)?);
        let rhs = map.apply(&trigtensor::residue_operator(alg, t, &f))?;
        if lhs != rhs {
            bad.push((l, a));
        }
    }
    Ok(bad)
}

/// `r − r₀` as a polynomial tensor.
pub fn twist_part(alg: &LoopAlgebra, r: &TwoPointTensor) -> Result<Laurent2> {
    let d = r.sub(&r0(alg)).normalized()?;
    if d.has_pole() {
        return Err(Error::invalid("r − r₀ has a pole"));
    }
    Ok(d.poly)
}
