//! Twisted loop algebras `L^σ` for automorphisms of type `(s;|ν|)`.
//!
//! The finite algebra is re-based once per diagram automorphism `ν`: every
//! basis vector of the *adapted basis* is a joint eigenvector for `ad 𝔥`
//! (with `𝔥 = 𝔥'^ν`) and `ν`. For `ν = id` this is the Chevalley basis.
//! The grading `s` only decides at which powers of `z` each adapted vector
//! lives, so one [`TwistedStructure`] serves every `s`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::scalar::Scalar;
use crate::simplelie::{is_permutation, AlgebraElement, CartanType, ChevalleyAlgebra};

#[derive(Clone, Debug)]
pub struct AdaptedVector {
    /// Restricted weight in coordinates of the restricted simple roots.
    pub alpha: Vec<i64>,
    /// Eigenvalue exponent: `ν x = ε^kmod x`.
    pub kmod: i64,
    /// Coordinates in the Chevalley basis.
    pub coords: Vec<Scalar>,
}

impl AdaptedVector {
    pub fn is_weight_zero(&self) -> bool {
        self.alpha.iter().all(|x| *x == 0)
    }
}

/// The finite algebra together with a diagram automorphism and everything
/// that does not depend on the grading vector `s`.
#[derive(Debug)]
pub struct TwistedStructure {
    pub g: ChevalleyAlgebra,
    pub nu: Vec<usize>,
    pub order: i64,
    /// Node orbits of `ν`, ordered by smallest node; orbit `i` is restricted simple root `i+1`.
    pub orbits: Vec<Vec<usize>>,
    pub basis: Vec<AdaptedVector>,
    table: Vec<Vec<(usize, Scalar)>>,
    gram: Vec<Vec<(usize, Scalar)>>,
    /// Adapted indices of `u_1..u_n` (orbit sums of simple coroots).
    pub cartan: Vec<usize>,
    /// `α_0` in restricted simple-root coordinates.
    pub alpha0: Vec<i64>,
    /// Marks `a_0..a_n` with `a_0 = 1`.
    pub marks: Vec<i64>,
    pub affine_cartan: Vec<Vec<i64>>,
    /// Gram matrix of `B` on `u_1..u_n`.
    pub u_gram: Mat,
    pub u_gram_inv: Mat,
    /// `α_i(u_j)` for affine nodes `i = 0..n`.
    pub alpha_on_u: Vec<Vec<Scalar>>,
}

fn ident_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn perm_order(p: &[usize]) -> i64 {
    let mut q = p.to_vec();
    let mut k = 1;
    while q.iter().enumerate().any(|(i, x)| *x != i) {
        q = q.iter().map(|&x| p[x]).collect();
        k += 1;
    }
    k
}

impl TwistedStructure {
    pub fn new(ty: CartanType, nu: Option<Vec<usize>>) -> Result<TwistedStructure> {
        let g = ChevalleyAlgebra::new(ty)?;
        let r = g.rank();
        let nu = nu.unwrap_or_else(|| ident_perm(r));
        if nu.len() != r || !is_permutation(&nu) {
            return Err(Error::invalid("ν is not a permutation of the finite nodes"));
        }
        let numat = g.lift_diagram_automorphism(&nu)?;
        let order = perm_order(&nu);
        if order > 3 {
            return Err(Error::invalid("diagram automorphism of order > 3"));
        }
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        let mut seen = vec![false; r];
        for i in 0..r {
            if seen[i] {
                continue;
            }
            let mut orb = vec![i];
            seen[i] = true;
            let mut j = nu[i];
            while j != i {
                orb.push(j);
                seen[j] = true;
                j = nu[j];
            }
            orb.sort();
            orbits.push(orb);
        }
        let n = orbits.len();
        let node_orbit: Vec<usize> = (0..r).map(|j| orbits.iter().position(|o| o.contains(&j)).unwrap()).collect();
        let restrict = |w: &[i64]| -> Vec<i64> {
            let mut out = vec![0; n];
            for (j, c) in w.iter().enumerate() {
                out[node_orbit[j]] += c;
            }
            out
        };
        let dim = g.dim();
        let eps = Scalar::zeta(order as u32, 1);
        // group Chevalley root vectors by restricted weight, in basis order
        let mut groups: Vec<(Vec<i64>, Vec<usize>)> = Vec::new();
        for a in 0..dim {
            if g.is_cartan(a) {
                continue;
            }
            let w = restrict(g.weight(a));
            match groups.iter_mut().find(|(x, _)| *x == w) {
                Some((_, v)) => v.push(a),
                None => groups.push((w, vec![a])),
            }
        }
        let eigen = |idx: &[usize], k: i64| -> Vec<Vec<Scalar>> {
            let m = idx.len();
            let lam = eps.pow(k as u32);
            let mut mat = linalg::zeros(m, m);
            for (p, &a) in idx.iter().enumerate() {
                for (q, &b) in idx.iter().enumerate() {
                    mat[p][q] = numat[a][b].clone();
                }
                mat[p][p] -= &lam;
            }
            linalg::nullspace(&mat, m)
                .into_iter()
                .map(|v| {
                    let piv = v.iter().find(|x| !x.is_zero()).unwrap().inv().unwrap();
                    let mut full = vec![Scalar::zero(); dim];
                    for (p, &a) in idx.iter().enumerate() {
                        full[a] = &v[p] * &piv;
                    }
                    full
                })
                .collect()
        };
        let mut basis: Vec<AdaptedVector> = Vec::new();
        for (w, idx) in &groups {
            for k in 0..order {
                for v in eigen(idx, k) {
                    basis.push(AdaptedVector { alpha: w.clone(), kmod: k, coords: v });
                }
            }
        }
        let mut cartan = Vec::new();
        for orb in &orbits {
            let mut v = vec![Scalar::zero(); dim];
            for &j in orb {
                v[g.h(j)] = Scalar::one();
            }
            cartan.push(basis.len());
            basis.push(AdaptedVector { alpha: vec![0; n], kmod: 0, coords: v });
        }
        let hidx: Vec<usize> = (0..r).map(|j| g.h(j)).collect();
        for k in 1..order {
            for v in eigen(&hidx, k) {
                basis.push(AdaptedVector { alpha: vec![0; n], kmod: k, coords: v });
            }
        }
        if basis.len() != dim {
            return Err(Error::Inconsistent("adapted basis has the wrong size".into()));
        }
        let cols: Mat = basis.iter().map(|b| b.coords.clone()).collect();
        let change = linalg::transpose(&cols);
        let inv = linalg::inverse(&change).ok_or_else(|| Error::Inconsistent("adapted basis is singular".into()))?;
        let express = |v: &[Scalar]| -> Vec<(usize, Scalar)> {
            linalg::mat_vec(&inv, v).into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
        };
        let mut table = vec![Vec::new(); dim * dim];
        for a in 0..dim {
            for b in a + 1..dim {
                let br = g.bracket_dense(&basis[a].coords, &basis[b].coords);
                if br.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let e = express(&br);
                table[b * dim + a] = e.iter().map(|(k, c)| (*k, -c)).collect();
                table[a * dim + b] = e;
            }
        }
        let kg = g.killing_gram();
        let mut gram = vec![Vec::new(); dim];
        for a in 0..dim {
            for b in 0..dim {
                let wa = &basis[a];
                let wb = &basis[b];
                if wa.alpha.iter().zip(&wb.alpha).any(|(x, y)| x + y != 0) || (wa.kmod + wb.kmod) % order != 0 {
                    continue;
                }
                let mut acc = Scalar::zero();
                for (i, x) in wa.coords.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in wb.coords.iter().enumerate() {
                        if !y.is_zero() && !kg[i][j].is_zero() {
                            acc += &(&(x * y) * &kg[i][j]);
                        }
                    }
                }
                if !acc.is_zero() {
                    gram[a].push((b, acc));
                }
            }
        }
        // lowest weight of the ε-eigenspace (k = 1 mod |ν|)
        let k1 = 1 % order;
        let w1: Vec<Vec<i64>> = basis.iter().filter(|b| b.kmod == k1).map(|b| b.alpha.clone()).collect();
        let lowest: Vec<&Vec<i64>> = w1
            .iter()
            .filter(|w| {
                (0..n).all(|i| {
                    let mut d = (*w).clone();
                    d[i] -= 1;
                    !w1.contains(&d)
                })
            })
            .collect();
        if lowest.is_empty() {
            return Err(Error::Inconsistent("no lowest weight in degree one".into()));
        }
        let alpha0 = lowest[0].clone();
        if lowest.iter().any(|w| **w != alpha0) {
            return Err(Error::Inconsistent("degree one piece is not irreducible".into()));
        }
        let mut marks = vec![1i64];
        marks.extend(alpha0.iter().map(|c| -c));
        if marks.iter().any(|x| *x <= 0) {
            return Err(Error::Inconsistent("non-positive mark".into()));
        }
        let u_gram: Mat = cartan
            .iter()
            .map(|&a| cartan.iter().map(|&b| gram[a].iter().find(|(k, _)| *k == b).map(|(_, v)| v.clone()).unwrap_or_default()).collect())
            .collect();
        let u_gram_inv = linalg::inverse(&u_gram).ok_or_else(|| Error::Inconsistent("degenerate form on 𝔥".into()))?;
        // α_i(u_j): restricted simple root i = orbit i, u_j = orbit sum j
        let simple_on_u: Vec<Vec<Scalar>> = orbits
            .iter()
            .map(|oi| {
                let p = oi[0];
                orbits.iter().map(|oj| Scalar::from_i64(oj.iter().map(|&l| g.rs.cartan[p][l]).sum())).collect()
            })
            .collect();
        let mut alpha_on_u = Vec::with_capacity(n + 1);
        alpha_on_u.push(
            (0..n)
                .map(|j| (0..n).map(|i| Scalar::from_i64(alpha0[i]) * &simple_on_u[i][j]).sum())
                .collect::<Vec<Scalar>>(),
        );
        alpha_on_u.extend(simple_on_u);
        let mut st = TwistedStructure {
            g,
            nu,
            order,
            orbits,
            basis,
            table,
            gram,
            cartan,
            alpha0,
            marks,
            affine_cartan: Vec::new(),
            u_gram,
            u_gram_inv,
            alpha_on_u,
        };
        let cor: Vec<Vec<Scalar>> = (0..=n).map(|i| st.coroot_of_functional(&st.alpha_on_u[i].clone())).collect();
        let bform = |x: &[Scalar], y: &[Scalar]| -> Scalar { linalg::mat_vec(&st.u_gram, y).iter().zip(x).map(|(a, b)| a * b).sum() };
        let mut ac = vec![vec![0i64; n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=n {
                let v = Scalar::from_i64(2) * bform(&cor[i], &cor[j]) / bform(&cor[j], &cor[j]);
                ac[i][j] = v.to_i64().ok_or_else(|| Error::Inconsistent("non-integral affine Cartan entry".into()))?;
            }
        }
        st.affine_cartan = ac;
        Ok(st)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of affine nodes minus one.
    pub fn n(&self) -> usize {
        self.orbits.len()
    }

    pub fn bracket_basis(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        &self.table[a * self.dim() + b]
    }

    pub fn gram_row(&self, a: usize) -> &[(usize, Scalar)] {
        &self.gram[a]
    }

    pub fn form_basis(&self, a: usize, b: usize) -> Scalar {
        self.gram[a].iter().find(|(k, _)| *k == b).map(|(_, v)| v.clone()).unwrap_or_default()
    }

    /// The element of 𝔥 (u-coordinates) that is B-dual to a functional given by its values on `u_j`.
    pub fn coroot_of_functional(&self, values: &[Scalar]) -> Vec<Scalar> {
        linalg::mat_vec(&self.u_gram_inv, values)
    }

    /// `α(u_j)` for a restricted weight in simple-root coordinates.
    pub fn weight_on_u(&self, alpha: &[i64]) -> Vec<Scalar> {
        let n = self.n();
        (0..n).map(|j| (0..n).map(|i| Scalar::from_i64(alpha[i]) * &self.alpha_on_u[i + 1][j]).sum()).collect()
    }

    /// `B(x, y)` for `x, y ∈ 𝔥` in u-coordinates.
    pub fn h_form(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        linalg::mat_vec(&self.u_gram, y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Adapted vectors spanning `g_(α, kmod)`.
    pub fn space(&self, alpha: &[i64], kmod: i64) -> Vec<usize> {
        let kmod = kmod.rem_euclid(self.order);
        (0..self.dim()).filter(|&a| self.basis[a].alpha == alpha && self.basis[a].kmod == kmod).collect()
    }

    /// The node permutation realized as a matrix in the Chevalley basis.
    pub fn nu_matrix(&self) -> Mat {
        self.g.lift_diagram_automorphism(&self.nu).unwrap()
    }

    pub fn adapted_to_chevalley(&self, a: usize) -> AlgebraElement {
        AlgebraElement::from_dense(&self.basis[a].coords)
    }
}

/// Sparse element of `L^σ`: `(degree, adapted index) → coefficient`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoopElement {
    pub terms: BTreeMap<(i64, usize), Scalar>,
}

impl LoopElement {
    pub fn zero() -> LoopElement {
        LoopElement::default()
    }

    pub fn term(l: i64, a: usize, c: Scalar) -> LoopElement {
        let mut e = LoopElement::zero();
        e.add_term(l, a, c);
        e
    }

    pub fn basis(l: i64, a: usize) -> LoopElement {
        LoopElement::term(l, a, Scalar::one())
    }

    pub fn add_term(&mut self, l: i64, a: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((l, a)).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&(l, a));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Scalar) -> LoopElement {
        let mut out = LoopElement::zero();
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(*k, v * c);
        }
        out
    }

    pub fn add(&self, o: &LoopElement) -> LoopElement {
        let mut out = self.clone();
        for ((l, a), v) in &o.terms {
            out.add_term(*l, *a, v.clone());
        }
        out
    }

    pub fn sub(&self, o: &LoopElement) -> LoopElement {
        let mut out = self.clone();
        for ((l, a), v) in &o.terms {
            out.add_term(*l, *a, -v);
        }
        out
    }

    pub fn get(&self, l: i64, a: usize) -> Scalar {
        self.terms.get(&(l, a)).cloned().unwrap_or_default()
    }

    /// Multiply by `z^d`.
    pub fn shift(&self, d: i64) -> LoopElement {
        LoopElement { terms: self.terms.iter().map(|((l, a), v)| ((l + d, *a), v.clone())).collect() }
    }

    pub fn max_abs_degree(&self) -> i64 {
        self.terms.keys().map(|(l, _)| l.abs()).max().unwrap_or(0)
    }
}

/// Position of a real or imaginary root relative to the triangular decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Positive,
    Cartan,
    Negative,
}

/// A root of `L^σ` in the ν-grading: restricted weight and ν-degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineRoot {
    pub alpha: Vec<i64>,
    pub k: i64,
}

/// `L^σ` for `σ` of type `(s;|ν|)`.
#[derive(Clone, Debug)]
pub struct LoopAlgebra {
    pub st: Arc<TwistedStructure>,
    pub s: Vec<i64>,
    /// Order of σ.
    pub m: i64,
    /// `Σ a_i s_i = m/|ν|`.
    pub mprime: i64,
    grades: Vec<i64>,
}

impl LoopAlgebra {
    pub fn new(st: Arc<TwistedStructure>, s: Vec<i64>) -> Result<LoopAlgebra> {
        let n = st.n();
        if s.len() != n + 1 {
            return Err(Error::invalid(format!("s must have {} entries", n + 1)));
        }
        if s.iter().any(|x| *x < 0) || s.iter().all(|x| *x == 0) {
            return Err(Error::invalid("s must be non-negative and not all zero"));
        }
        if s.iter().any(|x| *x > 1000) {
            return Err(Error::Limit("grading entries above 1000".into()));
        }
        let mprime: i64 = st.marks.iter().zip(&s).map(|(a, x)| a * x).sum();
        let m = st.order * mprime;
        let mut alg = LoopAlgebra { st, s, m, mprime, grades: Vec::new() };
        alg.grades = (0..alg.dim()).map(|a| (alg.hgt0(a) + alg.st.basis[a].kmod * mprime).rem_euclid(m)).collect();
        Ok(alg)
    }

    /// Convenience constructor from a type name, permutation and grading.
    pub fn build(ty: &str, nu: Option<Vec<usize>>, s: Vec<i64>) -> Result<LoopAlgebra> {
        let st = Arc::new(TwistedStructure::new(CartanType::parse(ty)?, nu)?);
        LoopAlgebra::new(st, s)
    }

    /// `L^ν` itself, `s = (1,0,…,0)`.
    pub fn untwisted_grading(st: Arc<TwistedStructure>) -> LoopAlgebra {
        let mut s = vec![0; st.n() + 1];
        s[0] = 1;
        LoopAlgebra::new(st, s).unwrap()
    }

    pub fn principal(st: Arc<TwistedStructure>) -> LoopAlgebra {
        let s = vec![1; st.n() + 1];
        LoopAlgebra::new(st, s).unwrap()
    }

    pub fn with_grading(&self, s: Vec<i64>) -> Result<LoopAlgebra> {
        LoopAlgebra::new(self.st.clone(), s)
    }

    pub fn dim(&self) -> usize {
        self.st.dim()
    }

    pub fn n(&self) -> usize {
        self.st.n()
    }

    pub fn order_nu(&self) -> i64 {
        self.st.order
    }

    /// `hgt_s(α_a, 0)`.
    pub fn hgt0(&self, a: usize) -> i64 {
        self.st.basis[a].alpha.iter().zip(&self.s[1..]).map(|(c, s)| c * s).sum()
    }

    /// Residue class of degrees carrying adapted vector `a`.
    pub fn grade(&self, a: usize) -> i64 {
        self.grades[a]
    }

    pub fn is_consistent(&self, l: i64, a: usize) -> bool {
        a < self.dim() && (l - self.grades[a]).rem_euclid(self.m) == 0
    }

    /// ν-degree `k` with `hgt_s(α_a, k) = l`.
    pub fn nu_degree(&self, l: i64, a: usize) -> i64 {
        debug_assert!(self.is_consistent(l, a));
        (l - self.hgt0(a)) / self.mprime
    }

    pub fn root(&self, l: i64, a: usize) -> AffineRoot {
        AffineRoot { alpha: self.st.basis[a].alpha.clone(), k: self.nu_degree(l, a) }
    }

    /// Coefficients of the root of `z^l x_a` over `Π^σ`.
    pub fn root_coeffs(&self, l: i64, a: usize) -> Vec<i64> {
        let k = self.nu_degree(l, a);
        let mut c = vec![k];
        c.extend(self.st.basis[a].alpha.iter().zip(&self.st.marks[1..]).map(|(x, mk)| x + k * mk));
        c
    }

    /// `hgt_s` of a root given by Π-coefficients.
    pub fn s_height(&self, coeffs: &[i64]) -> i64 {
        coeffs.iter().zip(&self.s).map(|(c, s)| c * s).sum()
    }

    /// `hgt_s(α, k)` of a ν-graded root.
    pub fn s_height_root(&self, r: &AffineRoot) -> Result<i64> {
        if r.alpha.len() != self.n() {
            return Err(Error::invalid("root has the wrong number of coordinates"));
        }
        Ok(self.s_height(&self.coeffs_of_root(r)))
    }

    pub fn coeffs_of_root(&self, r: &AffineRoot) -> Vec<i64> {
        let mut c = vec![r.k];
        c.extend(r.alpha.iter().zip(&self.st.marks[1..]).map(|(x, mk)| x + r.k * mk));
        c
    }

    /// ν-graded root with the given Π-coefficients.
    pub fn root_of_coeffs(&self, c: &[i64]) -> AffineRoot {
        let k = c[0];
        AffineRoot { alpha: c[1..].iter().zip(&self.st.marks[1..]).map(|(x, mk)| x - k * mk).collect(), k }
    }

    /// Adapted vectors of the root space with given Π-coefficients, with its degree.
    pub fn root_space(&self, c: &[i64]) -> (i64, Vec<usize>) {
        let r = self.root_of_coeffs(c);
        (self.s_height(c), self.st.space(&r.alpha, r.k))
    }

    pub fn part(&self, l: i64, a: usize) -> Part {
        let c = self.root_coeffs(l, a);
        if c.iter().all(|x| *x == 0) {
            Part::Cartan
        } else if c.iter().all(|x| *x >= 0) {
            Part::Positive
        } else {
            debug_assert!(c.iter().all(|x| *x <= 0));
            Part::Negative
        }
    }

    /// Adapted indices of `𝔤^σ_k`.
    pub fn graded_piece(&self, k: i64) -> Vec<usize> {
        let k = k.rem_euclid(self.m);
        (0..self.dim()).filter(|&a| self.grades[a] == k).collect()
    }

    pub fn check(&self, f: &LoopElement) -> Result<()> {
        for (l, a) in f.terms.keys() {
            if !self.is_consistent(*l, *a) {
                return Err(Error::invalid(format!("term z^{l} x_{a} is not in L^σ")));
            }
        }
        Ok(())
    }

    pub fn bracket(&self, f: &LoopElement, g: &LoopElement) -> LoopElement {
        let mut out = LoopElement::zero();
        for ((i, a), x) in &f.terms {
            for ((j, b), y) in &g.terms {
                let entry = self.st.bracket_basis(*a, *b);
                if entry.is_empty() {
                    continue;
                }
                let p = x * y;
                for (k, c) in entry {
                    out.add_term(i + j, *k, &p * c);
                }
            }
        }
        out
    }

    pub fn try_bracket(&self, f: &LoopElement, g: &LoopElement) -> Result<LoopElement> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.bracket(f, g))
    }

    pub fn form(&self, f: &LoopElement, g: &LoopElement) -> Scalar {
        let mut acc = Scalar::zero();
        for ((i, a), x) in &f.terms {
            for (b, v) in self.st.gram_row(*a) {
                if let Some(y) = g.terms.get(&(-i, *b)) {
                    acc += &(&(x * y) * v);
                }
            }
        }
        acc
    }

    pub fn try_form(&self, f: &LoopElement, g: &LoopElement) -> Result<Scalar> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.form(f, g))
    }

    /// Basis vectors `z^l x_a` with `|l| ≤ d`.
    pub fn basis_upto(&self, d: i64) -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        for l in -d..=d {
            for a in 0..self.dim() {
                if self.is_consistent(l, a) {
                    out.push((l, a));
                }
            }
        }
        out
    }

    /// Adapted vectors of the opposite root space.
    pub fn opposite(&self, a: usize) -> Vec<usize> {
        let b = &self.st.basis[a];
        let neg: Vec<i64> = b.alpha.iter().map(|x| -x).collect();
        self.st.space(&neg, -b.kmod)
    }

    /// Dual of `z^l x_a` inside the opposite root space: the element `y` of
    /// `L_{-root}` with `B(z^l x_b, y) = δ_ab` for `b` in the root space of `a`.
    pub fn dual(&self, l: i64, a: usize) -> LoopElement {
        let own = {
            let b = &self.st.basis[a];
            self.st.space(&b.alpha, b.kmod)
        };
        let opp = self.opposite(a);
        let g: Mat = own.iter().map(|&x| opp.iter().map(|&y| self.st.form_basis(x, y)).collect()).collect();
        let inv = linalg::inverse(&g).expect("root spaces pair nondegenerately");
        let pos = own.iter().position(|&x| x == a).unwrap();
        let mut out = LoopElement::zero();
        for (j, &y) in opp.iter().enumerate() {
            out.add_term(-l, y, inv[j][pos].clone());
        }
        out
    }

    /// `(b_r, b_{-r})` with `B(b_r, b_{-r}) = 1` for the real root of `z^l x_a`.
    pub fn root_vector(&self, l: i64, a: usize) -> Result<(LoopElement, LoopElement)> {
        if !self.is_consistent(l, a) {
            return Err(Error::invalid("not a basis vector of L^σ"));
        }
        if self.st.basis[a].is_weight_zero() {
            return Err(Error::invalid("imaginary and Cartan directions have no root vector pair"));
        }
        match self.part(l, a) {
            Part::Negative => {
                let opp = self.opposite(a);
                let (p, q) = self.root_vector(-l, opp[0])?;
                Ok((q, p))
            }
            _ => Ok((LoopElement::basis(l, a), self.dual(l, a))),
        }
    }

    /// Canonical vector of the real root with given Π-coefficients.
    pub fn root_basis_vector(&self, c: &[i64]) -> Option<(i64, usize)> {
        let (l, sp) = self.root_space(c);
        if sp.len() == 1 {
            Some((l, sp[0]))
        } else {
            None
        }
    }

    /// `α_i^∨` in u-coordinates, `i = 0..n`.
    pub fn coroot(&self, i: usize) -> Vec<Scalar> {
        self.st.coroot_of_functional(&self.st.alpha_on_u[i])
    }

    /// `H_i = α_i^∨ / B(α_i^∨, α_i^∨)`.
    pub fn h_gen(&self, i: usize) -> LoopElement {
        let c = self.coroot(i);
        let norm = self.st.h_form(&c, &c);
        self.cartan_element(&c).scale(&norm.inv().unwrap())
    }

    pub fn cartan_element(&self, u: &[Scalar]) -> LoopElement {
        let mut e = LoopElement::zero();
        for (j, v) in u.iter().enumerate() {
            e.add_term(0, self.st.cartan[j], v.clone());
        }
        e
    }

    /// u-coordinates of the degree-zero Cartan part of `f`.
    pub fn cartan_coords(&self, f: &LoopElement) -> Vec<Scalar> {
        self.st.cartan.iter().map(|&a| f.get(0, a)).collect()
    }

    pub fn simple_coeffs(&self, i: usize) -> Vec<i64> {
        let mut c = vec![0; self.n() + 1];
        c[i] = 1;
        c
    }

    /// `z^{s_i} X_i^+`.
    pub fn x_plus(&self, i: usize) -> LoopElement {
        let (l, a) = self.root_basis_vector(&self.simple_coeffs(i)).expect("simple root space is a line");
        LoopElement::basis(l, a)
    }

    /// `z^{-s_i} X_i^-`, normalized by `[X_i^+, X_i^-] = H_i`.
    pub fn x_minus(&self, i: usize) -> LoopElement {
        let neg: Vec<i64> = self.simple_coeffs(i).iter().map(|x| -x).collect();
        let (l, a) = self.root_basis_vector(&neg).unwrap();
        let y = LoopElement::basis(l, a);
        let br = self.bracket(&self.x_plus(i), &y);
        let h = self.h_gen(i);
        let (key, val) = h.terms.iter().next().unwrap();
        let c = val / &br.get(key.0, key.1);
        let out = y.scale(&c);
        debug_assert_eq!(self.bracket(&self.x_plus(i), &out), h);
        out
    }

    /// Membership in `span(Π^σ)`-restricted parabolic `𝔭^S_+ = 𝔅_+ ∔ 𝔑^S_-`.
    pub fn in_parabolic(&self, s_set: &[usize], l: i64, a: usize) -> bool {
        let c = self.root_coeffs(l, a);
        match self.part(l, a) {
            Part::Positive | Part::Cartan => true,
            Part::Negative => c.iter().enumerate().all(|(i, x)| *x == 0 || s_set.contains(&i)),
        }
    }

    pub fn parabolic_span(&self, s_set: &[usize], d: i64) -> Result<Vec<(i64, usize)>> {
        if s_set.iter().any(|&i| i > self.n()) {
            return Err(Error::invalid("node out of range"));
        }
        if (0..=self.n()).all(|i| s_set.contains(&i)) {
            return Err(Error::invalid("S must be a proper subset of the simple roots"));
        }
        Ok(self.basis_upto(d).into_iter().filter(|&(l, a)| self.in_parabolic(s_set, l, a)).collect())
    }

    pub fn parabolic_contains(&self, s_set: &[usize], f: &LoopElement) -> bool {
        f.terms.keys().all(|&(l, a)| self.is_consistent(l, a) && self.in_parabolic(s_set, l, a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_basics() {
        let l = LoopAlgebra::build("A1", None, vec![1, 0]).unwrap();
        assert_eq!(l.m, 1);
        assert_eq!(l.st.marks, vec![1, 1]);
        assert_eq!(l.st.alpha0, vec![-1]);
        assert_eq!(l.st.affine_cartan, vec![vec![2, -2], vec![-2, 2]]);
    }

    #[test]
    fn twisted_a2() {
        let l = LoopAlgebra::build("A2", Some(vec![1, 0]), vec![1, 0]).unwrap();
        assert_eq!(l.m, 2);
        assert_eq!(l.st.marks, vec![1, 2]);
        assert_eq!(l.graded_piece(0).len(), 3);
        assert_eq!(l.graded_piece(1).len(), 5);
    }
}
