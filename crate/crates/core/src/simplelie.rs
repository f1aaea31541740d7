//! Finite-dimensional simple Lie algebras in a Chevalley basis.
//!
//! The structure constants are obtained from a concrete realization: simply
//! laced types use the lattice construction with a bimultiplicative sign
//! cocycle, the remaining types are the subalgebras generated by orbit sums
//! of a folded simply laced algebra. Root vectors are then fixed by the
//! extraspecial-pair recursion `e_ξ = [e_γ, e_δ]/(p+1)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanType {
    pub series: Series,
    pub rank: usize,
}

impl CartanType {
    pub fn new(series: Series, rank: usize) -> Result<CartanType> {
        let ok = match series {
            Series::A => rank >= 1,
            Series::B | Series::C => rank >= 2,
            Series::D => rank >= 3,
            Series::E => (6..=8).contains(&rank),
            Series::F => rank == 4,
            Series::G => rank == 2,
        };
        if ok {
            Ok(CartanType { series, rank })
        } else {
            Err(Error::InvalidType(format!("{series:?}{rank}")))
        }
    }

    pub fn parse(s: &str) -> Result<CartanType> {
        let s = s.trim();
        let mut chars = s.chars();
        let series = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Series::A,
            Some('B') => Series::B,
            Some('C') => Series::C,
            Some('D') => Series::D,
            Some('E') => Series::E,
            Some('F') => Series::F,
            Some('G') => Series::G,
            _ => return Err(Error::InvalidType(s.to_string())),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| Error::InvalidType(s.to_string()))?;
        if rank > 64 {
            return Err(Error::InvalidType(s.to_string()));
        }
        CartanType::new(series, rank)
    }

    pub fn is_simply_laced(&self) -> bool {
        matches!(self.series, Series::A | Series::D | Series::E)
    }

    /// `a_ij = <α_i, α_j^∨>`, Bourbaki numbering, 0-based.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self.series {
            Series::A | Series::B | Series::C | Series::F | Series::G => {
                for i in 0..n - 1 {
                    link(i, i + 1);
                }
            }
            Series::D => {
                for i in 0..n - 2 {
                    link(i, i + 1);
                }
                link(n - 3, n - 1);
            }
            Series::E => {
                link(0, 2);
                link(1, 3);
                for i in 2..n - 1 {
                    link(i, i + 1);
                }
            }
        }
        match self.series {
            Series::B => a[n - 2][n - 1] = -2,
            Series::C => a[n - 1][n - 2] = -2,
            Series::F => a[1][2] = -2,
            Series::G => a[1][0] = -3,
            _ => {}
        }
        a
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.series, self.rank)
    }
}

/// Symmetrizer `d` with `a_ij d_j = a_ji d_i`, scaled so the shortest roots have `d = 1`.
pub fn symmetrizer(a: &[Vec<i64>]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut d: Vec<Option<BigRational>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(BigRational::one());
        let mut stack = vec![start];
        while let Some(j) = stack.pop() {
            for i in 0..n {
                if i != j && a[i][j] != 0 {
                    if a[j][i] == 0 {
                        return None;
                    }
                    let dj = d[j].clone().unwrap();
                    let di = dj * BigRational::from_integer(a[i][j].into())
                        / BigRational::from_integer(a[j][i].into());
                    match &d[i] {
                        Some(x) if *x != di => return None,
                        Some(_) => {}
                        None => {
                            d[i] = Some(di);
                            stack.push(i);
                        }
                    }
                }
            }
        }
    }
    let d: Vec<BigRational> = d.into_iter().map(|x| x.unwrap()).collect();
    let min = d.iter().cloned().fold(None, |m: Option<BigRational>, x| match m {
        Some(m) if m <= x => Some(m),
        _ => Some(x),
    })?;
    Some(d.into_iter().map(|x| x / &min).collect())
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub ty: CartanType,
    pub cartan: Vec<Vec<i64>>,
    /// `d_i = (α_i, α_i)/2` up to a common factor.
    pub sym: Vec<BigRational>,
    /// Positive roots as simple-root coefficient vectors, by height, then
    /// lexicographically decreasing (so the simple roots come in node order).
    pub positive: Vec<Vec<i64>>,
}

impl RootSystem {
    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    /// Positive roots followed by their negatives in the same order.
    pub fn roots(&self) -> Vec<Vec<i64>> {
        let mut out = self.positive.clone();
        out.extend(self.positive.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
        out
    }

    /// `<β, α_i^∨>`.
    pub fn pairing(&self, beta: &[i64], i: usize) -> i64 {
        beta.iter().enumerate().map(|(j, b)| b * self.cartan[j][i]).sum()
    }

    /// Symmetric form with `(α_i, α_i) = 2 d_i`.
    pub fn inner(&self, x: &[i64], y: &[i64]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, a) in x.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if *b == 0 || self.cartan[i][j] == 0 {
                    continue;
                }
                acc += BigRational::from_integer((a * b * self.cartan[i][j]).into()) * &self.sym[j];
            }
        }
        acc
    }

    pub fn is_root(&self, v: &[i64]) -> bool {
        self.positive_index(v).is_some() || {
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            self.positive_index(&neg).is_some()
        }
    }

    pub fn positive_index(&self, v: &[i64]) -> Option<usize> {
        self.positive.iter().position(|r| r.as_slice() == v)
    }

    pub fn highest_root(&self) -> Vec<i64> {
        self.positive.last().unwrap().clone()
    }
}

pub fn height(v: &[i64]) -> i64 {
    v.iter().sum()
}

/// Root system of a Cartan type via root strings.
pub fn build_root_system(ty: CartanType) -> Result<RootSystem> {
    let ty = CartanType::new(ty.series, ty.rank)?;
    let cartan = ty.cartan_matrix();
    let n = ty.rank;
    let sym = symmetrizer(&cartan).ok_or_else(|| Error::InvalidType(ty.to_string()))?;
    let mut layers: Vec<Vec<Vec<i64>>> = vec![(0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect()];
    let mut all: std::collections::HashSet<Vec<i64>> = layers[0].iter().cloned().collect();
    loop {
        let mut next: Vec<Vec<i64>> = Vec::new();
        for beta in layers.last().unwrap() {
            for i in 0..n {
                let mut q = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if all.contains(&down) {
                        q += 1;
                    } else {
                        break;
                    }
                }
                let pair: i64 = (0..n).map(|j| beta[j] * cartan[j][i]).sum();
                let p = q - pair;
                if p > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if !next.contains(&up) {
                        next.push(up);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by(|a, b| b.cmp(a));
        for r in &next {
            all.insert(r.clone());
        }
        layers.push(next);
    }
    let positive = layers.into_iter().flatten().collect();
    Ok(RootSystem { ty, cartan, sym, positive })
}

/// A Lie algebra given by a bracket table on a fixed basis.
#[derive(Clone, Debug)]
struct Table {
    dim: usize,
    data: Vec<Vec<(usize, Scalar)>>,
}

impl Table {
    fn new(dim: usize) -> Table {
        Table { dim, data: vec![Vec::new(); dim * dim] }
    }

    fn set(&mut self, a: usize, b: usize, v: Vec<(usize, Scalar)>) {
        let neg: Vec<(usize, Scalar)> = v.iter().map(|(k, c)| (*k, -c)).collect();
        self.data[a * self.dim + b] = v;
        self.data[b * self.dim + a] = neg;
    }

    fn get(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        &self.data[a * self.dim + b]
    }

    fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let entry = self.get(a, b);
                if entry.is_empty() {
                    continue;
                }
                let f = xa * yb;
                for (k, c) in entry {
                    out[*k] += &(&f * c);
                }
            }
        }
        out
    }
}

fn unit(dim: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); dim];
    v[i] = Scalar::one();
    v
}

fn scale(v: &[Scalar], c: &Scalar) -> Vec<Scalar> {
    v.iter().map(|x| if x.is_zero() { Scalar::zero() } else { x * c }).collect()
}

fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Lattice realization of a simply laced algebra: basis `E_β` (roots in
/// [`RootSystem::roots`] order) then `h_1..h_n`.
fn lattice_algebra(rs: &RootSystem) -> Table {
    let roots = rs.roots();
    let n = rs.rank();
    let nr = roots.len();
    let dim = nr + n;
    let index: HashMap<Vec<i64>, usize> = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let a = &rs.cartan;
    let eps = |x: &[i64], y: &[i64]| -> Scalar {
        let mut e = 0i64;
        for i in 0..n {
            e += x[i] * y[i];
            for j in i + 1..n {
                e += x[i] * y[j] * a[i][j];
            }
        }
        if e.rem_euclid(2) == 0 {
            Scalar::one()
        } else {
            Scalar::from_i64(-1)
        }
    };
    let mut t = Table::new(dim);
    for (ia, x) in roots.iter().enumerate() {
        for (ib, y) in roots.iter().enumerate().skip(ia + 1) {
            let s: Vec<i64> = x.iter().zip(y).map(|(p, q)| p + q).collect();
            if let Some(&k) = index.get(&s) {
                t.set(ia, ib, vec![(k, eps(x, y))]);
            } else if s.iter().all(|v| *v == 0) {
                let c = eps(x, y);
                let v = x.iter().enumerate().filter(|(_, b)| **b != 0).map(|(i, b)| (nr + i, &c * Scalar::from_i64(*b))).collect();
                t.set(ia, ib, v);
            }
        }
        for i in 0..n {
            let p = rs.pairing(x, i);
            if p != 0 {
                t.set(nr + i, ia, vec![(ia, Scalar::from_i64(p))]);
            }
        }
    }
    t
}

/// Simply laced type and node orbits whose folding realizes a non simply laced type.
fn folding(ty: CartanType) -> Option<(CartanType, Vec<Vec<usize>>)> {
    let n = ty.rank;
    match ty.series {
        Series::B => {
            let mut orbits: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i]).collect();
            orbits.push(vec![n - 1, n]);
            Some((CartanType { series: Series::D, rank: n + 1 }, orbits))
        }
        Series::C => {
            let mut orbits: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, 2 * n - 2 - i]).collect();
            orbits.push(vec![n - 1]);
            Some((CartanType { series: Series::A, rank: 2 * n - 1 }, orbits))
        }
        Series::F => Some((CartanType { series: Series::E, rank: 6 }, vec![vec![1], vec![3], vec![2, 4], vec![0, 5]])),
        Series::G => Some((CartanType { series: Series::D, rank: 4 }, vec![vec![0, 2, 3], vec![1]])),
        _ => None,
    }
}

/// Basis-independent record of how a non-simple positive root was built.
#[derive(Clone, Debug)]
pub struct Extraspecial {
    pub gamma: usize,
    pub delta: usize,
    pub p: i64,
}

#[derive(Clone, Debug)]
pub struct ChevalleyAlgebra {
    pub rs: RootSystem,
    table: Table,
    killing: Mat,
    weights: Vec<Vec<i64>>,
    root_lookup: HashMap<Vec<i64>, usize>,
    /// For each positive root index, the extraspecial pair defining it.
    pub construction: Vec<Option<Extraspecial>>,
}

/// Sparse element of a finite-dimensional algebra.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlgebraElement {
    pub coeffs: BTreeMap<usize, Scalar>,
}

impl AlgebraElement {
    pub fn zero() -> AlgebraElement {
        AlgebraElement::default()
    }

    pub fn basis(i: usize) -> AlgebraElement {
        AlgebraElement::term(i, Scalar::one())
    }

    pub fn term(i: usize, c: Scalar) -> AlgebraElement {
        let mut e = AlgebraElement::zero();
        e.add_term(i, c);
        e
    }

    pub fn add_term(&mut self, i: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(i).or_insert_with(Scalar::zero);
        *entry += &c;
        if entry.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Scalar) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (i, v) in &self.coeffs {
            out.add_term(*i, v * c);
        }
        out
    }

    pub fn add(&self, o: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (i, v) in &o.coeffs {
            out.add_term(*i, v.clone());
        }
        out
    }

    pub fn sub(&self, o: &AlgebraElement) -> AlgebraElement {
        self.add(&o.scale(&Scalar::from_i64(-1)))
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.coeffs.get(&i).cloned().unwrap_or_default()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); dim];
        for (i, c) in &self.coeffs {
            v[*i] = c.clone();
        }
        v
    }

    pub fn from_dense(v: &[Scalar]) -> AlgebraElement {
        let mut e = AlgebraElement::zero();
        for (i, c) in v.iter().enumerate() {
            e.add_term(i, c.clone());
        }
        e
    }
}

/// Tensor in `g ⊗ g` as a sparse map of basis pairs.
pub type Tensor2 = BTreeMap<(usize, usize), Scalar>;

impl ChevalleyAlgebra {
    pub fn new(ty: CartanType) -> Result<ChevalleyAlgebra> {
        let rs = build_root_system(ty)?;
        ChevalleyAlgebra::from_root_system(rs)
    }

    pub fn from_root_system(rs: RootSystem) -> Result<ChevalleyAlgebra> {
        let n = rs.rank();
        let (amb, e_gen, f_gen) = if rs.ty.is_simply_laced() {
            let t = lattice_algebra(&rs);
            let np = rs.positive.len();
            let e: Vec<Vec<Scalar>> = (0..n).map(|i| unit(t.dim, i)).collect();
            let f: Vec<Vec<Scalar>> = (0..n).map(|i| unit(t.dim, np + i)).collect();
            (t, e, f)
        } else {
            let (big_ty, orbits) = folding(rs.ty).expect("folding table");
            let big = build_root_system(big_ty)?;
            let t = lattice_algebra(&big);
            let np = big.positive.len();
            let mut e = Vec::new();
            let mut f = Vec::new();
            for orb in &orbits {
                let mut ev = vec![Scalar::zero(); t.dim];
                let mut fv = vec![Scalar::zero(); t.dim];
                for &j in orb {
                    ev[j] = Scalar::one();
                    fv[np + j] = Scalar::one();
                }
                e.push(ev);
                f.push(fv);
            }
            // the orbit order above already follows the target numbering; check it
            (t, e, f)
        };
        from_generators(rs, &amb, e_gen, f_gen)
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn num_positive(&self) -> usize {
        self.rs.positive.len()
    }

    /// Basis index of `e_α` for a positive root index.
    pub fn e_index(&self, pos: usize) -> usize {
        pos
    }

    pub fn f_index(&self, pos: usize) -> usize {
        self.num_positive() + pos
    }

    pub fn h_index(&self, i: usize) -> usize {
        2 * self.num_positive() + i
    }

    pub fn e(&self, i: usize) -> usize {
        self.e_index(self.rs.positive_index(&simple(self.rank(), i)).unwrap())
    }

    pub fn f(&self, i: usize) -> usize {
        self.f_index(self.rs.positive_index(&simple(self.rank(), i)).unwrap())
    }

    pub fn h(&self, i: usize) -> usize {
        self.h_index(i)
    }

    pub fn is_cartan(&self, a: usize) -> bool {
        a >= 2 * self.num_positive()
    }

    /// Root of a basis vector (zero vector on the Cartan subalgebra).
    pub fn weight(&self, a: usize) -> &[i64] {
        &self.weights[a]
    }

    /// Basis index of the root vector for a (positive or negative) root.
    pub fn root_index(&self, root: &[i64]) -> Option<usize> {
        self.root_lookup.get(root).copied()
    }

    pub fn label(&self, a: usize) -> String {
        let np = self.num_positive();
        let w = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("");
        if a < np {
            format!("e[{}]", w(&self.rs.positive[a]))
        } else if a < 2 * np {
            format!("f[{}]", w(&self.rs.positive[a - np]))
        } else {
            format!("h{}", a - 2 * np + 1)
        }
    }

    pub fn bracket_basis(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        self.table.get(a, b)
    }

    pub fn bracket_dense(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.table.bracket(x, y)
    }

    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (a, xa) in &x.coeffs {
            for (b, yb) in &y.coeffs {
                let f = xa * yb;
                for (k, c) in self.table.get(*a, *b) {
                    out.add_term(*k, &f * c);
                }
            }
        }
        out
    }

    /// `N_{α,β}` with `[e_α, e_β] = N_{α,β} e_{α+β}` for roots α, β.
    pub fn structure_constant(&self, alpha: &[i64], beta: &[i64]) -> Option<Scalar> {
        let a = self.root_index(alpha)?;
        let b = self.root_index(beta)?;
        let sum: Vec<i64> = alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
        let c = self.root_index(&sum)?;
        Some(self.table.get(a, b).iter().find(|(k, _)| *k == c).map(|(_, v)| v.clone()).unwrap_or_default())
    }

    pub fn killing_basis(&self, a: usize, b: usize) -> &Scalar {
        &self.killing[a][b]
    }

    pub fn killing_gram(&self) -> &Mat {
        &self.killing
    }

    pub fn killing(&self, x: &AlgebraElement, y: &AlgebraElement) -> Scalar {
        let mut acc = Scalar::zero();
        for (a, xa) in &x.coeffs {
            for (b, yb) in &y.coeffs {
                let k = &self.killing[*a][*b];
                if !k.is_zero() {
                    acc += &(&(xa * yb) * k);
                }
            }
        }
        acc
    }

    /// Trace form computed directly from `ad x ∘ ad y`.
    pub fn killing_by_trace(&self, x: &AlgebraElement, y: &AlgebraElement) -> Scalar {
        let mut acc = Scalar::zero();
        for c in 0..self.dim() {
            let yc = self.bracket(y, &AlgebraElement::basis(c));
            let xyc = self.bracket(x, &yc);
            acc += &xyc.get(c);
        }
        acc
    }

    /// Gram matrix of κ on the Cartan basis `h_1..h_n`.
    pub fn cartan_gram(&self) -> Mat {
        let n = self.rank();
        (0..n).map(|i| (0..n).map(|j| self.killing[self.h(i)][self.h(j)].clone()).collect()).collect()
    }

    /// `α(h_i)` for a functional given in simple-root coordinates.
    pub fn eval_root(&self, alpha: &[i64], i: usize) -> i64 {
        self.rs.pairing(alpha, i)
    }

    /// Coefficients on `h_1..h_n` of the element `t` with `κ(t, h) = α(h)`.
    pub fn coroot_coords(&self, alpha: &[i64]) -> Result<Vec<Scalar>> {
        let n = self.rank();
        let rhs: Vec<Scalar> = (0..n).map(|i| Scalar::from_i64(self.eval_root(alpha, i))).collect();
        linalg::solve(&self.cartan_gram(), &rhs, n)
            .ok_or_else(|| Error::Inconsistent("singular Cartan Gram matrix".into()))
    }

    pub fn coroot(&self, alpha: &[i64]) -> Result<AlgebraElement> {
        let c = self.coroot_coords(alpha)?;
        let mut e = AlgebraElement::zero();
        for (i, v) in c.into_iter().enumerate() {
            e.add_term(self.h(i), v);
        }
        Ok(e)
    }

    /// `C = Σ b_a ⊗ b^a` over κ-dual bases.
    pub fn casimir(&self) -> Tensor2 {
        let mut out = Tensor2::new();
        let np = self.num_positive();
        for p in 0..np {
            let (e, f) = (self.e_index(p), self.f_index(p));
            let g = self.killing[e][f].inv().unwrap();
            out.insert((e, f), g.clone());
            out.insert((f, e), g);
        }
        let inv = linalg::inverse(&self.cartan_gram()).expect("nondegenerate");
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                if !inv[i][j].is_zero() {
                    out.insert((self.h(i), self.h(j)), inv[i][j].clone());
                }
            }
        }
        out
    }

    /// Matrix (columns are images of basis vectors) of the automorphism
    /// sending `e_i, f_i, h_i` to `e_{π(i)}, f_{π(i)}, h_{π(i)}`.
    pub fn lift_diagram_automorphism(&self, perm: &[usize]) -> Result<Mat> {
        let n = self.rank();
        if perm.len() != n || !is_permutation(perm) {
            return Err(Error::invalid("not a permutation of the nodes"));
        }
        for i in 0..n {
            for j in 0..n {
                if self.rs.cartan[perm[i]][perm[j]] != self.rs.cartan[i][j] {
                    return Err(Error::invalid("permutation does not preserve the Cartan matrix"));
                }
            }
        }
        let dim = self.dim();
        let np = self.num_positive();
        let mut img: Vec<Option<Vec<Scalar>>> = vec![None; dim];
        for i in 0..n {
            img[self.e(i)] = Some(unit(dim, self.e(perm[i])));
            img[self.f(i)] = Some(unit(dim, self.f(perm[i])));
            img[self.h(i)] = Some(unit(dim, self.h(perm[i])));
        }
        for p in 0..np {
            if let Some(ex) = &self.construction[p] {
                let inv = Scalar::frac(1, ex.p + 1);
                let ge = img[self.e_index(ex.gamma)].clone().unwrap();
                let de = img[self.e_index(ex.delta)].clone().unwrap();
                img[self.e_index(p)] = Some(scale(&self.table.bracket(&ge, &de), &inv));
                let gf = img[self.f_index(ex.gamma)].clone().unwrap();
                let df = img[self.f_index(ex.delta)].clone().unwrap();
                img[self.f_index(p)] = Some(scale(&self.table.bracket(&gf, &df), &(-inv)));
            }
        }
        let cols: Vec<Vec<Scalar>> = img.into_iter().map(|c| c.unwrap()).collect();
        Ok(linalg::transpose(&cols))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut constants = Vec::new();
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                let v = self.table.get(a, b);
                if !v.is_empty() {
                    let coeffs: Vec<serde_json::Value> =
                        v.iter().map(|(k, c)| serde_json::json!([k, c.to_string()])).collect();
                    constants.push(serde_json::json!({"i": a, "j": b, "coeffs": coeffs}));
                }
            }
        }
        let gram: Vec<Vec<String>> = self.killing.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        serde_json::json!({
            "type": self.rs.ty.to_string(),
            "roots": self.rs.roots(),
            "constants": constants,
            "killing_gram": gram,
        })
    }
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

fn simple(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn first_nonzero(v: &[Scalar]) -> usize {
    v.iter().position(|x| !x.is_zero()).expect("nonzero vector")
}

/// Chevalley basis inside an ambient algebra from generators satisfying the
/// relations of `rs.cartan`.
fn from_generators(rs: RootSystem, amb: &Table, e_gen: Vec<Vec<Scalar>>, mut f_gen: Vec<Vec<Scalar>>) -> Result<ChevalleyAlgebra> {
    let n = rs.rank();
    let ty = rs.ty;
    let bug = |s: &str| Error::Inconsistent(format!("{ty}: {s}"));
    // normalize f_i so that [h_i, e_i] = 2 e_i for h_i = [e_i, f_i]
    let mut h_gen = Vec::new();
    for i in 0..n {
        let h = amb.bracket(&e_gen[i], &f_gen[i]);
        let he = amb.bracket(&h, &e_gen[i]);
        let k = first_nonzero(&e_gen[i]);
        let c = &he[k] / &e_gen[i][k];
        if c.is_zero() {
            return Err(bug("degenerate generator"));
        }
        let s = Scalar::from_i64(2) / &c;
        f_gen[i] = scale(&f_gen[i], &s);
        h_gen.push(scale(&h, &s));
    }
    for i in 0..n {
        for j in 0..n {
            let he = amb.bracket(&h_gen[i], &e_gen[j]);
            if he != scale(&e_gen[j], &Scalar::from_i64(rs.cartan[j][i])) {
                return Err(bug("generators do not match the Cartan matrix"));
            }
        }
    }
    let np = rs.positive.len();
    let mut e_vec: Vec<Vec<Scalar>> = Vec::with_capacity(np);
    let mut f_vec: Vec<Vec<Scalar>> = Vec::with_capacity(np);
    let mut construction = Vec::with_capacity(np);
    for (p, xi) in rs.positive.iter().enumerate() {
        if height(xi) == 1 {
            let i = xi.iter().position(|x| *x == 1).unwrap();
            e_vec.push(e_gen[i].clone());
            f_vec.push(f_gen[i].clone());
            construction.push(None);
            continue;
        }
        let (i, delta) = (0..n)
            .find_map(|i| {
                let mut d = xi.clone();
                d[i] -= 1;
                rs.positive_index(&d).map(|di| (i, di))
            })
            .unwrap();
        let gamma = rs.positive_index(&simple(n, i)).unwrap();
        let mut pp = 0;
        let mut d = rs.positive[delta].clone();
        loop {
            d[i] -= 1;
            if rs.is_root(&d) {
                pp += 1;
            } else {
                break;
            }
        }
        let inv = Scalar::frac(1, pp + 1);
        let ev = scale(&amb.bracket(&e_vec[gamma], &e_vec[delta]), &inv);
        let fv = scale(&amb.bracket(&f_vec[gamma], &f_vec[delta]), &(-&inv));
        if is_zero_vec(&ev) || is_zero_vec(&fv) {
            return Err(bug("vanishing root vector"));
        }
        e_vec.push(ev);
        f_vec.push(fv);
        construction.push(Some(Extraspecial { gamma, delta, p: pp }));
        let _ = p;
    }
    let dim = 2 * np + n;
    let mut basis: Vec<Vec<Scalar>> = Vec::with_capacity(dim);
    basis.extend(e_vec.iter().cloned());
    basis.extend(f_vec.iter().cloned());
    basis.extend(h_gen.iter().cloned());
    let mut weights: Vec<Vec<i64>> = rs.positive.clone();
    weights.extend(rs.positive.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
    weights.extend((0..n).map(|_| vec![0; n]));
    let mut root_lookup = HashMap::new();
    for (a, w) in weights.iter().enumerate().take(2 * np) {
        root_lookup.insert(w.clone(), a);
    }
    // coordinates on the Cartan part: pick coordinates where the h_i are independent
    let hmat: Mat = h_gen.clone();
    let mut cols = linalg::transpose(&hmat);
    let pivot_coords: Vec<usize> = {
        let mut m = hmat.clone();
        linalg::rref(&mut m)
    };
    let square: Mat = pivot_coords.iter().map(|&c| cols[c].clone()).collect();
    let sq_inv = linalg::inverse(&square).ok_or_else(|| bug("dependent Cartan generators"))?;
    cols.clear();
    let pivots: Vec<usize> = basis.iter().take(2 * np).map(|v| first_nonzero(v)).collect();
    let mut table = Table::new(dim);
    for a in 0..dim {
        for b in a + 1..dim {
            let r = amb.bracket(&basis[a], &basis[b]);
            if is_zero_vec(&r) {
                continue;
            }
            let w: Vec<i64> = weights[a].iter().zip(&weights[b]).map(|(x, y)| x + y).collect();
            let entry = if w.iter().all(|x| *x == 0) {
                let rhs: Vec<Scalar> = pivot_coords.iter().map(|&c| r[c].clone()).collect();
                let coords = linalg::mat_vec(&sq_inv, &rhs);
                let mut check = vec![Scalar::zero(); amb.dim];
                for (i, c) in coords.iter().enumerate() {
                    for (k, v) in h_gen[i].iter().enumerate() {
                        if !v.is_zero() && !c.is_zero() {
                            check[k] += &(c * v);
                        }
                    }
                }
                if check != r {
                    return Err(bug("bracket leaves the Cartan subalgebra"));
                }
                coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (2 * np + i, c)).collect()
            } else {
                let k = *root_lookup.get(&w).ok_or_else(|| bug("bracket of non-summable roots is nonzero"))?;
                let piv = pivots[k];
                let c = &r[piv] / &basis[k][piv];
                if scale(&basis[k], &c) != r {
                    return Err(bug("root space is not one dimensional"));
                }
                vec![(k, c)]
            };
            table.set(a, b, entry);
        }
    }
    let mut alg = ChevalleyAlgebra {
        rs,
        table,
        killing: Vec::new(),
        weights,
        root_lookup,
        construction,
    };
    alg.killing = compute_killing(&alg);
    for p in 0..np {
        let br = alg.bracket_basis(alg.e_index(p), alg.f_index(p)).to_vec();
        let root = alg.rs.positive[p].clone();
        // [e_ξ, f_ξ] must be the coroot h_ξ = Σ ξ_i d_i/d_ξ h_i
        let dxi = alg.rs.inner(&root, &root) / BigRational::from_integer(2.into());
        for i in 0..n {
            let expect = Scalar::from_rational(BigRational::from_integer(root[i].into()) * &alg.rs.sym[i] / &dxi);
            let got = br.iter().find(|(k, _)| *k == alg.h(i)).map(|(_, v)| v.clone()).unwrap_or_default();
            if got != expect {
                return Err(bug("[e_ξ, f_ξ] is not the coroot"));
            }
        }
    }
    Ok(alg)
}

fn compute_killing(alg: &ChevalleyAlgebra) -> Mat {
    let dim = alg.dim();
    let mut g = linalg::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            let wsum: Vec<i64> = alg.weights[a].iter().zip(&alg.weights[b]).map(|(x, y)| x + y).collect();
            if wsum.iter().any(|x| *x != 0) {
                continue;
            }
            let mut acc = Scalar::zero();
            for c in 0..dim {
                for (k, v) in alg.table.get(b, c) {
                    for (l, w) in alg.table.get(a, *k) {
                        if *l == c {
                            acc += &(v * w);
                        }
                    }
                }
            }
            g[a][b] = acc.clone();
            g[b][a] = acc;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> CartanType {
        CartanType::parse(s).unwrap()
    }

    #[test]
    fn sl2_relations() {
        let g = ChevalleyAlgebra::new(ty("A1")).unwrap();
        let (e, f, h) = (g.e(0), g.f(0), g.h(0));
        assert_eq!(g.bracket_basis(e, f), &[(h, Scalar::one())]);
        assert_eq!(g.bracket_basis(h, e), &[(e, Scalar::from_i64(2))]);
        assert_eq!(*g.killing_basis(h, h), Scalar::from_i64(8));
        assert_eq!(*g.killing_basis(e, f), Scalar::from_i64(4));
        assert!(g.killing_basis(e, e).is_zero());
    }

    #[test]
    fn every_type_builds() {
        for s in ["A3", "B2", "B3", "C3", "D4", "G2", "F4", "E6"] {
            let g = ChevalleyAlgebra::new(ty(s)).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert_eq!(g.dim(), 2 * g.num_positive() + g.rank());
        }
    }
}
