//! Exact scalars: rationals, optionally adjoined a root of unity.
//!
//! A value of conductor `n` is a polynomial in `ζ_n` of degree below
//! `φ(n)`, reduced modulo the `n`-th cyclotomic polynomial. Rational
//! values are always stored with conductor 1.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Scalar {
    n: u32,
    c: Vec<BigRational>,
}

thread_local! {
    static CYCLO: RefCell<HashMap<u32, Vec<i64>>> = RefCell::new(HashMap::new());
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

// exact division of monic integer polynomials
fn poly_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; r.len() - dd];
    for k in (0..q.len()).rev() {
        let c = r[k + dd];
        q[k] = c;
        for (j, d) in den.iter().enumerate() {
            r[k + j] -= c * d;
        }
    }
    q
}

/// Coefficients of the `n`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    if let Some(p) = CYCLO.with(|m| m.borrow().get(&n).cloned()) {
        return p;
    }
    let mut xn = vec![0i64; n as usize + 1];
    xn[0] = -1;
    xn[n as usize] = 1;
    let mut acc = vec![1i64];
    for d in 1..n {
        if n % d == 0 {
            acc = poly_mul(&acc, &cyclotomic_poly(d));
        }
    }
    let p = poly_div(&xn, &acc);
    CYCLO.with(|m| m.borrow_mut().insert(n, p.clone()));
    p
}

fn lcm(a: u32, b: u32) -> u32 {
    a / a.gcd(&b) * b
}

fn reduce(n: u32, mut v: Vec<BigRational>) -> Vec<BigRational> {
    if n == 1 {
        let s = v.into_iter().fold(BigRational::zero(), |a, b| a + b);
        return vec![s];
    }
    let phi = cyclotomic_poly(n);
    let d = phi.len() - 1;
    if v.len() > d {
        for k in (d..v.len()).rev() {
            if v[k].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut v[k], BigRational::zero());
            for (j, p) in phi.iter().enumerate().take(d) {
                if *p != 0 {
                    let t = &c * BigRational::from_integer(BigInt::from(*p));
                    v[k - d + j] -= t;
                }
            }
        }
        v.truncate(d);
    }
    v
}

impl Scalar {
    fn make(n: u32, c: Vec<BigRational>) -> Scalar {
        let mut c = reduce(n, c);
        while c.len() > 1 && c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        if c.is_empty() {
            c.push(BigRational::zero());
        }
        if c.len() == 1 {
            Scalar { n: 1, c }
        } else {
            Scalar { n, c }
        }
    }

    pub fn zero() -> Scalar {
        Scalar { n: 1, c: vec![BigRational::zero()] }
    }

    pub fn one() -> Scalar {
        Scalar::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Scalar {
        Scalar { n: 1, c: vec![BigRational::from_integer(BigInt::from(v))] }
    }

    pub fn frac(p: i64, q: i64) -> Scalar {
        assert!(q != 0, "zero denominator");
        Scalar { n: 1, c: vec![BigRational::new(BigInt::from(p), BigInt::from(q))] }
    }

    pub fn from_rational(r: BigRational) -> Scalar {
        Scalar { n: 1, c: vec![r] }
    }

    /// `ζ_n^k` for a primitive `n`-th root of unity `ζ_n = exp(2πi/n)`.
    pub fn zeta(n: u32, k: i64) -> Scalar {
        assert!(n > 0);
        let k = k.rem_euclid(n as i64) as usize;
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        Scalar::make(n, c)
    }

    /// Conductor of the smallest cyclotomic field used to store the value.
    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.n == 1 && self.c[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.n == 1 && self.c[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.n == 1
    }

    pub fn to_rational(&self) -> Option<&BigRational> {
        if self.n == 1 {
            Some(&self.c[0])
        } else {
            None
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        let r = self.to_rational()?;
        if r.is_integer() {
            r.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn from_coeffs(n: u32, c: Vec<BigRational>) -> Scalar {
        assert!(n > 0);
        Scalar::make(n, c)
    }

    fn embed(&self, big: u32) -> Vec<BigRational> {
        if self.n == big {
            return self.c.clone();
        }
        if self.n == 1 {
            return vec![self.c[0].clone()];
        }
        let step = (big / self.n) as usize;
        let mut v = vec![BigRational::zero(); (self.c.len() - 1) * step + 1];
        for (i, x) in self.c.iter().enumerate() {
            v[i * step] = x.clone();
        }
        reduce(big, v)
    }

    fn binary(&self, other: &Scalar, sign: bool) -> Scalar {
        if self.n == 1 && other.n == 1 {
            let v = if sign { &self.c[0] + &other.c[0] } else { &self.c[0] - &other.c[0] };
            return Scalar { n: 1, c: vec![v] };
        }
        let n = lcm(self.n, other.n);
        let mut a = self.embed(n);
        let b = other.embed(n);
        if a.len() < b.len() {
            a.resize(b.len(), BigRational::zero());
        }
        for (i, x) in b.into_iter().enumerate() {
            if sign {
                a[i] += x;
            } else {
                a[i] -= x;
            }
        }
        Scalar::make(n, a)
    }

    fn product(&self, other: &Scalar) -> Scalar {
        if self.n == 1 && other.n == 1 {
            return Scalar { n: 1, c: vec![&self.c[0] * &other.c[0]] };
        }
        if self.n == 1 || other.n == 1 {
            let (r, p) = if self.n == 1 { (&self.c[0], other) } else { (&other.c[0], self) };
            if r.is_zero() {
                return Scalar::zero();
            }
            return Scalar { n: p.n, c: p.c.iter().map(|x| x * r).collect() };
        }
        let n = lcm(self.n, other.n);
        let a = self.embed(n);
        let b = other.embed(n);
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Scalar::make(n, out)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.n == 1 {
            return Some(Scalar { n: 1, c: vec![self.c[0].recip()] });
        }
        // solve (multiplication by self) * x = 1 in the power basis
        let n = self.n;
        let d = cyclotomic_poly(n).len() - 1;
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(d);
        for k in 0..d {
            let mut e = vec![BigRational::zero(); k + 1];
            e[k] = BigRational::one();
            let basis = Scalar { n, c: e };
            let mut col = self.product(&basis).embed(n);
            col.resize(d, BigRational::zero());
            cols.push(col);
        }
        let mut m: Vec<Vec<BigRational>> = (0..d)
            .map(|r| {
                let mut row: Vec<BigRational> = (0..d).map(|c| cols[c][r].clone()).collect();
                row.push(if r == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, piv);
            let p = m[col][col].clone();
            for x in m[col].iter_mut() {
                *x = &*x / &p;
            }
            for r in 0..d {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..=d {
                        let t = &f * &m[col][c];
                        m[r][c] -= t;
                    }
                }
            }
        }
        Some(Scalar::make(n, m.into_iter().map(|row| row[d].clone()).collect()))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn powi(&self, e: i64) -> Scalar {
        if e >= 0 {
            self.pow(e as u32)
        } else {
            self.inv().expect("zero to a negative power").pow((-e) as u32)
        }
    }

    /// Parse `"p"`, `"p/q"` or `"cyc<n>[c0,c1,...]"`.
    pub fn parse(s: &str) -> Result<Scalar> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("cyc") {
            let open = rest.find('[').ok_or_else(|| Error::parse(format!("bad scalar {s:?}")))?;
            if !rest.ends_with(']') {
                return Err(Error::parse(format!("bad scalar {s:?}")));
            }
            let n: u32 = rest[..open].parse().map_err(|_| Error::parse(format!("bad conductor in {s:?}")))?;
            if n == 0 || n > 1000 {
                return Err(Error::parse(format!("conductor out of range in {s:?}")));
            }
            let body = &rest[open + 1..rest.len() - 1];
            let mut c = Vec::new();
            for part in body.split(',') {
                c.push(parse_rational(part)?);
            }
            if c.is_empty() || c.len() > n as usize {
                return Err(Error::parse(format!("bad coefficient count in {s:?}")));
            }
            return Ok(Scalar::make(n, c));
        }
        Ok(Scalar::from_rational(parse_rational(s)?))
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::parse(format!("bad rational {s:?}"));
    if s.is_empty() || s.len() > 4096 {
        return Err(bad());
    }
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "{}", fmt_rational(&self.c[0]))
        } else {
            let parts: Vec<String> = self.c.iter().map(fmt_rational).collect();
            write!(f, "cyc{}[{}]", self.n, parts.join(","))
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        if self.n == other.n {
            return self.c == other.c;
        }
        self.binary(other, false).is_zero()
    }
}
impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Scalar {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Scalar {
        Scalar::from_i64(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Scalar {
        Scalar::from_rational(v)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(&self, &o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(&self, o)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, &o)
            }
        }
    };
}

binop!(Add, add, |a, b| a.binary(b, true));
binop!(Sub, sub, |a, b| a.binary(b, false));
binop!(Mul, mul, |a, b| a.product(b));
binop!(Div, div, |a, b| a.product(&b.inv().expect("division by zero")));

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { n: self.n, c: self.c.into_iter().map(|x| -x).collect() }
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        if self.n == 1 && o.n == 1 {
            self.c[0] += &o.c[0];
        } else {
            *self = self.binary(o, true);
        }
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, o: Scalar) {
        *self += &o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        if self.n == 1 && o.n == 1 {
            self.c[0] -= &o.c[0];
        } else {
            *self = self.binary(o, false);
        }
    }
}

impl SubAssign<Scalar> for Scalar {
    fn sub_assign(&mut self, o: Scalar) {
        *self -= &o;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = self.product(o);
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(it: I) -> Scalar {
        let mut acc = Scalar::zero();
        for x in it {
            acc += &x;
        }
        acc
    }
}

/// Sign of a rational scalar, `None` for non-rational values.
pub fn sign(s: &Scalar) -> Option<i32> {
    let r = s.to_rational()?;
    Some(if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(Scalar::zeta(2, 1), Scalar::from_i64(-1));
        let w = Scalar::zeta(3, 1);
        assert!(!w.is_rational());
        assert_eq!(w.pow(3), Scalar::one());
        assert_eq!(&w * &w + &w + Scalar::one(), Scalar::zero());
        // ζ6 = -ζ3^2
        assert_eq!(Scalar::zeta(6, 1), -Scalar::zeta(3, 2));
        assert_eq!(Scalar::zeta(4, 1).pow(2), Scalar::from_i64(-1));
    }

    #[test]
    fn inverse() {
        let w = Scalar::zeta(3, 1);
        let x = &w + Scalar::frac(1, 2);
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, Scalar::one());
        assert!(Scalar::zero().inv().is_none());
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["3/4", "-2/1", "cyc3[1/2,-1/1]"] {
            let v = Scalar::parse(s).unwrap();
            assert_eq!(Scalar::parse(&v.to_string()).unwrap(), v);
        }
        assert!(Scalar::parse("1/0").is_err());
        assert!(Scalar::parse("cyc0[1]").is_err());
    }
}
