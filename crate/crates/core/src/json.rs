//! JSON encoders and decoders. All scalars travel as exact strings `"p/q"`
//! (or `"cyc<n>[…]"`). Decoders reject malformed input with an error and
//! never panic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bdquad::{self, BDQuadruple, ConditionReport, ValidationReport, Witness};
use crate::classify::DiagramAutomorphism;
use crate::error::{Error, Result};
use crate::linalg;
use crate::loopalg::{LoopAlgebra, LoopElement};
use crate::regrade::Equivalence;
use crate::scalar::Scalar;
use crate::simplelie::CartanType;
use crate::trigtensor::{Laurent2, TwoPointTensor};

/// Largest finite rank accepted from JSON.
pub const MAX_RANK: usize = 8;
/// Largest automorphism order accepted from JSON.
pub const MAX_ORDER: i64 = 4096;
/// Largest number of entries in any JSON list.
pub const MAX_ENTRIES: usize = 1 << 16;
/// Largest absolute degree accepted from JSON.
pub const MAX_DEGREE: i64 = 1 << 20;

fn from_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::parse(e.to_string()))
}

fn check_len(n: usize) -> Result<()> {
    if n > MAX_ENTRIES {
        return Err(Error::Limit(format!("{n} entries exceed {MAX_ENTRIES}")));
    }
    Ok(())
}

fn check_degree(d: i64) -> Result<()> {
    if d.abs() > MAX_DEGREE {
        return Err(Error::Limit(format!("degree {d} out of range")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaJson {
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(default, alias = "nu", skip_serializing_if = "Option::is_none")]
    pub nu_perm: Option<Vec<usize>>,
    pub s: Vec<i64>,
}

impl SigmaJson {
    pub fn build(&self) -> Result<LoopAlgebra> {
        let ty = CartanType::parse(&self.ty)?;
        if ty.rank > MAX_RANK {
            return Err(Error::Limit(format!("rank {} exceeds {MAX_RANK}", ty.rank)));
        }
        if let Some(nu) = &self.nu_perm {
            if nu.len() != ty.rank {
                return Err(Error::invalid("ν has the wrong length"));
            }
        }
        if self.s.len() > MAX_RANK + 1 {
            return Err(Error::invalid("s has the wrong length"));
        }
        let alg = LoopAlgebra::build(&self.ty, self.nu_perm.clone(), self.s.clone())?;
        if alg.m > MAX_ORDER {
            return Err(Error::Limit(format!("order {} exceeds {MAX_ORDER}", alg.m)));
        }
        Ok(alg)
    }

    pub fn of(alg: &LoopAlgebra) -> SigmaJson {
        let nu = &alg.st.nu;
        let id = nu.iter().enumerate().all(|(i, j)| i == *j);
        SigmaJson { ty: alg.st.g.rs.ty.to_string(), nu_perm: if id { None } else { Some(nu.clone()) }, s: alg.s.clone() }
    }
}

pub fn decode_sigma(s: &str) -> Result<LoopAlgebra> {
    from_str::<SigmaJson>(s)?.build()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopTermJson {
    k: i64,
    basis: usize,
    num: i64,
    #[serde(default = "one")]
    den: i64,
}

fn one() -> i64 {
    1
}

pub fn encode_loop_element(f: &LoopElement) -> Value {
    let terms: Vec<Value> = f
        .terms
        .iter()
        .map(|(&(k, a), v)| match v.to_rational() {
            Some(r) => match (num_traits::ToPrimitive::to_i64(r.numer()), num_traits::ToPrimitive::to_i64(r.denom())) {
                (Some(p), Some(q)) => json!({"k": k, "basis": a, "num": p, "den": q}),
                _ => json!({"k": k, "basis": a, "val": v.to_string()}),
            },
            None => json!({"k": k, "basis": a, "val": v.to_string()}),
        })
        .collect();
    Value::Array(terms)
}

pub fn decode_loop_element_value(alg: &LoopAlgebra, v: Value) -> Result<LoopElement> {
    let terms: Vec<Value> = from_value(v)?;
    check_len(terms.len())?;
    let mut out = LoopElement::zero();
    for t in terms {
        let (k, basis, val) = if t.get("val").is_some() {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct V {
                k: i64,
                basis: usize,
                val: String,
            }
            let x: V = from_value(t)?;
            (x.k, x.basis, Scalar::parse(&x.val)?)
        } else {
            let x: LoopTermJson = from_value(t)?;
            if x.den == 0 {
                return Err(Error::parse("zero denominator"));
            }
            (x.k, x.basis, Scalar::frac(x.num, x.den))
        };
        check_degree(k)?;
        if !alg.is_consistent(k, basis) {
            return Err(Error::invalid(format!("z^{k} x_{basis} is not in the loop algebra")));
        }
        out.add_term(k, basis, val);
    }
    Ok(out)
}

pub fn decode_loop_element(alg: &LoopAlgebra, s: &str) -> Result<LoopElement> {
    decode_loop_element_value(alg, from_str(s)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyTermJson {
    dx: i64,
    dy: i64,
    i: usize,
    j: usize,
    val: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoleTermJson {
    k: i64,
    i: usize,
    j: usize,
    val: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorJson {
    m: i64,
    #[serde(default)]
    poly: Vec<PolyTermJson>,
    #[serde(default)]
    pole: Vec<PoleTermJson>,
}

pub fn encode_tensor(r: &TwoPointTensor) -> Value {
    let poly: Vec<Value> = r.poly.terms.iter().map(|(&(dx, dy, i, j), v)| json!({"dx": dx, "dy": dy, "i": i, "j": j, "val": v.to_string()})).collect();
    let mut pole = Vec::new();
    for (k, q) in r.pole.iter().enumerate() {
        for (&(i, j), v) in q {
            pole.push(json!({"k": k, "i": i, "j": j, "val": v.to_string()}));
        }
    }
    json!({"m": r.m, "poly": poly, "pole": pole})
}

pub fn encode_laurent2(t: &Laurent2) -> Value {
    encode_tensor(&TwoPointTensor::from_poly(1, t.clone()))["poly"].clone()
}

/// Decode a tensor whose basis indices are below `dim`.
pub fn decode_tensor_value(dim: usize, v: Value) -> Result<TwoPointTensor> {
    let t: TensorJson = from_value(v)?;
    if t.m < 1 || t.m > MAX_ORDER {
        return Err(Error::invalid(format!("m = {} out of range", t.m)));
    }
    check_len(t.poly.len())?;
    check_len(t.pole.len())?;
    let mut out = TwoPointTensor::zero(t.m);
    for p in t.poly {
        check_degree(p.dx)?;
        check_degree(p.dy)?;
        if p.i >= dim || p.j >= dim {
            return Err(Error::invalid("basis index out of range"));
        }
        out.poly.add_term((p.dx, p.dy, p.i, p.j), Scalar::parse(&p.val)?);
    }
    for p in t.pole {
        if p.k < 0 || p.k >= t.m {
            return Err(Error::invalid("pole slot out of range"));
        }
        if p.i >= dim || p.j >= dim {
            return Err(Error::invalid("basis index out of range"));
        }
        let val = Scalar::parse(&p.val)?;
        let slot = out.pole[p.k as usize].entry((p.i, p.j)).or_insert_with(Scalar::zero);
        *slot = &*slot + &val;
    }
    for q in out.pole.iter_mut() {
        q.retain(|_, v| !v.is_zero());
    }
    Ok(out)
}

pub fn decode_tensor(dim: usize, s: &str) -> Result<TwoPointTensor> {
    decode_tensor_value(dim, from_str(s)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    i: usize,
    j: usize,
    val: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadJson {
    diagram: SigmaJson,
    #[serde(default)]
    gamma1: Option<Vec<usize>>,
    #[serde(default)]
    gamma2: Option<Vec<usize>>,
    #[serde(default)]
    gamma: BTreeMap<String, usize>,
    #[serde(default)]
    t_h: Option<Vec<EntryJson>>,
}

/// Decodes a quadruple; a missing `t_h` means the canonical representative.
pub fn decode_quadruple_value(v: Value) -> Result<(LoopAlgebra, BDQuadruple)> {
    let q: QuadJson = from_value(v)?;
    let alg = q.diagram.build()?;
    let n = alg.n();
    let mut gamma = BTreeMap::new();
    for (k, v) in &q.gamma {
        let i: usize = k.trim().parse().map_err(|_| Error::parse(format!("bad node {k:?}")))?;
        if i > n || *v > n {
            return Err(Error::invalid("node index out of range"));
        }
        if gamma.insert(i, *v).is_some() {
            return Err(Error::parse(format!("node {i} mapped twice")));
        }
    }
    let g1: Vec<usize> = gamma.keys().copied().collect();
    let mut g2: Vec<usize> = gamma.values().copied().collect();
    g2.sort();
    if let Some(x) = &q.gamma1 {
        let mut x = x.clone();
        x.sort();
        if x != g1 {
            return Err(Error::invalid("gamma1 does not match the domain of gamma"));
        }
    }
    if let Some(x) = &q.gamma2 {
        let mut x = x.clone();
        x.sort();
        if x != g2 {
            return Err(Error::invalid("gamma2 does not match the image of gamma"));
        }
    }
    let t_h = match q.t_h {
        None => {
            if !bdquad::check_structure(n, &gamma).ok || !bdquad::check_lengths(&alg, &gamma).ok || !bdquad::check_nilpotent(&gamma).ok {
                return Err(Error::invalid("t_h omitted but (Γ₁, Γ₂, γ) violates conditions 1–2"));
            }
            bdquad::th_solution_space(&alg, &gamma)?.particular
        }
        Some(entries) => {
            check_len(entries.len())?;
            let mut t = linalg::zeros(n, n);
            for e in entries {
                if e.i >= n || e.j >= n {
                    return Err(Error::invalid("t_h index out of range"));
                }
                t[e.i][e.j] = &t[e.i][e.j] + &Scalar::parse(&e.val)?;
            }
            t
        }
    };
    Ok((alg, BDQuadruple::new(gamma, t_h)))
}

pub fn decode_quadruple(s: &str) -> Result<(LoopAlgebra, BDQuadruple)> {
    decode_quadruple_value(from_str(s)?)
}

pub fn encode_quadruple(alg: &LoopAlgebra, q: &BDQuadruple) -> Value {
    let gamma: serde_json::Map<String, Value> = q.gamma.iter().map(|(i, j)| (i.to_string(), json!(j))).collect();
    let mut t_h = Vec::new();
    for (i, row) in q.t_h.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                t_h.push(json!({"i": i, "j": j, "val": v.to_string()}));
            }
        }
    }
    json!({
        "diagram": SigmaJson::of(alg),
        "gamma1": q.gamma1(),
        "gamma2": q.gamma2(),
        "gamma": gamma,
        "t_h": t_h,
    })
}

fn encode_condition(c: &ConditionReport) -> Value {
    let w = match &c.witness {
        None => Value::Null,
        Some(Witness::Pair(i, j)) => json!({"pair": [i, j]}),
        Some(Witness::Orbit(i)) => json!({"orbit_start": i}),
        Some(Witness::Residual(i, v)) => json!({"node": i, "residual": v.iter().map(|x| x.to_string()).collect::<Vec<_>>()}),
        Some(Witness::Message(m)) => json!({"message": m}),
    };
    json!({"ok": c.ok, "witness": w})
}

pub fn encode_validation(r: &ValidationReport) -> Value {
    json!({
        "valid": r.is_valid(),
        "structure": encode_condition(&r.structure),
        "condition1": encode_condition(&r.lengths),
        "condition2": encode_condition(&r.nilpotent),
        "condition3": encode_condition(&r.cartan),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivJson {
    kind: String,
    payload: Value,
}

pub fn decode_equivalence_value(alg: &LoopAlgebra, v: Value) -> Result<Equivalence> {
    let e: EquivJson = from_value(v)?;
    match e.kind.as_str() {
        "exp_ad" => Ok(Equivalence::ExpAd(decode_loop_element_value(alg, e.payload)?)),
        "rescale" => {
            let s: String = from_value(e.payload)?;
            let a = Scalar::parse(&s)?;
            if a.is_zero() {
                return Err(Error::invalid("rescaling by zero"));
            }
            Ok(Equivalence::Rescale(a))
        }
        "diagram" => {
            let perm: Vec<usize> = from_value(e.payload)?;
            if perm.len() != alg.n() + 1 || !crate::simplelie::is_permutation(&perm) {
                return Err(Error::invalid("diagram payload is not a permutation of the affine nodes"));
            }
            Ok(Equivalence::Diagram(DiagramAutomorphism { perm }))
        }
        other => Err(Error::Unsupported(format!("equivalence kind {other:?}"))),
    }
}

pub fn decode_equivalence(alg: &LoopAlgebra, s: &str) -> Result<Equivalence> {
    decode_equivalence_value(alg, from_str(s)?)
}

pub fn encode_equivalence(e: &Equivalence) -> Value {
    match e {
        Equivalence::ExpAd(n) => json!({"kind": "exp_ad", "payload": encode_loop_element(n)}),
        Equivalence::Rescale(a) => json!({"kind": "rescale", "payload": a.to_string()}),
        Equivalence::Diagram(th) => json!({"kind": "diagram", "payload": th.perm}),
    }
}

/// Machine-readable error object.
pub fn error_value(e: &Error) -> Value {
    let kind = match e {
        Error::InvalidType(_) => "invalid_type",
        Error::Parse(_) => "parse",
        Error::Invalid(_) => "invalid",
        Error::Inconsistent(_) => "inconsistent",
        Error::PoleRemains(_) => "pole_remains",
        Error::Unsupported(_) => "unsupported",
        Error::Limit(_) => "limit",
    };
    json!({"error": {"kind": kind, "message": e.to_string()}})
}
