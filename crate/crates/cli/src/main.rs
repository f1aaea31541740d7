use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cybe_core::bdquad::{self, QuadrupleData};
use cybe_core::classify::{self, AffineDiagram, MatchMode};
use cybe_core::json as cj;
use cybe_core::loopalg::{LoopAlgebra, TwistedStructure};
use cybe_core::simplelie::{CartanType, ChevalleyAlgebra, Series};
use cybe_core::trigtensor::{self, CybeVerdict};
use cybe_core::Error;

#[derive(Parser)]
#[command(name = "cybe", version, about = "Exact trigonometric solutions of the classical Yang–Baxter equation")]
struct Cli {
    /// Degree bound for operator and isotropy checks.
    #[arg(long, global = true, default_value_t = 3)]
    degree_bound: i64,
    /// Seed for random-point CYBE evaluation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Root system and structure constants of a simple Lie algebra.
    Roots { ty: String },
    /// The standard r-matrix of a grading.
    R0 {
        #[arg(long = "type")]
        ty: String,
        /// Comma-separated weights s_0,…,s_n.
        #[arg(long)]
        s: Option<String>,
        /// Comma-separated diagram permutation of the finite nodes.
        #[arg(long)]
        nu: Option<String>,
    },
    /// Check the three conditions on a quadruple.
    Validate {
        #[arg(short = 'i', long)]
        input: String,
    },
    /// Build t_Q and cross-check it.
    Twist {
        #[arg(short = 'i', long)]
        input: String,
    },
    /// Verify that r₀ + t_Q solves the CYBE.
    VerifyCybe {
        #[arg(short = 'i', long)]
        input: String,
        /// Evaluate at N random rational points instead of symbolically.
        #[arg(long)]
        random_points: Option<usize>,
    },
    /// Quasi-trigonometric reachability census.
    Census {
        /// Comma-separated series letters, e.g. A,B,D.
        #[arg(long, default_value = "A,B,C,D,E,F,G")]
        types: String,
        #[arg(long, default_value_t = 8)]
        max_rank: usize,
    },
    /// Search for a diagram automorphism relating two quadruples.
    Equiv {
        #[arg(short = 'a')]
        a: String,
        #[arg(short = 'b')]
        b: String,
        /// Compare t_h exactly instead of as affine families.
        #[arg(long)]
        exact: bool,
    },
    /// Export tables.
    Export {
        #[arg(long, value_enum)]
        what: What,
        /// Types for the catalog (untwisted, s = (1,0,…,0)).
        #[arg(long, default_value = "A1,A2,A3,B2,C2,G2")]
        types: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Catalog,
}

enum Failure {
    Usage(Error),
    Verification(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Usage(e)
    }
}

fn read_input(path: &str) -> Result<String, Error> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::parse(e.to_string()))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| Error::parse(format!("{path}: {e}")))?;
    }
    Ok(s)
}

fn csv<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Error> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| x.trim().parse().map_err(|_| Error::parse(format!("bad list entry {x:?}")))).collect()
}

fn verdict(zero: bool) -> &'static str {
    if zero {
        "zero"
    } else {
        "nonzero"
    }
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    let d = cli.degree_bound;
    if !(0..=12).contains(&d) {
        return Err(Error::invalid("--degree-bound must lie in 0..=12").into());
    }
    match &cli.cmd {
        Cmd::Roots { ty } => {
            let ty = CartanType::parse(ty)?;
            if ty.rank > cj::MAX_RANK {
                return Err(Error::Limit(format!("rank {} exceeds {}", ty.rank, cj::MAX_RANK)).into());
            }
            Ok(ChevalleyAlgebra::new(ty)?.to_json())
        }
        Cmd::R0 { ty, s, nu } => {
            let ct = CartanType::parse(ty)?;
            let nu = nu.as_deref().map(csv::<usize>).transpose()?;
            let s = match s {
                Some(s) => csv::<i64>(s)?,
                None => {
                    if ct.rank > cj::MAX_RANK {
                        return Err(Error::Limit(format!("rank {} exceeds {}", ct.rank, cj::MAX_RANK)).into());
                    }
                    let n = TwistedStructure::new(ct, nu.clone())?.n();
                    let mut v = vec![0; n + 1];
                    v[0] = 1;
                    v
                }
            };
            let alg = cj::SigmaJson { ty: ty.clone(), nu_perm: nu, s }.build()?;
            let r = trigtensor::r0(&alg);
            let skew = trigtensor::skew(&r).is_zero();
            let cy = trigtensor::cybe(&alg, &r).is_zero();
            let out = json!({"sigma": cj::SigmaJson::of(&alg), "m": alg.m, "marks": alg.st.marks, "r0": cj::encode_tensor(&r), "skew": verdict(skew), "cybe": verdict(cy)});
            if skew && cy {
                Ok(out)
            } else {
                Err(Failure::Verification(out))
            }
        }
        Cmd::Validate { input } => {
            let (alg, q) = cj::decode_quadruple(&read_input(input)?)?;
            let rep = bdquad::validate(&alg, &q);
            let out = cj::encode_validation(&rep);
            if rep.is_valid() {
                Ok(out)
            } else {
                Err(Failure::Verification(out))
            }
        }
        Cmd::Twist { input } => {
            let (alg, q) = cj::decode_quadruple(&read_input(input)?)?;
            let rep = bdquad::validate(&alg, &q);
            if !rep.is_valid() {
                return Err(Failure::Verification(json!({"validation": cj::encode_validation(&rep)})));
            }
            let data = QuadrupleData::new(&alg, &q)?;
            let res = trigtensor::twist_residual(&alg, &trigtensor::r0(&alg), &data.twist)?.is_zero();
            let mism = bdquad::compare_operators(&data, d);
            let iso = bdquad::w_isotropy(&data, d.min(2));
            let out = json!({
                "quadruple": cj::encode_quadruple(&alg, &q),
                "t_Q": cj::encode_laurent2(&data.twist),
                "twist_residual": verdict(res),
                "operator_mismatches": mism,
                "isotropy": iso.ok(),
                "degree_bound": d,
            });
            if res && mism.is_empty() && iso.ok() {
                Ok(out)
            } else {
                Err(Failure::Verification(out))
            }
        }
        Cmd::VerifyCybe { input, random_points } => {
            let (alg, q) = cj::decode_quadruple(&read_input(input)?)?;
            let rep = bdquad::validate(&alg, &q);
            if !rep.is_valid() {
                return Err(Failure::Verification(json!({"validation": cj::encode_validation(&rep)})));
            }
            let r = trigtensor::r0(&alg).add_poly(&bdquad::build_twist(&alg, &q)?);
            let skew = trigtensor::skew(&r).is_zero();
            let (cy, zero) = match random_points {
                None => {
                    let z = trigtensor::cybe(&alg, &r).is_zero();
                    (verdict(z).to_string(), z)
                }
                Some(n) => match trigtensor::verify_cybe(&alg, &r, 0, (*n).min(1000), cli.seed)? {
                    CybeVerdict::ZeroAtPoints(k) => (format!("zero at {k} points"), true),
                    CybeVerdict::Zero => ("zero".into(), true),
                    CybeVerdict::NonZero => ("nonzero".into(), false),
                },
            };
            let out = json!({"cybe": cy, "skew": verdict(skew)});
            if zero && skew {
                Ok(out)
            } else {
                Err(Failure::Verification(out))
            }
        }
        Cmd::Census { types, max_rank } => {
            let mut series = Vec::new();
            for t in types.split(',').filter(|x| !x.trim().is_empty()) {
                series.push(match t.trim().to_ascii_uppercase().as_str() {
                    "A" => Series::A,
                    "B" => Series::B,
                    "C" => Series::C,
                    "D" => Series::D,
                    "E" => Series::E,
                    "F" => Series::F,
                    "G" => Series::G,
                    other => return Err(Error::InvalidType(other.to_string()).into()),
                });
            }
            let max = (*max_rank).min(classify::NODE_CAP - 1);
            let entries = classify::type_census(&series, max)?;
            Ok(serde_json::to_value(entries).unwrap())
        }
        Cmd::Equiv { a, b, exact } => {
            let (alg, q1) = cj::decode_quadruple(&read_input(a)?)?;
            let (alg2, q2) = cj::decode_quadruple(&read_input(b)?)?;
            if cj::SigmaJson::of(&alg) != cj::SigmaJson::of(&alg2) {
                return Err(Error::invalid("quadruples live on different diagrams").into());
            }
            for q in [&q1, &q2] {
                let rep = bdquad::validate(&alg, q);
                if !rep.is_valid() {
                    return Err(Failure::Verification(json!({"validation": cj::encode_validation(&rep)})));
                }
            }
            let mode = if *exact { MatchMode::Exact } else { MatchMode::Family };
            let w = classify::equivalence_witness(&alg, &q1, &q2, mode)?;
            let out = json!({"witness": w.as_ref().map(|t| t.perm.clone()), "mode": if *exact {"exact"} else {"family"}});
            if w.is_some() {
                Ok(out)
            } else {
                Err(Failure::Verification(out))
            }
        }
        Cmd::Export { what: What::Catalog, types } => {
            let mut out = Vec::new();
            for t in types.split(',').filter(|x| !x.trim().is_empty()) {
                let ct = CartanType::parse(t)?;
                if ct.rank > 4 {
                    return Err(Error::Limit(format!("catalog export is limited to rank 4, got {ct}")).into());
                }
                let mut s = vec![0; ct.rank + 1];
                s[0] = 1;
                let alg = LoopAlgebra::build(t, None, s)?;
                let diag = AffineDiagram::from_algebra(&alg);
                let mut orbits = Vec::new();
                for o in classify::enumerate_representatives(&diag)? {
                    let gamma = o.representative.iter().copied().collect();
                    let q = bdquad::canonical_quadruple(&alg, gamma)?;
                    orbits.push(json!({"representative": o.representative, "size": o.size, "quadruple": cj::encode_quadruple(&alg, &q)}));
                }
                out.push(json!({
                    "diagram": diag.label,
                    "group_order": classify::diagram_automorphisms(&diag).len(),
                    "orbits": orbits,
                }));
            }
            Ok(Value::Array(out))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let emit = |v: &Value| {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).unwrap_or_default());
    };
    match run(&cli) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(v)) => {
            emit(&v);
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            emit(&cj::error_value(&e));
            ExitCode::from(2)
        }
    }
}

