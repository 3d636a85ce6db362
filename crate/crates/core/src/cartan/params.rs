//! Parameter files: structured text describing a parameter set in either
//! exact cyclotomic or high-precision numeric mode.
//!
//! Exact mode builds `CycloRational` scalars; q comes from a conductor and
//! exponent (a root of unity) or from a rational literal. Numeric mode
//! builds `PrecComplex` scalars at a chosen precision. A cyclotomic
//! parameter given as an exponent pair `eps * q^k` keeps that structure
//! attached, which is what lets the numeric backend classify its component
//! without certifying the exponent from floating data.

use super::{ipow, CartanError, ParameterSet};
use crate::combinatorics::Bullet;
use crate::scalar::{root_of_unity, CycloRational, PrecComplex};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

pub const DEFAULT_PRECISION_BITS: u32 = 256;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    /// "exact" or "numeric".
    pub mode: String,
    /// "0", "s" or "ss".
    pub bullet: String,
    pub n: usize,
    /// Numeric mode working precision; defaults to 256.
    #[serde(default)]
    pub precision_bits: Option<u32>,
    /// q = exp(2 pi i q_exponent / conductor) when given.
    #[serde(default)]
    pub conductor: Option<u64>,
    #[serde(default)]
    pub q_exponent: Option<i64>,
    /// Rational literal for q, e.g. "3/2". Mutually exclusive with
    /// `conductor`.
    #[serde(default)]
    pub q: Option<String>,
    #[serde(default, rename = "Q")]
    pub big_q: Vec<QEntry>,
}

/// One cyclotomic parameter: either the exponent pair for `eps * q^k`
/// (eps in {1, -1}) or a rational literal.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QEntry {
    #[serde(default)]
    pub eps: Option<i64>,
    #[serde(default)]
    pub k: Option<i64>,
    #[serde(default)]
    pub value: Option<String>,
}

pub enum LoadedParameters {
    Exact(ParameterSet<CycloRational>),
    Numeric(ParameterSet<PrecComplex>),
}

impl LoadedParameters {
    pub fn bullet(&self) -> Bullet {
        match self {
            LoadedParameters::Exact(p) => p.bullet(),
            LoadedParameters::Numeric(p) => p.bullet(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            LoadedParameters::Exact(p) => p.n(),
            LoadedParameters::Numeric(p) => p.n(),
        }
    }

    pub fn num_cyclotomic(&self) -> usize {
        match self {
            LoadedParameters::Exact(p) => p.cyclotomic_params().len(),
            LoadedParameters::Numeric(p) => p.cyclotomic_params().len(),
        }
    }
}

fn bad(msg: String) -> CartanError {
    CartanError::BadParameters(msg)
}

fn parse_rational(s: &str) -> Result<BigRational, CartanError> {
    let s = s.trim();
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| bad(format!("cannot parse rational literal {:?}", s)))?;
    let den: BigInt = den_s
        .parse()
        .map_err(|_| bad(format!("cannot parse rational literal {:?}", s)))?;
    if den.is_zero() {
        return Err(bad(format!("zero denominator in {:?}", s)));
    }
    Ok(BigRational::new(num, den))
}

enum QSpec {
    Exponent { negative: bool, k: i64 },
    Literal(BigRational),
}

fn q_specs(file: &ParamFile) -> Result<Vec<QSpec>, CartanError> {
    file.big_q
        .iter()
        .enumerate()
        .map(|(i, entry)| match (entry.eps, entry.k, &entry.value) {
            (Some(eps), Some(k), None) => {
                if eps != 1 && eps != -1 {
                    return Err(bad(format!("Q entry {}: eps must be 1 or -1", i + 1)));
                }
                Ok(QSpec::Exponent { negative: eps < 0, k })
            }
            (None, None, Some(v)) => Ok(QSpec::Literal(parse_rational(v)?)),
            _ => Err(bad(format!(
                "Q entry {}: give either both eps and k, or value",
                i + 1
            ))),
        })
        .collect()
}

fn build_q_values<F: super::ParamScalar>(
    q: &F,
    specs: &[QSpec],
    lift: impl Fn(&BigRational) -> F,
) -> (Vec<F>, Vec<Option<(bool, i64)>>) {
    let mut values = Vec::with_capacity(specs.len());
    let mut declared = Vec::with_capacity(specs.len());
    for spec in specs {
        match spec {
            QSpec::Exponent { negative, k } => {
                let v = ipow(q, *k);
                values.push(if *negative { v.neg() } else { v });
                declared.push(Some((*negative, *k)));
            }
            QSpec::Literal(r) => {
                values.push(lift(r));
                declared.push(None);
            }
        }
    }
    (values, declared)
}

pub fn parse_parameter_file(text: &str) -> Result<LoadedParameters, CartanError> {
    let file: ParamFile =
        toml::from_str(text).map_err(|e| bad(format!("parameter file syntax: {}", e)))?;
    let bullet = Bullet::parse(&file.bullet).map_err(|e| bad(e.to_string()))?;
    let specs = q_specs(&file)?;
    match file.mode.as_str() {
        "exact" => {
            let q = match (&file.conductor, &file.q) {
                (Some(c), None) => CycloRational::zeta(*c, file.q_exponent.unwrap_or(1)),
                (None, Some(lit)) => CycloRational::from_rational(parse_rational(lit)?),
                (Some(_), Some(_)) => {
                    return Err(bad("give conductor or a rational q, not both".into()))
                }
                (None, None) => return Err(bad("exact mode needs conductor or q".into())),
            };
            let (values, declared) =
                build_q_values(&q, &specs, |r| CycloRational::from_rational(r.clone()));
            Ok(LoadedParameters::Exact(ParameterSet::with_declared(
                q, values, declared, bullet, file.n,
            )?))
        }
        "numeric" => {
            let bits = file.precision_bits.unwrap_or(DEFAULT_PRECISION_BITS);
            let q = match (&file.conductor, &file.q) {
                (Some(c), None) => root_of_unity(*c, file.q_exponent.unwrap_or(1), bits),
                (None, Some(lit)) => PrecComplex::from_rational(&parse_rational(lit)?, bits),
                (Some(_), Some(_)) => {
                    return Err(bad("give conductor or a rational q, not both".into()))
                }
                (None, None) => return Err(bad("numeric mode needs conductor or q".into())),
            };
            let (values, declared) =
                build_q_values(&q, &specs, |r| PrecComplex::from_rational(r, bits));
            Ok(LoadedParameters::Numeric(ParameterSet::with_declared(
                q, values, declared, bullet, file.n,
            )?))
        }
        other => Err(bad(format!("unknown mode {:?}", other))),
    }
}

pub fn load_parameter_file(path: &std::path::Path) -> Result<LoadedParameters, CartanError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read {}: {}", path.display(), e)))?;
    parse_parameter_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{classify, DynkinType};

    #[test]
    fn exact_rational_file() {
        let text = r#"
            mode = "exact"
            bullet = "0"
            n = 3
            q = "3/2"

            [[Q]]
            value = "5/7"
        "#;
        let loaded = parse_parameter_file(text).unwrap();
        assert_eq!(loaded.bullet(), Bullet::Zero);
        assert_eq!(loaded.n(), 3);
        assert_eq!(loaded.num_cyclotomic(), 1);
        match loaded {
            LoadedParameters::Exact(p) => {
                assert_eq!(p.q(), &CycloRational::from_ratio_i64(3, 2));
                let d = classify(&p).unwrap();
                assert_eq!(d.component_types(), &[DynkinType::AInf]);
            }
            LoadedParameters::Numeric(_) => panic!("expected exact mode"),
        }
    }

    #[test]
    fn exact_root_of_unity_file() {
        let text = r#"
            mode = "exact"
            bullet = "0"
            n = 3
            conductor = 10
            q_exponent = 1

            [[Q]]
            eps = 1
            k = 1
        "#;
        let loaded = parse_parameter_file(text).unwrap();
        match loaded {
            LoadedParameters::Exact(p) => {
                let d = classify(&p).unwrap();
                assert_eq!(d.component_types(), &[DynkinType::AffineA2 { s: 2 }]);
            }
            LoadedParameters::Numeric(_) => panic!("expected exact mode"),
        }
    }

    #[test]
    fn numeric_declared_exponent_file() {
        let text = r#"
            mode = "numeric"
            bullet = "s"
            n = 2
            precision_bits = 192
            q = "3/2"

            [[Q]]
            eps = -1
            k = 3
        "#;
        let loaded = parse_parameter_file(text).unwrap();
        match loaded {
            LoadedParameters::Numeric(p) => {
                assert_eq!(p.q().precision_bits(), 192);
                let d = classify(&p).unwrap();
                let mut types: Vec<String> =
                    d.component_types().iter().map(|t| t.to_string()).collect();
                types.sort();
                assert_eq!(types, vec!["B_inf".to_string(), "B_inf".to_string()]);
            }
            LoadedParameters::Exact(_) => panic!("expected numeric mode"),
        }
    }

    #[test]
    fn malformed_files_are_rejected() {
        for text in [
            "mode = \"exact\"\nbullet = \"0\"\nn = 1",
            "mode = \"banana\"\nbullet = \"0\"\nn = 1\nq = \"3/2\"",
            "mode = \"exact\"\nbullet = \"0\"\nn = 1\nq = \"3/0\"",
            "mode = \"exact\"\nbullet = \"0\"\nn = 1\nq = \"3/2\"\nconductor = 5",
            "mode = \"exact\"\nbullet = \"q\"\nn = 1\nq = \"3/2\"",
            "mode = \"exact\"\nbullet = \"0\"\nn = 1\nq = \"3/2\"\n[[Q]]\neps = 2\nk = 1",
            "mode = \"exact\"\nbullet = \"0\"\nn = 1\nq = \"3/2\"\n[[Q]]\neps = 1",
        ] {
            assert!(parse_parameter_file(text).is_err(), "accepted: {}", text);
        }
    }
}
