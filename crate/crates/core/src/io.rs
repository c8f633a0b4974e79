//! JSON files for matrix families and numeration systems, and text syntax for
//! words and intervals.
//!
//! Numbers are rational strings (`"1/3"`, `"0.25"`, `"2"`) or JSON numbers.
//! JSON floats are converted exactly from their binary value and flag the
//! object as inexact.

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};

use crate::betanum::{BetaNumber, NumerationSystem, QuadraticBase};
use crate::classify::MatrixFamily;
use crate::error::Error;
use crate::matcore::{Mat2, Vec2};
use crate::prodsim::Word;
use crate::scalar::{format_rational, parse_rational, rational_from_f64, Rational};

/// A number read from JSON, remembering whether it came from a float.
#[derive(Debug, Clone, PartialEq)]
struct Number {
    value: Rational,
    inexact: bool,
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Number;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string such as \"1/3\" or a number")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Number, E> {
                parse_rational(s).map(|value| Number { value, inexact: false }).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Number, E> {
                Ok(Number { value: Rational::from_integer(x.into()), inexact: false })
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Number, E> {
                Ok(Number { value: Rational::from_integer(x.into()), inexact: false })
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Number, E> {
                let value = rational_from_f64(x).ok_or_else(|| E::custom(format!("{x} is not finite")))?;
                Ok(Number { value, inexact: true })
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    #[serde(default)]
    name: Option<String>,
    matrices: Vec<[[Number; 2]; 2]>,
    v: [Number; 2],
}

#[derive(Serialize)]
struct FamilyOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: &'a Option<String>,
    matrices: Vec<[[String; 2]; 2]>,
    v: [String; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    #[serde(default)]
    name: Option<String>,
    a: u32,
    b: u32,
    p: Vec<Number>,
}

#[derive(Serialize)]
struct SystemOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: &'a Option<String>,
    a: u32,
    b: u32,
    p: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedFamily {
    pub name: Option<String>,
    pub family: MatrixFamily<Rational>,
    /// Some entry was given as a JSON float.
    pub inexact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSystem {
    pub name: Option<String>,
    pub system: NumerationSystem,
    pub inexact: bool,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, Error> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse { path: format!("{origin}: {path}"), message: e.into_inner().to_string() }
    })
}

fn field_error(origin: &str, path: &str, e: impl fmt::Display) -> Error {
    Error::Parse { path: format!("{origin}: {path}"), message: e.to_string() }
}

pub fn parse_family(text: &str, origin: &str) -> Result<LoadedFamily, Error> {
    let raw: FamilyFile = parse_json(text, origin)?;
    let mut inexact = raw.v.iter().any(|x| x.inexact);
    let mut matrices = Vec::with_capacity(raw.matrices.len());
    for (i, m) in raw.matrices.into_iter().enumerate() {
        inexact |= m.iter().flatten().any(|x| x.inexact);
        let [[a, b], [c, d]] = m;
        let mat = Mat2::new(a.value, b.value, c.value, d.value)
            .map_err(|e| field_error(origin, &format!("matrices[{i}]"), e))?;
        matrices.push(mat);
    }
    let [v1, v2] = raw.v;
    let family = MatrixFamily::new(matrices, Vec2::new(v1.value, v2.value)).map_err(|e| field_error(origin, "v", e))?;
    Ok(LoadedFamily { name: raw.name, family, inexact })
}

pub fn parse_system(text: &str, origin: &str) -> Result<LoadedSystem, Error> {
    let raw: SystemFile = parse_json(text, origin)?;
    let inexact = raw.p.iter().any(|x| x.inexact);
    let p = raw.p.into_iter().map(|x| x.value).collect();
    let system = NumerationSystem::new(raw.a, raw.b, p)?;
    Ok(LoadedSystem { name: raw.name, system, inexact })
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn load_family(path: &Path) -> Result<LoadedFamily, Error> {
    parse_family(&read(path)?, &path.display().to_string())
}

pub fn load_system(path: &Path) -> Result<LoadedSystem, Error> {
    parse_system(&read(path)?, &path.display().to_string())
}

pub fn dump_family(f: &LoadedFamily) -> String {
    let out = FamilyOut {
        name: &f.name,
        matrices: f
            .family
            .matrices
            .iter()
            .map(|m| m.rows().map(|r| r.map(|x| format_rational(&x))))
            .collect(),
        v: [format_rational(&f.family.v.x1), format_rational(&f.family.v.x2)],
    };
    serde_json::to_string_pretty(&out).expect("serializable")
}

pub fn dump_system(s: &LoadedSystem) -> String {
    let out = SystemOut {
        name: &s.name,
        a: s.system.a(),
        b: s.system.b(),
        p: s.system.p().iter().map(format_rational).collect(),
    };
    serde_json::to_string_pretty(&out).expect("serializable")
}

fn parse_letters(s: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::Usage(format!("bad letters {s:?}"));
    if s.contains(',') {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
    } else {
        s.chars().filter(|c| !c.is_whitespace()).map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect()
    }
}

/// `"0110"`, `"0,1,10"`, or an eventually periodic `"1(0)"` / `"2,3(0,1)"`.
pub fn parse_word(s: &str) -> Result<Word, Error> {
    let s = s.trim();
    match s.find('(') {
        None => Ok(Word::finite(parse_letters(s)?)),
        Some(i) => {
            let rest = s[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Usage(format!("unclosed period in {s:?}")))?;
            let prefix = parse_letters(s[..i].trim_end_matches(','))?;
            let period = parse_letters(rest)?;
            if period.is_empty() {
                return Err(Error::Usage(format!("empty period in {s:?}")));
            }
            Ok(Word::periodic(prefix, period))
        }
    }
}

/// `"[x, y]"` with endpoints in the syntax of [`BetaNumber::parse`].
pub fn parse_interval(s: &str, base: QuadraticBase) -> Result<(BetaNumber, BetaNumber), Error> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Usage(format!("interval {s:?} must look like [x, y]")))?;
    let (lo, hi) = inner.split_once(',').ok_or_else(|| Error::Usage(format!("interval {s:?} needs two endpoints")))?;
    Ok((BetaNumber::parse(lo.trim(), base)?, BetaNumber::parse(hi.trim(), base)?))
}
