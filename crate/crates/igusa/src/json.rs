//! JSON documents read and written by the command-line tool.
//!
//! Exact values are always rational strings. Floats go through [`Sci`],
//! which prints C-style `%.12e` so output is byte-stable across platforms.

use std::fmt;
use std::path::Path;

use igusa_core::continuation::{LaurentExpansion, PoleRecord};
use igusa_core::rational::{parse_rat, to_strings};
use igusa_core::recurrence::{OdeRelation, Recurrence, VerificationReport};
use igusa_core::simplex::{Domain, MomentSequence, SimplexDomain};
use igusa_core::{Rat, UniPoly};
use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::CliError;

/// A float printed as `%.12e`, e.g. `-6.666666666667e-01`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sci(pub f64);

pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    let text = format!("{x:.12e}");
    let (mantissa, exp) = text.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

impl fmt::Display for Sci {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_sci(self.0))
    }
}

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format_sci(self.0)).map_err(S::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sci {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Sci(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceJson {
    pub sign: i8,
    pub vertices: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainJson {
    pub nvars: usize,
    pub pieces: Vec<PieceJson>,
}

impl DomainJson {
    pub fn from_domain(d: &Domain) -> Self {
        DomainJson {
            nvars: d.nvars(),
            pieces: d
                .pieces()
                .iter()
                .map(|p| PieceJson { sign: p.sign(), vertices: p.vertices().iter().map(|v| to_strings(v)).collect() })
                .collect(),
        }
    }

    pub fn to_domain(&self) -> Result<Domain, CliError> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let vertices = p
                .vertices
                .iter()
                .map(|v| v.iter().map(|c| parse_rat(c)).collect::<Result<Vec<Rat>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            pieces.push(SimplexDomain::new(vertices, p.sign)?);
        }
        Ok(Domain::new(self.nvars, pieces)?)
    }
}

/// Reads a domain from `"standard"`, inline JSON, or a path to a JSON file.
pub fn load_domain(spec: &str, nvars: Option<usize>) -> Result<Domain, CliError> {
    let trimmed = spec.trim();
    if trimmed == "standard" || trimmed == "\"standard\"" {
        let n = nvars.ok_or_else(|| CliError::Usage("`-d standard` needs `-n`".into()))?;
        return Ok(Domain::standard(n));
    }
    let text = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else {
        std::fs::read_to_string(Path::new(spec))?
    };
    let d = serde_json::from_str::<DomainJson>(&text)?.to_domain()?;
    if let Some(n) = nvars {
        if n != d.nvars() {
            return Err(igusa_core::Error::DimensionMismatch { expected: n, got: d.nvars() }.into());
        }
    }
    Ok(d)
}

fn polys_to_rows(polys: &[UniPoly]) -> Vec<Vec<String>> {
    let width = polys.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    polys
        .iter()
        .map(|p| {
            let mut row = to_strings(p.coeffs());
            row.resize(width, "0".to_string());
            row
        })
        .collect()
}

fn rows_to_polys(rows: &[Vec<String>]) -> Result<Vec<UniPoly>, CliError> {
    rows.iter()
        .map(|r| Ok(UniPoly::new(r.iter().map(|c| parse_rat(c)).collect::<Result<Vec<_>, _>>()?)))
        .collect()
}

/// `{"coeffs": [[c00, c01, ...], ...]}`: row `i` is the shift, column `j` the
/// power of the variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyRowsJson {
    pub coeffs: Vec<Vec<String>>,
}

impl PolyRowsJson {
    pub fn from_recurrence(r: &Recurrence) -> Self {
        PolyRowsJson { coeffs: polys_to_rows(r.coeffs()) }
    }

    pub fn from_ode(o: &OdeRelation) -> Self {
        PolyRowsJson { coeffs: polys_to_rows(o.coeffs()) }
    }

    pub fn to_recurrence(&self) -> Result<Recurrence, CliError> {
        Ok(Recurrence::new(rows_to_polys(&self.coeffs)?)?)
    }

    pub fn to_ode(&self) -> Result<OdeRelation, CliError> {
        Ok(OdeRelation::new(rows_to_polys(&self.coeffs)?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub tested: usize,
    pub failures: Vec<usize>,
    pub verified: bool,
}

impl From<&VerificationReport> for VerificationJson {
    fn from(r: &VerificationReport) -> Self {
        VerificationJson { tested: r.tested, failures: r.failures.clone(), verified: r.verified() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentsJson {
    pub values: Vec<String>,
    pub f_digest: String,
    pub domain_digest: String,
}

impl MomentsJson {
    pub fn from_moments(m: &MomentSequence) -> Self {
        MomentsJson {
            values: to_strings(&m.values),
            f_digest: m.f_digest.clone(),
            domain_digest: m.domain_digest.clone(),
        }
    }

    pub fn to_moments(&self) -> Result<MomentSequence, CliError> {
        let values = self.values.iter().map(|v| parse_rat(v)).collect::<Result<Vec<_>, _>>()?;
        let mut m = MomentSequence::from_values(values);
        m.f_digest = self.f_digest.clone();
        m.domain_digest = self.domain_digest.clone();
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuessJson {
    pub recurrence: PolyRowsJson,
    pub order: usize,
    pub degree: usize,
    pub moments_used: usize,
    pub verification: VerificationJson,
    pub nullity: usize,
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeJson {
    pub ode: PolyRowsJson,
    pub order: usize,
    pub recurrence: PolyRowsJson,
    pub verification: VerificationJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentJson {
    pub s0: i64,
    pub min_exp: i64,
    pub coeffs: Vec<Sci>,
    pub err: Sci,
}

impl From<&LaurentExpansion> for LaurentJson {
    fn from(e: &LaurentExpansion) -> Self {
        LaurentJson {
            s0: e.s0,
            min_exp: e.min_exp,
            coeffs: e.coeffs.iter().copied().map(Sci).collect(),
            err: Sci(e.err_estimate),
        }
    }
}

impl LaurentJson {
    pub fn to_expansion(&self) -> LaurentExpansion {
        LaurentExpansion {
            s0: self.s0,
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| c.0).collect(),
            trunc_order: self.min_exp + self.coeffs.len() as i64 - 1,
            err_estimate: self.err.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalJson {
    pub s: Sci,
    pub value: Sci,
    pub err: Sci,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleJson {
    pub location: i64,
    pub order: usize,
    pub leading_coeff: Sci,
}

impl From<&PoleRecord> for PoleJson {
    fn from(p: &PoleRecord) -> Self {
        PoleJson { location: p.location, order: p.order, leading_coeff: Sci(p.leading_coeff) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolesJson {
    pub s_min: i64,
    pub poles: Vec<PoleJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionJson {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: Sci,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestJson {
    pub passed: bool,
    pub criteria: Vec<CriterionJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorJson {
    pub error: ErrorBody,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("documents serialize")
}
