//! Embedded database of Fano threefolds of Picard rank one and the primitive
//! ones of Picard rank two, with the geometric facts the classifier consumes.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cone::{cone_from_generators, contains};
use crate::error::{Error, Result};
use crate::intersection::{anticanonical_from_rays, eval_product, swap_pairing, DivisorClass, IntersectionTensor};
use crate::invariants::VarietyModel;
use crate::rational::{fmt_rational, int, serde_opt_rational, serde_rational, QVector, Rational};

pub const SCHEMA_VERSION: u32 = 1;

const BUILTIN: &str = include_str!("../data/fano_threefolds.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RayType {
    E1,
    E2,
    E3,
    E4,
    E5,
    C1,
    C2,
    D1,
    D2,
    D3,
}

impl RayType {
    /// Length `mu_R` of a ray of this type.
    pub fn length(self) -> i64 {
        use RayType::*;
        match self {
            E2 | C2 | D2 => 2,
            D3 => 3,
            E1 | E3 | E4 | E5 | C1 | D1 => 1,
        }
    }

    /// Dimension of the target of the contraction.
    pub fn target_dim(self) -> usize {
        use RayType::*;
        match self {
            E1 | E2 | E3 | E4 | E5 => 3,
            C1 | C2 => 2,
            D1 | D2 | D3 => 1,
        }
    }

    pub fn is_divisorial(self) -> bool {
        self.target_dim() == 3
    }
}

impl fmt::Display for RayType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalRay {
    #[serde(rename = "type")]
    pub ray_type: RayType,
    pub length: i64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactKind {
    /// Conics of the given curve class dominate `X`.
    DominatingConicClass,
    /// Curves of the given (line) class only sweep out `locus`.
    DominatingLineLocus,
    /// General members of the divisor class have the stored `(a, b)`.
    /// A `locus` names special members excluded from the comparison.
    FiberSurfaceProfile,
    /// Members of the divisor class are conic bundles over a line.
    ConicBundleLine,
    /// The exceptional divisor of a divisorial contraction, with its `(a, b)`.
    ExceptionalDivisor,
    /// Special members of the class are irrational with the stored `(a, b)`.
    NonRationalFiber,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<QVector>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_opt_rational")]
    pub a: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricFact {
    pub kind: FactKind,
    pub payload: FactPayload,
    pub citation: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictLevel {
    Balanced,
    WeaklyBalanced,
    WeaklyABalanced,
    None,
    Unclassified,
}

impl VerdictLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictLevel::Balanced => "balanced",
            VerdictLevel::WeaklyBalanced => "weakly_balanced",
            VerdictLevel::WeaklyABalanced => "weakly_a_balanced",
            VerdictLevel::None => "none",
            VerdictLevel::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for VerdictLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(with = "serde_rational")]
    pub a: Rational,
    pub b: u32,
    pub verdict: VerdictLevel,
    pub exceptional_set: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// The stored effective cone may be strictly smaller than the true one.
    LargerConePossible,
    /// The stored verdict rests on a singularity analysis that is left open.
    OpenSingularityAnalysis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanoRecord {
    pub schema_version: u32,
    pub name: String,
    pub dim: usize,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<i64>,
    pub degree: i64,
    pub canonical: QVector,
    pub tensor: IntersectionTensor,
    pub eff_generators: Vec<QVector>,
    #[serde(default)]
    pub nef_generators: Vec<QVector>,
    pub curve_pairing: Vec<QVector>,
    #[serde(default)]
    pub rays: Vec<ExtremalRay>,
    #[serde(default)]
    pub annotations: Vec<GeometricFact>,
    pub expected: Expected,
    #[serde(default)]
    pub flags: Vec<Flag>,
}

impl FanoRecord {
    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn anticanonical(&self) -> DivisorClass {
        DivisorClass(-&self.canonical)
    }

    /// Builds the Neron-Severi model. Cones are dualized here, once.
    pub fn model(&self) -> Result<VarietyModel> {
        let eff = cone_from_generators(&self.eff_generators, self.rank)?;
        let nef = if self.nef_generators.is_empty() {
            None
        } else {
            Some(cone_from_generators(&self.nef_generators, self.rank)?)
        };
        let mut model = VarietyModel::new(
            self.name.clone(),
            self.dim,
            DivisorClass(self.canonical.clone()),
            eff,
            nef,
            self.tensor.clone(),
            self.curve_pairing.clone(),
        )?;
        model.annotations = self.annotations.clone();
        model.larger_cone_possible = self.has_flag(Flag::LargerConePossible);
        Ok(model)
    }
}

/// Every consistency problem of `rec`; empty when the record is sound.
pub fn validate(rec: &FanoRecord) -> Vec<String> {
    let mut out = Vec::new();
    if rec.schema_version != SCHEMA_VERSION {
        out.push(format!("schema_version {} (expected {SCHEMA_VERSION})", rec.schema_version));
    }
    if rec.name.trim().is_empty() {
        out.push("empty name".into());
    }

    // shape problems make the numeric checks meaningless
    let rank = rec.rank;
    let mut shape = Vec::new();
    if rec.canonical.len() != rank {
        shape.push(format!("canonical has length {}, rank is {rank}", rec.canonical.len()));
    }
    if rec.tensor.rank() != rank {
        shape.push(format!("tensor rank {} differs from rank {rank}", rec.tensor.rank()));
    }
    if rec.tensor.dim() != rec.dim {
        shape.push(format!("tensor dimension {} differs from dim {}", rec.tensor.dim(), rec.dim));
    }
    if rec.curve_pairing.len() != rank || rec.curve_pairing.iter().any(|r| r.len() != rank) {
        shape.push(format!("curve pairing is not {rank} x {rank}"));
    }
    for g in rec.eff_generators.iter().chain(&rec.nef_generators) {
        if g.len() != rank {
            shape.push(format!("cone generator {g} has length {}, rank is {rank}", g.len()));
        }
    }
    if !shape.is_empty() {
        out.extend(shape);
        return out;
    }

    let minus_k = rec.anticanonical();
    let powers = vec![&minus_k; rec.dim];
    match eval_product(&rec.tensor, &powers) {
        Ok(d) if d == int(rec.degree) => {}
        Ok(d) => out.push(format!(
            "degree: (-K)^{} = {}, recorded {}",
            rec.dim,
            fmt_rational(&d),
            rec.degree
        )),
        Err(e) => out.push(format!("degree: {e}")),
    }

    match rank {
        1 => match rec.index {
            Some(r) if r >= 1 => {
                if rec.canonical != QVector::from_ints(&[-r]) {
                    out.push(format!("canonical {} is not -{r} H", rec.canonical));
                }
            }
            _ => out.push("rank-one record needs a positive index".into()),
        },
        2 => {
            if rec.index.is_some() {
                out.push("index is only recorded for rank one".into());
            }
            if rec.rays.len() != 2 {
                out.push(format!("expected two extremal rays, found {}", rec.rays.len()));
            } else {
                for (i, ray) in rec.rays.iter().enumerate() {
                    if ray.length != ray.ray_type.length() {
                        out.push(format!(
                            "ray {}: type {} has length {}, recorded {}",
                            i + 1,
                            ray.ray_type,
                            ray.ray_type.length(),
                            ray.length
                        ));
                    }
                }
                match anticanonical_from_rays(rec.rays[0].length, rec.rays[1].length) {
                    Ok(k) if k == minus_k => {}
                    Ok(k) => out.push(format!(
                        "anticanonical mismatch: rays give {k}, recorded {minus_k}"
                    )),
                    Err(e) => out.push(format!("anticanonical: {e}")),
                }
            }
            if rec.curve_pairing != swap_pairing() {
                out.push("curve pairing is not the swap matrix".into());
            }
        }
        _ => out.push(format!("unsupported Picard rank {rank}")),
    }
    if rank != 2 && !rec.rays.is_empty() {
        out.push("extremal rays are only recorded for rank two".into());
    }

    match cone_from_generators(&rec.eff_generators, rank) {
        Ok(eff) => {
            if !eff.is_pointed() || !eff.is_full_dimensional() {
                out.push("effective cone is not pointed and full-dimensional".into());
            } else if !eff.contains_in_interior(&minus_k.0).unwrap_or(false) {
                out.push("-K is not in the interior of the effective cone".into());
            }
            for g in &rec.nef_generators {
                if !contains(&eff, g).unwrap_or(false) {
                    out.push(format!("nef generator {g} is not effective"));
                }
            }
        }
        Err(e) => out.push(format!("effective cone: {e}")),
    }

    for (i, fact) in rec.annotations.iter().enumerate() {
        let p = &fact.payload;
        if fact.citation.trim().is_empty() {
            out.push(format!("annotation {i}: empty citation"));
        }
        if let Some(c) = &p.class {
            if c.len() != rank {
                out.push(format!("annotation {i}: class {c} has length {}, rank is {rank}", c.len()));
            }
        }
        let needs_class = fact.kind != FactKind::ExceptionalDivisor;
        if needs_class && p.class.is_none() {
            out.push(format!("annotation {i}: {:?} needs a class", fact.kind));
        }
        let needs_a = matches!(
            fact.kind,
            FactKind::FiberSurfaceProfile | FactKind::ExceptionalDivisor | FactKind::NonRationalFiber
        );
        if needs_a && p.a.is_none() {
            out.push(format!("annotation {i}: {:?} needs a", fact.kind));
        }
        let needs_locus = matches!(fact.kind, FactKind::DominatingLineLocus | FactKind::ExceptionalDivisor);
        if needs_locus && p.locus.as_deref().map_or(true, |l| l.trim().is_empty()) {
            out.push(format!("annotation {i}: {:?} needs a locus", fact.kind));
        }
    }

    if rec.expected.a != int(1) {
        out.push(format!("expected a = {}, must be 1 for L = -K", rec.expected.a));
    }
    if rec.expected.b as usize != rank {
        out.push(format!("expected b = {}, must equal the Picard rank {rank}", rec.expected.b));
    }
    out
}

fn check_all(records: &[FanoRecord]) -> Result<()> {
    for rec in records {
        let violations = validate(rec);
        if !violations.is_empty() {
            return Err(Error::CorruptData { name: rec.name.clone(), violations: violations.join("; ") });
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

fn parse_records(text: &str, source: &str) -> Result<Vec<FanoRecord>> {
    let parse_err = |e: serde_json::Error| Error::Parse {
        location: format!("{source}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    };
    // version first, so that a newer file reports the version and not a field
    if let Ok(probes) = serde_json::from_str::<Vec<VersionProbe>>(text) {
        if let Some(p) = probes.iter().find(|p| p.schema_version != SCHEMA_VERSION) {
            return Err(Error::SchemaVersionMismatch {
                expected: SCHEMA_VERSION,
                found: p.schema_version,
            });
        }
    }
    serde_json::from_str(text).map_err(parse_err)
}

/// The embedded records, validated.
pub fn load_builtin() -> Result<Vec<FanoRecord>> {
    let records = parse_records(BUILTIN, "builtin")?;
    check_all(&records)?;
    Ok(records)
}

/// Records from a JSON file. Parsing only; call [`validate`] for consistency.
pub fn load_file(path: impl AsRef<Path>) -> Result<Vec<FanoRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_records(&text, &path.display().to_string())
}

pub fn save_file(records: &[FanoRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut text = to_json(records)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn to_json(records: &[FanoRecord]) -> Result<String> {
    serde_json::to_string_pretty(records).map_err(|e| Error::Io(e.to_string()))
}

pub fn find<'a>(records: &'a [FanoRecord], name: &str) -> Result<&'a FanoRecord> {
    records
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| Error::UnknownRecord(name.to_string()))
}
