//! Family spec files: sectioned key-value text (a TOML subset).
//!
//! ```text
//! [field]
//! kind = "rationals"      # or "quadratic", with d = <squarefree integer>
//!
//! [family]
//! kind = "characters"     # characters | synthetic | hecke | trivial
//! qmax = 10               # characters
//! n = 2                   # synthetic: degree, count, seed, model
//! count = 5
//! seed = 7
//! model = "grc"           # grc | planted (then p and theta)
//! file = "delta.csv"      # hecke: path relative to the spec file, weight, level
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{dirichlet_character_family, ingest_hecke_eigenvalues, synthetic_family, Family, Representation, SyntheticModel};
use crate::error::{Error, Result};
use crate::ideals::NumberFieldSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Characters { qmax: u64 },
    Synthetic { n: usize, count: usize, seed: u64, model: SyntheticModel },
    Hecke { file: PathBuf, weight: u32, level: u64 },
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub field: NumberFieldSpec,
    pub family: FamilySpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRoot {
    field: Option<RawField>,
    family: RawFamily,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    kind: String,
    d: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: String,
    qmax: Option<u64>,
    n: Option<usize>,
    count: Option<usize>,
    seed: Option<u64>,
    model: Option<String>,
    p: Option<u64>,
    theta: Option<f64>,
    file: Option<String>,
    weight: Option<u32>,
    level: Option<u64>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line where `key` is assigned, falling back to the first line.
fn line_of_key(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(1, |i| i + 1)
}

impl FamilyFile {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawRoot = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(1, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let at = |key: &str, message: String| Error::Parse {
            line: line_of_key(text, key),
            message,
        };
        let field = match raw.field {
            None => NumberFieldSpec::rationals(),
            Some(f) => match f.kind.as_str() {
                "rationals" => NumberFieldSpec::rationals(),
                "quadratic" => {
                    let d = f.d.ok_or_else(|| at("kind", "quadratic field needs d".into()))?;
                    NumberFieldSpec::quadratic(d).map_err(|e| at("d", e.to_string()))?
                }
                other => return Err(at("kind", format!("unknown field kind {other:?}"))),
            },
        };
        let fam = raw.family;
        let need = |v: Option<u64>, key: &str| v.ok_or_else(|| at("kind", format!("missing key {key:?}")));
        let family = match fam.kind.as_str() {
            "characters" => {
                if !field.is_rationals() {
                    return Err(at("kind", "character families are defined over the rationals only".into()));
                }
                let qmax = need(fam.qmax, "qmax")?;
                if qmax == 0 {
                    return Err(at("qmax", "qmax must be at least 1".into()));
                }
                FamilySpec::Characters { qmax }
            }
            "synthetic" => {
                let n = need(fam.n.map(|v| v as u64), "n")? as usize;
                let count = need(fam.count.map(|v| v as u64), "count")? as usize;
                let seed = need(fam.seed, "seed")?;
                let model = match fam.model.as_deref().unwrap_or("grc") {
                    "grc" => SyntheticModel::Grc,
                    "planted" => SyntheticModel::Planted {
                        p: need(fam.p, "p")?,
                        theta: fam.theta.ok_or_else(|| at("model", "planted model needs theta".into()))?,
                    },
                    other => return Err(at("model", format!("unknown model {other:?}"))),
                };
                if let SyntheticModel::Planted { theta, .. } = model {
                    let ceiling = super::theta_bound(n);
                    if !(0.0..=ceiling).contains(&theta) {
                        return Err(at(
                            "theta",
                            format!("theta = {theta} outside [0, 1/2 - 1/(n^2+1)] = [0, {ceiling}]"),
                        ));
                    }
                }
                FamilySpec::Synthetic { n, count, seed, model }
            }
            "hecke" => {
                let file = fam.file.ok_or_else(|| at("kind", "missing key \"file\"".into()))?;
                FamilySpec::Hecke {
                    file: base_dir.join(file),
                    weight: need(fam.weight.map(u64::from), "weight")? as u32,
                    level: fam.level.unwrap_or(1),
                }
            }
            "trivial" => FamilySpec::Trivial,
            other => return Err(at("kind", format!("unknown family kind {other:?}"))),
        };
        let spec = Self { field, family };
        spec.build().map_err(|e| match e {
            Error::Usage(m) => Error::Parse {
                line: line_of_key(text, "kind"),
                message: m,
            },
            other => other,
        })?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or_else(|| Path::new(".")))
    }

    pub fn build(&self) -> Result<Family> {
        match &self.family {
            FamilySpec::Characters { qmax } => dirichlet_character_family(*qmax),
            FamilySpec::Synthetic { n, count, seed, model } => synthetic_family(&self.field, *n, *count, *seed, *model),
            FamilySpec::Hecke { file, weight, level } => {
                let rep = ingest_hecke_eigenvalues(file, *weight, *level)?;
                Family::new(&self.field, vec![rep], format!("Hecke eigenvalues from {}", file.display()))
            }
            FamilySpec::Trivial => Family::new(&self.field, vec![Representation::trivial(&self.field)], "trivial"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_synthetic_family() {
        let text = "[field]\nkind = \"quadratic\"\nd = -1\n\n[family]\nkind = \"synthetic\"\nn = 2\ncount = 3\nseed = 9\nmodel = \"planted\"\np = 5\ntheta = 0.25\n";
        let spec = FamilyFile::parse(text, Path::new(".")).unwrap();
        assert_eq!(spec.field.discriminant, -4);
        assert_eq!(spec.build().unwrap().len(), 3);
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let text = "[family]\nkind = \"characters\"\nqmax = = 3\n";
        match FamilyFile::parse(text, Path::new(".")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_name_the_line() {
        let text = "[family]\nkind = \"synthetic\"\nn = 2\ncount = 3\nseed = 1\nmodel = \"planted\"\np = 2\ntheta = 0.45\n";
        match FamilyFile::parse(text, Path::new(".")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("{other:?}"),
        }
        let text = "[family]\nkind = \"bogus\"\n";
        assert!(matches!(FamilyFile::parse(text, Path::new(".")), Err(Error::Parse { line: 2, .. })));
    }
}
