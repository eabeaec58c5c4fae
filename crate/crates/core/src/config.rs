//! Run configuration: JSON schema, validation with field paths, and the
//! canonical hash embedded in every report.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldSpec, Matrix};
use crate::groupscheme::{DiagPart, GroupScheme};
use crate::modrep::{simples_and_projective_covers, KGModule};

pub const MAX_ELEMENT_CAP: usize = 10_000;
pub const MAX_SLICE_CAP: usize = 100_000;
pub const MAX_E: u32 = 12;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: u32,
    #[serde(default = "one")]
    pub m: u32,
    /// Low-to-high coefficients; may be omitted when `m = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    pub dimension: usize,
    #[serde(default)]
    pub group: GroupConfig,
    #[serde(default)]
    pub module: ModuleChoice,
    #[serde(default = "default_e_max")]
    pub e_max: u32,
    #[serde(default = "default_degree_bound")]
    pub degree_bound: usize,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> u32 {
    1
}
fn default_e_max() -> u32 {
    2
}
fn default_degree_bound() -> usize {
    4
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// Matrices as rows of field element indices (negative = prime-field integer).
    #[serde(default)]
    pub constant_generators: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<DiagConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DiagConfig {
    pub orders: Vec<u64>,
    pub weights: Vec<Vec<i64>>,
}

/// `"S"`, the label of a simple (its projective cover `P ⊗ S` is used), or
/// explicit matrices of a representation `U` (giving `U ⊗ S`).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ModuleChoice {
    Named(String),
    Matrices { matrices: Vec<Vec<Vec<i64>>> },
}

impl Default for ModuleChoice {
    fn default() -> Self {
        ModuleChoice::Named("S".into())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default = "default_element_max")]
    pub element_max: usize,
    #[serde(default = "default_slice_max")]
    pub slice_max: usize,
}

fn default_element_max() -> usize {
    crate::groupscheme::DEFAULT_ELEMENT_CAP
}
fn default_slice_max() -> usize {
    crate::equivmod::DEFAULT_SLICE_MAX
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            element_max: default_element_max(),
            slice_max: default_slice_max(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        RunConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::config("dimension", "must be positive"));
        }
        if self.e_max == 0 || self.e_max > MAX_E {
            return Err(Error::config("e_max", format!("must lie in 1..={MAX_E}")));
        }
        if self.degree_bound > crate::polyring::MAX_DEGREE {
            return Err(Error::config(
                "degree_bound",
                format!("must be at most {}", crate::polyring::MAX_DEGREE),
            ));
        }
        if self.caps.element_max == 0 || self.caps.element_max > MAX_ELEMENT_CAP {
            return Err(Error::config("caps.element_max", format!("must lie in 1..={MAX_ELEMENT_CAP}")));
        }
        if self.caps.slice_max == 0 || self.caps.slice_max > MAX_SLICE_CAP {
            return Err(Error::config("caps.slice_max", format!("must lie in 1..={MAX_SLICE_CAP}")));
        }
        if self.m > 1 && self.modulus.is_none() {
            return Err(Error::config("modulus", "required when m > 1"));
        }
        for (s, g) in self.group.constant_generators.iter().enumerate() {
            check_square(g, self.dimension, &format!("group.constant_generators[{s}]"))?;
        }
        if let ModuleChoice::Matrices { matrices } = &self.module {
            if matrices.len() != self.group.constant_generators.len() {
                return Err(Error::config("module.matrices", "need one matrix per constant generator"));
            }
            let n = matrices.first().map_or(0, Vec::len);
            for (s, g) in matrices.iter().enumerate() {
                check_square(g, n, &format!("module.matrices[{s}]"))?;
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Result<Field> {
        let modulus = match &self.modulus {
            Some(m) => m.clone(),
            None => vec![0, 1],
        };
        Field::new(&FieldSpec {
            p: self.p,
            m: self.m,
            modulus,
        })
        .map_err(|e| match e {
            Error::Field(msg) => Error::config("modulus", msg),
            other => other,
        })
    }

    pub fn group(&self) -> Result<GroupScheme> {
        let f = self.field()?;
        let gens = self
            .group
            .constant_generators
            .iter()
            .enumerate()
            .map(|(s, g)| matrix(&f, g, &format!("group.constant_generators[{s}]")))
            .collect::<Result<Vec<_>>>()?;
        let diag = match &self.group.diag {
            Some(d) => DiagPart::new(d.orders.clone(), d.weights.clone(), self.dimension).map_err(|e| match e {
                Error::Config { path, msg } => Error::config(path, msg),
                other => other,
            })?,
            None => DiagPart::default(),
        };
        GroupScheme::new(f, self.dimension, gens, diag, self.caps.element_max)
    }

    /// The representation `U` with `L = U ⊗ S`.
    pub fn source_module(&self, group: &GroupScheme) -> Result<KGModule> {
        let f = group.field();
        let ngens = group.constant().generators().len();
        match &self.module {
            ModuleChoice::Named(name) if name == "S" => Ok(KGModule::trivial(ngens)),
            ModuleChoice::Named(name) => {
                let reps = simples_and_projective_covers(f, group.constant())?;
                let bare = name.strip_prefix("P_").unwrap_or(name);
                reps.find(bare)
                    .map(|d| d.projective_cover.clone())
                    .ok_or_else(|| Error::config("module", format!("unknown label {name:?}")))
            }
            ModuleChoice::Matrices { matrices } => {
                let action = matrices
                    .iter()
                    .enumerate()
                    .map(|(s, g)| matrix(f, g, &format!("module.matrices[{s}]")))
                    .collect::<Result<Vec<_>>>()?;
                let n = action.first().map_or(0, Matrix::rows);
                let u = KGModule::new(n, action);
                u.check_relations(f, group.constant())
                    .map_err(|_| Error::config("module.matrices", "matrices do not define a representation"))?;
                Ok(u)
            }
        }
    }

    /// Hex SHA-256 of the canonical JSON form (sorted keys, defaults filled).
    pub fn config_hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

fn check_square(g: &[Vec<i64>], n: usize, path: &str) -> Result<()> {
    if g.len() != n || g.iter().any(|r| r.len() != n) {
        return Err(Error::config(path, format!("expected a {n}x{n} matrix")));
    }
    Ok(())
}

fn matrix(f: &Field, rows: &[Vec<i64>], path: &str) -> Result<Matrix> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (j, &x) in row.iter().enumerate() {
            r.push(
                f.from_index(x)
                    .map_err(|e| Error::config(format!("{path}[{i}][{j}]"), e.to_string()))?,
            );
        }
        out.push(r);
    }
    Ok(Matrix::from_rows(&out))
}
