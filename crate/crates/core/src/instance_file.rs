//! Versioned JSON instance files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "m": 1,
//!   "n": 2,
//!   "domain": "lp",
//!   "A": [[1.0, 1.0]],
//!   "b": [-1.0],
//!   "label": "infeasible",
//!   "certificate": [-1.0]
//! }
//! ```
//!
//! Reals are written in shortest round-trip form, so write, read, write
//! reproduces the same bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::gen::{GeneratedInstance, Target};
use crate::numerics::{DenseMatrix, DenseVector};
use crate::projector::ProjectorFamily;
use crate::solver::{Domain, FeasInstance};

pub const FORMAT_VERSION: u64 = 1;

/// Where an instance came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub dist: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalized: bool,
}

/// The sketch that produced a projected instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionInfo {
    pub family: ProjectorFamily,
    pub k: usize,
    pub seed: u64,
    /// Row count of the instance before projection.
    pub source_m: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub instance: FeasInstance,
    pub label: Option<Target>,
    pub witness: Option<DenseVector>,
    pub certificate: Option<DenseVector>,
    pub provenance: Option<Provenance>,
    pub projection: Option<ProjectionInfo>,
}

#[derive(Serialize)]
struct Wire<'a> {
    version: u64,
    m: usize,
    n: usize,
    domain: &'static str,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<Target>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<&'a Provenance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    projection: Option<&'a ProjectionInfo>,
}

fn parse_err(field: &str, reason: impl ToString) -> Error {
    Error::Parse {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

fn field<T: serde::de::DeserializeOwned>(obj: &Map<String, Value>, name: &str) -> Result<Option<T>> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| parse_err(name, e)),
    }
}

fn required<T: serde::de::DeserializeOwned>(obj: &Map<String, Value>, name: &str) -> Result<T> {
    field(obj, name)?.ok_or_else(|| parse_err(name, "missing"))
}

fn vector(obj: &Map<String, Value>, name: &str, len: usize) -> Result<Option<DenseVector>> {
    let Some(v) = field::<Vec<f64>>(obj, name)? else {
        return Ok(None);
    };
    if v.len() != len {
        return Err(parse_err(name, format!("expected {len} entries, found {}", v.len())));
    }
    DenseVector::new(v).map(Some).map_err(|e| parse_err(name, e))
}

impl InstanceFile {
    pub fn new(instance: FeasInstance) -> Self {
        InstanceFile {
            instance,
            label: None,
            witness: None,
            certificate: None,
            provenance: None,
            projection: None,
        }
    }

    pub fn from_generated(g: &GeneratedInstance) -> Self {
        InstanceFile {
            instance: g.instance.clone(),
            label: Some(g.label),
            witness: g.witness.clone(),
            certificate: g.certificate.clone(),
            provenance: Some(Provenance {
                dist: g.spec.dist.name().to_string(),
                seed: g.spec.seed,
                target: Some(g.spec.target),
                normalized: g.spec.normalize_columns,
            }),
            projection: None,
        }
    }

    pub fn to_json(&self) -> String {
        let inst = &self.instance;
        let a = inst.a();
        let wire = Wire {
            version: FORMAT_VERSION,
            m: inst.m(),
            n: inst.n(),
            domain: match inst.domain() {
                Domain::ContinuousNonneg => "lp",
                Domain::IntegerNonneg => "ip",
            },
            a: (0..a.rows()).map(|i| a.row(i)).collect(),
            b: inst.b().as_slice(),
            label: self.label,
            witness: self.witness.as_ref().map(|v| v.as_slice()),
            certificate: self.certificate.as_ref().map(|v| v.as_slice()),
            provenance: self.provenance.as_ref(),
            projection: self.projection.as_ref(),
        };
        let mut s = serde_json::to_string_pretty(&wire).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| parse_err("<document>", e))?;
        let Value::Object(obj) = value else {
            return Err(parse_err("<document>", "expected a JSON object"));
        };
        let version: u64 = required(&obj, "version")?;
        if version != FORMAT_VERSION {
            return Err(parse_err("version", format!("unsupported version {version}")));
        }
        let m: usize = required(&obj, "m")?;
        let n: usize = required(&obj, "n")?;
        if m == 0 || n == 0 {
            return Err(parse_err(if m == 0 { "m" } else { "n" }, "must be at least 1"));
        }
        let domain = match required::<String>(&obj, "domain")?.as_str() {
            "lp" => Domain::ContinuousNonneg,
            "ip" => Domain::IntegerNonneg,
            other => return Err(parse_err("domain", format!("expected \"lp\" or \"ip\", found {other:?}"))),
        };
        let rows: Vec<Vec<f64>> = required(&obj, "A")?;
        if rows.len() != m {
            return Err(parse_err("A", format!("expected {m} rows, found {}", rows.len())));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(parse_err("A", format!("row {i} has {} entries, expected {n}", rows[i].len())));
        }
        let a = DenseMatrix::from_rows(&rows).map_err(|e| parse_err("A", e))?;
        let b = vector(&obj, "b", m)?.ok_or_else(|| parse_err("b", "missing"))?;
        let instance = FeasInstance::new(a, b, domain)?;
        Ok(InstanceFile {
            instance,
            label: field(&obj, "label")?,
            witness: vector(&obj, "witness", n)?,
            certificate: vector(&obj, "certificate", m)?,
            provenance: field(&obj, "provenance")?,
            projection: field(&obj, "projection")?,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, Distribution, GenSpec};

    #[test]
    fn round_trip_is_byte_identical() {
        for target in [Target::Feasible, Target::Infeasible] {
            let g = generate(&GenSpec::new(Distribution::Gamma, 4, 7, target, 3)).unwrap();
            let first = InstanceFile::from_generated(&g).to_json();
            let parsed = InstanceFile::from_json(&first).unwrap();
            assert_eq!(parsed.instance, g.instance);
            assert_eq!(parsed.to_json(), first);
        }
    }

    #[test]
    fn awkward_floats_survive() {
        let a = DenseMatrix::from_rows(&[vec![0.1 + 0.2, 1e-300, -5e-324, 1.0 / 3.0]]).unwrap();
        let inst = FeasInstance::new(a, DenseVector::new(vec![f64::MAX]).unwrap(), Domain::IntegerNonneg).unwrap();
        let text = InstanceFile::new(inst.clone()).to_json();
        assert_eq!(InstanceFile::from_json(&text).unwrap().instance, inst);
    }

    fn err_field(text: &str) -> String {
        match InstanceFile::from_json(text).unwrap_err() {
            Error::Parse { field, .. } => field,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_name_the_field() {
        let good = r#"{"version":1,"m":1,"n":2,"domain":"lp","A":[[1,1]],"b":[-1]}"#;
        assert!(InstanceFile::from_json(good).is_ok());
        assert_eq!(err_field(r#"{"version":1,"m":1,"n":2,"domain":"lp","b":[-1]}"#), "A");
        assert_eq!(err_field(r#"{"version":1,"m":1,"n":2,"domain":"lp","A":[[1]],"b":[-1]}"#), "A");
        assert_eq!(err_field(r#"{"version":1,"m":1,"n":2,"domain":"lp","A":[[1,1]],"b":[-1,2]}"#), "b");
        assert_eq!(err_field(r#"{"version":1,"m":1,"n":2,"domain":"qp","A":[[1,1]],"b":[-1]}"#), "domain");
        assert_eq!(err_field(r#"{"version":2,"m":1,"n":2,"domain":"lp","A":[[1,1]],"b":[-1]}"#), "version");
        assert_eq!(err_field(r#"{"version":1,"m":"one","n":2,"domain":"lp","A":[[1,1]],"b":[-1]}"#), "m");
        assert_eq!(
            err_field(r#"{"version":1,"m":1,"n":2,"domain":"lp","A":[[1,1]],"b":[-1],"witness":[1]}"#),
            "witness"
        );
        assert_eq!(
            err_field(r#"{"version":1,"m":1,"n":2,"domain":"lp","A":[[1,1]],"b":[-1],"label":"maybe"}"#),
            "label"
        );
        assert_eq!(err_field("[1, 2]"), "<document>");
    }
}
