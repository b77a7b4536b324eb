//! Model inventory by name, and the JSON model-spec file.

use super::hamiltonians::j_sixth;
use super::{gb_hamiltonian, h14, h17, mb0_hamiltonian, ModelError, J_DEFAULT};
use crate::tensor_core::{c, re, ComplexMatrix, C64, ONE};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// One (row, col, value) entry of a user-supplied 9×9 operator.
pub type Entry = (usize, usize, C64);

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", content = "params")]
pub enum NamedModel {
    #[serde(rename = "ZF")]
    Zf { k: C64 },
    #[serde(rename = "IK")]
    Ik { k: C64 },
    #[serde(rename = "GB")]
    Gb { phi: C64, psi: C64, xi: C64, j: C64 },
    #[serde(rename = "MB0")]
    Mb0 { alpha: C64, beta: C64, j0: C64 },
    /// Only the two constraint parameters are known here; the operator itself
    /// must come from an entry table.
    #[serde(rename = "SpR")]
    SpR { theta0: C64, tau3: C64, entries: Option<Vec<Entry>> },
    #[serde(rename = "SB17")]
    Sb17 { lambda: C64, j: C64 },
    #[serde(rename = "V17_2")]
    V17_2 { theta0: C64 },
    #[serde(rename = "V14")]
    V14 { xi: C64 },
    /// Special-branch curve R-matrix; its Hamiltonians form the GB family.
    #[serde(rename = "SB")]
    Sb { lambda4: C64, j: C64 },
}

pub const MODEL_NAMES: [&str; 9] = ["ZF", "IK", "GB", "MB0", "SpR", "SB17", "V17_2", "V14", "SB"];

/// Parse a complex parameter: a JSON number, or `[re, im]`.
pub fn parse_complex(v: &Value) -> Option<C64> {
    match v {
        Value::Number(n) => n.as_f64().map(re),
        Value::Array(a) if a.len() == 2 => Some(c(a[0].as_f64()?, a[1].as_f64()?)),
        _ => None,
    }
}

fn param(params: &Map<String, Value>, key: &str, default: C64) -> Result<C64, ModelError> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => parse_complex(v).ok_or_else(|| ModelError::BadParams(format!("'{key}' must be a number or [re, im]"))),
    }
}

fn parse_entries(v: &Value) -> Result<Vec<Entry>, ModelError> {
    let bad = || ModelError::BadParams("entries must be [[row, col, re, im], ...] with 0 <= row, col < 9".into());
    let rows = v.as_array().ok_or_else(bad)?;
    rows.iter()
        .map(|r| {
            let r = r.as_array().filter(|r| r.len() == 4).ok_or_else(bad)?;
            let idx = |x: &Value| x.as_u64().filter(|&i| i < 9).map(|i| i as usize).ok_or_else(bad);
            let f = |x: &Value| x.as_f64().ok_or_else(bad);
            Ok((idx(&r[0])?, idx(&r[1])?, c(f(&r[2])?, f(&r[3])?)))
        })
        .collect()
}

impl NamedModel {
    /// Build from a name (case-insensitive) and a parameter record. Missing
    /// parameters take the defaults listed in the README.
    pub fn from_parts(name: &str, params: &Map<String, Value>, entries: Option<&Value>) -> Result<Self, ModelError> {
        let p = |k: &str, d: C64| param(params, k, d);
        let model = match name.to_ascii_uppercase().replace('-', "_").as_str() {
            "ZF" => NamedModel::Zf { k: p("k", re(2.0))? },
            "IK" => NamedModel::Ik { k: p("k", re(2.0))? },
            "GB" => NamedModel::Gb {
                phi: p("phi", c(0.7, 0.2))?,
                psi: p("psi", re(1.1))?,
                xi: p("xi", re(0.9))?,
                j: p("j", J_DEFAULT)?,
            },
            "MB0" => NamedModel::Mb0 {
                alpha: p("alpha", re(1.7))?,
                beta: p("beta", c(0.4, 0.3))?,
                j0: p("j0", c(0.2, 1.1))?,
            },
            "SPR" => {
                let entries = entries.or_else(|| params.get("entries")).map(parse_entries).transpose()?;
                NamedModel::SpR { theta0: p("theta0", re(0.5))?, tau3: p("tau3", ONE)?, entries }
            }
            "SB17" => NamedModel::Sb17 { lambda: p("lambda", re(0.8))?, j: p("j", J_DEFAULT)? },
            "V17_2" => NamedModel::V17_2 { theta0: p("theta0", re(0.3))? },
            "V14" => NamedModel::V14 { xi: p("xi", re(2.0))? },
            "SB" => NamedModel::Sb { lambda4: p("lambda4", re(0.3))?, j: p("j", j_sixth())? },
            _ => return Err(ModelError::UnknownModel(name.to_string())),
        };
        let known: &[&str] = match &model {
            NamedModel::Zf { .. } | NamedModel::Ik { .. } => &["k"],
            NamedModel::Gb { .. } => &["phi", "psi", "xi", "j"],
            NamedModel::Mb0 { .. } => &["alpha", "beta", "j0"],
            NamedModel::SpR { .. } => &["theta0", "tau3", "entries"],
            NamedModel::Sb17 { .. } => &["lambda", "j"],
            NamedModel::V17_2 { .. } => &["theta0"],
            NamedModel::V14 { .. } => &["xi"],
            NamedModel::Sb { .. } => &["lambda4", "j"],
        };
        if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(ModelError::BadParams(format!("unknown parameter '{k}' for {name}")));
        }
        Ok(model)
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedModel::Zf { .. } => "ZF",
            NamedModel::Ik { .. } => "IK",
            NamedModel::Gb { .. } => "GB",
            NamedModel::Mb0 { .. } => "MB0",
            NamedModel::SpR { .. } => "SpR",
            NamedModel::Sb17 { .. } => "SB17",
            NamedModel::V17_2 { .. } => "V17_2",
            NamedModel::V14 { .. } => "V14",
            NamedModel::Sb { .. } => "SB",
        }
    }

    /// Two-site Hamiltonian. For models known through their R-matrix it is
    /// the derivative of Ř at the regular point.
    pub fn hamiltonian(&self) -> Result<ComplexMatrix, ModelError> {
        use crate::rmatrix_catalog::analytic_hamiltonian;
        let r_err = |e: crate::rmatrix_catalog::RError| ModelError::BadParams(e.to_string());
        match self {
            NamedModel::Gb { phi, psi, xi, j } => gb_hamiltonian(*phi, *psi, *xi, *j),
            NamedModel::Mb0 { alpha, beta, j0 } => Ok(mb0_hamiltonian(*alpha, *beta, *j0)?.0),
            NamedModel::Sb17 { lambda, j } => Ok(h17(*lambda, *j)),
            NamedModel::V14 { xi } => Ok(h14(*xi)),
            NamedModel::SpR { entries, .. } => {
                let entries = entries.as_ref().ok_or_else(|| {
                    ModelError::BadParams("SpR needs an entry table (\"entries\": [[row, col, re, im], ...])".into())
                })?;
                let mut h = ComplexMatrix::zeros(9);
                for &(r, col, v) in entries {
                    h[(r, col)] = v;
                }
                Ok(h)
            }
            _ => analytic_hamiltonian(self).map_err(r_err),
        }
    }
}

/// `{"model": name, "params": {...}}`, plus `"entries"` for SpR.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpecFile {
    pub model: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Value>,
}

impl ModelSpecFile {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::BadParams(format!("model spec: {e}")))
    }

    pub fn to_named(&self) -> Result<NamedModel, ModelError> {
        NamedModel::from_parts(&self.model, &self.params, self.entries.as_ref())
    }
}
