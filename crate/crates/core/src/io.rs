//! JSON file formats.
//!
//! * poset: `{"n": 3, "labels": [..]?, "covers": [[0,1], ...]}`
//! * function: `{"poset": "<path-or-id>", "values": ["p/q", ...]}`
//! * family: `{"poset": ..., "members": [[..], ..], "names": [..]?}`
//! * expression: see [`ConeExpr`]
//! * report: see [`ApproxReport`]

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{ConeError, ConeExpr};
use crate::construct::ApproxReport;
use crate::funcspace::{Family, FuncError, GroundFunction};
use crate::poset::{Poset, PosetDoc, PosetError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDoc {
    pub poset: String,
    pub values: GroundFunction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub poset: String,
    pub members: Vec<GroundFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl FamilyDoc {
    pub fn from_family(poset: impl Into<String>, s: &Family) -> FamilyDoc {
        FamilyDoc {
            poset: poset.into(),
            members: s.members().to_vec(),
            names: s.names().map(|n| n.to_vec()),
        }
    }

    pub fn into_family(self, p: &Poset) -> Result<Family, FuncError> {
        let s = Family::new(p, self.members)?;
        match self.names {
            Some(names) => s.with_names(names),
            None => Ok(s),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    fs::write(path, to_json(value)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_poset(path: &Path) -> Result<Poset, FormatError> {
    let doc: PosetDoc = read_json(path)?;
    Ok(Poset::from_doc(&doc)?)
}

pub fn load_family(path: &Path, p: &Poset) -> Result<Family, FormatError> {
    let doc: FamilyDoc = read_json(path)?;
    Ok(doc.into_family(p)?)
}

pub fn load_function(path: &Path, p: &Poset) -> Result<GroundFunction, FormatError> {
    let doc: FunctionDoc = read_json(path)?;
    if doc.values.len() != p.len() {
        return Err(FuncError::CarrierMismatch {
            expected: p.len(),
            got: doc.values.len(),
        }
        .into());
    }
    Ok(doc.values)
}

/// Loads an expression and checks it is well formed over `s`.
pub fn load_expr(path: &Path, s: &Family) -> Result<ConeExpr, FormatError> {
    let e: ConeExpr = read_json(path)?;
    e.validate(s)?;
    Ok(e)
}

pub fn load_report(path: &Path) -> Result<ApproxReport, FormatError> {
    read_json(path)
}
