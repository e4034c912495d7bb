//! Sequence definition files: one JSON record `{name, kind, params}` per
//! sequence, either as a JSON array or one record per line.
//!
//! `kind = "explicit"` takes `params.values` (inline array) or `params.path`
//! (text file, one float per line, relative paths resolved against the
//! definition file). Every other kind is a model name understood by
//! [`crate::geomspec::ModelSpec`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{CharacteristicSequence, SeqError};
use crate::geomspec::{ModelError, ModelSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDef {
    #[serde(default)]
    pub name: Option<String>,
    pub kind: String,
    #[serde(default)]
    pub params: Value,
}

fn def_error(msg: impl Into<String>) -> ModelError {
    ModelError::Sequence(SeqError::Definition(msg.into()))
}

/// Parses a JSON array of records or JSON lines.
pub fn parse_definitions(text: &str) -> Result<Vec<SequenceDef>, ModelError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed).map_err(|e| def_error(e.to_string()));
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| def_error(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn load_definitions(path: &Path) -> Result<Vec<SequenceDef>, ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| def_error(format!("{}: {e}", path.display())))?;
    parse_definitions(&text)
}

/// Reads one float per line; blank lines and lines starting with `#` are skipped.
pub fn read_value_file(path: &Path) -> Result<Vec<f64>, ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| def_error(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|e| def_error(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

impl SequenceDef {
    /// Builds the sequence. `base_dir` resolves relative value-file paths.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<CharacteristicSequence, ModelError> {
        let seq = if self.kind == "explicit" {
            let values = match (self.params.get("values"), self.params.get("path")) {
                (Some(v), _) => serde_json::from_value::<Vec<f64>>(v.clone())
                    .map_err(|e| def_error(format!("values: {e}")))?,
                (None, Some(Value::String(p))) => {
                    let mut path = PathBuf::from(p);
                    if path.is_relative() {
                        if let Some(dir) = base_dir {
                            path = dir.join(path);
                        }
                    }
                    read_value_file(&path)?
                }
                _ => return Err(def_error("explicit needs params.values or params.path")),
            };
            CharacteristicSequence::explicit(values)?
        } else {
            let mut obj = match &self.params {
                Value::Object(m) => m.clone(),
                Value::Null => Map::new(),
                _ => return Err(def_error("params must be an object")),
            };
            obj.insert("model".into(), Value::String(self.kind.clone()));
            let spec: ModelSpec = serde_json::from_value(Value::Object(obj))
                .map_err(|e| def_error(format!("{}: {e}", self.kind)))?;
            spec.build()?.into_sequence()
        };
        Ok(match &self.name {
            Some(n) => seq.with_name(n.clone()),
            None => seq,
        })
    }
}
