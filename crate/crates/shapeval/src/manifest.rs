//! JSON-lines evaluation manifest: one entry per line pairing generated,
//! reference, partial and completion shapes by id and class.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: missing field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: duplicate entry (id={id}, role={role}, group={group:?})")]
    DuplicateEntry { line: usize, id: String, role: Role, group: Option<String> },
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Generated,
    Reference,
    Partial,
    Completion,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Role::Generated => "generated",
            Role::Reference => "reference",
            Role::Partial => "partial",
            Role::Completion => "completion",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Mesh,
    Points,
    Features,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub class_label: String,
    pub role: Role,
    pub kind: Kind,
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

const REQUIRED_FIELDS: [&str; 5] = ["id", "class_label", "role", "kind", "path"];
const ALLOWED_FIELDS: [&str; 6] = ["id", "class_label", "role", "kind", "path", "group"];

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, ManifestError> {
    let text = fs::read_to_string(path)?;
    parse_manifest(&text)
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, ManifestError> {
    let mut entries = Vec::new();
    let mut seen: HashSet<(String, Role, Option<String>)> = HashSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(raw)
            .map_err(|e| ManifestError::ParseError { line, message: e.to_string() })?;
        let object = value.as_object().ok_or_else(|| ManifestError::ParseError {
            line,
            message: "expected a JSON object".into(),
        })?;

        for key in object.keys() {
            if !ALLOWED_FIELDS.contains(&key.as_str()) {
                return Err(ManifestError::ParseError {
                    line,
                    message: format!("unknown field `{key}`"),
                });
            }
        }
        for field in REQUIRED_FIELDS {
            match object.get(field) {
                None | Some(Value::Null) => {
                    return Err(ManifestError::MissingField { line, field })
                }
                _ => {}
            }
        }

        let entry: ManifestEntry = serde_json::from_value(value)
            .map_err(|e| ManifestError::ParseError { line, message: e.to_string() })?;

        if entry.id.is_empty() {
            return Err(ManifestError::MissingField { line, field: "id" });
        }
        if entry.class_label.is_empty() {
            return Err(ManifestError::MissingField { line, field: "class_label" });
        }
        if entry.class_label == "Mean" || entry.class_label == "All" {
            return Err(ManifestError::ParseError {
                line,
                message: "class_label `Mean` and `All` are reserved scopes".into(),
            });
        }
        if entry.role == Role::Completion && entry.group.as_deref().unwrap_or("").is_empty() {
            return Err(ManifestError::MissingField { line, field: "group" });
        }

        let key = (entry.id.clone(), entry.role, entry.group.clone());
        if !seen.insert(key) {
            return Err(ManifestError::DuplicateEntry {
                line,
                id: entry.id,
                role: entry.role,
                group: entry.group,
            });
        }
        entries.push(entry);
    }
    Ok(entries)
}
