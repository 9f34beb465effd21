//! Canonical interchange documents.
//!
//! Documents are UTF-8 JSON with object keys sorted and no insignificant
//! whitespace, so two serializations of the same value are byte-identical.

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::model::Entity;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("entity violates invariants: {}", violations.join("; "))]
    Invariant { violations: Vec<String> },
    #[error("cannot serialize: {0}")]
    Serialize(String),
}

impl From<serde_json::Error> for CodecError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() || e.is_data() || e.is_syntax() || e.is_eof() {
            CodecError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        } else {
            CodecError::Serialize(e.to_string())
        }
    }
}

/// Key-sorted, whitespace-free JSON text for any serializable model value.
pub fn to_canonical<T: Serialize + ?Sized>(value: &T) -> Result<String, CodecError> {
    // Going through `serde_json::Value` sorts object keys.
    let tree = serde_json::to_value(value).map_err(|e| CodecError::Serialize(e.to_string()))?;
    serde_json::to_string(&tree).map_err(|e| CodecError::Serialize(e.to_string()))
}

pub fn from_canonical<T: DeserializeOwned>(text: &str) -> Result<T, CodecError> {
    Ok(serde_json::from_str(text)?)
}

pub fn serialize_entity(entity: &Entity) -> Result<String, CodecError> {
    to_canonical(entity)
}

/// Parses one entity document and checks its structural invariants.
pub fn deserialize_entity(text: &str) -> Result<Entity, CodecError> {
    let entity: Entity = from_canonical(text)?;
    check(entity)
}

pub fn entity_from_json(json: serde_json::Value) -> Result<Entity, CodecError> {
    let entity: Entity = serde_json::from_value(json)?;
    check(entity)
}

fn check(entity: Entity) -> Result<Entity, CodecError> {
    let violations = entity.structural_violations();
    if violations.is_empty() {
        Ok(entity)
    } else {
        Err(CodecError::Invariant { violations })
    }
}

/// Parses a file holding either one entity document or a JSON array of them.
pub fn deserialize_entities(text: &str) -> Result<Vec<Entity>, CodecError> {
    let json: serde_json::Value = serde_json::from_str(text)?;
    match json {
        serde_json::Value::Array(items) => items.into_iter().map(entity_from_json).collect(),
        single => Ok(vec![entity_from_json(single)?]),
    }
}

/// One canonical entity document per line inside a JSON array.
pub fn serialize_entities<'a>(
    entities: impl IntoIterator<Item = &'a Entity>,
) -> Result<String, CodecError> {
    let docs = entities
        .into_iter()
        .map(serialize_entity)
        .collect::<Result<Vec<_>, _>>()?;
    if docs.is_empty() {
        return Ok("[]\n".into());
    }
    Ok(format!("[\n{}\n]\n", docs.join(",\n")))
}
