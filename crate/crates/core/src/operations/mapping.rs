use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagnostics::ValidationResult;
use crate::graph::Graph;
use crate::model::{AttributeMapping, Value};
use crate::pid::Pid;
use crate::validation::validate_attribute_value;

/// Values bound to attributes during one execution scope.
pub type ValueBinding = BTreeMap<Pid, Value>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("{0} has no value yet")]
    Unbound(Pid),
    #[error("{0} is not an attribute")]
    UnknownAttribute(Pid),
    #[error("mapping into {attribute}: {message}")]
    Index { attribute: Pid, message: String },
    #[error("value for {attribute} does not conform: {}", first_message(.results))]
    Invalid {
        attribute: Pid,
        results: Vec<ValidationResult>,
    },
}

fn first_message(results: &[ValidationResult]) -> &str {
    results.first().map(|r| r.message.as_str()).unwrap_or("")
}

/// Checks a value against an attribute's data type and cardinality.
pub fn check_binding(attribute: &Pid, value: &Value, graph: &Graph) -> Result<(), MappingError> {
    let attr = graph
        .attribute(attribute)
        .ok_or_else(|| MappingError::UnknownAttribute(attribute.clone()))?;
    let results =
        validate_attribute_value(attribute, value, &attr.data_type, attr.cardinality, graph);
    if results.iter().any(ValidationResult::is_error) {
        return Err(MappingError::Invalid {
            attribute: attribute.clone(),
            results,
        });
    }
    Ok(())
}

/// Computes a mapping's value: constant or bound input, then index, then
/// template, then validation against the output attribute.
pub fn resolve_mapping(
    mapping: &AttributeMapping,
    source: &ValueBinding,
    graph: &Graph,
    marker: &str,
) -> Result<Value, MappingError> {
    let raw = match (&mapping.constant_value, &mapping.input_attribute) {
        (Some(c), _) => c,
        (None, Some(a)) => source.get(a).ok_or_else(|| MappingError::Unbound(a.clone()))?,
        (None, None) => return Err(MappingError::Unbound(mapping.output_attribute.clone())),
    };
    let value = mapping
        .transform(raw, marker)
        .map_err(|message| MappingError::Index {
            attribute: mapping.output_attribute.clone(),
            message,
        })?;
    check_binding(&mapping.output_attribute, &value, graph)?;
    Ok(value)
}

/// Applies a mapping within one binding scope.
pub fn apply_mapping(
    mapping: &AttributeMapping,
    bindings: &ValueBinding,
    graph: &Graph,
    marker: &str,
) -> Result<ValueBinding, MappingError> {
    let value = resolve_mapping(mapping, bindings, graph, marker)?;
    let mut next = bindings.clone();
    next.insert(mapping.output_attribute.clone(), value);
    Ok(next)
}
