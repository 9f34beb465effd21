use crate::diagnostics::{RuleId, ValidationResult};
use crate::graph::Graph;
use crate::model::{AtomicDataType, Value};
use crate::pattern;
use crate::pid::Pid;
use crate::typing::parent_chain;

/// Checks `value` against one atomic data type, ignoring its parents.
///
/// Order: primitive kind, then the forbidden and permitted enumerations (a
/// permitted hit accepts the value for this type), then regex, length and
/// value bounds.
pub fn check_level(value: &Value, ty: &AtomicDataType) -> Vec<String> {
    let mut failures = Vec::new();
    if !ty.kind.admits(value) {
        failures.push(format!("expected {} value, got {}", ty.kind, value.kind_name()));
        return failures;
    }
    let r = &ty.restrictions;
    if r.forbidden_values.as_ref().is_some_and(|f| f.contains(value)) {
        failures.push(format!("value {} is forbidden", value.text()));
        return failures;
    }
    if r.permitted_values.as_ref().is_some_and(|p| p.contains(value)) {
        return failures;
    }
    match value {
        Value::String(s) => {
            if let Some(re) = &r.regex {
                match pattern::full_match(re, s) {
                    Ok(true) => {}
                    Ok(false) => failures.push(format!("`{s}` does not match pattern `{re}`")),
                    Err(e) => failures.push(format!("pattern `{re}` is invalid: {e}")),
                }
            }
            let len = s.chars().count() as u64;
            if let Some(min) = r.min_length {
                if len < min {
                    failures.push(format!("length {len} is below the minimum of {min}"));
                }
            }
            if let Some(max) = r.max_length {
                if len > max {
                    failures.push(format!("length {len} exceeds the maximum of {max}"));
                }
            }
        }
        Value::Number(n) => {
            if let Some(min) = &r.min_value {
                if n < min {
                    failures.push(format!("{n} is below the minimum of {min}"));
                }
            }
            if let Some(max) = &r.max_value {
                if n > max {
                    failures.push(format!("{n} exceeds the maximum of {max}"));
                }
            }
        }
        _ => {}
    }
    failures
}

/// Validates a single value against an atomic data type and every ancestor
/// in its parent chain. Empty result means valid.
pub fn validate_value(value: &Value, atomic: &Pid, graph: &Graph) -> Vec<ValidationResult> {
    let chain = match parent_chain(graph, atomic) {
        Ok(chain) => chain,
        Err(e) => {
            return vec![ValidationResult::error(
                RuleId::ValueConformance,
                atomic,
                e.to_string(),
            )]
        }
    };
    let mut results = Vec::new();
    for level in &chain {
        let ty = graph.atomic(level).expect("chain elements are atomic");
        for failure in check_level(value, ty) {
            results.push(ValidationResult::error(
                RuleId::ValueConformance,
                level,
                format!("{} ({}): {failure}", ty.meta.name, ty.pid),
            ));
        }
    }
    results
}
