//! Severity-tagged diagnostics shared by typing, validation and the store.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pid::Pid;

/// Only [`Severity::Error`] blocks persistence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

/// Identifies the rule (or check) a diagnostic came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    /// Single-entity invariants checked before any rule runs.
    Structure,
    Acyclicity,
    ReferentialIntegrity,
    RestrictionConsistency,
    CardinalityWellformedness,
    DefaultValueConformance,
    MappingCompatibility,
    InheritanceConflict,
    /// Value checked against an atomic data type.
    ValueConformance,
    /// Record checked against a type profile.
    RecordConformance,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValidationResult {
    pub severity: Severity,
    pub rule: RuleId,
    pub entity: Pid,
    pub message: String,
}

impl ValidationResult {
    pub fn new(severity: Severity, rule: RuleId, entity: &Pid, message: impl Into<String>) -> Self {
        let message = message.into();
        debug_assert!(!message.is_empty());
        Self {
            severity,
            rule,
            entity: entity.clone(),
            message,
        }
    }

    pub fn error(rule: RuleId, entity: &Pid, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, rule, entity, message)
    }

    pub fn warning(rule: RuleId, entity: &Pid, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, rule, entity, message)
    }

    pub fn info(rule: RuleId, entity: &Pid, message: impl Into<String>) -> Self {
        Self::new(Severity::Info, rule, entity, message)
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Concatenates result lists, preserving order.
    pub fn combine(parts: impl IntoIterator<Item = Vec<ValidationResult>>) -> Vec<ValidationResult> {
        parts.into_iter().flatten().collect()
    }
}

impl fmt::Display for ValidationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} [{}] {}: {}",
            self.severity, self.rule, self.entity, self.message
        )
    }
}

pub fn has_errors(results: &[ValidationResult]) -> bool {
    results.iter().any(ValidationResult::is_error)
}

/// The diagnostic document: a JSON list of `{severity, rule, entity, message}`.
pub fn diagnostic_document(results: &[ValidationResult]) -> String {
    serde_json::to_string_pretty(results).unwrap_or_else(|_| "[]".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_field_order() {
        let pid = Pid::parse("a/b").unwrap();
        let doc = diagnostic_document(&[ValidationResult::error(
            RuleId::Acyclicity,
            &pid,
            "Circular inheritance detected",
        )]);
        let sev = doc.find("severity").unwrap();
        let rule = doc.find("rule").unwrap();
        let entity = doc.find("entity").unwrap();
        let message = doc.find("message").unwrap();
        assert!(sev < rule && rule < entity && entity < message);
        assert!(doc.contains("\"Error\""));
    }
}
