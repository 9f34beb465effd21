use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{RuleId, ValidationResult};
use crate::graph::{Direction, EdgeLabel, Graph, GraphError};
use crate::model::{EntityKind, InformationRecord, Value};
use crate::pid::Pid;
use crate::typing::{ancestors, attribute_assignable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AssociationMechanism {
    RecordTyping,
    ProfileTyping,
    AttributeTyping,
}

fn data_type_or_not_found(graph: &Graph, pid: &Pid) -> Result<(), GraphError> {
    match graph.kind_of(pid) {
        Some(k) if k.is_data_type() => Ok(()),
        _ => Err(GraphError::NotFound(pid.clone())),
    }
}

/// Operations executable on an attribute: those declared on it and those
/// declared on any attribute it is covariantly assignable to. Sorted by PID.
pub fn operations_for_attribute(attribute: &Pid, graph: &Graph) -> Result<Vec<Pid>, GraphError> {
    let attr = graph
        .attribute(attribute)
        .ok_or_else(|| GraphError::NotFound(attribute.clone()))?;
    let mut types = vec![attr.data_type.clone()];
    types.extend(ancestors(graph, &attr.data_type));
    let mut found = BTreeSet::new();
    for ty in &types {
        for (label, slot) in graph.in_edges(ty) {
            if *label != EdgeLabel::ConformsTo {
                continue;
            }
            if slot != attribute && !attribute_assignable(graph, attribute, slot).unwrap_or(false) {
                continue;
            }
            for (label, op) in graph.in_edges(slot) {
                if *label == EdgeLabel::ExecutableOn {
                    found.insert(op.clone());
                }
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Operations applicable to instances of a data type, through every
/// attribute typed by it or one of its supertypes.
pub fn operations_for_datatype(data_type: &Pid, graph: &Graph) -> Result<Vec<Pid>, GraphError> {
    data_type_or_not_found(graph, data_type)?;
    let mut types = vec![data_type.clone()];
    types.extend(graph.closure(data_type, &[EdgeLabel::InheritsFrom], Direction::Out));
    let mut found = BTreeSet::new();
    for ty in &types {
        for attr in graph.neighbors(ty, EdgeLabel::ConformsTo, Direction::In)? {
            found.extend(operations_for_attribute(&attr, graph)?);
        }
    }
    Ok(found.into_iter().collect())
}

/// Operations associated with a record, grouped by how they were found.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordOperations {
    #[serde(rename = "RecordTyping")]
    pub record_typing: Vec<Pid>,
    #[serde(rename = "ProfileTyping")]
    pub profile_typing: Vec<Pid>,
    #[serde(rename = "AttributeTyping")]
    pub attribute_typing: Vec<Pid>,
    pub diagnostics: Vec<ValidationResult>,
}

impl RecordOperations {
    pub fn bucket(&self, mechanism: AssociationMechanism) -> &[Pid] {
        match mechanism {
            AssociationMechanism::RecordTyping => &self.record_typing,
            AssociationMechanism::ProfileTyping => &self.profile_typing,
            AssociationMechanism::AttributeTyping => &self.attribute_typing,
        }
    }
}

fn executes_on_profile(graph: &Graph, op: &Pid) -> bool {
    graph
        .operation(op)
        .and_then(|o| graph.attribute(&o.executable_on))
        .is_some_and(|a| graph.kind_of(&a.data_type) == Some(EntityKind::TypeProfile))
}

fn referenced_operations(value: &Value, graph: &Graph, out: &mut BTreeSet<Pid>) {
    match value {
        Value::String(s) => {
            if let Ok(pid) = Pid::parse(s) {
                if graph.operation(&pid).is_some() {
                    out.insert(pid);
                }
            }
        }
        Value::List(items) => items.iter().for_each(|v| referenced_operations(v, graph, out)),
        Value::Record(fields) => fields.values().for_each(|v| referenced_operations(v, graph, out)),
        _ => {}
    }
}

/// Classifies the operations reachable from a record. `profile`, when
/// given, is the profile the record claims to follow; its operations count
/// as profile typing.
pub fn operations_for_record(
    record: &InformationRecord,
    profile: Option<&Pid>,
    graph: &Graph,
) -> RecordOperations {
    let mut result = RecordOperations::default();
    let mut direct = BTreeSet::new();
    let mut via_profile = BTreeSet::new();
    let mut via_attribute = BTreeSet::new();
    let mut classify = |ops: Vec<Pid>| {
        for op in ops {
            if executes_on_profile(graph, &op) {
                via_profile.insert(op);
            } else {
                via_attribute.insert(op);
            }
        }
    };
    if let Some(p) = profile {
        match graph.kind_of(p) {
            Some(EntityKind::TypeProfile) => {
                classify(operations_for_datatype(p, graph).unwrap_or_default())
            }
            _ => result.diagnostics.push(ValidationResult::warning(
                RuleId::RecordConformance,
                p,
                format!("{p} is not a type profile; profile typing skipped"),
            )),
        }
    }
    for (key, value) in record.iter() {
        referenced_operations(value, graph, &mut direct);
        match graph.kind_of(key) {
            Some(EntityKind::Attribute) => {
                classify(operations_for_attribute(key, graph).unwrap_or_default())
            }
            Some(k) if k.is_data_type() => {
                classify(operations_for_datatype(key, graph).unwrap_or_default())
            }
            _ => result.diagnostics.push(ValidationResult::warning(
                RuleId::RecordConformance,
                key,
                format!("record key {key} does not resolve to an attribute or data type; skipped"),
            )),
        }
    }
    result.record_typing = direct.into_iter().collect();
    result.profile_typing = via_profile.into_iter().collect();
    result.attribute_typing = via_attribute.into_iter().collect();
    result
}
