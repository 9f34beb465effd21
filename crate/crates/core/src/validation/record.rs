use std::collections::BTreeMap;

use crate::diagnostics::{RuleId, ValidationResult};
use crate::graph::Graph;
use crate::model::{CardinalityRange, Combinator, EntityKind, InformationRecord, Value};
use crate::pid::Pid;
use crate::typing::effective_attributes;

use super::value::validate_value;

const MAX_NESTING: usize = 32;

/// Validates one data-type instance: atomic values against the parent chain,
/// records against a profile.
pub fn validate_data_value(value: &Value, data_type: &Pid, graph: &Graph) -> Vec<ValidationResult> {
    validate_element(value, data_type, graph, 0)
}

fn validate_element(
    value: &Value,
    data_type: &Pid,
    graph: &Graph,
    depth: usize,
) -> Vec<ValidationResult> {
    match graph.kind_of(data_type) {
        Some(EntityKind::AtomicDataType) => validate_value(value, data_type, graph),
        Some(EntityKind::TypeProfile) => match value {
            Value::Record(fields) => {
                check_record(&InformationRecord(fields.clone()), data_type, graph, depth + 1)
            }
            other => vec![ValidationResult::error(
                RuleId::RecordConformance,
                data_type,
                format!("expected a record for profile {data_type}, got {}", other.kind_name()),
            )],
        },
        Some(kind) => vec![ValidationResult::error(
            RuleId::ValueConformance,
            data_type,
            format!("{data_type} is a {kind}, not a data type"),
        )],
        None => vec![ValidationResult::error(
            RuleId::ValueConformance,
            data_type,
            format!("data type {data_type} not found"),
        )],
    }
}

/// Validates an attribute's value: element count within `cardinality`, then
/// every element against `data_type`. A list stands for many elements, any
/// other value for one.
pub fn validate_attribute_value(
    attribute: &Pid,
    value: &Value,
    data_type: &Pid,
    cardinality: CardinalityRange,
    graph: &Graph,
) -> Vec<ValidationResult> {
    attribute_value(attribute, value, data_type, cardinality, graph, 0)
}

fn attribute_value(
    attribute: &Pid,
    value: &Value,
    data_type: &Pid,
    cardinality: CardinalityRange,
    graph: &Graph,
    depth: usize,
) -> Vec<ValidationResult> {
    let elements = value.elements();
    if value.as_list().is_some() && !cardinality.permits_many() {
        return vec![ValidationResult::error(
            RuleId::RecordConformance,
            attribute,
            format!("{attribute} is single-valued ({cardinality}) but got a list"),
        )];
    }
    let count = elements.len() as u64;
    if !cardinality.contains(count) {
        return vec![ValidationResult::error(
            RuleId::RecordConformance,
            attribute,
            format!("{attribute} has {count} value(s), outside cardinality {cardinality}"),
        )];
    }
    elements
        .into_iter()
        .flat_map(|e| validate_element(e, data_type, graph, depth))
        .collect()
}

/// Validates an information record against a type profile, including
/// inherited attributes and the profile's validation policy.
///
/// Keys are attribute PIDs. A key naming a data type is accepted when
/// exactly one effective attribute conforms to it.
pub fn validate_record(
    record: &InformationRecord,
    profile: &Pid,
    graph: &Graph,
) -> Vec<ValidationResult> {
    check_record(record, profile, graph, 0)
}

fn check_record(
    record: &InformationRecord,
    profile: &Pid,
    graph: &Graph,
    depth: usize,
) -> Vec<ValidationResult> {
    if depth > MAX_NESTING {
        return vec![ValidationResult::error(
            RuleId::RecordConformance,
            profile,
            format!("records nested deeper than {MAX_NESTING} levels"),
        )];
    }
    let (effective, diagnostics) = match effective_attributes(graph, profile) {
        Ok(x) => x,
        Err(e) => {
            return vec![ValidationResult::error(
                RuleId::RecordConformance,
                profile,
                e.to_string(),
            )]
        }
    };
    let mut results: Vec<_> = diagnostics.into_iter().filter(|d| d.is_error()).collect();
    let name = graph.get(profile).map(|e| e.name()).unwrap_or_default();

    let mut present: BTreeMap<&Pid, (&Pid, &Value)> = BTreeMap::new();
    let mut extra = Vec::new();
    for (key, value) in record.iter() {
        let resolved = if effective.contains(key) {
            Some(key)
        } else if graph.kind_of(key).is_some_and(EntityKind::is_data_type) {
            let candidates: Vec<&Pid> = effective
                .attributes
                .iter()
                .filter(|(_, a)| &a.data_type == key)
                .map(|(p, _)| p)
                .collect();
            match candidates.as_slice() {
                [one] => Some(*one),
                [] => None,
                many => {
                    results.push(ValidationResult::error(
                        RuleId::RecordConformance,
                        profile,
                        format!(
                            "key {key} is ambiguous: {} attributes conform to it",
                            many.len()
                        ),
                    ));
                    continue;
                }
            }
        } else {
            None
        };
        match resolved {
            Some(attr) => {
                if let Some((other, _)) = present.insert(attr, (key, value)) {
                    results.push(ValidationResult::error(
                        RuleId::RecordConformance,
                        attr,
                        format!("keys {other} and {key} both supply attribute {attr}"),
                    ));
                }
            }
            None => extra.push((key, value)),
        }
    }

    let policy = effective.policy;
    match policy.combinator {
        Combinator::None => {
            for attr in present.keys() {
                results.push(ValidationResult::error(
                    RuleId::RecordConformance,
                    profile,
                    format!("profile {name} ({profile}) admits none of its attributes, found {attr}"),
                ));
            }
        }
        Combinator::ExactlyOne if present.len() != 1 => results.push(ValidationResult::error(
            RuleId::RecordConformance,
            profile,
            format!(
                "profile {name} ({profile}) requires exactly one of its attributes, found {}",
                present.len()
            ),
        )),
        Combinator::AnyAtLeastOne if present.is_empty() => {
            results.push(ValidationResult::error(
                RuleId::RecordConformance,
                profile,
                format!("profile {name} ({profile}) requires at least one of its attributes"),
            ))
        }
        Combinator::All => {
            for attr in effective.mandatory() {
                if !present.contains_key(attr) {
                    let attr_name = graph.get(attr).map(|e| e.name()).unwrap_or_default();
                    results.push(ValidationResult::error(
                        RuleId::RecordConformance,
                        attr,
                        format!("missing mandatory attribute {attr_name} ({attr})"),
                    ));
                }
            }
        }
        _ => {}
    }

    for (attr, (_, value)) in &present {
        let binding = effective.get(attr).expect("resolved against effective attributes");
        results.extend(attribute_value(
            attr,
            value,
            &binding.data_type,
            binding.cardinality,
            graph,
            depth,
        ));
    }

    for (key, value) in extra {
        if !policy.allow_additional {
            results.push(ValidationResult::error(
                RuleId::RecordConformance,
                profile,
                format!("key {key} is not an attribute of profile {name} ({profile})"),
            ));
        } else if let Some(attr) = graph.attribute(key) {
            results.extend(attribute_value(
                key,
                value,
                &attr.data_type,
                attr.cardinality,
                graph,
                depth,
            ));
        }
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::has_errors;
    use crate::model::{
        AtomicDataType, Attribute, Entity, PrimitiveKind, Restrictions, TypeProfile,
        ValidationPolicy,
    };

    fn pid(s: &str) -> Pid {
        Pid::parse(&format!("t/{s}")).unwrap()
    }

    fn graph(policy: ValidationPolicy) -> Graph {
        let entities: Vec<Entity> = vec![
            AtomicDataType::new(pid("str"), "String", PrimitiveKind::String).into(),
            AtomicDataType::new(pid("hex"), "Hex", PrimitiveKind::String)
                .with_restrictions(Restrictions::regex("[0-9a-f]+"))
                .into(),
            Attribute::new(pid("hash"), "hash", pid("hex"), CardinalityRange::mandatory()).into(),
            Attribute::new(pid("algo"), "algorithm", pid("str"), CardinalityRange::mandatory())
                .into(),
            Attribute::new(pid("note"), "note", pid("str"), CardinalityRange::unbounded(0)).into(),
            TypeProfile::new(
                pid("checksum"),
                "Checksum",
                vec![pid("hash"), pid("algo"), pid("note")],
                policy,
            )
            .into(),
            Attribute::new(
                pid("cs"),
                "checksum",
                pid("checksum"),
                CardinalityRange::mandatory(),
            )
            .into(),
            TypeProfile::new(pid("outer"), "Outer", vec![pid("cs")], ValidationPolicy::default())
                .into(),
        ];
        Graph::from_entities(entities)
    }

    fn record(pairs: &[(&str, Value)]) -> InformationRecord {
        let mut r = InformationRecord::new();
        for (k, v) in pairs {
            r.insert(pid(k), v.clone());
        }
        r
    }

    #[test]
    fn all_policy() {
        let g = graph(ValidationPolicy::default());
        let ok = record(&[("hash", "abc".into()), ("algo", "md5".into())]);
        assert!(validate_record(&ok, &pid("checksum"), &g).is_empty());
        let missing = record(&[("hash", "abc".into())]);
        let results = validate_record(&missing, &pid("checksum"), &g);
        assert_eq!(results.len(), 1);
        assert!(results[0].message.contains("missing mandatory attribute algorithm"));
        let bad = record(&[("hash", "xyz".into()), ("algo", "md5".into())]);
        assert!(has_errors(&validate_record(&bad, &pid("checksum"), &g)));
    }

    #[test]
    fn additional_keys() {
        let base = [("hash", Value::from("abc")), ("algo", "md5".into())];
        let mut with_extra = base.to_vec();
        with_extra.push(("unknown", "x".into()));
        let closed = graph(ValidationPolicy::new(Combinator::All, false));
        assert!(has_errors(&validate_record(&record(&with_extra), &pid("checksum"), &closed)));
        let open = graph(ValidationPolicy::new(Combinator::All, true));
        assert!(validate_record(&record(&with_extra), &pid("checksum"), &open).is_empty());
    }

    #[test]
    fn data_type_keys_resolve() {
        let g = graph(ValidationPolicy::default());
        let r = record(&[("hex", "abc".into()), ("algo", "md5".into())]);
        assert!(validate_record(&r, &pid("checksum"), &g).is_empty());
        // two attributes conform to String
        let r = record(&[("hash", "abc".into()), ("str", "md5".into())]);
        assert!(has_errors(&validate_record(&r, &pid("checksum"), &g)));
    }

    #[test]
    fn combinators() {
        let one = graph(ValidationPolicy::new(Combinator::ExactlyOne, false));
        assert!(validate_record(&record(&[("algo", "md5".into())]), &pid("checksum"), &one).is_empty());
        let two = record(&[("hash", "abc".into()), ("algo", "md5".into())]);
        assert!(has_errors(&validate_record(&two, &pid("checksum"), &one)));
        assert!(has_errors(&validate_record(&record(&[]), &pid("checksum"), &one)));

        let any = graph(ValidationPolicy::new(Combinator::AnyAtLeastOne, false));
        assert!(validate_record(&two, &pid("checksum"), &any).is_empty());
        assert!(has_errors(&validate_record(&record(&[]), &pid("checksum"), &any)));

        let none = graph(ValidationPolicy::new(Combinator::None, false));
        assert!(validate_record(&record(&[]), &pid("checksum"), &none).is_empty());
        assert!(has_errors(&validate_record(&two, &pid("checksum"), &none)));
    }

    #[test]
    fn cardinality_counts() {
        let g = graph(ValidationPolicy::default());
        let list = Value::List(vec!["a".into(), "b".into()]);
        let notes = record(&[("hash", "abc".into()), ("algo", "md5".into()), ("note", list.clone())]);
        assert!(validate_record(&notes, &pid("checksum"), &g).is_empty());
        let listed_hash = record(&[("hash", list), ("algo", "md5".into())]);
        assert!(has_errors(&validate_record(&listed_hash, &pid("checksum"), &g)));
        let empty = record(&[("hash", Value::List(vec![])), ("algo", "md5".into())]);
        assert!(has_errors(&validate_record(&empty, &pid("checksum"), &g)));
    }

    #[test]
    fn nested_profiles() {
        let g = graph(ValidationPolicy::default());
        let inner = record(&[("hash", "abc".into()), ("algo", "md5".into())]);
        let outer = record(&[("cs", inner.into())]);
        assert!(validate_record(&outer, &pid("outer"), &g).is_empty());
        let bad_inner = record(&[("hash", "abc".into())]);
        let outer = record(&[("cs", bad_inner.into())]);
        assert!(has_errors(&validate_record(&outer, &pid("outer"), &g)));
        let not_record = record(&[("cs", "abc".into())]);
        assert!(has_errors(&validate_record(&not_record, &pid("outer"), &g)));
    }
}
