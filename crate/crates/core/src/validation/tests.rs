use proptest::prelude::*;

use super::*;
use crate::diagnostics::Severity;
use crate::graph::EdgeLabel;
use crate::model::{
    AttributeMapping, CardinalityRange, OperationStep, PrimitiveKind, Restrictions, StepTarget,
    ValidationPolicy, Value,
};
use crate::pid::Pid;

fn pid(s: &str) -> Pid {
    Pid::parse(&format!("t/{s}")).unwrap()
}

fn string_type(name: &str) -> AtomicDataType {
    AtomicDataType::new(pid(name), name, PrimitiveKind::String)
}

fn profile(name: &str, parents: &[&str], attrs: &[&str]) -> Entity {
    TypeProfile::new(
        pid(name),
        name,
        attrs.iter().map(|a| pid(a)).collect(),
        ValidationPolicy::default(),
    )
    .with_parents(parents.iter().map(|p| pid(p)).collect())
    .into()
}

fn attribute(name: &str, ty: &str, c: CardinalityRange) -> Entity {
    Attribute::new(pid(name), name, pid(ty), c).into()
}

fn errors(results: &[ValidationResult]) -> Vec<&ValidationResult> {
    results.iter().filter(|r| r.is_error()).collect()
}

/// URL, ORCiD-URL (child of URL), String, and a regex interface with
/// attributes typed by each.
fn mapping_graph() -> Graph {
    Graph::from_entities([
        string_type("url")
            .with_restrictions(Restrictions::regex(r"https?://\S+"))
            .into(),
        string_type("orcid-url")
            .with_parent(pid("url"))
            .with_restrictions(Restrictions::regex(
                r"https://orcid\.org/\d{4}-\d{4}-\d{4}-\d{3}[0-9X]",
            ))
            .into(),
        string_type("str").into(),
        attribute("contact", "orcid-url", CardinalityRange::mandatory()),
        attribute("text", "str", CardinalityRange::mandatory()),
        attribute("pair", "str", CardinalityRange::new(0, Some(2)).unwrap()),
        attribute("slot", "orcid-url", CardinalityRange::mandatory()),
        attribute("result", "str", CardinalityRange::unbounded(0)),
        TechnologyInterface::new(
            pid("ti"),
            "ti",
            vec![pid("text"), pid("slot")],
            vec![pid("result")],
        )
        .into(),
    ])
}

fn op_with(mapping: AttributeMapping) -> Entity {
    Operation::new(pid("op"), "op", pid("contact"), vec![])
        .step(
            OperationStep::new(0, StepTarget::TechnologyInterface(pid("ti"))).input(mapping),
        )
        .into()
}

#[test]
fn profile_inheriting_from_itself() {
    let p = profile("p", &["p"], &[]);
    let results = validate_entity(&p, &Graph::new());
    // the same cycle breaks linearization, which is the acyclicity rule's job
    assert_eq!(results.len(), 1, "{results:?}");
    assert_eq!(results[0].severity, Severity::Error);
    assert_eq!(results[0].rule, RuleId::Acyclicity);
    assert!(results[0].message.starts_with("Circular inheritance detected"));
}

#[test]
fn profile_using_itself_as_attribute() {
    let g = Graph::from_entities([attribute("self", "p", CardinalityRange::mandatory())]);
    let results = validate_entity(&profile("p", &[], &["self"]), &g);
    assert!(results
        .iter()
        .any(|r| r.is_error() && r.rule == RuleId::Acyclicity));

    let g = Graph::from_entities([attribute("self", "p", CardinalityRange::optional())]);
    let results = validate_entity(&profile("p", &[], &["self"]), &g);
    assert!(errors(&results).is_empty(), "{results:?}");
    assert!(results
        .iter()
        .any(|r| r.severity == Severity::Warning && r.rule == RuleId::Acyclicity));
}

#[test]
fn two_cycle_reports_once() {
    let g = Graph::from_entities([string_type("b").with_parent(pid("a")).into()]);
    let results = validate_entity(&string_type("a").with_parent(pid("b")).into(), &g);
    assert_eq!(results.len(), 1);
    assert!(results[0].message.contains("t/a -> t/b -> t/a"));
}

#[test]
fn mutually_recursive_operations() {
    let step = |target: &str| OperationStep::new(0, StepTarget::Operation(pid(target)));
    let g = Graph::from_entities([
        string_type("s").into(),
        attribute("a", "s", CardinalityRange::mandatory()),
        Operation::new(pid("y"), "y", pid("a"), vec![])
            .step(step("x"))
            .into(),
    ]);
    let x: Entity = Operation::new(pid("x"), "x", pid("a"), vec![])
        .step(step("y"))
        .into();
    let results = validate_entity(&x, &g);
    let acyclic: Vec<_> = results
        .iter()
        .filter(|r| r.rule == RuleId::Acyclicity)
        .collect();
    assert_eq!(acyclic.len(), 1);
    assert_eq!(acyclic[0].entity, pid("x"));
}

#[test]
fn diamond_is_legal() {
    let g = Graph::from_entities([
        profile("r", &[], &[]),
        profile("a", &["r"], &[]),
        profile("b", &["r"], &[]),
    ]);
    assert!(validate_entity(&profile("d", &["a", "b"], &[]), &g).is_empty());
}

#[test]
fn well_formed_orcid_url() {
    let g = mapping_graph();
    let e = g.get(&pid("orcid-url")).unwrap().clone();
    assert!(validate_entity(&e, &g).is_empty());
}

#[test]
fn missing_and_wrong_kind_references() {
    let results = validate_entity(
        &attribute("a", "nothing", CardinalityRange::mandatory()),
        &Graph::new(),
    );
    assert_eq!(results.len(), 1);
    assert_eq!(results[0].rule, RuleId::ReferentialIntegrity);

    let g = mapping_graph();
    let results = validate_entity(&profile("p", &[], &["str"]), &g);
    assert_eq!(errors(&results).len(), 1);
    assert!(results[0].message.contains("AtomicDataType"));
}

#[test]
fn restriction_checks() {
    let bad_regex: Entity = string_type("x")
        .with_restrictions(Restrictions::regex("(unclosed"))
        .into();
    let results = validate_entity(&bad_regex, &Graph::new());
    assert_eq!(results[0].rule, RuleId::RestrictionConsistency);

    let g = Graph::from_entities([string_type("base")
        .with_restrictions(Restrictions {
            forbidden_values: Some(vec!["x".into()]),
            ..Restrictions::default()
        })
        .into()]);
    let child: Entity = string_type("child")
        .with_parent(pid("base"))
        .with_restrictions(Restrictions {
            permitted_values: Some(vec!["x".into()]),
            ..Restrictions::default()
        })
        .into();
    let results = validate_entity(&child, &g);
    assert_eq!(results.len(), 1);
    assert_eq!(results[0].severity, Severity::Warning);
}

#[test]
fn kind_mismatch_with_parent() {
    let g = Graph::from_entities([string_type("s").into()]);
    let n: Entity = AtomicDataType::new(pid("n"), "n", PrimitiveKind::Integer)
        .with_parent(pid("s"))
        .into();
    let results = validate_entity(&n, &g);
    assert_eq!(results.len(), 1);
    assert_eq!(results[0].rule, RuleId::InheritanceConflict);
}

#[test]
fn default_values() {
    let g = mapping_graph();
    let good: Entity = Attribute::new(pid("d"), "d", pid("url"), CardinalityRange::optional())
        .with_default("https://example.org".into())
        .into();
    assert!(validate_entity(&good, &g).is_empty());
    let bad: Entity = Attribute::new(pid("d"), "d", pid("url"), CardinalityRange::optional())
        .with_default("nope".into())
        .into();
    let results = validate_entity(&bad, &g);
    assert_eq!(results.len(), 1);
    assert_eq!(results[0].rule, RuleId::DefaultValueConformance);
    let list: Entity = Attribute::new(pid("d"), "d", pid("url"), CardinalityRange::optional())
        .with_default(Value::List(vec![]))
        .into();
    assert_eq!(validate_entity(&list, &g).len(), 1);
}

#[test]
fn down_cast_is_silent_or_info() {
    let g = mapping_graph();
    let op = op_with(AttributeMapping::from_attribute(pid("contact"), pid("text")));
    let results = validate_entity(&op, &g);
    assert!(results.iter().all(|r| r.severity == Severity::Info), "{results:?}");
}

#[test]
fn unrelated_types_warn() {
    let g = mapping_graph();
    let op = op_with(AttributeMapping::from_attribute(pid("contact"), pid("text")));
    let mut g2 = g.clone();
    g2.upsert(
        string_type("str")
            .with_restrictions(Restrictions::regex("[a-z]+"))
            .into(),
    );
    let results = validate_entity(&op, &g2);
    assert_eq!(results.len(), 1);
    assert_eq!(results[0].severity, Severity::Warning);
    // subtype direction needs no cast
    let op = op_with(AttributeMapping::from_attribute(pid("contact"), pid("slot")));
    assert!(validate_entity(&op, &g).is_empty());
}

#[test]
fn index_beyond_upper_bound() {
    let g = mapping_graph();
    let op = op_with(AttributeMapping::from_attribute(pid("pair"), pid("text")).at_index(3));
    let results = validate_entity(&op, &g);
    assert!(errors(&results)
        .iter()
        .any(|r| r.rule == RuleId::MappingCompatibility && r.message.contains("index 3")));
    let op = op_with(AttributeMapping::from_attribute(pid("pair"), pid("text")).at_index(1));
    assert!(errors(&validate_entity(&op, &g)).is_empty());
}

#[test]
fn constant_into_orcid_slot() {
    let g = mapping_graph();
    let op = op_with(AttributeMapping::constant(
        "https://example.org".into(),
        pid("slot"),
    ));
    let results = validate_entity(&op, &g);
    assert_eq!(errors(&results).len(), 1);
    let op = op_with(AttributeMapping::constant(
        "https://orcid.org/0000-0002-1825-0097".into(),
        pid("slot"),
    ));
    assert!(validate_entity(&op, &g).is_empty());
}

#[test]
fn template_markers() {
    let g = mapping_graph();
    let ok = op_with(
        AttributeMapping::from_attribute(pid("contact"), pid("text")).with_template("get {{input}}"),
    );
    assert!(validate_entity(&ok, &g).is_empty());
    let missing = op_with(
        AttributeMapping::from_attribute(pid("contact"), pid("text")).with_template("get $IN"),
    );
    assert_eq!(errors(&validate_entity(&missing, &g)).len(), 1);
    let custom = Validator::new(RuleSet::default(), "$IN");
    assert!(custom.validate_entity(&missing, &g).is_empty());
}

#[test]
fn slot_membership() {
    let g = mapping_graph();
    let op = op_with(AttributeMapping::from_attribute(pid("contact"), pid("result")));
    let results = validate_entity(&op, &g);
    assert!(errors(&results)
        .iter()
        .any(|r| r.message.contains("is not an input")));
}

#[test]
fn disabling_a_rule() {
    let e = attribute("a", "nothing", CardinalityRange::mandatory());
    let v = Validator::new(RuleSet::default().without(RuleId::ReferentialIntegrity), "x");
    assert!(v.validate_entity(&e, &Graph::new()).is_empty());
    assert_eq!(RuleSet::default().ids().len(), 7);
}

prop_compose! {
    /// A mixed registry: atomic types with arbitrary (possibly cyclic)
    /// parents, attributes, profiles with parents, and operations calling
    /// each other.
    fn arb_registry()(
        n in 2usize..8,
        parents in prop::collection::vec(prop::option::of(0usize..8), 8),
        attr_types in prop::collection::vec((0usize..16, 0u64..2), 6),
        profile_parents in prop::collection::vec(prop::collection::vec(0usize..4, 0..3), 4),
        profile_attrs in prop::collection::vec(prop::collection::vec(0usize..6, 0..3), 4),
        calls in prop::collection::vec(prop::collection::vec(0usize..4, 0..3), 4),
    ) -> Vec<Entity> {
        let mut out: Vec<Entity> = Vec::new();
        for (i, parent) in parents.iter().enumerate().take(n) {
            let mut t = string_type(&format!("a{i}"));
            if let Some(p) = parent.filter(|p| *p < n) {
                t = t.with_parent(pid(&format!("a{p}")));
            }
            out.push(t.into());
        }
        for (i, (ty, lower)) in attr_types.iter().enumerate() {
            let target = if *ty < 8 { format!("a{}", ty % n) } else { format!("p{}", ty % 4) };
            out.push(attribute(
                &format!("at{i}"),
                &target,
                CardinalityRange::new(*lower, None).unwrap(),
            ));
        }
        for i in 0..4 {
            let parents: Vec<String> = profile_parents[i].iter().map(|p| format!("p{p}")).collect();
            let attrs: Vec<String> = profile_attrs[i].iter().map(|a| format!("at{a}")).collect();
            let parents: Vec<&str> = dedup(&parents);
            let attrs: Vec<&str> = dedup(&attrs);
            out.push(profile(&format!("p{i}"), &parents, &attrs));
        }
        for (i, targets) in calls.iter().enumerate() {
            let mut op = Operation::new(pid(&format!("o{i}")), "o", pid("at0"), vec![]);
            for (k, t) in targets.iter().enumerate() {
                op = op.step(OperationStep::new(k as u64, StepTarget::Operation(pid(&format!("o{t}")))));
            }
            out.push(op.into());
        }
        out
    }
}

fn dedup(items: &[String]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for i in items {
        if !out.contains(&i.as_str()) {
            out.push(i);
        }
    }
    out
}

fn single_rule(id: RuleId) -> Validator {
    let all = RuleSet::default();
    let mut only = RuleSet::empty();
    for rule in all.rules().filter(|r| r.id() == id) {
        only = only.with(rule.clone());
    }
    Validator::new(only, DEFAULT_MARKER)
}

proptest! {
    #[test]
    fn rule_independence(entities in arb_registry()) {
        let g = Graph::from_entities(entities.clone());
        let full = Validator::default();
        for e in &entities {
            let combined = full.validate_entity(e, &g);
            let mut union = Vec::new();
            for id in RuleSet::default().ids() {
                union.extend(single_rule(id).validate_entity(e, &g));
            }
            prop_assert_eq!(&combined, &union);
            for id in RuleSet::default().ids() {
                let without = Validator::new(RuleSet::default().without(id), DEFAULT_MARKER)
                    .validate_entity(e, &g);
                let expected: Vec<_> = combined.iter().filter(|r| r.rule != id).cloned().collect();
                prop_assert_eq!(without, expected);
            }
        }
    }

    #[test]
    fn acyclicity_agrees_with_cycle_enumeration(entities in arb_registry()) {
        let g = Graph::from_entities(entities.clone());
        let rule = single_rule(RuleId::Acyclicity);
        let on_cycle = |labels: &[EdgeLabel]| -> std::collections::BTreeSet<Pid> {
            g.find_cycles(labels).into_iter().flatten().collect()
        };
        let inheritance = on_cycle(&[EdgeLabel::InheritsFrom]);
        let calls = on_cycle(&[EdgeLabel::HasStepTarget]);
        let usage = on_cycle(&[EdgeLabel::HasAttribute, EdgeLabel::ConformsTo]);
        for e in &entities {
            let results = rule.validate_entity(e, &g);
            let cites = |needle: &str| results.iter().any(|r| r.message.contains(needle));
            match e.kind() {
                EntityKind::AtomicDataType => {
                    prop_assert_eq!(cites("Circular inheritance"), inheritance.contains(e.pid()));
                }
                EntityKind::Operation => {
                    prop_assert_eq!(cites("executes itself"), calls.contains(e.pid()));
                }
                EntityKind::TypeProfile => {
                    prop_assert_eq!(cites("Circular inheritance"), inheritance.contains(e.pid()));
                    let uses_self = cites("uses itself") || cites("recursively contains itself");
                    prop_assert_eq!(uses_self, usage.contains(e.pid()));
                }
                EntityKind::Attribute => {
                    let flagged = !results.is_empty();
                    prop_assert_eq!(flagged, usage.contains(e.pid()));
                }
                EntityKind::TechnologyInterface => {}
            }
        }
    }

    #[test]
    fn chain_conjunction(
        levels in prop::collection::vec((0usize..4, prop::option::of(0usize..4), prop::option::of(0usize..4)), 1..5),
        candidate in 0usize..6,
    ) {
        const PATTERNS: [&str; 4] = ["[a-z]+", "a.*", ".{1,3}", "[^b]*"];
        const WORDS: [&str; 6] = ["a", "abc", "bbb", "A1", "abcd", "zz"];
        let mut types = Vec::new();
        for (i, (re, permit, forbid)) in levels.iter().enumerate() {
            let mut t = string_type(&format!("c{i}")).with_restrictions(Restrictions {
                regex: Some(PATTERNS[*re].into()),
                permitted_values: permit.map(|w| vec![Value::string(WORDS[w])]),
                forbidden_values: forbid.map(|w| vec![Value::string(WORDS[w + 2])]),
                ..Restrictions::default()
            });
            if i > 0 {
                t = t.with_parent(pid(&format!("c{}", i - 1)));
            }
            types.push(t);
        }
        let value = Value::string(WORDS[candidate]);
        let g = Graph::from_entities(types.iter().cloned().map(Entity::from));
        let leaf = types.last().unwrap().pid.clone();
        let whole = validate_value(&value, &leaf, &g).is_empty();
        let each = types.iter().all(|t| {
            let mut root = t.clone();
            root.parent = None;
            let solo = Graph::from_entities([Entity::from(root)]);
            validate_value(&value, &t.pid, &solo).is_empty()
        });
        prop_assert_eq!(whole, each);
    }
}
