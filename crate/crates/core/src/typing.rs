//! Inheritance resolution and the subtype relation.
//!
//! Atomic data types form single-parent chains. Type profiles inherit from
//! any number of parents; their ancestors are ordered by C3 linearization,
//! falling back to a depth-first left-to-right walk when C3 has no
//! consistent order. Subtyping is nominal: only declared `inheritsFrom`
//! edges count.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use thiserror::Error;

use crate::diagnostics::{RuleId, ValidationResult};
use crate::graph::{Direction, EdgeLabel, Graph};
use crate::model::{CardinalityRange, EntityKind, ValidationPolicy};
use crate::pid::Pid;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypingError {
    #[error("{0} not found")]
    NotFound(Pid),
    #[error("{pid} is a {found}, expected {expected}")]
    WrongKind {
        pid: Pid,
        expected: &'static str,
        found: EntityKind,
    },
    #[error("cannot relate {0} and {1}: one is an atomic data type, the other a type profile")]
    KindMismatch(Pid, Pid),
    #[error("inheritance of {0} is cyclic")]
    Cyclic(Pid),
    #[error("parent chain of {child} is corrupt: {parent} is not an atomic data type of the same primitive kind")]
    CorruptChain { child: Pid, parent: Pid },
}

fn expect_kind(
    graph: &Graph,
    pid: &Pid,
    kind: EntityKind,
    expected: &'static str,
) -> Result<(), TypingError> {
    match graph.kind_of(pid) {
        None => Err(TypingError::NotFound(pid.clone())),
        Some(k) if k == kind => Ok(()),
        Some(found) => Err(TypingError::WrongKind {
            pid: pid.clone(),
            expected,
            found,
        }),
    }
}

/// `[self, parent, grandparent, ...]` for an atomic data type.
pub fn parent_chain(graph: &Graph, atomic: &Pid) -> Result<Vec<Pid>, TypingError> {
    expect_kind(graph, atomic, EntityKind::AtomicDataType, "atomic data type")?;
    let mut chain = vec![atomic.clone()];
    let mut current = graph.atomic(atomic).expect("kind checked");
    while let Some(parent) = &current.parent {
        if chain.contains(parent) {
            return Err(TypingError::Cyclic(atomic.clone()));
        }
        let next = graph
            .atomic(parent)
            .filter(|p| p.kind == current.kind)
            .ok_or_else(|| TypingError::CorruptChain {
                child: current.pid.clone(),
                parent: parent.clone(),
            })?;
        chain.push(parent.clone());
        current = next;
    }
    Ok(chain)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearization {
    pub profile: Pid,
    /// Self first, then every ancestor exactly once.
    pub order: Vec<Pid>,
    /// False when C3 had no consistent order and the depth-first fallback
    /// was used.
    pub consistent: bool,
}

fn profile_parents<'a>(graph: &'a Graph, pid: &Pid) -> Vec<&'a Pid> {
    graph
        .profile(pid)
        .map(|p| {
            p.parents
                .iter()
                .filter(|q| graph.profile(q).is_some())
                .collect()
        })
        .unwrap_or_default()
}

/// C3 linearization of a type profile's ancestors. When C3 fails, the
/// depth-first fallback is returned together with a warning.
pub fn linearize(
    graph: &Graph,
    profile: &Pid,
) -> Result<(Linearization, Vec<ValidationResult>), TypingError> {
    expect_kind(graph, profile, EntityKind::TypeProfile, "type profile")?;
    let upward = graph.closure(profile, &[EdgeLabel::InheritsFrom], Direction::Out);
    for p in std::iter::once(profile).chain(&upward) {
        if graph.path_exists(p, p, &[EdgeLabel::InheritsFrom]) {
            return Err(TypingError::Cyclic(p.clone()));
        }
    }
    if let Some(order) = c3(graph, profile) {
        return Ok((
            Linearization {
                profile: profile.clone(),
                order,
                consistent: true,
            },
            Vec::new(),
        ));
    }
    let order = depth_first(graph, profile);
    let warning = ValidationResult::warning(
        RuleId::InheritanceConflict,
        profile,
        format!(
            "no consistent C3 linearization exists; using depth-first order {}",
            join(&order)
        ),
    );
    Ok((
        Linearization {
            profile: profile.clone(),
            order,
            consistent: false,
        },
        vec![warning],
    ))
}

fn join(pids: &[Pid]) -> String {
    pids.iter().map(Pid::as_str).collect::<Vec<_>>().join(", ")
}

fn c3(graph: &Graph, pid: &Pid) -> Option<Vec<Pid>> {
    let parents = profile_parents(graph, pid);
    let mut sequences: Vec<Vec<Pid>> = Vec::with_capacity(parents.len() + 1);
    for parent in &parents {
        sequences.push(c3(graph, parent)?);
    }
    sequences.push(parents.into_iter().cloned().collect());
    let mut result = vec![pid.clone()];
    loop {
        sequences.retain(|s| !s.is_empty());
        if sequences.is_empty() {
            return Some(result);
        }
        let head = sequences
            .iter()
            .map(|s| &s[0])
            .find(|candidate| sequences.iter().all(|s| !s[1..].contains(candidate)))?
            .clone();
        for s in &mut sequences {
            if s[0] == head {
                s.remove(0);
            }
        }
        result.push(head);
    }
}

fn depth_first(graph: &Graph, pid: &Pid) -> Vec<Pid> {
    fn walk(graph: &Graph, pid: &Pid, out: &mut Vec<Pid>) {
        if out.contains(pid) {
            return;
        }
        out.push(pid.clone());
        for parent in profile_parents(graph, pid) {
            walk(graph, parent, out);
        }
    }
    let mut out = Vec::new();
    walk(graph, pid, &mut out);
    out
}

/// An attribute as contributed by one profile in a linearization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeBinding {
    pub attribute: Pid,
    pub data_type: Pid,
    pub cardinality: CardinalityRange,
    pub origin: Pid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveAttribute {
    pub data_type: Pid,
    pub cardinality: CardinalityRange,
    /// Most specific profile declaring the attribute.
    pub origin: Pid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveProfile {
    pub profile: Pid,
    /// In linearization order, each attribute once.
    pub attributes: IndexMap<Pid, EffectiveAttribute>,
    pub policy: ValidationPolicy,
}

impl EffectiveProfile {
    pub fn get(&self, attribute: &Pid) -> Option<&EffectiveAttribute> {
        self.attributes.get(attribute)
    }

    pub fn contains(&self, attribute: &Pid) -> bool {
        self.attributes.contains_key(attribute)
    }

    pub fn mandatory(&self) -> impl Iterator<Item = &Pid> {
        self.attributes
            .iter()
            .filter(|(_, a)| a.cardinality.lower() >= 1)
            .map(|(p, _)| p)
    }
}

/// Merges bindings given in precedence order. Duplicates must agree on the
/// data type; their cardinalities are intersected.
pub fn merge_bindings(
    profile: &Pid,
    bindings: impl IntoIterator<Item = AttributeBinding>,
) -> (IndexMap<Pid, EffectiveAttribute>, Vec<ValidationResult>) {
    let mut merged: IndexMap<Pid, EffectiveAttribute> = IndexMap::new();
    let mut diagnostics = Vec::new();
    for binding in bindings {
        let Some(existing) = merged.get_mut(&binding.attribute) else {
            merged.insert(
                binding.attribute,
                EffectiveAttribute {
                    data_type: binding.data_type,
                    cardinality: binding.cardinality,
                    origin: binding.origin,
                },
            );
            continue;
        };
        if existing.data_type != binding.data_type {
            diagnostics.push(ValidationResult::error(
                RuleId::InheritanceConflict,
                profile,
                format!(
                    "attribute {} conforms to {} via {} but to {} via {}",
                    binding.attribute,
                    existing.data_type,
                    existing.origin,
                    binding.data_type,
                    binding.origin
                ),
            ));
            continue;
        }
        match existing.cardinality.intersect(&binding.cardinality) {
            Some(range) => existing.cardinality = range,
            None => diagnostics.push(ValidationResult::error(
                RuleId::InheritanceConflict,
                profile,
                format!(
                    "attribute {}: cardinality {} via {} and {} via {} do not overlap",
                    binding.attribute,
                    existing.cardinality,
                    existing.origin,
                    binding.cardinality,
                    binding.origin
                ),
            )),
        }
    }
    (merged, diagnostics)
}

/// Attribute set of a profile including everything it inherits.
pub fn effective_attributes(
    graph: &Graph,
    profile: &Pid,
) -> Result<(EffectiveProfile, Vec<ValidationResult>), TypingError> {
    let (linearization, mut diagnostics) = linearize(graph, profile)?;
    let bindings = linearization.order.iter().flat_map(|origin| {
        graph
            .profile(origin)
            .into_iter()
            .flat_map(|p| p.attributes.iter())
            .filter_map(|a| graph.attribute(a))
            .map(move |a| AttributeBinding {
                attribute: a.pid.clone(),
                data_type: a.data_type.clone(),
                cardinality: a.cardinality,
                origin: origin.clone(),
            })
    });
    let (attributes, merge_diagnostics) = merge_bindings(profile, bindings);
    diagnostics.extend(merge_diagnostics);
    let policy = graph.profile(profile).expect("kind checked").policy;
    Ok((
        EffectiveProfile {
            profile: profile.clone(),
            attributes,
            policy,
        },
        diagnostics,
    ))
}

/// Ancestors of a data type (excluding itself) along `inheritsFrom`.
pub fn ancestors(graph: &Graph, data_type: &Pid) -> BTreeSet<Pid> {
    graph
        .closure(data_type, &[EdgeLabel::InheritsFrom], Direction::Out)
        .into_iter()
        .collect()
}

/// Reflexive, transitive, nominal subtyping between two data types of the
/// same flavour.
pub fn is_subtype(graph: &Graph, candidate: &Pid, sup: &Pid) -> Result<bool, TypingError> {
    let a = graph
        .kind_of(candidate)
        .ok_or_else(|| TypingError::NotFound(candidate.clone()))?;
    let b = graph
        .kind_of(sup)
        .ok_or_else(|| TypingError::NotFound(sup.clone()))?;
    for (pid, kind) in [(candidate, a), (sup, b)] {
        if !kind.is_data_type() {
            return Err(TypingError::WrongKind {
                pid: pid.clone(),
                expected: "data type",
                found: kind,
            });
        }
    }
    if a != b {
        return Err(TypingError::KindMismatch(candidate.clone(), sup.clone()));
    }
    Ok(candidate == sup || ancestors(graph, candidate).contains(sup))
}

/// Covariant assignability: the value attribute's data type is a subtype of
/// the slot's and its cardinality range lies within the slot's.
pub fn attribute_assignable(
    graph: &Graph,
    value_attr: &Pid,
    slot_attr: &Pid,
) -> Result<bool, TypingError> {
    let value = graph
        .attribute(value_attr)
        .ok_or_else(|| TypingError::NotFound(value_attr.clone()))?;
    let slot = graph
        .attribute(slot_attr)
        .ok_or_else(|| TypingError::NotFound(slot_attr.clone()))?;
    let subtype = match is_subtype(graph, &value.data_type, &slot.data_type) {
        Ok(b) => b,
        Err(TypingError::KindMismatch(..) | TypingError::NotFound(_)) => false,
        Err(e) => return Err(e),
    };
    Ok(subtype && value.cardinality.is_subrange_of(&slot.cardinality))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        AtomicDataType, Attribute, Combinator, Entity, PrimitiveKind, TypeProfile,
    };

    fn pid(s: &str) -> Pid {
        Pid::parse(&format!("t/{s}")).unwrap()
    }

    fn profile(name: &str, parents: &[&str], attrs: &[&str]) -> Entity {
        TypeProfile::new(
            pid(name),
            name,
            attrs.iter().map(|a| pid(a)).collect(),
            ValidationPolicy::new(Combinator::All, false),
        )
        .with_parents(parents.iter().map(|p| pid(p)).collect())
        .into()
    }

    fn order(graph: &Graph, p: &str) -> Vec<String> {
        linearize(graph, &pid(p))
            .unwrap()
            .0
            .order
            .iter()
            .map(|p| p.suffix().to_string())
            .collect()
    }

    #[test]
    fn disjoint_parents() {
        let g = Graph::from_entities([
            profile("a", &[], &[]),
            profile("b", &[], &[]),
            profile("p", &["a", "b"], &[]),
        ]);
        assert_eq!(order(&g, "p"), ["p", "a", "b"]);
        assert_eq!(order(&g, "a"), ["a"]);
    }

    #[test]
    fn diamond() {
        let g = Graph::from_entities([
            profile("r", &[], &[]),
            profile("a", &["r"], &[]),
            profile("b", &["r"], &[]),
            profile("p", &["a", "b"], &[]),
        ]);
        assert_eq!(order(&g, "p"), ["p", "a", "b", "r"]);
    }

    #[test]
    fn inconsistent_falls_back_with_warning() {
        // x: [a, b], y: [b, a], p: [x, y] has no C3 order.
        let g = Graph::from_entities([
            profile("a", &[], &[]),
            profile("b", &[], &[]),
            profile("x", &["a", "b"], &[]),
            profile("y", &["b", "a"], &[]),
            profile("p", &["x", "y"], &[]),
        ]);
        let (lin, diags) = linearize(&g, &pid("p")).unwrap();
        assert!(!lin.consistent);
        let names: Vec<_> = lin.order.iter().map(|p| p.suffix()).collect();
        assert_eq!(names, ["p", "x", "a", "b", "y"]);
        assert_eq!(diags.len(), 1);
    }

    #[test]
    fn cyclic_profile_is_an_error() {
        let g = Graph::from_entities([profile("a", &["b"], &[]), profile("b", &["a"], &[])]);
        assert_eq!(linearize(&g, &pid("a")), Err(TypingError::Cyclic(pid("a"))));
    }

    #[test]
    fn chain_and_subtyping() {
        let url = AtomicDataType::new(pid("url"), "URL", PrimitiveKind::String);
        let orcid =
            AtomicDataType::new(pid("orcid"), "ORCiD-URL", PrimitiveKind::String).with_parent(pid("url"));
        let g = Graph::from_entities([url.into(), orcid.into(), profile("p", &[], &[])]);
        assert_eq!(parent_chain(&g, &pid("orcid")).unwrap(), [pid("orcid"), pid("url")]);
        assert_eq!(parent_chain(&g, &pid("url")).unwrap(), [pid("url")]);
        assert!(is_subtype(&g, &pid("orcid"), &pid("url")).unwrap());
        assert!(!is_subtype(&g, &pid("url"), &pid("orcid")).unwrap());
        assert!(is_subtype(&g, &pid("url"), &pid("url")).unwrap());
        assert!(matches!(
            is_subtype(&g, &pid("url"), &pid("p")),
            Err(TypingError::KindMismatch(..))
        ));
        assert!(matches!(
            parent_chain(&g, &pid("p")),
            Err(TypingError::WrongKind { .. })
        ));
    }

    #[test]
    fn corrupt_chain_detected() {
        let url = AtomicDataType::new(pid("url"), "URL", PrimitiveKind::Integer);
        let orcid =
            AtomicDataType::new(pid("orcid"), "ORCiD-URL", PrimitiveKind::String).with_parent(pid("url"));
        let g = Graph::from_entities([url.into(), orcid.into()]);
        assert!(matches!(
            parent_chain(&g, &pid("orcid")),
            Err(TypingError::CorruptChain { .. })
        ));
    }

    #[test]
    fn diamond_attribute_appears_once() {
        let s = AtomicDataType::new(pid("s"), "S", PrimitiveKind::String);
        let attr = |n: &str, c| Entity::from(Attribute::new(pid(n), n, pid("s"), c));
        let g = Graph::from_entities([
            s.into(),
            attr("shared", CardinalityRange::optional()),
            attr("own", CardinalityRange::mandatory()),
            profile("r", &[], &["shared"]),
            profile("a", &["r"], &[]),
            profile("b", &["r"], &["shared"]),
            profile("p", &["a", "b"], &["own"]),
        ]);
        let (eff, diags) = effective_attributes(&g, &pid("p")).unwrap();
        assert!(diags.is_empty());
        let keys: Vec<_> = eff.attributes.keys().map(|p| p.suffix()).collect();
        assert_eq!(keys, ["own", "shared"]);
        assert_eq!(eff.get(&pid("shared")).unwrap().origin, pid("b"));
    }

    #[test]
    fn merge_conflicts() {
        let p = pid("p");
        let bind = |dt: &str, c, origin: &str| AttributeBinding {
            attribute: pid("x"),
            data_type: pid(dt),
            cardinality: c,
            origin: pid(origin),
        };
        let (merged, diags) = merge_bindings(
            &p,
            [
                bind("s", CardinalityRange::optional(), "p"),
                bind("s", CardinalityRange::mandatory(), "a"),
            ],
        );
        assert!(diags.is_empty());
        assert_eq!(merged[&pid("x")].cardinality, CardinalityRange::mandatory());

        let (_, diags) = merge_bindings(
            &p,
            [
                bind("s", CardinalityRange::optional(), "p"),
                bind("other", CardinalityRange::optional(), "a"),
            ],
        );
        assert_eq!(diags.len(), 1);
        assert!(diags[0].is_error());

        let (_, diags) = merge_bindings(
            &p,
            [
                bind("s", CardinalityRange::new(3, None).unwrap(), "p"),
                bind("s", CardinalityRange::optional(), "a"),
            ],
        );
        assert!(diags[0].message.contains("do not overlap"));
    }

    #[test]
    fn assignability_is_covariant() {
        let url = AtomicDataType::new(pid("url"), "URL", PrimitiveKind::String);
        let orcid =
            AtomicDataType::new(pid("orcid"), "ORCiD-URL", PrimitiveKind::String).with_parent(pid("url"));
        let g = Graph::from_entities([
            url.into(),
            orcid.into(),
            Attribute::new(pid("v"), "v", pid("orcid"), CardinalityRange::mandatory()).into(),
            Attribute::new(pid("slot"), "slot", pid("url"), CardinalityRange::optional()).into(),
        ]);
        assert!(attribute_assignable(&g, &pid("v"), &pid("slot")).unwrap());
        assert!(!attribute_assignable(&g, &pid("slot"), &pid("v")).unwrap());
        assert!(attribute_assignable(&g, &pid("v"), &pid("v")).unwrap());
        assert!(attribute_assignable(&g, &pid("v"), &pid("missing")).is_err());
    }
}
