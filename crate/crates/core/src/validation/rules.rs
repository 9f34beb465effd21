//! The default rule visitors.

use std::collections::{BTreeSet, VecDeque};

use crate::diagnostics::{RuleId, ValidationResult};
use crate::graph::{derive_edges, EdgeLabel, Graph};
use crate::model::{
    AtomicDataType, Attribute, AttributeMapping, Combinator, Entity, EntityKind, Operation,
    OperationStep, PrimitiveKind, StepTarget, TypeProfile,
};
use crate::pattern;
use crate::pid::Pid;
use crate::typing::{effective_attributes, is_subtype, parent_chain, TypingError};

use super::record::validate_attribute_value;
use super::{Rule, RuleContext};

fn join(path: &[Pid]) -> String {
    path.iter().map(Pid::as_str).collect::<Vec<_>>().join(" -> ")
}

/// Shortest path from `start` back to itself along `hasAttribute` and
/// `conformsTo` (optionally also `inheritsFrom`), entering only attributes
/// accepted by `admit`.
fn attribute_recursion(
    graph: &Graph,
    start: &Pid,
    via_inheritance: bool,
    admit: impl Fn(&Attribute) -> bool,
) -> Option<Vec<Pid>> {
    let mut queue = VecDeque::from([vec![start.clone()]]);
    let mut seen = BTreeSet::new();
    while let Some(path) = queue.pop_front() {
        let at = path.last().expect("paths are non-empty");
        for (label, next) in graph.out_edges(at) {
            let follow = match label {
                EdgeLabel::HasAttribute => graph.attribute(next).is_some_and(&admit),
                EdgeLabel::ConformsTo => true,
                EdgeLabel::InheritsFrom => via_inheritance,
                _ => false,
            };
            if !follow {
                continue;
            }
            let mut extended = path.clone();
            extended.push(next.clone());
            if next == start {
                return Some(extended);
            }
            if seen.insert(next.clone()) {
                queue.push_back(extended);
            }
        }
    }
    None
}

pub struct Acyclicity;

impl Acyclicity {
    fn inheritance(pid: &Pid, ctx: &RuleContext) -> Option<ValidationResult> {
        let path = ctx.graph.path_between(pid, pid, &[EdgeLabel::InheritsFrom])?;
        Some(ValidationResult::error(
            RuleId::Acyclicity,
            pid,
            format!("Circular inheritance detected: {}", join(&path)),
        ))
    }

    fn recursion(start: &Pid, subject: &Pid, ctx: &RuleContext) -> Vec<ValidationResult> {
        let g = ctx.graph;
        if let Some(path) = attribute_recursion(g, start, false, |a| a.cardinality.lower() >= 1) {
            return vec![ValidationResult::error(
                RuleId::Acyclicity,
                subject,
                format!(
                    "type profile uses itself as a mandatory attribute: {}",
                    join(&path)
                ),
            )];
        }
        if let Some(path) = attribute_recursion(g, start, false, |_| true) {
            return vec![ValidationResult::warning(
                RuleId::Acyclicity,
                subject,
                format!(
                    "type profile recursively contains itself through optional attributes: {}",
                    join(&path)
                ),
            )];
        }
        if g.path_exists(start, start, &[EdgeLabel::InheritsFrom]) {
            return Vec::new();
        }
        match attribute_recursion(g, start, true, |_| true) {
            Some(path) => vec![ValidationResult::warning(
                RuleId::Acyclicity,
                subject,
                format!(
                    "type profile contains itself through an inherited attribute: {}",
                    join(&path)
                ),
            )],
            None => Vec::new(),
        }
    }
}

impl Rule for Acyclicity {
    fn id(&self) -> RuleId {
        RuleId::Acyclicity
    }

    fn visits(&self) -> &'static [EntityKind] {
        &[
            EntityKind::AtomicDataType,
            EntityKind::TypeProfile,
            EntityKind::Attribute,
            EntityKind::Operation,
        ]
    }

    fn visit_atomic(&self, ty: &AtomicDataType, ctx: &RuleContext) -> Vec<ValidationResult> {
        Self::inheritance(&ty.pid, ctx).into_iter().collect()
    }

    fn visit_profile(&self, p: &TypeProfile, ctx: &RuleContext) -> Vec<ValidationResult> {
        let mut results: Vec<_> = Self::inheritance(&p.pid, ctx).into_iter().collect();
        results.extend(Self::recursion(&p.pid, &p.pid, ctx));
        results
    }

    fn visit_attribute(&self, a: &Attribute, ctx: &RuleContext) -> Vec<ValidationResult> {
        let mandatory = |x: &Attribute| x.cardinality.lower() >= 1;
        let Some(path) = attribute_recursion(ctx.graph, &a.pid, false, |_| true) else {
            return Vec::new();
        };
        if mandatory(a) && attribute_recursion(ctx.graph, &a.pid, false, mandatory).is_some() {
            vec![ValidationResult::error(
                RuleId::Acyclicity,
                &a.pid,
                format!("attribute requires an instance of itself: {}", join(&path)),
            )]
        } else {
            vec![ValidationResult::warning(
                RuleId::Acyclicity,
                &a.pid,
                format!("attribute optionally contains itself: {}", join(&path)),
            )]
        }
    }

    fn visit_operation(&self, op: &Operation, ctx: &RuleContext) -> Vec<ValidationResult> {
        match ctx
            .graph
            .path_between(&op.pid, &op.pid, &[EdgeLabel::HasStepTarget])
        {
            Some(path) => vec![ValidationResult::error(
                RuleId::Acyclicity,
                &op.pid,
                format!("operation executes itself: {}", join(&path)),
            )],
            None => Vec::new(),
        }
    }
}

pub struct ReferentialIntegrity;

impl ReferentialIntegrity {
    fn check(entity: &Entity, ctx: &RuleContext) -> Vec<ValidationResult> {
        let from = entity.kind();
        derive_edges(entity)
            .into_iter()
            .filter(|(label, _)| !label.targets_external())
            .filter_map(|(label, to)| {
                let found = ctx.graph.kind_of(&to);
                if label.accepts(from, found) {
                    return None;
                }
                let message = match found {
                    None => format!("{label} references missing entity {to}"),
                    Some(kind) => format!("{label} target {to} is a {kind}, which is not allowed"),
                };
                Some(ValidationResult::error(
                    RuleId::ReferentialIntegrity,
                    entity.pid(),
                    message,
                ))
            })
            .collect()
    }
}

impl Rule for ReferentialIntegrity {
    fn id(&self) -> RuleId {
        RuleId::ReferentialIntegrity
    }

    fn visits(&self) -> &'static [EntityKind] {
        &[
            EntityKind::AtomicDataType,
            EntityKind::TypeProfile,
            EntityKind::Attribute,
            EntityKind::TechnologyInterface,
            EntityKind::Operation,
        ]
    }

    fn visit_entity(&self, entity: &Entity, ctx: &RuleContext) -> Vec<ValidationResult> {
        Self::check(entity, ctx)
    }
}

pub struct RestrictionConsistency;

impl Rule for RestrictionConsistency {
    fn id(&self) -> RuleId {
        RuleId::RestrictionConsistency
    }

    fn visits(&self) -> &'static [EntityKind] {
        &[EntityKind::AtomicDataType]
    }

    fn visit_atomic(&self, ty: &AtomicDataType, ctx: &RuleContext) -> Vec<ValidationResult> {
        let mut results = Vec::new();
        let r = &ty.restrictions;
        let err = |m: String| ValidationResult::error(RuleId::RestrictionConsistency, &ty.pid, m);
        if let Some(re) = &r.regex {
            if let Err(e) = pattern::compile_anchored(re) {
                results.push(err(format!("regex `{re}` does not compile: {e}")));
            }
        }
        for (field, values) in [
            ("permittedValues", &r.permitted_values),
            ("forbiddenValues", &r.forbidden_values),
        ] {
            for v in values.iter().flatten() {
                if !ty.kind.admits(v) {
                    results.push(err(format!("{field} entry {} is not a {} value", v.text(), ty.kind)));
                }
            }
        }
        let mut structural = Vec::new();
        r.violations(ty.kind, &mut structural);
        results.extend(structural.into_iter().map(err));

        if let Some(parent) = ty.parent.as_ref().and_then(|p| ctx.graph.atomic(p)) {
            let forbidden_above = |v| {
                parent_chain(ctx.graph, &parent.pid)
                    .unwrap_or_default()
                    .iter()
                    .filter_map(|p| ctx.graph.atomic(p))
                    .any(|a| {
                        a.restrictions
                            .forbidden_values
                            .as_ref()
                            .is_some_and(|f| f.contains(v))
                    })
            };
            for v in r.permitted_values.iter().flatten() {
                if forbidden_above(v) {
                    results.push(ValidationResult::warning(
                        RuleId::RestrictionConsistency,
                        &ty.pid,
                        format!("permitted value {} is forbidden by an ancestor and can never validate", v.text()),
                    ));
                }
            }
        }
        results
    }
}

pub struct CardinalityWellformedness;

impl Rule for CardinalityWellformedness {
    fn id(&self) -> RuleId {
        RuleId::CardinalityWellformedness
    }

    fn visits(&self) -> &'static [EntityKind] {
        &[EntityKind::Attribute, EntityKind::TypeProfile]
    }

    fn visit_attribute(&self, a: &Attribute, _ctx: &RuleContext) -> Vec<ValidationResult> {
        let c = a.cardinality;
        match c.upper() {
            Some(u) if u < c.lower() || u == 0 => vec![ValidationResult::error(
                RuleId::CardinalityWellformedness,
                &a.pid,
                format!("cardinality {c} is not a valid range"),
            )],
            _ => Vec::new(),
        }
    }

    fn visit_profile(&self, p: &TypeProfile, ctx: &RuleContext) -> Vec<ValidationResult> {
        let combinator = p.policy.combinator;
        if matches!(combinator, Combinator::All) {
            return Vec::new();
        }
        let Ok((effective, _)) = effective_attributes(ctx.graph, &p.pid) else {
            return Vec::new();
        };
        let mandatory: Vec<&Pid> = effective.mandatory().collect();
        match (combinator, mandatory.len()) {
            (_, 0) => Vec::new(),
            (Combinator::None, _) => vec![ValidationResult::warning(
                RuleId::CardinalityWellformedness,
                &p.pid,
                format!(
                    "policy None forbids every attribute, yet {} declare a lower bound of at least 1",
                    mandatory.len()
                ),
            )],
            _ => vec![ValidationResult::info(
                RuleId::CardinalityWellformedness,
                &p.pid,
                format!(
                    "lower bounds of {} attribute(s) are not enforced under this policy",
                    mandatory.len()
                ),
            )],
        }
    }
}

pub struct DefaultValueConformance;

impl Rule for DefaultValueConformance {
    fn id(&self) -> RuleId {
        RuleId::DefaultValueConformance
    }

    fn visits(&self) -> &'static [EntityKind] {
        &[EntityKind::Attribute]
    }

    fn visit_attribute(&self, a: &Attribute, ctx: &RuleContext) -> Vec<ValidationResult> {
        let Some(default) = &a.default_value else {
            return Vec::new();
        };
        if !ctx.graph.kind_of(&a.data_type).is_some_and(EntityKind::is_data_type) {
            return Vec::new();
        }
        validate_attribute_value(&a.pid, default, &a.data_type, a.cardinality, ctx.graph)
            .into_iter()
            .map(|r| {
                ValidationResult::error(
                    RuleId::DefaultValueConformance,
                    &a.pid,
                    format!("default value: {}", r.message),
                )
            })
            .collect()
    }
}

pub struct MappingCompatibility;

/// Slots a step target reads and writes.
fn target_slots(target: &StepTarget, graph: &Graph) -> Option<(Vec<Pid>, Vec<Pid>)> {
    match target {
        StepTarget::TechnologyInterface(p) => graph
            .interface(p)
            .map(|ti| (ti.inputs.clone(), ti.outputs.clone())),
        StepTarget::Operation(p) => graph
            .operation(p)
            .map(|op| (vec![op.executable_on.clone()], op.returns.clone())),
        StepTarget::Steps(_) => None,
    }
}

fn data_type_of(graph: &Graph, attribute: &Pid) -> Option<Pid> {
    graph.attribute(attribute).map(|a| a.data_type.clone())
}

/// True when every value of `kind` is accepted by the unrestricted chain
/// of `target`.
fn accepts_all(graph: &Graph, target: &Pid, kind: PrimitiveKind) -> bool {
    let Ok(chain) = parent_chain(graph, target) else {
        return false;
    };
    chain.iter().filter_map(|p| graph.atomic(p)).all(|a| {
        a.restrictions.is_unrestricted()
            && (a.kind == kind || (a.kind == PrimitiveKind::Number && kind == PrimitiveKind::Integer))
    })
}

impl MappingCompatibility {
    fn check_mapping(
        op: &Pid,
        path: &str,
        mapping: &AttributeMapping,
        ctx: &RuleContext,
        out: &mut Vec<ValidationResult>,
    ) {
        let g = ctx.graph;
        let err = |m: String| ValidationResult::error(RuleId::MappingCompatibility, op, format!("{path}: {m}"));
        let marker = mapping.effective_marker(ctx.marker);
        if let Some(template) = &mapping.template {
            if !template.contains(marker) {
                out.push(err(format!("template `{template}` does not contain the marker `{marker}`")));
            }
        }
        let Some(out_attr) = g.attribute(&mapping.output_attribute) else {
            return;
        };
        if mapping.template.is_some() {
            if let Some(ty) = g.atomic(&out_attr.data_type) {
                if ty.kind != PrimitiveKind::String {
                    out.push(err(format!(
                        "template produces a string but {} conforms to {} ({})",
                        out_attr.pid, ty.meta.name, ty.kind
                    )));
                }
            } else if g.profile(&out_attr.data_type).is_some() {
                out.push(err(format!(
                    "template produces a string but {} conforms to a type profile",
                    out_attr.pid
                )));
            }
        }
        if let Some(index) = mapping.index {
            let upper = match &mapping.input_attribute {
                Some(a) => g.attribute(a).and_then(|a| a.cardinality.upper()),
                None => mapping
                    .constant_value
                    .as_ref()
                    .map(|v| v.elements().len() as u64),
            };
            if let Some(u) = upper {
                if index >= u {
                    out.push(err(format!(
                        "index {index} exceeds the declared upper bound {u} of the input"
                    )));
                }
            }
        }
        if let Some(constant) = &mapping.constant_value {
            match mapping.transform(constant, ctx.marker) {
                Ok(value) => {
                    for r in validate_attribute_value(
                        &out_attr.pid,
                        &value,
                        &out_attr.data_type,
                        out_attr.cardinality,
                        g,
                    ) {
                        out.push(err(format!("constant value: {}", r.message)));
                    }
                }
                Err(e) => out.push(err(format!("constant value: {e}"))),
            }
            return;
        }
        let Some(input) = mapping.input_attribute.as_ref() else {
            return;
        };
        if mapping.template.is_some() {
            return;
        }
        let Some(in_type) = data_type_of(g, input) else {
            return;
        };
        let out_type = &out_attr.data_type;
        let up = is_subtype(g, &in_type, out_type);
        let down = is_subtype(g, out_type, &in_type);
        match (up, down) {
            (Ok(true), _) | (_, Ok(true)) => {}
            (Ok(false), Ok(false)) => {
                let in_kind = g.atomic(&in_type).map(|a| a.kind);
                if in_kind.is_some_and(|k| accepts_all(g, out_type, k)) {
                    out.push(ValidationResult::info(
                        RuleId::MappingCompatibility,
                        op,
                        format!("{path}: {input} is cast to the unrestricted type {out_type}"),
                    ));
                } else {
                    out.push(ValidationResult::warning(
                        RuleId::MappingCompatibility,
                        op,
                        format!(
                            "{path}: {in_type} and {out_type} are unrelated; values are cast and validated at execution"
                        ),
                    ));
                }
            }
            (Err(TypingError::KindMismatch(..)), _) => out.push(ValidationResult::warning(
                RuleId::MappingCompatibility,
                op,
                format!(
                    "{path}: {in_type} and {out_type} mix an atomic type and a profile; values are validated at execution"
                ),
            )),
            _ => {}
        }
        if let Some(in_attr) = g.attribute(input) {
            if in_attr.cardinality.permits_many()
                && mapping.index.is_none()
                && !out_attr.cardinality.permits_many()
            {
                out.push(ValidationResult::warning(
                    RuleId::MappingCompatibility,
                    op,
                    format!(
                        "{path}: multi-valued {input} feeds single-valued {} without an index",
                        out_attr.pid
                    ),
                ));
            }
        }
    }

    fn check_steps(
        op: &Pid,
        prefix: &str,
        steps: &[OperationStep],
        ctx: &RuleContext,
        out: &mut Vec<ValidationResult>,
    ) {
        for step in steps {
            let here = format!("{prefix}step {}", step.index);
            let slots = target_slots(&step.target, ctx.graph);
            for (i, m) in step.input_mappings.iter().enumerate() {
                let path = format!("{here} input mapping {i}");
                if let Some((inputs, _)) = &slots {
                    if !inputs.contains(&m.output_attribute) {
                        out.push(ValidationResult::error(
                            RuleId::MappingCompatibility,
                            op,
                            format!("{path}: {} is not an input of the step target", m.output_attribute),
                        ));
                    }
                }
                Self::check_mapping(op, &path, m, ctx, out);
            }
            for (i, m) in step.output_mappings.iter().enumerate() {
                let path = format!("{here} output mapping {i}");
                if let (Some((_, outputs)), Some(source)) = (&slots, &m.input_attribute) {
                    if !outputs.contains(source) {
                        out.push(ValidationResult::error(
                            RuleId::MappingCompatibility,
                            op,
                            format!("{path}: {source} is not an output of the step target"),
                        ));
                    }
                }
                Self::check_mapping(op, &path, m, ctx, out);
            }
            if let StepTarget::Steps(inner) = &step.target {
                Self::check_steps(op, &format!("{here} / "), inner, ctx, out);
            }
        }
    }
}

impl Rule for MappingCompatibility {
    fn id(&self) -> RuleId {
        RuleId::MappingCompatibility
    }

    fn visits(&self) -> &'static [EntityKind] {
        &[EntityKind::Operation]
    }

    fn visit_operation(&self, op: &Operation, ctx: &RuleContext) -> Vec<ValidationResult> {
        let mut out = Vec::new();
        Self::check_steps(&op.pid, "", &op.steps, ctx, &mut out);
        out
    }
}

pub struct InheritanceConflict;

impl Rule for InheritanceConflict {
    fn id(&self) -> RuleId {
        RuleId::InheritanceConflict
    }

    fn visits(&self) -> &'static [EntityKind] {
        &[EntityKind::AtomicDataType, EntityKind::TypeProfile]
    }

    fn visit_atomic(&self, ty: &AtomicDataType, ctx: &RuleContext) -> Vec<ValidationResult> {
        match ty.parent.as_ref().and_then(|p| ctx.graph.atomic(p)) {
            Some(parent) if parent.kind != ty.kind => vec![ValidationResult::error(
                RuleId::InheritanceConflict,
                &ty.pid,
                format!(
                    "{} kind {} differs from parent {} kind {}",
                    ty.meta.name, ty.kind, parent.meta.name, parent.kind
                ),
            )],
            _ => Vec::new(),
        }
    }

    fn visit_profile(&self, p: &TypeProfile, ctx: &RuleContext) -> Vec<ValidationResult> {
        match effective_attributes(ctx.graph, &p.pid) {
            Ok((_, diagnostics)) => diagnostics,
            Err(_) => Vec::new(),
        }
    }
}
