//! Rule-based semantic validation.
//!
//! Each rule is a visitor that only sees the entity kinds it declares. Rules
//! are pure functions of the entity and an immutable graph, so their outputs
//! concatenate in rule-set order.

mod record;
pub mod rules;
mod value;

use std::sync::Arc;

use crate::diagnostics::{RuleId, ValidationResult};
use crate::graph::Graph;
use crate::model::{
    AtomicDataType, Attribute, Entity, EntityKind, Operation, TechnologyInterface, TypeProfile,
    DEFAULT_MARKER,
};

pub use record::{validate_attribute_value, validate_data_value, validate_record};
pub use value::{check_level, validate_value};

/// What a rule may consult besides the entity itself.
pub struct RuleContext<'a> {
    pub graph: &'a Graph,
    /// Template marker used when a mapping does not name its own.
    pub marker: &'a str,
}

pub trait Rule: Send + Sync {
    fn id(&self) -> RuleId;

    fn visits(&self) -> &'static [EntityKind];

    fn visit_entity(&self, entity: &Entity, ctx: &RuleContext) -> Vec<ValidationResult> {
        match entity {
            Entity::AtomicDataType(e) => self.visit_atomic(e, ctx),
            Entity::TypeProfile(e) => self.visit_profile(e, ctx),
            Entity::Attribute(e) => self.visit_attribute(e, ctx),
            Entity::TechnologyInterface(e) => self.visit_interface(e, ctx),
            Entity::Operation(e) => self.visit_operation(e, ctx),
        }
    }

    fn visit_atomic(&self, _: &AtomicDataType, _: &RuleContext) -> Vec<ValidationResult> {
        Vec::new()
    }

    fn visit_profile(&self, _: &TypeProfile, _: &RuleContext) -> Vec<ValidationResult> {
        Vec::new()
    }

    fn visit_attribute(&self, _: &Attribute, _: &RuleContext) -> Vec<ValidationResult> {
        Vec::new()
    }

    fn visit_interface(&self, _: &TechnologyInterface, _: &RuleContext) -> Vec<ValidationResult> {
        Vec::new()
    }

    fn visit_operation(&self, _: &Operation, _: &RuleContext) -> Vec<ValidationResult> {
        Vec::new()
    }
}

/// Ordered collection of rules with unique identifiers.
#[derive(Clone)]
pub struct RuleSet {
    rules: Vec<Arc<dyn Rule>>,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet {
            rules: vec![
                Arc::new(rules::Acyclicity),
                Arc::new(rules::ReferentialIntegrity),
                Arc::new(rules::RestrictionConsistency),
                Arc::new(rules::CardinalityWellformedness),
                Arc::new(rules::DefaultValueConformance),
                Arc::new(rules::MappingCompatibility),
                Arc::new(rules::InheritanceConflict),
            ],
        }
    }
}

impl RuleSet {
    pub fn empty() -> Self {
        RuleSet { rules: Vec::new() }
    }

    /// Appends a rule; a rule with an identifier already present replaces it
    /// in place.
    pub fn with(mut self, rule: Arc<dyn Rule>) -> Self {
        match self.rules.iter().position(|r| r.id() == rule.id()) {
            Some(i) => self.rules[i] = rule,
            None => self.rules.push(rule),
        }
        self
    }

    pub fn without(mut self, id: RuleId) -> Self {
        self.rules.retain(|r| r.id() != id);
        self
    }

    pub fn ids(&self) -> Vec<RuleId> {
        self.rules.iter().map(|r| r.id()).collect()
    }

    pub fn rules(&self) -> impl Iterator<Item = &Arc<dyn Rule>> {
        self.rules.iter()
    }
}

impl std::fmt::Debug for RuleSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.ids()).finish()
    }
}

#[derive(Debug, Clone)]
pub struct Validator {
    pub rules: RuleSet,
    pub marker: String,
}

impl Default for Validator {
    fn default() -> Self {
        Validator {
            rules: RuleSet::default(),
            marker: DEFAULT_MARKER.to_owned(),
        }
    }
}

impl Validator {
    pub fn new(rules: RuleSet, marker: impl Into<String>) -> Self {
        Validator {
            rules,
            marker: marker.into(),
        }
    }

    /// Runs every applicable rule against `entity`, viewed as part of
    /// `graph`. If the graph holds a different version of the entity (or
    /// none), the check runs against a copy with the entity in place.
    pub fn validate_entity(&self, entity: &Entity, graph: &Graph) -> Vec<ValidationResult> {
        if graph.get(entity.pid()) == Some(entity) {
            return self.run(entity, graph);
        }
        let mut view = graph.clone();
        view.upsert(entity.clone());
        self.run(entity, &view)
    }

    fn run(&self, entity: &Entity, graph: &Graph) -> Vec<ValidationResult> {
        let ctx = RuleContext {
            graph,
            marker: &self.marker,
        };
        let kind = entity.kind();
        ValidationResult::combine(
            self.rules
                .rules()
                .filter(|r| r.visits().contains(&kind))
                .map(|r| r.visit_entity(entity, &ctx)),
        )
    }
}

/// Validates with the default rule set and marker.
pub fn validate_entity(entity: &Entity, graph: &Graph) -> Vec<ValidationResult> {
    Validator::default().validate_entity(entity, graph)
}

#[cfg(test)]
mod tests;
