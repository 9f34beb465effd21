//! Labeled property graph over model entities.
//!
//! Nodes are entities keyed by PID; edges are derived from the reference
//! fields of each entity and carry an [`EdgeLabel`]. A [`Graph`] is an
//! immutable value once published by the store, so queries need no locking.

pub mod cycles;
mod snapshot;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AtomicDataType, Attribute, Entity, EntityKind, Operation, StepTarget, TechnologyInterface,
    TypeProfile,
};
use crate::pid::Pid;

pub use snapshot::{GraphSnapshot, SnapshotError, SNAPSHOT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EdgeLabel {
    InheritsFrom,
    HasAttribute,
    ConformsTo,
    ExecutableOn,
    ReturnsAttribute,
    HasStepTarget,
    MapsInput,
    MapsOutput,
    ReferencesAdapter,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 9] = [
        EdgeLabel::InheritsFrom,
        EdgeLabel::HasAttribute,
        EdgeLabel::ConformsTo,
        EdgeLabel::ExecutableOn,
        EdgeLabel::ReturnsAttribute,
        EdgeLabel::HasStepTarget,
        EdgeLabel::MapsInput,
        EdgeLabel::MapsOutput,
        EdgeLabel::ReferencesAdapter,
    ];

    /// Adapter records live outside the registry; edges with this label
    /// point at identifiers that are not nodes.
    pub fn targets_external(self) -> bool {
        self == EdgeLabel::ReferencesAdapter
    }

    /// Whether an edge with this label may connect entities of these kinds.
    pub fn accepts(self, from: EntityKind, to: Option<EntityKind>) -> bool {
        use EntityKind::*;
        match (self, from, to) {
            (EdgeLabel::InheritsFrom, AtomicDataType, Some(AtomicDataType)) => true,
            (EdgeLabel::InheritsFrom, TypeProfile, Some(TypeProfile)) => true,
            (EdgeLabel::HasAttribute, TypeProfile, Some(Attribute)) => true,
            (EdgeLabel::ConformsTo, Attribute, Some(k)) => k.is_data_type(),
            (EdgeLabel::ExecutableOn | EdgeLabel::ReturnsAttribute, Operation, Some(Attribute)) => {
                true
            }
            (EdgeLabel::HasStepTarget, Operation, Some(TechnologyInterface | Operation)) => true,
            (
                EdgeLabel::MapsInput | EdgeLabel::MapsOutput,
                TechnologyInterface | Operation,
                Some(Attribute),
            ) => true,
            (EdgeLabel::ReferencesAdapter, TechnologyInterface, None) => true,
            _ => false,
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        f.write_str(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("entity {0} not found")]
    NotFound(Pid),
}

/// Reference edges implied by an entity's fields, in field order, without
/// duplicates.
pub fn derive_edges(entity: &Entity) -> Vec<(EdgeLabel, Pid)> {
    let mut out: Vec<(EdgeLabel, Pid)> = Vec::new();
    let mut push = |label: EdgeLabel, pid: &Pid| {
        if !out.iter().any(|(l, p)| *l == label && p == pid) {
            out.push((label, pid.clone()));
        }
    };
    match entity {
        Entity::AtomicDataType(AtomicDataType { parent, .. }) => {
            if let Some(parent) = parent {
                push(EdgeLabel::InheritsFrom, parent);
            }
        }
        Entity::TypeProfile(TypeProfile {
            attributes,
            parents,
            ..
        }) => {
            parents
                .iter()
                .for_each(|p| push(EdgeLabel::InheritsFrom, p));
            attributes
                .iter()
                .for_each(|a| push(EdgeLabel::HasAttribute, a));
        }
        Entity::Attribute(Attribute { data_type, .. }) => push(EdgeLabel::ConformsTo, data_type),
        Entity::TechnologyInterface(TechnologyInterface {
            inputs,
            outputs,
            adapters,
            ..
        }) => {
            inputs.iter().for_each(|a| push(EdgeLabel::MapsInput, a));
            outputs.iter().for_each(|a| push(EdgeLabel::MapsOutput, a));
            adapters
                .iter()
                .for_each(|a| push(EdgeLabel::ReferencesAdapter, a));
        }
        Entity::Operation(op) => {
            let Operation {
                executable_on,
                returns,
                ..
            } = op;
            push(EdgeLabel::ExecutableOn, executable_on);
            returns
                .iter()
                .for_each(|a| push(EdgeLabel::ReturnsAttribute, a));
            for target in op.referenced_targets() {
                match target {
                    StepTarget::TechnologyInterface(p) | StepTarget::Operation(p) => {
                        push(EdgeLabel::HasStepTarget, p)
                    }
                    StepTarget::Steps(_) => {}
                }
            }
            for mapping in op.all_mappings() {
                if let Some(input) = &mapping.input_attribute {
                    push(EdgeLabel::MapsInput, input);
                }
                push(EdgeLabel::MapsOutput, &mapping.output_attribute);
            }
        }
    }
    out
}

/// One consistent version of the registry contents.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: BTreeMap<Pid, Arc<Entity>>,
    out_edges: BTreeMap<Pid, Vec<(EdgeLabel, Pid)>>,
    in_edges: BTreeMap<Pid, Vec<(EdgeLabel, Pid)>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from entities in the given order.
    pub fn from_entities(entities: impl IntoIterator<Item = Entity>) -> Self {
        let mut graph = Graph::new();
        for entity in entities {
            graph.upsert(entity);
        }
        graph
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, pid: &Pid) -> bool {
        self.nodes.contains_key(pid)
    }

    pub fn get(&self, pid: &Pid) -> Option<&Entity> {
        self.nodes.get(pid).map(Arc::as_ref)
    }

    pub fn kind_of(&self, pid: &Pid) -> Option<EntityKind> {
        self.get(pid).map(Entity::kind)
    }

    pub fn atomic(&self, pid: &Pid) -> Option<&AtomicDataType> {
        self.get(pid).and_then(Entity::as_atomic)
    }

    pub fn profile(&self, pid: &Pid) -> Option<&TypeProfile> {
        self.get(pid).and_then(Entity::as_profile)
    }

    pub fn attribute(&self, pid: &Pid) -> Option<&Attribute> {
        self.get(pid).and_then(Entity::as_attribute)
    }

    pub fn interface(&self, pid: &Pid) -> Option<&TechnologyInterface> {
        self.get(pid).and_then(Entity::as_interface)
    }

    pub fn operation(&self, pid: &Pid) -> Option<&Operation> {
        self.get(pid).and_then(Entity::as_operation)
    }

    /// Entities in PID order.
    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.nodes.values().map(Arc::as_ref)
    }

    pub fn entities_of(&self, kind: EntityKind) -> impl Iterator<Item = &Entity> {
        self.entities().filter(move |e| e.kind() == kind)
    }

    pub fn attributes(&self) -> impl Iterator<Item = &Attribute> {
        self.entities().filter_map(Entity::as_attribute)
    }

    pub fn operations(&self) -> impl Iterator<Item = &Operation> {
        self.entities().filter_map(Entity::as_operation)
    }

    /// All edges, grouped by source PID, in derivation order.
    pub fn edges(&self) -> impl Iterator<Item = (&Pid, EdgeLabel, &Pid)> {
        self.out_edges
            .iter()
            .flat_map(|(from, list)| list.iter().map(move |(l, to)| (from, *l, to)))
    }

    pub fn out_edges(&self, pid: &Pid) -> &[(EdgeLabel, Pid)] {
        self.out_edges.get(pid).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn in_edges(&self, pid: &Pid) -> &[(EdgeLabel, Pid)] {
        self.in_edges.get(pid).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn neighbors(
        &self,
        pid: &Pid,
        label: EdgeLabel,
        direction: Direction,
    ) -> Result<Vec<Pid>, GraphError> {
        if !self.contains(pid) {
            return Err(GraphError::NotFound(pid.clone()));
        }
        Ok(self.adjacent(pid, &[label], direction).cloned().collect())
    }

    fn adjacent<'a>(
        &'a self,
        pid: &Pid,
        labels: &'a [EdgeLabel],
        direction: Direction,
    ) -> impl Iterator<Item = &'a Pid> + 'a {
        let list = match direction {
            Direction::Out => self.out_edges(pid),
            Direction::In => self.in_edges(pid),
        };
        list.iter()
            .filter(move |(l, _)| labels.contains(l))
            .map(|(_, p)| p)
    }

    /// Distinct entities with an edge pointing at `pid`, excluding `pid`.
    pub fn referrers(&self, pid: &Pid) -> Vec<Pid> {
        let mut seen = BTreeSet::new();
        self.in_edges(pid)
            .iter()
            .filter(|(_, from)| from != pid && seen.insert(from.clone()))
            .map(|(_, from)| from.clone())
            .collect()
    }

    /// True iff a directed path of length at least one, using only `label`
    /// edges, leads from `from` to `to`.
    pub fn reachable(&self, from: &Pid, to: &Pid, label: EdgeLabel) -> Result<bool, GraphError> {
        for pid in [from, to] {
            if !self.contains(pid) {
                return Err(GraphError::NotFound(pid.clone()));
            }
        }
        Ok(self.path_exists(from, to, &[label]))
    }

    pub(crate) fn path_exists(&self, from: &Pid, to: &Pid, labels: &[EdgeLabel]) -> bool {
        self.path_between(from, to, labels).is_some()
    }

    /// Shortest path `from, ..., to` (length >= 1) over `labels`.
    pub fn path_between(&self, from: &Pid, to: &Pid, labels: &[EdgeLabel]) -> Option<Vec<Pid>> {
        let mut parent: BTreeMap<&Pid, &Pid> = BTreeMap::new();
        let mut queue: VecDeque<&Pid> = VecDeque::new();
        queue.push_back(from);
        let mut seen: BTreeSet<&Pid> = BTreeSet::new();
        while let Some(current) = queue.pop_front() {
            for next in self.adjacent(current, labels, Direction::Out) {
                if next == to {
                    let mut path = vec![to.clone()];
                    let mut cursor = current;
                    path.push(cursor.clone());
                    while let Some(p) = parent.get(cursor) {
                        cursor = p;
                        path.push(cursor.clone());
                    }
                    path.reverse();
                    return Some(path);
                }
                if seen.insert(next) {
                    parent.insert(next, current);
                    queue.push_back(next);
                }
            }
        }
        None
    }

    /// Transitive closure from `pid` (excluding `pid` unless on a cycle), in
    /// breadth-first discovery order.
    pub fn closure(&self, pid: &Pid, labels: &[EdgeLabel], direction: Direction) -> Vec<Pid> {
        let mut seen: BTreeSet<&Pid> = BTreeSet::new();
        let mut order = Vec::new();
        let mut queue: VecDeque<&Pid> = VecDeque::from([pid]);
        while let Some(current) = queue.pop_front() {
            for next in self.adjacent(current, labels, direction) {
                if seen.insert(next) {
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        order
    }

    /// Every elementary cycle whose edges all carry one of `labels`, each
    /// rotated to start at its smallest PID, sorted.
    pub fn find_cycles(&self, labels: &[EdgeLabel]) -> Vec<Vec<Pid>> {
        let index: BTreeMap<&Pid, usize> =
            self.nodes.keys().enumerate().map(|(i, p)| (p, i)).collect();
        let pids: Vec<&Pid> = self.nodes.keys().collect();
        let adj: Vec<Vec<usize>> = pids
            .iter()
            .map(|pid| {
                let mut targets: Vec<usize> = self
                    .adjacent(pid, labels, Direction::Out)
                    .filter_map(|p| index.get(p).copied())
                    .collect();
                targets.sort_unstable();
                targets.dedup();
                targets
            })
            .collect();
        let mut found: Vec<Vec<Pid>> = cycles::elementary_cycles(&adj)
            .into_iter()
            .map(|c| c.into_iter().map(|i| pids[i].clone()).collect())
            .collect();
        found.sort();
        found
    }

    /// Inserts or replaces an entity and its derived edges. No validation.
    pub(crate) fn upsert(&mut self, entity: Entity) {
        let pid = entity.pid().clone();
        self.detach_out_edges(&pid);
        let edges = derive_edges(&entity);
        for (label, to) in &edges {
            self.in_edges
                .entry(to.clone())
                .or_default()
                .push((*label, pid.clone()));
        }
        self.out_edges.insert(pid.clone(), edges);
        self.nodes.insert(pid, Arc::new(entity));
    }

    pub(crate) fn remove(&mut self, pid: &Pid) -> Option<Entity> {
        let removed = self.nodes.remove(pid)?;
        self.detach_out_edges(pid);
        self.out_edges.remove(pid);
        if self.in_edges.get(pid).is_some_and(Vec::is_empty) {
            self.in_edges.remove(pid);
        }
        Some(Arc::unwrap_or_clone(removed))
    }

    fn detach_out_edges(&mut self, pid: &Pid) {
        if let Some(old) = self.out_edges.get(pid) {
            for (label, to) in old {
                if let Some(list) = self.in_edges.get_mut(to) {
                    if let Some(pos) = list.iter().position(|(l, f)| l == label && f == pid) {
                        list.remove(pos);
                    }
                    if list.is_empty() {
                        self.in_edges.remove(to);
                    }
                }
            }
        }
    }

    /// Edges whose endpoints are missing or whose kinds do not match the
    /// label signature.
    pub fn integrity_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (from, label, to) in self.edges() {
            let Some(from_kind) = self.kind_of(from) else {
                out.push(format!("edge source {from} is missing"));
                continue;
            };
            let to_kind = if label.targets_external() {
                None
            } else {
                match self.kind_of(to) {
                    Some(kind) => Some(kind),
                    None => {
                        out.push(format!("{from} -{label}-> {to}: target is missing"));
                        continue;
                    }
                }
            };
            if !label.accepts(from_kind, to_kind) {
                out.push(format!(
                    "{from} -{label}-> {to}: label does not connect {from_kind} to {}",
                    to_kind.map(|k| k.to_string()).unwrap_or("an external record".into())
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomicDataType, PrimitiveKind};

    fn pid(s: &str) -> Pid {
        Pid::parse(&format!("t/{s}")).unwrap()
    }

    fn atomic(name: &str, parent: Option<&str>) -> Entity {
        let mut t = AtomicDataType::new(pid(name), name, PrimitiveKind::String);
        t.parent = parent.map(pid);
        t.into()
    }

    fn chain() -> Graph {
        Graph::from_entities([
            atomic("c", None),
            atomic("b", Some("c")),
            atomic("a", Some("b")),
        ])
    }

    #[test]
    fn neighbors_both_directions() {
        let g = Graph::from_entities([atomic("url", None), atomic("orcid-url", Some("url"))]);
        let out = g
            .neighbors(&pid("orcid-url"), EdgeLabel::InheritsFrom, Direction::Out)
            .unwrap();
        assert_eq!(out, vec![pid("url")]);
        let inbound = g
            .neighbors(&pid("url"), EdgeLabel::InheritsFrom, Direction::In)
            .unwrap();
        assert_eq!(inbound, vec![pid("orcid-url")]);
        assert!(g
            .neighbors(&pid("url"), EdgeLabel::HasAttribute, Direction::Out)
            .unwrap()
            .is_empty());
        assert!(g
            .neighbors(&pid("nope"), EdgeLabel::InheritsFrom, Direction::Out)
            .is_err());
    }

    #[test]
    fn reachability() {
        let g = chain();
        let l = EdgeLabel::InheritsFrom;
        assert!(g.reachable(&pid("a"), &pid("c"), l).unwrap());
        assert!(!g.reachable(&pid("c"), &pid("a"), l).unwrap());
        assert!(!g.reachable(&pid("a"), &pid("a"), l).unwrap());
        assert_eq!(
            g.closure(&pid("a"), &[l], Direction::Out),
            vec![pid("b"), pid("c")]
        );
    }

    #[test]
    fn cycles_rotated() {
        let g = Graph::from_entities([atomic("b", Some("a")), atomic("a", Some("b"))]);
        assert_eq!(
            g.find_cycles(&[EdgeLabel::InheritsFrom]),
            vec![vec![pid("a"), pid("b")]]
        );
        assert!(g.find_cycles(&[EdgeLabel::HasAttribute]).is_empty());
    }

    #[test]
    fn upsert_replaces_edges() {
        let mut g = chain();
        g.upsert(atomic("a", Some("c")));
        assert_eq!(g.referrers(&pid("b")), Vec::<Pid>::new());
        assert_eq!(g.referrers(&pid("c")), vec![pid("b"), pid("a")]);
        g.remove(&pid("a"));
        assert_eq!(g.referrers(&pid("c")), vec![pid("b")]);
        assert!(g.integrity_violations().is_empty());
    }

    #[test]
    fn integrity_catches_dangling() {
        let g = Graph::from_entities([atomic("a", Some("ghost"))]);
        assert_eq!(g.integrity_violations().len(), 1);
    }
}
