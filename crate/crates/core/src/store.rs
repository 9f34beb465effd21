//! Validated, versioned entity store over a [`Graph`].
//!
//! Readers take an `Arc<Graph>` and never block writers. A write builds the
//! next graph on the side, validates it, and publishes it with a pointer
//! swap, so a rejected write leaves no trace.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use thiserror::Error;

use crate::diagnostics::{has_errors, RuleId, ValidationResult};
use crate::graph::{Direction, EdgeLabel, Graph, GraphSnapshot, SnapshotError};
use crate::model::{Entity, Timestamp};
use crate::pid::{Pid, PidError, PidMinter};
use crate::validation::rules::ReferentialIntegrity;
use crate::validation::{Rule, RuleContext, Validator};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("entity {0} not found")]
    NotFound(Pid),
    #[error("entity {pid} is still referenced by {}", list(.referrers))]
    Conflict { pid: Pid, referrers: Vec<Pid> },
    #[error("entity rejected with {} error(s)", .0.iter().filter(|r| r.is_error()).count())]
    Rejected(Vec<ValidationResult>),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

fn list(pids: &[Pid]) -> String {
    pids.iter().map(Pid::as_str).collect::<Vec<_>>().join(", ")
}

/// What a successful write did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PutOutcome {
    pub pid: Pid,
    pub version: u64,
    pub created: bool,
    /// False when the stored entity already had identical content.
    pub changed: bool,
    /// Warnings and infos; errors would have rejected the write.
    pub diagnostics: Vec<ValidationResult>,
}

type Clock = Box<dyn Fn() -> Timestamp + Send + Sync>;

pub struct GraphStore {
    current: RwLock<Arc<Graph>>,
    writer: Mutex<()>,
    minter: Mutex<PidMinter>,
    validator: Validator,
    clock: Clock,
}

impl Default for GraphStore {
    fn default() -> Self {
        Self::new(Validator::default())
    }
}

impl GraphStore {
    pub fn new(validator: Validator) -> Self {
        GraphStore {
            current: RwLock::new(Arc::new(Graph::new())),
            writer: Mutex::new(()),
            minter: Mutex::new(PidMinter::default()),
            validator,
            clock: Box::new(Timestamp::now),
        }
    }

    pub fn with_clock(mut self, clock: impl Fn() -> Timestamp + Send + Sync + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn validator(&self) -> &Validator {
        &self.validator
    }

    /// The current consistent version of the graph.
    pub fn graph(&self) -> Arc<Graph> {
        self.current.read().expect("store lock poisoned").clone()
    }

    pub fn get_entity(&self, pid: &Pid) -> Result<Entity, StoreError> {
        self.graph()
            .get(pid)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(pid.clone()))
    }

    /// A fresh PID under `prefix` that is not in use.
    pub fn mint(&self, prefix: &str) -> Result<Pid, PidError> {
        let graph = self.graph();
        let mut minter = self.minter.lock().expect("minter lock poisoned");
        loop {
            let pid = minter.mint(prefix)?;
            if !graph.contains(&pid) {
                return Ok(pid);
            }
        }
    }

    pub fn put_entity(&self, entity: Entity) -> Result<PutOutcome, StoreError> {
        let mut outcomes = self.put_all(vec![entity])?;
        Ok(outcomes.remove(0))
    }

    /// Writes several entities as one atomic change. References among the
    /// batch may point in any direction.
    pub fn put_all(&self, entities: Vec<Entity>) -> Result<Vec<PutOutcome>, StoreError> {
        let _guard = self.writer.lock().expect("writer lock poisoned");
        let base = self.graph();
        let now = (self.clock)();

        let mut results = Vec::new();
        let mut seen = BTreeSet::new();
        for entity in &entities {
            if !seen.insert(entity.pid().clone()) {
                results.push(ValidationResult::error(
                    RuleId::Structure,
                    entity.pid(),
                    "entity appears more than once in the batch",
                ));
            }
            for v in entity.structural_violations() {
                results.push(ValidationResult::error(RuleId::Structure, entity.pid(), v));
            }
        }
        if has_errors(&results) {
            return Err(StoreError::Rejected(results));
        }

        let mut next = (*base).clone();
        let mut outcomes = Vec::new();
        let mut touched = Vec::new();
        for mut entity in entities {
            let pid = entity.pid().clone();
            let previous = base.get(&pid);
            let (created, changed) = match previous {
                Some(old) if old.same_content(&entity) => {
                    entity = old.clone();
                    (false, false)
                }
                Some(old) => {
                    let meta = entity.meta_mut();
                    meta.created = old.meta().created.or(Some(now));
                    meta.modified = Some(now);
                    meta.version = old.meta().version + 1;
                    (false, true)
                }
                None => {
                    let meta = entity.meta_mut();
                    let created = *meta.created.get_or_insert(now);
                    meta.modified.get_or_insert(created);
                    if meta.version == 0 {
                        meta.version = 1;
                    }
                    (true, true)
                }
            };
            outcomes.push(PutOutcome {
                pid: pid.clone(),
                version: entity.meta().version,
                created,
                changed,
                diagnostics: Vec::new(),
            });
            if changed {
                next.upsert(entity);
                touched.push(pid);
            }
        }
        if touched.is_empty() {
            return Ok(outcomes);
        }

        for (outcome, pid) in outcomes.iter_mut().filter(|o| o.changed).zip(&touched) {
            let entity = next.get(pid).expect("just inserted");
            let own = self.check(entity, &next);
            results.extend(own.iter().filter(|r| r.is_error()).cloned());
            outcome.diagnostics = own.into_iter().filter(|r| !r.is_error()).collect();
        }
        let mut dependents = BTreeSet::new();
        for pid in &touched {
            dependents.extend(next.closure(pid, &EdgeLabel::ALL, Direction::In));
        }
        for pid in dependents.iter().filter(|p| !touched.contains(p)) {
            let entity = next.get(pid).expect("closure stays inside the graph");
            results.extend(self.check(entity, &next).into_iter().filter(|r| r.is_error()));
        }
        if has_errors(&results) {
            return Err(StoreError::Rejected(results));
        }
        self.publish(next);
        Ok(outcomes)
    }

    fn check(&self, entity: &Entity, graph: &Graph) -> Vec<ValidationResult> {
        let mut results = self.validator.validate_entity(entity, graph);
        // dangling edges are never admitted, whatever the configured rules
        if !self.validator.rules.ids().contains(&RuleId::ReferentialIntegrity) {
            let ctx = RuleContext {
                graph,
                marker: &self.validator.marker,
            };
            results.extend(ReferentialIntegrity.visit_entity(entity, &ctx));
        }
        results
    }

    pub fn delete_entity(&self, pid: &Pid) -> Result<Entity, StoreError> {
        let _guard = self.writer.lock().expect("writer lock poisoned");
        let base = self.graph();
        if !base.contains(pid) {
            return Err(StoreError::NotFound(pid.clone()));
        }
        let referrers: Vec<Pid> = base.referrers(pid).into_iter().filter(|r| r != pid).collect();
        if !referrers.is_empty() {
            return Err(StoreError::Conflict {
                pid: pid.clone(),
                referrers,
            });
        }
        let mut next = (*base).clone();
        let removed = next.remove(pid).expect("checked above");
        self.publish(next);
        Ok(removed)
    }

    fn publish(&self, graph: Graph) {
        debug_assert!(
            graph.integrity_violations().is_empty(),
            "{:?}",
            graph.integrity_violations()
        );
        *self.current.write().expect("store lock poisoned") = Arc::new(graph);
    }

    pub fn save_snapshot(&self, path: &Path) -> Result<(), StoreError> {
        GraphSnapshot::of(&self.graph()).save(path)?;
        Ok(())
    }

    /// Replaces the store contents with a snapshot file.
    pub fn load_snapshot(&self, path: &Path) -> Result<(), StoreError> {
        let graph = GraphSnapshot::load(path)?.into_graph()?;
        self.replace(graph);
        Ok(())
    }

    pub fn replace(&self, graph: Graph) {
        let _guard = self.writer.lock().expect("writer lock poisoned");
        {
            let mut minter = self.minter.lock().expect("minter lock poisoned");
            for entity in graph.entities() {
                minter.reserve(entity.pid());
            }
        }
        self.publish(graph);
    }
}
