//! Request handling independent of any transport.
//!
//! [`Service::handle`] maps `(method, path, body)` to a status code and a
//! JSON body. The HTTP server and the CLI both go through the query methods
//! here, so they return the same payloads.

use std::path::PathBuf;
use std::sync::Mutex;

use percent_encoding::percent_decode_str;
use serde::Deserialize;
use serde_json::json;

use crate::codec::{self, to_canonical, CodecError};
use crate::diagnostics::{diagnostic_document, has_errors, ValidationResult};
use crate::graph::Graph;
use crate::model::{Entity, EntityKind, InformationRecord, Value};
use crate::operations::{
    operations_for_attribute, operations_for_datatype, operations_for_record, plan, AdapterRegistry,
    ExecError, Executor, MappingError, PlanError,
};
use crate::pid::Pid;
use crate::store::{GraphStore, StoreError};
use crate::typing::{self, TypingError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: String,
    /// The body is a diagnostic document rather than data.
    pub diagnostic: bool,
    /// Non-blocking diagnostics of an accepted write. Not part of the body.
    pub warnings: Vec<ValidationResult>,
}

impl Response {
    pub fn new(status: u16, body: String) -> Self {
        Response {
            status,
            body,
            diagnostic: false,
            warnings: Vec::new(),
        }
    }

    fn ok(body: String) -> Self {
        Self::new(200, body)
    }

    fn json(status: u16, value: &impl serde::Serialize) -> Self {
        match to_canonical(value) {
            Ok(body) => Self::new(status, body),
            Err(e) => Self::error(500, e.to_string()),
        }
    }

    pub fn error(status: u16, message: impl Into<String>) -> Self {
        let body = serde_json::to_string(&json!({ "error": message.into() })).unwrap_or_default();
        Self::new(status, body)
    }

    fn diagnostics(status: u16, results: &[ValidationResult]) -> Self {
        Response {
            diagnostic: true,
            ..Self::new(status, diagnostic_document(results))
        }
    }

    fn with_warnings(mut self, warnings: Vec<ValidationResult>) -> Self {
        self.warnings = warnings;
        self
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }
}

impl From<StoreError> for Response {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) => Response::error(404, e.to_string()),
            StoreError::Conflict { ref referrers, .. } => Response::json(
                409,
                &json!({ "error": e.to_string(), "referrers": referrers }),
            ),
            StoreError::Rejected(results) => Response::diagnostics(422, &results),
            StoreError::Snapshot(_) => Response::error(500, e.to_string()),
        }
    }
}

impl From<CodecError> for Response {
    fn from(e: CodecError) -> Self {
        Response::error(400, e.to_string())
    }
}

impl From<TypingError> for Response {
    fn from(e: TypingError) -> Self {
        match e {
            TypingError::NotFound(_) => Response::error(404, e.to_string()),
            TypingError::WrongKind { .. } => Response::error(400, e.to_string()),
            _ => Response::error(422, e.to_string()),
        }
    }
}

impl From<PlanError> for Response {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::NotFound(_) => Response::error(404, e.to_string()),
            _ => Response::error(422, e.to_string()),
        }
    }
}

impl From<ExecError> for Response {
    fn from(e: ExecError) -> Self {
        match e {
            ExecError::NotFound(_) => Response::error(404, e.to_string()),
            ExecError::Plan(p) => p.into(),
            ExecError::InvalidInput { results, .. }
            | ExecError::Mapping(MappingError::Invalid { results, .. }) => {
                Response::diagnostics(422, &results)
            }
            other => Response::error(422, other.to_string()),
        }
    }
}

type Reply = Result<Response, Response>;

fn parse_pid(text: &str) -> Result<Pid, Response> {
    let decoded = percent_decode_str(text).decode_utf8_lossy();
    Pid::parse(&decoded).map_err(|e| Response::error(400, e.to_string()))
}

fn parse_json<T: serde::de::DeserializeOwned>(body: &str) -> Result<T, Response> {
    serde_json::from_str(body).map_err(|e| Response::error(400, format!("malformed body: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordRequest {
    record: InformationRecord,
    profile: Option<Pid>,
}

/// Store plus adapters plus the settings that shape responses.
pub struct Service {
    store: GraphStore,
    adapters: AdapterRegistry,
    marker: String,
    prefix: String,
    persist: Option<(PathBuf, Mutex<()>)>,
}

impl Service {
    pub fn new(store: GraphStore, adapters: AdapterRegistry) -> Self {
        let marker = store.validator().marker.clone();
        Service {
            store,
            adapters,
            marker,
            prefix: "local".into(),
            persist: None,
        }
    }

    pub fn with_prefix(mut self, prefix: impl Into<String>) -> Self {
        self.prefix = prefix.into();
        self
    }

    /// Saves a snapshot to `path` after every accepted change.
    pub fn persist_to(mut self, path: impl Into<PathBuf>) -> Self {
        self.persist = Some((path.into(), Mutex::new(())));
        self
    }

    pub fn store(&self) -> &GraphStore {
        &self.store
    }

    pub fn adapters(&self) -> &AdapterRegistry {
        &self.adapters
    }

    fn graph(&self) -> std::sync::Arc<Graph> {
        self.store.graph()
    }

    fn saved(&self, response: Response) -> Reply {
        if let Some((path, lock)) = &self.persist {
            let _guard = lock.lock().expect("persist lock poisoned");
            self.store.save_snapshot(path)?;
        }
        Ok(response)
    }

    pub fn handle(&self, method: &str, path: &str, body: &str) -> Response {
        let path = path.split('?').next().unwrap_or_default();
        self.route(method, path, body).unwrap_or_else(|e| e)
    }

    fn route(&self, method: &str, path: &str, body: &str) -> Reply {
        let not_found = || Err(Response::error(404, format!("no route for {method} {path}")));
        if let Some(rest) = path.strip_prefix("/entities") {
            return match (method, rest) {
                ("GET", "" | "/") => self.list_entities(),
                ("POST", "" | "/") => self.create(body),
                (_, r) if r.len() > 1 && r.starts_with('/') => {
                    let pid = parse_pid(&r[1..])?;
                    match method {
                        "GET" => self.get_entity(&pid),
                        "PUT" => self.put_entity(&pid, body),
                        "DELETE" => self.delete_entity(&pid),
                        _ => Err(Response::error(405, format!("{method} not allowed"))),
                    }
                }
                _ => not_found(),
            };
        }
        if let Some(mid) = path
            .strip_prefix("/datatypes/")
            .and_then(|r| r.strip_suffix("/inheritance"))
        {
            return match method {
                "GET" => self.inheritance(&parse_pid(mid)?),
                _ => not_found(),
            };
        }
        if let Some(mid) = path
            .strip_prefix("/datatypes/")
            .and_then(|r| r.strip_suffix("/operations"))
        {
            return match method {
                "GET" => self.datatype_operations(&parse_pid(mid)?),
                _ => not_found(),
            };
        }
        if let Some(mid) = path
            .strip_prefix("/attributes/")
            .and_then(|r| r.strip_suffix("/operations"))
        {
            return match method {
                "GET" => self.attribute_operations(&parse_pid(mid)?),
                _ => not_found(),
            };
        }
        if let Some(mid) = path
            .strip_prefix("/operations/")
            .and_then(|r| r.strip_suffix("/plan"))
        {
            return match method {
                "GET" => self.plan(&parse_pid(mid)?),
                _ => not_found(),
            };
        }
        if let Some(mid) = path
            .strip_prefix("/operations/")
            .and_then(|r| r.strip_suffix("/execute"))
        {
            return match method {
                "POST" => self.execute(&parse_pid(mid)?, parse_json(body)?),
                _ => not_found(),
            };
        }
        match (method, path) {
            ("POST", "/records/validate") => self.validate_record(body),
            ("POST", "/records/operations") => self.record_operations(body),
            _ => not_found(),
        }
    }

    pub fn list_entities(&self) -> Reply {
        let graph = self.graph();
        Ok(Response::ok(codec::serialize_entities(graph.entities())?))
    }

    pub fn get_entity(&self, pid: &Pid) -> Reply {
        let entity = self.store.get_entity(pid)?;
        Ok(Response::ok(codec::serialize_entity(&entity)?))
    }

    /// One entity document, minting a PID when it has none, or an array of
    /// documents written atomically.
    pub fn create(&self, body: &str) -> Reply {
        let mut json: serde_json::Value = parse_json(body)?;
        if let serde_json::Value::Object(map) = &mut json {
            if !map.contains_key("pid") {
                let pid = self
                    .store
                    .mint(&self.prefix)
                    .map_err(|e| Response::error(500, e.to_string()))?;
                map.insert("pid".into(), json!(pid));
            }
            let entity = codec::entity_from_json(json)?;
            let outcome = self.store.put_entity(entity)?;
            let stored = self.store.get_entity(&outcome.pid)?;
            let status = if outcome.created { 201 } else { 200 };
            return self.saved(
                Response::new(status, codec::serialize_entity(&stored)?)
                    .with_warnings(outcome.diagnostics),
            );
        }
        self.import(body)
    }

    /// All-or-nothing bulk load.
    pub fn import(&self, text: &str) -> Reply {
        let entities = codec::deserialize_entities(text)?;
        let outcomes = self.store.put_all(entities)?;
        let graph = self.graph();
        let stored: Vec<&Entity> = outcomes
            .iter()
            .filter_map(|o| graph.get(&o.pid))
            .collect();
        let warnings = outcomes.iter().flat_map(|o| o.diagnostics.clone()).collect();
        self.saved(Response::new(201, codec::serialize_entities(stored)?).with_warnings(warnings))
    }

    pub fn put_entity(&self, pid: &Pid, body: &str) -> Reply {
        let mut json: serde_json::Value = parse_json(body)?;
        if let serde_json::Value::Object(map) = &mut json {
            let given = map.entry("pid").or_insert_with(|| json!(pid));
            if given.as_str() != Some(pid.as_str()) {
                return Err(Response::error(400, format!("body pid {given} differs from {pid}")));
            }
        }
        let outcome = self.store.put_entity(codec::entity_from_json(json)?)?;
        let stored = self.store.get_entity(&outcome.pid)?;
        let status = if outcome.created { 201 } else { 200 };
        self.saved(
            Response::new(status, codec::serialize_entity(&stored)?)
                .with_warnings(outcome.diagnostics),
        )
    }

    pub fn delete_entity(&self, pid: &Pid) -> Reply {
        let removed = self.store.delete_entity(pid)?;
        self.saved(Response::ok(codec::serialize_entity(&removed)?))
    }

    /// Parent chain for atomic types, linearization for profiles.
    pub fn inheritance(&self, pid: &Pid) -> Reply {
        let graph = self.graph();
        let order = match graph.kind_of(pid) {
            Some(EntityKind::AtomicDataType) => typing::parent_chain(&graph, pid)?,
            Some(EntityKind::TypeProfile) => typing::linearize(&graph, pid)?.0.order,
            Some(kind) => {
                return Err(Response::error(400, format!("{pid} is a {kind}, not a data type")))
            }
            None => return Err(Response::error(404, format!("entity {pid} not found"))),
        };
        Ok(Response::json(200, &order))
    }

    pub fn datatype_operations(&self, pid: &Pid) -> Reply {
        let ops = operations_for_datatype(pid, &self.graph())
            .map_err(|e| Response::error(404, e.to_string()))?;
        Ok(Response::json(200, &ops))
    }

    pub fn attribute_operations(&self, pid: &Pid) -> Reply {
        let ops = operations_for_attribute(pid, &self.graph())
            .map_err(|e| Response::error(404, e.to_string()))?;
        Ok(Response::json(200, &ops))
    }

    /// Body: `{"record": {...}, "profile": pid}`.
    pub fn validate_record(&self, body: &str) -> Reply {
        let req: RecordRequest = parse_json(body)?;
        let profile = req
            .profile
            .ok_or_else(|| Response::error(400, "missing field `profile`"))?;
        let graph = self.graph();
        if graph.profile(&profile).is_none() {
            return Err(Response::error(404, format!("type profile {profile} not found")));
        }
        let results = crate::validation::validate_record(&req.record, &profile, &graph);
        let status = if has_errors(&results) { 422 } else { 200 };
        Ok(Response::diagnostics(status, &results))
    }

    /// Body: `{"record": {...}, "profile": pid?}`.
    pub fn record_operations(&self, body: &str) -> Reply {
        let req: RecordRequest = parse_json(body)?;
        let ops = operations_for_record(&req.record, req.profile.as_ref(), &self.graph());
        Ok(Response::json(200, &ops))
    }

    pub fn plan(&self, pid: &Pid) -> Reply {
        Ok(Response::json(200, &plan(pid, &self.graph())?))
    }

    /// Runs an operation against the current graph version; the store is not
    /// touched.
    pub fn execute(&self, pid: &Pid, input: Value) -> Reply {
        let graph = self.graph();
        let out = Executor::new(&graph, &self.adapters)
            .with_marker(self.marker.clone())
            .run(pid, input)?;
        Ok(Response::json(200, &out))
    }

    /// Loads the seed corpus. Loading it again changes nothing.
    pub fn seed(&self) -> Reply {
        let outcomes = self.store.put_all(super::seed::seed_corpus())?;
        let changed = outcomes.iter().filter(|o| o.changed).count();
        let warnings = outcomes.iter().flat_map(|o| o.diagnostics.clone()).collect();
        let body = json!({ "entities": outcomes.len(), "changed": changed });
        self.saved(Response::json(200, &body).with_warnings(warnings))
    }

    /// Checks entity documents against the current graph as if they were
    /// imported, without writing anything.
    pub fn validate_documents(&self, text: &str) -> Reply {
        let entities = codec::deserialize_entities(text)?;
        let trial = GraphStore::new(self.store.validator().clone());
        trial.replace((*self.graph()).clone());
        let outcomes = trial.put_all(entities)?;
        let results: Vec<ValidationResult> =
            outcomes.into_iter().flat_map(|o| o.diagnostics).collect();
        Ok(Response::diagnostics(200, &results))
    }

    /// Re-runs the rules on a stored entity.
    pub fn validate_stored(&self, pid: &Pid) -> Reply {
        let graph = self.graph();
        let entity = graph
            .get(pid)
            .ok_or_else(|| Response::error(404, format!("entity {pid} not found")))?;
        let results = self.store.validator().validate_entity(entity, &graph);
        let status = if has_errors(&results) { 422 } else { 200 };
        Ok(Response::diagnostics(status, &results))
    }
}
