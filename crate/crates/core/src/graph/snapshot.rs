use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::{EdgeLabel, Graph};
use crate::codec::{self, CodecError};
use crate::model::Entity;
use crate::pid::Pid;

pub const SNAPSHOT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported snapshot format version {found} (expected {SNAPSHOT_VERSION})")]
    Version { found: u64 },
    #[error("snapshot document: {0}")]
    Codec(#[from] CodecError),
    #[error("snapshot lists node {0} twice")]
    DuplicateNode(Pid),
    #[error("snapshot edge {0} -{1}-> {2} references a missing node")]
    DanglingEdge(Pid, EdgeLabel, Pid),
    #[error("snapshot edges do not match the edges derived from its nodes")]
    InconsistentEdges,
}

/// Serialized form of a [`Graph`]: nodes sorted by PID, edges as
/// `[from, label, to]` triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSnapshot {
    pub version: u64,
    pub nodes: Vec<Entity>,
    pub edges: Vec<(Pid, EdgeLabel, Pid)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSnapshot {
    version: u64,
    nodes: Vec<serde_json::Value>,
    edges: Vec<(Pid, EdgeLabel, Pid)>,
}

impl GraphSnapshot {
    pub fn of(graph: &Graph) -> Self {
        GraphSnapshot {
            version: SNAPSHOT_VERSION,
            nodes: graph.entities().cloned().collect(),
            edges: graph
                .edges()
                .map(|(f, l, t)| (f.clone(), l, t.clone()))
                .collect(),
        }
    }

    pub fn to_text(&self) -> Result<String, CodecError> {
        let mut text = format!("{{\"version\":{},\"nodes\":[", self.version);
        for (i, node) in self.nodes.iter().enumerate() {
            text.push_str(if i == 0 { "\n" } else { ",\n" });
            text.push_str(&codec::serialize_entity(node)?);
        }
        text.push_str("\n],\"edges\":[");
        for (i, edge) in self.edges.iter().enumerate() {
            text.push_str(if i == 0 { "\n" } else { ",\n" });
            text.push_str(&codec::to_canonical(edge)?);
        }
        text.push_str("\n]}\n");
        Ok(text)
    }

    pub fn parse(text: &str) -> Result<Self, SnapshotError> {
        let raw: RawSnapshot = codec::from_canonical(text)?;
        if raw.version != SNAPSHOT_VERSION {
            return Err(SnapshotError::Version { found: raw.version });
        }
        let nodes = raw
            .nodes
            .into_iter()
            .map(codec::entity_from_json)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GraphSnapshot {
            version: raw.version,
            nodes,
            edges: raw.edges,
        })
    }

    /// Rebuilds the graph, checking that every edge endpoint exists and that
    /// the edge list is exactly what the nodes imply.
    pub fn into_graph(self) -> Result<Graph, SnapshotError> {
        let mut seen = BTreeSet::new();
        for node in &self.nodes {
            if !seen.insert(node.pid().clone()) {
                return Err(SnapshotError::DuplicateNode(node.pid().clone()));
            }
        }
        for (from, label, to) in &self.edges {
            if !seen.contains(from) || (!label.targets_external() && !seen.contains(to)) {
                return Err(SnapshotError::DanglingEdge(from.clone(), *label, to.clone()));
            }
        }
        let graph = Graph::from_entities(self.nodes);
        let derived: BTreeSet<_> = graph
            .edges()
            .map(|(f, l, t)| (f.clone(), l, t.clone()))
            .collect();
        let listed: BTreeSet<_> = self.edges.into_iter().collect();
        if derived != listed {
            return Err(SnapshotError::InconsistentEdges);
        }
        Ok(graph)
    }

    pub fn save(&self, path: &Path) -> Result<(), SnapshotError> {
        let text = self.to_text()?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SnapshotError> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomicDataType, PrimitiveKind};

    fn graph() -> Graph {
        let url = Pid::parse("t/url").unwrap();
        Graph::from_entities([
            AtomicDataType::new(url.clone(), "URL", PrimitiveKind::String).into(),
            AtomicDataType::new(Pid::parse("t/o").unwrap(), "O", PrimitiveKind::String)
                .with_parent(url)
                .into(),
        ])
    }

    #[test]
    fn empty_snapshot() {
        let text = GraphSnapshot::of(&Graph::new()).to_text().unwrap();
        assert_eq!(text, "{\"version\":1,\"nodes\":[\n],\"edges\":[\n]}\n");
        let back = GraphSnapshot::parse(&text).unwrap();
        assert!(back.nodes.is_empty());
    }

    #[test]
    fn text_is_stable() {
        let first = GraphSnapshot::of(&graph()).to_text().unwrap();
        let reloaded = GraphSnapshot::parse(&first).unwrap().into_graph().unwrap();
        let second = GraphSnapshot::of(&reloaded).to_text().unwrap();
        assert_eq!(first, second);
        assert!(first.contains(r#"["t/o","inheritsFrom","t/url"]"#));
    }

    #[test]
    fn rejects_dangling_and_version() {
        let text = GraphSnapshot::of(&graph()).to_text().unwrap();
        let dangling = text.replace(r#"["t/o","inheritsFrom","t/url"]"#, r#"["t/o","inheritsFrom","t/zzz"]"#);
        assert!(matches!(
            GraphSnapshot::parse(&dangling).unwrap().into_graph(),
            Err(SnapshotError::DanglingEdge(..))
        ));
        let v2 = text.replacen("\"version\":1", "\"version\":2", 1);
        assert!(matches!(
            GraphSnapshot::parse(&v2),
            Err(SnapshotError::Version { found: 2 })
        ));
        let missing_edge = text.replace(",\n[\"t/o\",\"inheritsFrom\",\"t/url\"]", "").replace("[\n[\"t/o\",\"inheritsFrom\",\"t/url\"]", "[");
        assert!(matches!(
            GraphSnapshot::parse(&missing_edge).unwrap().into_graph(),
            Err(SnapshotError::InconsistentEdges)
        ));
    }
}
