//! Executable adapters for technology interfaces.
//!
//! Built-in conventions, by position in the interface's attribute lists:
//! - `regex`: inputs `[subject, pattern]`, output `[groups]` where element 0
//!   is the full match.
//! - `template`: inputs `[template, value]`, output `[text]`.
//! - `fixtureLookup`: input `[key]` (text form, exact match), output
//!   `[value]`, as a one-element list when the output is multi-valued.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::mapping::ValueBinding;
use crate::graph::Graph;
use crate::model::{TechnologyInterface, Value, DEFAULT_MARKER};
use crate::pattern;
use crate::pid::Pid;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdapterError {
    #[error("no executable adapter for interface {interface}; tried {}", list(.candidates))]
    Missing { interface: Pid, candidates: Vec<Pid> },
    #[error("adapter {adapter} expects {expected}")]
    Arity { adapter: Pid, expected: &'static str },
    #[error("input {0} is not bound")]
    MissingInput(Pid),
    #[error("`{subject}` does not match `{pattern}`")]
    NoMatch { pattern: String, subject: String },
    #[error("invalid pattern: {0}")]
    Pattern(String),
    #[error("fixture has no entry for `{0}`")]
    NoFixture(String),
    #[error("fixture {path}: {message}")]
    Fixture { path: PathBuf, message: String },
}

fn list(pids: &[Pid]) -> String {
    if pids.is_empty() {
        return "none".into();
    }
    pids.iter().map(Pid::as_str).collect::<Vec<_>>().join(", ")
}

/// Exact-match lookup table parsed from `key<TAB>value` lines. Blank lines
/// and lines starting with `#` are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixtureTable(BTreeMap<String, String>);

impl FixtureTable {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut table = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected key<TAB>value", n + 1))?;
            if table.insert(k.to_owned(), v.to_owned()).is_some() {
                return Err(format!("line {}: duplicate key `{k}`", n + 1));
            }
        }
        Ok(FixtureTable(table))
    }

    pub fn load(path: &Path) -> Result<Self, AdapterError> {
        let fail = |message: String| AdapterError::Fixture {
            path: path.to_owned(),
            message,
        };
        let text = fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
        Self::parse(&text).map_err(fail)
    }

    pub fn from_pairs<K: Into<String>, V: Into<String>>(pairs: impl IntoIterator<Item = (K, V)>) -> Self {
        FixtureTable(pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    Regex,
    Template,
    FixtureLookup(FixtureTable),
    /// Declared, but this system cannot run it.
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BuiltinName {
    Regex,
    Template,
    FixtureLookup,
    Unsupported,
}

/// Configuration form of an adapter binding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AdapterDeclaration {
    pub adapter_pid: Pid,
    pub implements_interface_pid: Pid,
    pub builtin: BuiltinName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<PathBuf>,
    #[serde(default)]
    pub serial: bool,
}

#[derive(Debug)]
pub struct AdapterBinding {
    pub adapter: Pid,
    pub implements: Pid,
    pub builtin: Builtin,
    serial: Option<Mutex<()>>,
}

impl AdapterBinding {
    pub fn is_serial(&self) -> bool {
        self.serial.is_some()
    }
}

/// Ordered adapter bindings. The first executable binding that the
/// interface lists and that implements it is selected.
#[derive(Debug)]
pub struct AdapterRegistry {
    bindings: Vec<AdapterBinding>,
    marker: String,
}

impl Default for AdapterRegistry {
    fn default() -> Self {
        AdapterRegistry {
            bindings: Vec::new(),
            marker: DEFAULT_MARKER.to_owned(),
        }
    }
}

impl AdapterRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_marker(mut self, marker: impl Into<String>) -> Self {
        self.marker = marker.into();
        self
    }

    pub fn register(&mut self, adapter: Pid, implements: Pid, builtin: Builtin) -> &mut Self {
        self.push(adapter, implements, builtin, false)
    }

    /// Registers an adapter that must not run concurrently with itself.
    pub fn register_serial(&mut self, adapter: Pid, implements: Pid, builtin: Builtin) -> &mut Self {
        self.push(adapter, implements, builtin, true)
    }

    fn push(&mut self, adapter: Pid, implements: Pid, builtin: Builtin, serial: bool) -> &mut Self {
        self.bindings.push(AdapterBinding {
            adapter,
            implements,
            builtin,
            serial: serial.then(|| Mutex::new(())),
        });
        self
    }

    /// Builds a registry from declarations; relative fixture paths resolve
    /// against `base`.
    pub fn from_declarations(
        declarations: &[AdapterDeclaration],
        base: &Path,
    ) -> Result<Self, AdapterError> {
        let mut registry = AdapterRegistry::new();
        for d in declarations {
            let builtin = match d.builtin {
                BuiltinName::Regex => Builtin::Regex,
                BuiltinName::Template => Builtin::Template,
                BuiltinName::Unsupported => Builtin::Unsupported,
                BuiltinName::FixtureLookup => {
                    let path = d.fixture.as_ref().ok_or_else(|| AdapterError::Fixture {
                        path: PathBuf::new(),
                        message: format!("adapter {} needs a fixture file", d.adapter_pid),
                    })?;
                    Builtin::FixtureLookup(FixtureTable::load(&base.join(path))?)
                }
            };
            registry.push(
                d.adapter_pid.clone(),
                d.implements_interface_pid.clone(),
                builtin,
                d.serial,
            );
        }
        Ok(registry)
    }

    pub fn bindings(&self) -> &[AdapterBinding] {
        &self.bindings
    }

    pub fn select(&self, interface: &TechnologyInterface) -> Result<&AdapterBinding, AdapterError> {
        self.bindings
            .iter()
            .find(|b| {
                b.implements == interface.pid
                    && interface.adapters.contains(&b.adapter)
                    && b.builtin != Builtin::Unsupported
            })
            .ok_or_else(|| AdapterError::Missing {
                interface: interface.pid.clone(),
                candidates: interface.adapters.clone(),
            })
    }

    /// Runs the selected adapter of `interface` on its bound inputs and
    /// returns the bound outputs.
    pub fn invoke(
        &self,
        interface: &TechnologyInterface,
        inputs: &ValueBinding,
        graph: &Graph,
    ) -> Result<ValueBinding, AdapterError> {
        let binding = self.select(interface)?;
        let _serial = binding.serial.as_ref().map(|m| m.lock().expect("adapter lock poisoned"));
        let arity = |n_in: usize, expected: &'static str| {
            if interface.inputs.len() < n_in || interface.outputs.len() != 1 {
                Err(AdapterError::Arity {
                    adapter: binding.adapter.clone(),
                    expected,
                })
            } else {
                Ok(())
            }
        };
        let input = |i: usize| {
            let pid = &interface.inputs[i];
            inputs
                .get(pid)
                .ok_or_else(|| AdapterError::MissingInput(pid.clone()))
        };
        let output = interface.outputs.first();
        let value = match &binding.builtin {
            Builtin::Regex => {
                arity(2, "inputs [subject, pattern] and one output")?;
                let subject = input(0)?.text();
                let pattern = input(1)?.text();
                let groups = pattern::capture_groups(&pattern, &subject)
                    .map_err(AdapterError::Pattern)?
                    .ok_or(AdapterError::NoMatch { pattern, subject })?;
                Value::List(groups.into_iter().map(Value::String).collect())
            }
            Builtin::Template => {
                arity(2, "inputs [template, value] and one output")?;
                let template = input(0)?.text();
                Value::String(template.replace(self.marker.as_str(), &input(1)?.text()))
            }
            Builtin::FixtureLookup(table) => {
                arity(1, "an input [key] and one output")?;
                let key = input(0)?.text();
                let found = Value::string(table.get(&key).ok_or(AdapterError::NoFixture(key.clone()))?);
                let many = output
                    .and_then(|o| graph.attribute(o))
                    .is_some_and(|a| a.cardinality.permits_many());
                if many {
                    Value::List(vec![found])
                } else {
                    found
                }
            }
            Builtin::Unsupported => unreachable!("select skips unsupported adapters"),
        };
        let out = output.expect("arity checked").clone();
        Ok(ValueBinding::from([(out, value)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pid(s: &str) -> Pid {
        Pid::parse(&format!("t/{s}")).unwrap()
    }

    fn regex_interface() -> TechnologyInterface {
        TechnologyInterface::new(
            pid("regex"),
            "Regex",
            vec![pid("subject"), pid("pattern")],
            vec![pid("groups")],
        )
        .with_adapters(vec![pid("re-impl")])
    }

    #[test]
    fn regex_groups() {
        let mut r = AdapterRegistry::new();
        r.register(pid("re-impl"), pid("regex"), Builtin::Regex);
        let inputs = ValueBinding::from([
            (pid("subject"), Value::string("abc123")),
            (pid("pattern"), Value::string(r"([a-z]+)(\d+)")),
        ]);
        let out = r.invoke(&regex_interface(), &inputs, &Graph::new()).unwrap();
        assert_eq!(
            out[&pid("groups")],
            Value::List(vec!["abc123".into(), "abc".into(), "123".into()])
        );
        let miss = ValueBinding::from([
            (pid("subject"), Value::string("!!")),
            (pid("pattern"), Value::string(r"([a-z]+)(\d+)")),
        ]);
        assert!(matches!(
            r.invoke(&regex_interface(), &miss, &Graph::new()),
            Err(AdapterError::NoMatch { .. })
        ));
    }

    #[test]
    fn selection_order_and_missing() {
        let ti = regex_interface().with_adapters(vec![pid("a"), pid("b")]);
        let mut r = AdapterRegistry::new();
        r.register(pid("x"), pid("regex"), Builtin::Regex)
            .register(pid("b"), pid("regex"), Builtin::Template)
            .register(pid("a"), pid("regex"), Builtin::Regex);
        assert_eq!(r.select(&ti).unwrap().adapter, pid("b"));
        let mut only_unsupported = AdapterRegistry::new();
        only_unsupported.register(pid("a"), pid("regex"), Builtin::Unsupported);
        match only_unsupported.select(&ti) {
            Err(AdapterError::Missing { candidates, .. }) => {
                assert_eq!(candidates, vec![pid("a"), pid("b")])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fixture_table() {
        let t = FixtureTable::parse("# comment\nk1\tv1\n\nk 2\tv 2\n").unwrap();
        assert_eq!(t.get("k 2"), Some("v 2"));
        assert!(FixtureTable::parse("no tab").is_err());
        assert!(FixtureTable::parse("a\t1\na\t2").is_err());
    }

    #[test]
    fn declarations() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("f.tsv"), "k\tv\n").unwrap();
        let decls: Vec<AdapterDeclaration> = serde_json::from_str(
            r#"[{"adapterPid":"t/a","implementsInterfacePid":"t/i","builtin":"fixtureLookup","fixture":"f.tsv","serial":true},
                {"adapterPid":"t/b","implementsInterfacePid":"t/i","builtin":"unsupported"}]"#,
        )
        .unwrap();
        let r = AdapterRegistry::from_declarations(&decls, dir.path()).unwrap();
        assert_eq!(r.bindings().len(), 2);
        assert!(r.bindings()[0].is_serial());
    }
}
