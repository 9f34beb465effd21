use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::seed;
use crate::diagnostics::RuleId;
use crate::model::DEFAULT_MARKER;
use crate::operations::{AdapterDeclaration, AdapterError, AdapterRegistry};
use crate::validation::{RuleSet, Validator};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("invalid value for {key}: {message}")]
    Invalid { key: String, message: String },
    #[error(transparent)]
    Adapter(#[from] AdapterError),
}

/// Settings for the CLI and the HTTP service.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    pub store: PathBuf,
    pub prefix: String,
    pub marker: String,
    /// Adapter bindings in selection order. Empty means the seed adapters.
    pub adapters: Vec<AdapterDeclaration>,
    /// Default rules switched off.
    pub disabled_rules: Vec<RuleId>,
    /// Where relative fixture paths resolve from.
    pub base_dir: PathBuf,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            host: "127.0.0.1".into(),
            port: 8080,
            store: PathBuf::from("fdo-store.json"),
            prefix: "local".into(),
            marker: DEFAULT_MARKER.into(),
            adapters: Vec::new(),
            disabled_rules: Vec::new(),
            base_dir: PathBuf::from("."),
        }
    }
}

/// The file form; every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    host: Option<String>,
    port: Option<u16>,
    store: Option<PathBuf>,
    prefix: Option<String>,
    marker: Option<String>,
    #[serde(default)]
    adapters: Vec<AdapterDeclaration>,
    #[serde(default)]
    rules: RuleOverrides,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleOverrides {
    #[serde(default)]
    disable: Vec<RuleId>,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub store: Option<PathBuf>,
    pub port: Option<u16>,
    pub prefix: Option<String>,
    pub marker: Option<String>,
}

impl ServiceConfig {
    /// File, then `FDO_*` variables from `env`, then flags.
    pub fn resolve(
        file: Option<&Path>,
        env: &BTreeMap<String, String>,
        flags: &Overrides,
    ) -> Result<Self, ConfigError> {
        let mut config = ServiceConfig::default();
        let file = file
            .map(Path::to_path_buf)
            .or_else(|| env.get("FDO_CONFIG").map(PathBuf::from));
        if let Some(path) = file {
            config.apply_file(&path)?;
        }

        if let Some(v) = env.get("FDO_HOST") {
            config.host = v.clone();
        }
        if let Some(v) = env.get("FDO_STORE") {
            config.store = v.into();
        }
        if let Some(v) = env.get("FDO_PORT") {
            config.port = v.parse().map_err(|e: std::num::ParseIntError| ConfigError::Invalid {
                key: "FDO_PORT".into(),
                message: e.to_string(),
            })?;
        }
        if let Some(v) = env.get("FDO_PREFIX") {
            config.prefix = v.clone();
        }
        if let Some(v) = env.get("FDO_MARKER") {
            config.marker = v.clone();
        }

        if let Some(v) = &flags.store {
            config.store = v.clone();
        }
        if let Some(v) = flags.port {
            config.port = v;
        }
        if let Some(v) = &flags.prefix {
            config.prefix = v.clone();
        }
        if let Some(v) = &flags.marker {
            config.marker = v.clone();
        }
        config.check()?;
        Ok(config)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let read_err = |message: String| ConfigError::Read {
            path: path.to_owned(),
            message,
        };
        let text = fs::read_to_string(path).map_err(|e| read_err(e.to_string()))?;
        let file: ConfigFile = toml::from_str(&text).map_err(|e| read_err(e.to_string()))?;
        self.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if let Some(v) = file.host {
            self.host = v;
        }
        if let Some(v) = file.port {
            self.port = v;
        }
        if let Some(v) = file.store {
            self.store = self.base_dir.join(v);
        }
        if let Some(v) = file.prefix {
            self.prefix = v;
        }
        if let Some(v) = file.marker {
            self.marker = v;
        }
        self.adapters = file.adapters;
        self.disabled_rules = file.rules.disable;
        Ok(())
    }

    fn check(&self) -> Result<(), ConfigError> {
        if self.marker.is_empty() {
            return Err(ConfigError::Invalid {
                key: "marker".into(),
                message: "must not be empty".into(),
            });
        }
        crate::pid::Pid::new(&self.prefix, "x").map_err(|e| ConfigError::Invalid {
            key: "prefix".into(),
            message: e.to_string(),
        })?;
        Ok(())
    }

    pub fn validator(&self) -> Validator {
        let rules = self
            .disabled_rules
            .iter()
            .fold(RuleSet::default(), |set, id| set.without(*id));
        Validator::new(rules, self.marker.clone())
    }

    pub fn adapter_registry(&self) -> Result<AdapterRegistry, ConfigError> {
        let registry = if self.adapters.is_empty() {
            seed::seed_adapters()
        } else {
            AdapterRegistry::from_declarations(&self.adapters, &self.base_dir)?
        };
        Ok(registry.with_marker(self.marker.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fdo.toml");
        fs::write(
            &path,
            "port = 9000\nprefix = \"file\"\nmarker = \"<v>\"\n\n[rules]\ndisable = [\"MappingCompatibility\"]\n",
        )
        .unwrap();
        let env = BTreeMap::from([("FDO_PREFIX".to_string(), "env".to_string())]);
        let flags = Overrides {
            marker: Some("%s".into()),
            ..Overrides::default()
        };
        let c = ServiceConfig::resolve(Some(&path), &env, &flags).unwrap();
        assert_eq!(c.port, 9000);
        assert_eq!(c.prefix, "env");
        assert_eq!(c.marker, "%s");
        assert!(!c.validator().rules.ids().contains(&RuleId::MappingCompatibility));
    }

    #[test]
    fn rejects_empty_marker_and_bad_port() {
        let flags = Overrides {
            marker: Some(String::new()),
            ..Overrides::default()
        };
        assert!(ServiceConfig::resolve(None, &BTreeMap::new(), &flags).is_err());
        let env = BTreeMap::from([("FDO_PORT".to_string(), "http".to_string())]);
        assert!(ServiceConfig::resolve(None, &env, &Overrides::default()).is_err());
    }

    #[test]
    fn adapter_declarations() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("t.tsv"), "k\tv\n").unwrap();
        let path = dir.path().join("fdo.toml");
        fs::write(
            &path,
            r#"
[[adapters]]
adapterPid = "x/a"
implementsInterfacePid = "x/ti"
builtin = "fixtureLookup"
fixture = "t.tsv"
"#,
        )
        .unwrap();
        let c = ServiceConfig::resolve(Some(&path), &BTreeMap::new(), &Overrides::default()).unwrap();
        assert_eq!(c.adapter_registry().unwrap().bindings().len(), 1);
    }
}
