//! Command-line front end. Data goes to stdout, diagnostics and errors to
//! stderr. Exit codes: 0 success, 1 validation errors, 2 usage or I/O
//! problems.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};

use super::api::{Response, Service};
use super::config::{Overrides, ServiceConfig};
use super::http::HttpServer;
use crate::diagnostics::diagnostic_document;
use crate::model::{EntityKind, Value};
use crate::pid::Pid;
use crate::store::GraphStore;

#[derive(Debug, Parser)]
#[command(name = "fdo-registry", version, about = "Typed registry for FAIR digital object types and operations")]
struct Cli {
    /// TOML configuration file (also FDO_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Snapshot file holding the store (also FDO_STORE)
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    /// Listen port for `serve` (also FDO_PORT)
    #[arg(long, global = true)]
    port: Option<u16>,
    /// Prefix for minted PIDs (also FDO_PREFIX)
    #[arg(long, global = true)]
    prefix: Option<String>,
    /// Default template marker (also FDO_MARKER)
    #[arg(long, global = true)]
    marker: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load entity documents; nothing is stored unless all are accepted
    Import { file: PathBuf },
    /// Print one entity, or all of them
    Export {
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        pid: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Check an entity file against the store, or re-check a stored entity
    Validate { target: String },
    /// Validate an information record against a type profile
    ValidateRecord {
        file: PathBuf,
        #[arg(long)]
        profile: String,
    },
    /// Operations available for a data type or attribute
    Ops { pid: String },
    /// Operations available for an information record
    RecordOps {
        file: PathBuf,
        #[arg(long)]
        profile: Option<String>,
    },
    /// Parent chain or linearization of a data type
    Inheritance { pid: String },
    /// Remove an entity nobody references
    Delete { pid: String },
    /// Execution stages of an operation
    Plan { pid: String },
    /// Run an operation on an input value (JSON, or plain text)
    Exec {
        pid: String,
        #[arg(long)]
        input: String,
    },
    /// Load the built-in seed corpus
    Seed,
    /// Serve the HTTP API
    Serve {
        #[arg(long, default_value_t = 4)]
        workers: usize,
    },
}

fn read_input(path: &Path) -> io::Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path)
    }
}

fn usage(stderr: &mut dyn Write, message: impl std::fmt::Display) -> i32 {
    let _ = writeln!(stderr, "error: {message}");
    2
}

/// Parses `args` (without the program name) and runs one command.
pub fn run(
    args: impl IntoIterator<Item = String>,
    env: &BTreeMap<String, String>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let argv = std::iter::once("fdo-registry".to_string()).chain(args);
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let flags = Overrides {
        store: cli.store.clone(),
        port: cli.port,
        prefix: cli.prefix.clone(),
        marker: cli.marker.clone(),
    };
    let config = match ServiceConfig::resolve(cli.config.as_deref(), env, &flags) {
        Ok(c) => c,
        Err(e) => return usage(stderr, e),
    };
    let service = match open(&config) {
        Ok(s) => s,
        Err(message) => return usage(stderr, message),
    };

    let pid = |text: &str| Pid::parse(text).map_err(|e| e.to_string());
    let reply = match cli.command {
        Command::Import { file } => match read_input(&file) {
            Ok(text) => service.import(&text),
            Err(e) => return usage(stderr, format!("{}: {e}", file.display())),
        },
        Command::Export { pid: None, .. } => service.list_entities(),
        Command::Export { pid: Some(p), .. } => match pid(&p) {
            Ok(p) => service.get_entity(&p),
            Err(e) => return usage(stderr, e),
        },
        Command::Validate { target } => {
            let path = Path::new(&target);
            if path.exists() || target == "-" {
                match read_input(path) {
                    Ok(text) => service.validate_documents(&text),
                    Err(e) => return usage(stderr, format!("{target}: {e}")),
                }
            } else {
                match pid(&target) {
                    Ok(p) => service.validate_stored(&p),
                    Err(_) => return usage(stderr, format!("{target} is neither a file nor a PID")),
                }
            }
        }
        Command::ValidateRecord { file, profile } => match read_input(&file) {
            Ok(text) => match record_body(&text, Some(&profile)) {
                Ok(body) => service.validate_record(&body),
                Err(e) => return usage(stderr, e),
            },
            Err(e) => return usage(stderr, format!("{}: {e}", file.display())),
        },
        Command::Ops { pid: p } => match pid(&p) {
            Ok(p) => match service.store().graph().kind_of(&p) {
                Some(EntityKind::Attribute) => service.attribute_operations(&p),
                _ => service.datatype_operations(&p),
            },
            Err(e) => return usage(stderr, e),
        },
        Command::RecordOps { file, profile } => match read_input(&file) {
            Ok(text) => match record_body(&text, profile.as_deref()) {
                Ok(body) => service.record_operations(&body),
                Err(e) => return usage(stderr, e),
            },
            Err(e) => return usage(stderr, format!("{}: {e}", file.display())),
        },
        Command::Inheritance { pid: p } => match pid(&p) {
            Ok(p) => service.inheritance(&p),
            Err(e) => return usage(stderr, e),
        },
        Command::Delete { pid: p } => match pid(&p) {
            Ok(p) => service.delete_entity(&p),
            Err(e) => return usage(stderr, e),
        },
        Command::Plan { pid: p } => match pid(&p) {
            Ok(p) => service.plan(&p),
            Err(e) => return usage(stderr, e),
        },
        Command::Exec { pid: p, input } => match pid(&p) {
            Ok(p) => service.execute(&p, Value::parse_lenient(&input)),
            Err(e) => return usage(stderr, e),
        },
        Command::Seed => service.seed(),
        Command::Serve { workers } => return serve(service, &config, workers, stderr),
    };
    emit(reply.unwrap_or_else(|e| e), stdout, stderr)
}

/// Wraps a record file into the request body the API expects.
fn record_body(text: &str, profile: Option<&str>) -> Result<String, String> {
    let record: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("malformed record: {e}"))?;
    Ok(serde_json::json!({ "record": record, "profile": profile }).to_string())
}

fn open(config: &ServiceConfig) -> Result<Service, String> {
    let store = GraphStore::new(config.validator());
    if config.store.exists() {
        store
            .load_snapshot(&config.store)
            .map_err(|e| format!("{}: {e}", config.store.display()))?;
    }
    let adapters = config.adapter_registry().map_err(|e| e.to_string())?;
    Ok(Service::new(store, adapters)
        .with_prefix(config.prefix.clone())
        .persist_to(config.store.clone()))
}

fn emit(reply: Response, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    if !reply.warnings.is_empty() {
        let _ = writeln!(stderr, "{}", diagnostic_document(&reply.warnings));
    }
    let ok = reply.is_success();
    let out: &mut dyn Write = if ok && !reply.diagnostic { stdout } else { stderr };
    let body = reply.body.trim_end();
    if !(ok && reply.diagnostic && body == "[]") {
        let _ = writeln!(out, "{body}");
    }
    match reply.status {
        _ if ok => 0,
        422 => 1,
        _ => 2,
    }
}

fn serve(service: Service, config: &ServiceConfig, workers: usize, stderr: &mut dyn Write) -> i32 {
    let addr = format!("{}:{}", config.host, config.port);
    match HttpServer::start(Arc::new(service), &addr, workers) {
        Ok(server) => {
            let _ = writeln!(stderr, "listening on http://{}", server.addr());
            server.join();
            0
        }
        Err(e) => usage(stderr, format!("cannot listen on {addr}: {e}")),
    }
}
