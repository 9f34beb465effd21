//! Configuration, seed corpus, request handling, HTTP and CLI.

mod api;
pub mod cli;
mod config;
mod http;
pub mod seed;

pub use api::{Response, Service};
pub use config::{ConfigError, Overrides, ServiceConfig};
pub use http::HttpServer;
