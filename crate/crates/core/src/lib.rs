pub mod codec;
pub mod diagnostics;
pub mod graph;
pub mod model;
pub mod operations;
pub mod pattern;
pub mod pid;
pub mod service;
pub mod store;
pub mod typing;
pub mod validation;
