//! Serves a seeded registry on a loopback port, sends it a few requests
//! and shuts down.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::sync::Arc;

use fdo_registry::service::seed::{self, seed_adapters};
use fdo_registry::service::{HttpServer, Service};
use fdo_registry::store::GraphStore;

fn call(addr: SocketAddr, method: &str, path: &str, body: &str) -> String {
    let mut stream = TcpStream::connect(addr).unwrap();
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\nContent-Length: {}\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = String::new();
    stream.read_to_string(&mut raw).unwrap();
    let status = raw.lines().next().unwrap_or_default().to_string();
    let body = raw.split_once("\r\n\r\n").map(|(_, b)| b).unwrap_or_default();
    format!("{status}\n  {body}")
}

fn main() {
    let service = Service::new(GraphStore::default(), seed_adapters());
    service.seed().unwrap();
    let server = HttpServer::start(Arc::new(service), "127.0.0.1:0", 2).unwrap();
    let addr = server.addr();
    println!("listening on {addr}");

    println!("{}", call(addr, "GET", "/datatypes/seed/ORCiD-URL/inheritance", ""));
    println!("{}", call(addr, "GET", "/attributes/seed/contact/operations", ""));
    let input = format!("\"{}\"", seed::TEST_ORCID_URL);
    println!("{}", call(addr, "POST", "/operations/seed/get-primary-email/execute", &input));
    println!("{}", call(addr, "DELETE", "/entities/seed/URL", ""));
    server.shutdown();
}
