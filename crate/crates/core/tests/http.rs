use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::sync::Arc;
use std::thread;

use fdo_registry::service::seed::{self, seed_adapters};
use fdo_registry::service::{HttpServer, Service};
use fdo_registry::store::GraphStore;

fn request(addr: SocketAddr, method: &str, path: &str, body: &str) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = String::new();
    stream.read_to_string(&mut raw).unwrap();
    let status = raw.split(' ').nth(1).unwrap().parse().unwrap();
    let body = raw.split_once("\r\n\r\n").map(|(_, b)| b.to_string()).unwrap_or_default();
    (status, body)
}

#[test]
fn serves_the_seed_over_http() {
    let service = Service::new(GraphStore::default(), seed_adapters());
    service.seed().unwrap();
    let server = HttpServer::start(Arc::new(service), "127.0.0.1:0", 4).unwrap();
    let addr = server.addr();

    let (status, body) = request(addr, "GET", "/datatypes/seed/ORCiD-URL/inheritance", "");
    assert_eq!((status, body.as_str()), (200, r#"["seed/ORCiD-URL","seed/URL"]"#));

    let input = format!("\"{}\"", seed::TEST_ORCID_URL);
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let input = input.clone();
            thread::spawn(move || {
                request(addr, "POST", "/operations/seed/get-primary-email/execute", &input)
            })
        })
        .collect();
    for h in handles {
        let (status, body) = h.join().unwrap();
        assert_eq!(status, 200);
        assert!(body.contains(seed::TEST_EMAIL));
    }

    let (status, _) = request(addr, "DELETE", "/entities/seed/URL", "");
    assert_eq!(status, 409);
    let (status, _) = request(addr, "GET", "/entities/seed/none", "");
    assert_eq!(status, 404);
    server.shutdown();
}
