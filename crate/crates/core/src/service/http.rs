//! Blocking HTTP front end over [`Service::handle`].

use std::io;
use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use tiny_http::{Header, Method, Request, Response as HttpResponse, Server};

use super::api::Service;

/// A running server. Dropping it without [`HttpServer::shutdown`] leaves
/// the workers running until the process exits.
pub struct HttpServer {
    server: Arc<Server>,
    workers: Vec<JoinHandle<()>>,
    addr: SocketAddr,
}

impl HttpServer {
    /// Binds `addr` (port 0 picks a free port) and serves with `workers`
    /// threads.
    pub fn start(service: Arc<Service>, addr: &str, workers: usize) -> io::Result<Self> {
        let server = Arc::new(Server::http(addr).map_err(io::Error::other)?);
        let addr = server
            .server_addr()
            .to_ip()
            .ok_or_else(|| io::Error::other("not an IP listener"))?;
        let workers = (0..workers.max(1))
            .map(|_| {
                let server = Arc::clone(&server);
                let service = Arc::clone(&service);
                thread::spawn(move || {
                    while let Ok(request) = server.recv() {
                        respond(&service, request);
                    }
                })
            })
            .collect();
        Ok(HttpServer {
            server,
            workers,
            addr,
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Blocks until the workers exit, which they only do on shutdown.
    pub fn join(self) {
        for w in self.workers {
            let _ = w.join();
        }
    }

    pub fn shutdown(self) {
        for _ in &self.workers {
            self.server.unblock();
        }
        self.join();
    }
}

fn method_name(m: &Method) -> &'static str {
    match m {
        Method::Get => "GET",
        Method::Post => "POST",
        Method::Put => "PUT",
        Method::Delete => "DELETE",
        Method::Head => "HEAD",
        Method::Patch => "PATCH",
        Method::Options => "OPTIONS",
        _ => "OTHER",
    }
}

fn respond(service: &Service, mut request: Request) {
    let mut body = String::new();
    let reply = match request.as_reader().read_to_string(&mut body) {
        Ok(_) => service.handle(method_name(request.method()), request.url(), &body),
        Err(e) => super::api::Response::error(400, format!("unreadable body: {e}")),
    };
    let content_type =
        Header::from_bytes("Content-Type", "application/json").expect("static header is valid");
    let response = HttpResponse::from_string(reply.body)
        .with_status_code(reply.status)
        .with_header(content_type);
    // the client may have gone away; nothing useful to do about it
    let _ = request.respond(response);
}
