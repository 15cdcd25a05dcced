//! Transports for [`Session`]: stdio, raw NDJSON over TCP, websocket, and a
//! small static file server for the browser client. One TCP port serves
//! all three; the first bytes of a connection decide which.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Component, Path, PathBuf};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use tungstenite::Message;

use crate::interactions::{create, InteractionConfig, InteractionKind};
use crate::model::Model;
use crate::session::{ServerMessage, Session};

/// What every new connection starts from.
#[derive(Clone, Debug)]
pub struct ServeConfig {
    pub kind: InteractionKind,
    pub model: Option<Model>,
    pub cfg: InteractionConfig,
    pub static_dir: Option<PathBuf>,
}

impl ServeConfig {
    pub fn session(&self) -> io::Result<Session> {
        Session::new(create(self.kind, self.model.clone(), self.cfg))
            .map_err(io::Error::other)
    }
}

fn write_messages(out: &mut impl Write, msgs: &[ServerMessage]) -> io::Result<()> {
    for m in msgs {
        out.write_all(m.to_line().as_bytes())?;
    }
    out.flush()
}

/// Runs a session over a line reader and a writer. A reader thread feeds a
/// queue; whatever has piled up is handled as one batch, so bursts of moves
/// are coalesced into one frame.
pub fn run_ndjson<R, W>(mut session: Session, input: R, mut output: W) -> io::Result<()>
where
    R: BufRead + Send + 'static,
    W: Write,
{
    let (tx, rx) = mpsc::channel::<String>();
    let reader = thread::spawn(move || {
        for line in input.lines() {
            let Ok(line) = line else { break };
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    write_messages(&mut output, &session.hello())?;
    while let Ok(first) = rx.recv() {
        let mut batch = vec![first];
        batch.extend(rx.try_iter());
        write_messages(&mut output, &session.handle_batch(&batch))?;
    }
    let _ = reader.join();
    Ok(())
}

pub fn serve_stdio(config: &ServeConfig) -> io::Result<()> {
    let session = config.session()?;
    let stdin = BufReader::new(io::stdin());
    run_ndjson(session, stdin, io::stdout().lock())
}

/// Accepts connections forever, one thread and one session each.
pub fn serve(listener: TcpListener, config: ServeConfig) -> io::Result<()> {
    let config = Arc::new(config);
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        let config = Arc::clone(&config);
        thread::spawn(move || {
            if let Err(e) = handle_connection(stream, &config) {
                eprintln!("connection closed: {e}");
            }
        });
    }
    Ok(())
}

/// How long a new connection may stay silent before it is taken for an
/// NDJSON client waiting for the first frame.
pub const SNIFF_TIMEOUT: Duration = Duration::from_millis(250);

fn handle_connection(stream: TcpStream, config: &ServeConfig) -> io::Result<()> {
    let mut head = [0u8; 2048];
    stream.set_read_timeout(Some(SNIFF_TIMEOUT))?;
    let n = match stream.peek(&mut head) {
        Ok(n) => n,
        Err(e) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => 0,
        Err(e) => return Err(e),
    };
    stream.set_read_timeout(None)?;
    let head = String::from_utf8_lossy(&head[..n]).to_ascii_lowercase();
    if !head.starts_with("get ") {
        let session = config.session()?;
        let reader = BufReader::new(stream.try_clone()?);
        return run_ndjson(session, reader, stream);
    }
    if head.contains("upgrade: websocket") {
        return run_websocket(stream, config);
    }
    serve_static(stream, config.static_dir.as_deref())
}

fn run_websocket(stream: TcpStream, config: &ServeConfig) -> io::Result<()> {
    let to_io = |e: tungstenite::Error| io::Error::other(e);
    let mut ws = tungstenite::accept(stream).map_err(|e| io::Error::other(e.to_string()))?;
    let mut session = config.session()?;
    let send = |ws: &mut tungstenite::WebSocket<TcpStream>, msgs: Vec<ServerMessage>| {
        for m in msgs {
            let line = m.to_line();
            ws.send(Message::text(line.trim_end())).map_err(to_io)?;
        }
        Ok::<_, io::Error>(())
    };
    send(&mut ws, session.hello())?;
    loop {
        let msg = match ws.read() {
            Ok(m) => m,
            Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => {
                return Ok(())
            }
            Err(e) => return Err(to_io(e)),
        };
        match msg {
            Message::Text(text) => {
                let lines: Vec<&str> = text.lines().collect();
                send(&mut ws, session.handle_batch(&lines))?;
            }
            Message::Close(_) => return Ok(()),
            _ => {}
        }
    }
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json" | "map") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("wasm") => "application/wasm",
        _ => "application/octet-stream",
    }
}

/// Maps a request path to a file under `root`, refusing anything that
/// would escape it.
pub fn resolve_static(root: &Path, url_path: &str) -> Option<PathBuf> {
    let path = url_path.split(['?', '#']).next().unwrap_or("/");
    let rel = Path::new(path.trim_start_matches('/'));
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
        return None;
    }
    let mut full = root.join(rel);
    if path.ends_with('/') || full.is_dir() {
        full.push("index.html");
    }
    Some(full)
}

fn respond(stream: &mut TcpStream, status: &str, ctype: &str, body: &[u8]) -> io::Result<()> {
    write!(
        stream,
        "HTTP/1.1 {status}\r\nContent-Type: {ctype}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    )?;
    stream.write_all(body)?;
    stream.flush()
}

fn serve_static(mut stream: TcpStream, root: Option<&Path>) -> io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    // drain headers
    let mut line = String::new();
    while reader.read_line(&mut line)? > 2 {
        line.clear();
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("/");
    let Some(root) = root else {
        return respond(&mut stream, "404 Not Found", "text/plain", b"no static directory configured\n");
    };
    match resolve_static(root, path) {
        None => respond(&mut stream, "403 Forbidden", "text/plain", b"forbidden\n"),
        Some(file) => match std::fs::File::open(&file) {
            Ok(mut f) => {
                let mut body = Vec::new();
                f.read_to_end(&mut body)?;
                respond(&mut stream, "200 OK", content_type(&file), &body)
            }
            Err(_) => respond(&mut stream, "404 Not Found", "text/plain", b"not found\n"),
        },
    }
}
