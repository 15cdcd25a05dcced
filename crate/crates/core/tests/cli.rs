use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::process::{Command, Output};
use std::thread;
use std::time::Duration;

use mdpc::interactions::{InteractionConfig, InteractionKind};
use mdpc::picking::PickBuffer;
use mdpc::server::{serve, ServeConfig};

fn mdpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdpc")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SCROLL_TRACE: &str = r#"{"seq":1,"type":"press","x":10,"y":100,"button":1}
{"seq":2,"type":"move","x":10,"y":130}
{"seq":3,"type":"release","x":10,"y":130}
"#;

#[test]
fn run_passes_and_fails_on_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let trace = write(dir.path(), "t.jsonl", SCROLL_TRACE);
    let good = write(
        dir.path(),
        "good.json",
        r#"[{"after_seq":2,"assert":"state","equals":"dragging"},
            {"after_seq":3,"assert":"model","equals":{"events":[],"scrollbar":{"low":0.3,"high":0.6}}},
            {"after_seq":3,"assert":"pick","x":10,"y":120,"tag":"thumb"}]"#,
    );
    let out = mdpc(&["run", "--interaction", "scrollbar", "--trace", &trace, "--expect", &good]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 3);

    let bad = write(dir.path(), "bad.json", r#"[{"after_seq":3,"assert":"state","equals":"dragging"}]"#);
    let out = mdpc(&["run", "--interaction", "scrollbar", "--trace", &trace, "--expect", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["checks"][0]["actual"], "idle");
}

#[test]
fn malformed_trace_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let trace = write(dir.path(), "t.jsonl", "{\"seq\":1,\"type\":\"move\",\"x\":1,\"y\":1}\n{\"seq\":2,\"type\":\"jump\"}\n");
    let out = mdpc(&["run", "--interaction", "dnd", "--trace", &trace]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = mdpc(&["run", "--interaction", "teapot", "--trace", &trace]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_trace_is_an_empty_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let trace = write(dir.path(), "t.jsonl", "");
    let out = mdpc(&["run", "--interaction", "calendar", "--trace", &trace]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["records"], 0);
    assert_eq!(report["passed"], true);
}

#[test]
fn dumps_and_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "m.json",
        r#"{"events":[{"id":42,"start_min":600,"end_min":660,"title":"e42"}]}"#,
    );
    let run = |n: &str| {
        let ppm = dir.path().join(format!("{n}.ppm"));
        let json = dir.path().join(format!("{n}.json"));
        let out = mdpc(&[
            "run",
            "--interaction",
            "calendar",
            "--model",
            &model,
            "--seed",
            "5",
            "--snap",
            "15",
            "--dump-picking",
            ppm.to_str().unwrap(),
            "--dump-display",
            json.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (out.stdout, fs::read(ppm).unwrap(), fs::read(json).unwrap())
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let report: serde_json::Value = serde_json::from_slice(&a.0).unwrap();
    assert_eq!(report["seed"], 5);
    let buf = PickBuffer::read_ppm(&a.1[..]).unwrap();
    assert_eq!((buf.width(), buf.height()), (700, 960));
    let display: serde_json::Value = serde_json::from_slice(&a.2).unwrap();
    assert!(display.as_array().unwrap().iter().any(|c| c["tag"] == "ev-42"));
}

#[test]
fn dnd_jitter_trace_is_a_click() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "m.json",
        r#"{"events":[],"objects":[{"id":1,"x":100,"y":100,"w":60,"h":40}]}"#,
    );
    let trace = write(
        dir.path(),
        "t.jsonl",
        r#"{"seq":1,"type":"press","x":100,"y":100}
{"seq":2,"type":"move","x":102,"y":101}
{"seq":3,"type":"move","x":99,"y":97}
{"seq":4,"type":"release","x":99,"y":97}
"#,
    );
    let expect = write(
        dir.path(),
        "e.json",
        r#"[{"after_seq":4,"assert":"model","equals":{"events":[],"objects":[{"id":1,"x":100,"y":100,"w":60,"h":40}]}},
            {"after_seq":4,"assert":"state","equals":"start"}]"#,
    );
    let out = mdpc(&["run", "--interaction", "dnd", "--model", &model, "--trace", &trace, "--expect", &expect]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

fn start_server(static_dir: Option<&Path>) -> u16 {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port();
    let config = ServeConfig {
        kind: InteractionKind::Scrollbar,
        model: None,
        cfg: InteractionConfig::default(),
        static_dir: static_dir.map(Path::to_path_buf),
    };
    thread::spawn(move || serve(listener, config));
    port
}

fn read_json_line(r: &mut impl BufRead) -> serde_json::Value {
    let mut line = String::new();
    r.read_line(&mut line).unwrap();
    serde_json::from_str(&line).unwrap()
}

#[test]
fn tcp_ndjson_session() {
    let port = start_server(None);
    let mut stream = TcpStream::connect(("127.0.0.1", port)).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    assert_eq!(read_json_line(&mut reader)["type"], "frame");
    assert_eq!(read_json_line(&mut reader)["type"], "model");

    stream.write_all(b"garbage\n").unwrap();
    assert_eq!(read_json_line(&mut reader)["type"], "error");

    stream.write_all(b"{\"seq\":1,\"type\":\"press\",\"x\":10,\"y\":100}\n").unwrap();
    let frame = read_json_line(&mut reader);
    assert_eq!(frame["type"], "frame");
    assert_eq!(frame["state"], "dragging");
    stream.write_all(b"{\"seq\":2,\"type\":\"move\",\"x\":10,\"y\":130}\n").unwrap();
    assert_eq!(read_json_line(&mut reader)["type"], "frame");
    let model = read_json_line(&mut reader);
    assert_eq!(model["type"], "model");
    assert!((model["snapshot"]["scrollbar"]["low"].as_f64().unwrap() - 0.3).abs() < 1e-9);
}

#[test]
fn websocket_session() {
    let port = start_server(None);
    let (mut ws, _) = tungstenite::connect(format!("ws://127.0.0.1:{port}/session")).unwrap();
    let mut next = || -> serde_json::Value {
        loop {
            if let tungstenite::Message::Text(t) = ws.read().unwrap() {
                return serde_json::from_str(&t).unwrap();
            }
        }
    };
    assert_eq!(next()["type"], "frame");
    assert_eq!(next()["type"], "model");
    ws.send(tungstenite::Message::text(r#"{"type":"debug_picking","on":true}"#)).unwrap();
    let frame = loop {
        if let tungstenite::Message::Text(t) = ws.read().unwrap() {
            break serde_json::from_str::<serde_json::Value>(&t).unwrap();
        }
    };
    assert!(!frame["picking_debug"].as_array().unwrap().is_empty());
    assert!(frame["picking_debug"].as_array().unwrap().iter().all(|c| c["layer"] == "picking-debug"));
}

fn http_get(port: u16, path: &str) -> String {
    let mut s = TcpStream::connect(("127.0.0.1", port)).unwrap();
    write!(s, "GET {path} HTTP/1.1\r\nHost: localhost\r\n\r\n").unwrap();
    let mut out = String::new();
    s.read_to_string(&mut out).unwrap();
    out
}

#[test]
fn static_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("index.html"), "<canvas></canvas>").unwrap();
    fs::write(dir.path().join("app.js"), "console.log(1)").unwrap();
    let port = start_server(Some(dir.path()));
    let index = http_get(port, "/");
    assert!(index.starts_with("HTTP/1.1 200"));
    assert!(index.contains("text/html"));
    assert!(index.ends_with("<canvas></canvas>"));
    assert!(http_get(port, "/app.js").contains("text/javascript"));
    assert!(http_get(port, "/missing.css").starts_with("HTTP/1.1 404"));
    assert!(http_get(port, "/../secret").starts_with("HTTP/1.1 403"));
}
