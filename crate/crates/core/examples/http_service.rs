//! Start the service on an ephemeral port in a temp data directory.
//! With `--demo` it drives the sample through every endpoint and exits.

use kgforge::service::{router, AppState};
use kgforge::workspace::{Settings, Workspace};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("kgforge-http-example-{}", std::process::id()));
    let ws = Workspace::new(&dir, Settings::default());
    let state = AppState::new(ws.clone(), ws.load()?);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    println!("data dir {}\nlistening on http://{addr}", dir.display());
    let server = tokio::spawn(async move { axum::serve(listener, router(state)).await });

    if !std::env::args().any(|a| a == "--demo") {
        server.await??;
        return Ok(());
    }
    let base = format!("http://{addr}");
    let (status, body) = tokio::task::spawn_blocking(move || demo(&base)).await??;
    println!("{status}\n{body}");
    Ok(())
}

/// Minimal HTTP/1.1 client over std so the example needs no extra crates.
fn request(base: &str, method: &str, path: &str, body: &str) -> std::io::Result<(u16, String)> {
    use std::io::{Read, Write};
    let host = base.trim_start_matches("http://");
    let mut s = std::net::TcpStream::connect(host)?;
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: {host}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )?;
    let mut out = String::new();
    s.read_to_string(&mut out)?;
    let status = out.split_whitespace().nth(1).and_then(|c| c.parse().ok()).unwrap_or(0);
    let body = out
        .split_once("\r\n\r\n")
        .map(|(_, b)| b.to_string())
        .unwrap_or_default();
    Ok((status, body))
}

fn demo(base: &str) -> std::io::Result<(u16, String)> {
    for req in kgforge::fixture::requests() {
        let (status, body) = request(base, "POST", "/datasets", &serde_json::to_string(&req).unwrap())?;
        println!("POST /datasets -> {status} {body}");
    }
    let (status, _) = request(base, "POST", "/kg/serialize", "")?;
    println!("POST /kg/serialize -> {status}");
    let (status, body) = request(base, "POST", "/dashboards", "")?;
    println!("POST /dashboards -> {status} {body}");
    request(
        base,
        "POST",
        "/dashboards/dash-1/query",
        r#"{"viz":"viz-1","filters":[{"document":"Bicycle-Share_Trip","column":"user_id","op":"eq","value":"u1"}]}"#,
    )
}
