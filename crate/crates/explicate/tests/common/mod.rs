#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use explicate::cli::train_on;
use explicate::config::Config;
use explicate::core::dataset::DatasetRecord;
use explicate::core::pipeline::Detector;
use explicate::ingest::{load_dataset, ColumnOverrides};
use serde_json::{json, Value};

pub const EMAIL_1: &str = "Urgent: Your account will be suspended. Click here to verify.";
pub const EMAIL_2: &str = "Meeting scheduled for tomorrow at 2 PM in conference room.";
pub const EMAIL_3: &str = "You've won $1M! Click to claim prize now!";

pub fn desk_corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/desk_corpus.csv")
}

pub struct Desk {
    pub detector: Detector,
    pub test: Vec<DatasetRecord>,
    pub train_len: usize,
}

pub fn desk() -> &'static Desk {
    static DESK: OnceLock<Desk> = OnceLock::new();
    DESK.get_or_init(|| {
        let data = load_dataset(&[desk_corpus_path()], &ColumnOverrides::default()).unwrap();
        let (detector, _, test, train_len) = train_on(&data.records, &Config::default()).unwrap();
        Desk { detector, test, train_len }
    })
}

/// How the stub chat endpoint answers.
#[derive(Debug, Clone)]
pub enum Reply {
    /// Echo the model verdict found in the prompt.
    Echo,
    Content(String),
    Status(u16),
    /// Fail with 500 this many times, then echo.
    FailThenEcho(usize),
}

#[derive(Default)]
pub struct Seen {
    pub bodies: Vec<Value>,
    pub auth: Vec<Option<String>>,
}

struct Stub {
    reply: Reply,
    seen: Mutex<Seen>,
}

async fn chat(State(stub): State<Arc<Stub>>, headers: HeaderMap, Json(body): Json<Value>) -> Response {
    let calls = {
        let mut seen = stub.seen.lock().unwrap();
        seen.auth.push(headers.get("authorization").and_then(|v| v.to_str().ok()).map(str::to_string));
        seen.bodies.push(body.clone());
        seen.bodies.len()
    };
    let user = body["messages"][1]["content"].as_str().unwrap_or_default().to_string();
    let echo = || {
        let verdict = user
            .rfind("\nModel verdict: ")
            .map(|i| &user[i + 16..])
            .and_then(|rest| rest.split_whitespace().next())
            .unwrap_or("unknown");
        format!("VERDICT: {verdict}\nThe indicators listed support this verdict.")
    };
    let content = match &stub.reply {
        Reply::Echo => echo(),
        Reply::Content(c) => c.clone(),
        Reply::Status(s) => return StatusCode::from_u16(*s).unwrap().into_response(),
        Reply::FailThenEcho(n) if calls <= *n => return StatusCode::INTERNAL_SERVER_ERROR.into_response(),
        Reply::FailThenEcho(_) => echo(),
    };
    Json(json!({"choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]})).into_response()
}

pub struct StubServer {
    pub addr: SocketAddr,
    stub: Arc<Stub>,
}

impl StubServer {
    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    pub fn calls(&self) -> usize {
        self.stub.seen.lock().unwrap().bodies.len()
    }

    pub fn seen<T>(&self, f: impl FnOnce(&Seen) -> T) -> T {
        f(&self.stub.seen.lock().unwrap())
    }
}

/// Starts the stub on an ephemeral port of the current runtime.
pub async fn start_stub(reply: Reply) -> StubServer {
    let stub = Arc::new(Stub { reply, seen: Mutex::new(Seen::default()) });
    let app = Router::new().route("/v1/chat/completions", post(chat)).with_state(stub.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    StubServer { addr, stub }
}

/// An address with nothing listening.
pub fn dead_address() -> String {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    format!("http://{addr}/v1")
}
