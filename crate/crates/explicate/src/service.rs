//! HTTP JSON API over a shared, swappable model snapshot.

use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{DefaultBodyLimit, Multipart, State};
use axum::extract::rejection::JsonRejection;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use explicate_core::features::ConceptGroup;
use explicate_core::lime::LimeConfig;
use explicate_core::llm::ExplanationMode;
use explicate_core::pipeline::{Detector, MODEL_FORMAT_VERSION};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Semaphore;
use tower_http::catch_panic::CatchPanicLayer;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use crate::analysis::{analyze_xai, attach_llm, validate_options, AnalysisMode, AnalysisReport, AnalyzeOptions};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::llm_client::{EndpointConfig, LlmClient};
use crate::model_io::{load_model, model_version};

pub struct ModelSnapshot {
    pub detector: Detector,
    pub version: String,
}

impl ModelSnapshot {
    pub fn new(detector: Detector) -> Self {
        let version = model_version(&detector);
        Self { detector, version }
    }
}

pub struct AppState {
    model: RwLock<Arc<ModelSnapshot>>,
    model_path: Option<PathBuf>,
    lime: LimeConfig,
    top_features: usize,
    endpoint: EndpointConfig,
    llm: Option<LlmClient>,
    llm_slots: Semaphore,
    audit: Option<Mutex<std::fs::File>>,
}

impl AppState {
    /// `llm = None` serves template explanations only.
    pub fn new(detector: Detector, model_path: Option<PathBuf>, config: &Config, llm: Option<LlmClient>) -> Result<Self> {
        let audit = match &config.service.audit_log {
            Some(path) => Some(Mutex::new(
                std::fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .map_err(|source| Error::FileUnwritable { path: path.clone(), source })?,
            )),
            None => None,
        };
        Ok(Self {
            model: RwLock::new(Arc::new(ModelSnapshot::new(detector))),
            model_path,
            lime: config.lime,
            top_features: config.top_features,
            endpoint: config.llm.clone(),
            llm,
            llm_slots: Semaphore::new(config.service.llm_concurrency.max(1)),
            audit,
        })
    }

    pub fn snapshot(&self) -> Arc<ModelSnapshot> {
        self.model.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Atomically replaces the served model.
    pub fn swap(&self, detector: Detector) -> String {
        let snapshot = Arc::new(ModelSnapshot::new(detector));
        let version = snapshot.version.clone();
        *self.model.write().unwrap_or_else(|e| e.into_inner()) = snapshot;
        version
    }

    fn audit(&self, report: &AnalysisReport) {
        let Some(file) = &self.audit else { return };
        let line = json!({
            "unix_ms": std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
            "report": report,
        });
        let mut f = file.lock().unwrap_or_else(|e| e.into_inner());
        if let Err(e) = writeln!(f, "{line}") {
            tracing::warn!(error = %e, "audit log write failed");
        }
    }
}

/// Structured error body: `{"error": {"code": ..., "message": ...}}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, code, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self { status: StatusCode::INTERNAL_SERVER_ERROR, code: "internal", message: message.into() }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e.exit_code() {
            2 => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self { status, code: e.code(), message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": {"code": self.code, "message": self.message}});
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeRequest {
    pub text: String,
    #[serde(default)]
    pub mode: Option<AnalysisMode>,
    #[serde(default)]
    pub explanation_mode: Option<ExplanationMode>,
    #[serde(default)]
    pub top_k: Option<usize>,
}

async fn health(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({"status": "ok", "model_version": state.snapshot().version}))
}

#[derive(Serialize)]
struct GroupSize {
    group: ConceptGroup,
    features: usize,
}

async fn model_info(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let snap = state.snapshot();
    let d = &snap.detector;
    let groups: Vec<GroupSize> =
        d.registry().group_sizes().into_iter().map(|(group, features)| GroupSize { group, features }).collect();
    Json(json!({
        "version": snap.version,
        "format_version": MODEL_FORMAT_VERSION,
        "total_dim": d.registry().total_dim(),
        "vocab_size": d.registry().vocab_size(),
        "threshold": d.model().threshold,
        "training_examples": d.training_examples(),
        "registry": groups,
    }))
}

async fn run_analysis(state: Arc<AppState>, text: String, options: AnalyzeOptions) -> ApiResult<AnalysisReport> {
    validate_options(&options)?;
    if text.trim().is_empty() {
        return Err(ApiError::bad_request("empty_input", "email text is empty"));
    }
    let snap = state.snapshot();
    let (lime, top_features) = (state.lime, state.top_features);
    let (text, report) = tokio::task::spawn_blocking(move || {
        let report = analyze_xai(&snap.detector, &snap.version, &text, &options, &lime, top_features);
        (text, report)
    })
    .await
    .map_err(|e| ApiError::internal(format!("analysis task failed: {e}")))?;
    let mut report = report?;
    if options.mode == AnalysisMode::XaiPlusLlm {
        let _permit = state.llm_slots.acquire().await.map_err(|_| ApiError::internal("llm limiter closed"))?;
        attach_llm(&mut report, &text, options.explanation_mode, state.llm.as_ref(), &state.endpoint).await;
    }
    state.audit(&report);
    Ok(report)
}

async fn analyze(
    State(state): State<Arc<AppState>>,
    body: std::result::Result<Json<AnalyzeRequest>, JsonRejection>,
) -> ApiResult<Json<AnalysisReport>> {
    let Json(req) = body.map_err(|e| ApiError::bad_request("invalid_request", e.body_text()))?;
    let options = AnalyzeOptions {
        mode: req.mode.unwrap_or_default(),
        explanation_mode: req.explanation_mode.unwrap_or(ExplanationMode::Detailed),
        top_k: req.top_k,
    };
    Ok(Json(run_analysis(state, req.text, options).await?))
}

fn accepted_upload(name: &str) -> bool {
    match name.rsplit_once('.') {
        Some((_, ext)) => ext.eq_ignore_ascii_case("eml") || ext.eq_ignore_ascii_case("txt"),
        None => true,
    }
}

async fn analyze_file(State(state): State<Arc<AppState>>, mut multipart: Multipart) -> ApiResult<Json<AnalysisReport>> {
    let mut text = None;
    let mut options = AnalyzeOptions::default();
    let bad_form = |e: axum::extract::multipart::MultipartError| ApiError::bad_request("invalid_request", e.body_text());
    while let Some(field) = multipart.next_field().await.map_err(bad_form)? {
        let name = field.name().unwrap_or_default().to_string();
        match name.as_str() {
            "file" => {
                let file_name = field.file_name().unwrap_or_default().to_string();
                if !accepted_upload(&file_name) {
                    return Err(ApiError::bad_request("unsupported_file", "only .eml and .txt files are accepted"));
                }
                let bytes = field.bytes().await.map_err(bad_form)?;
                text = Some(String::from_utf8_lossy(&bytes).into_owned());
            }
            "mode" => {
                let v = field.text().await.map_err(bad_form)?;
                options.mode = AnalysisMode::parse(&v)
                    .ok_or_else(|| ApiError::bad_request("invalid_request", format!("unknown mode {v:?}")))?;
            }
            "explanation_mode" => {
                let v = field.text().await.map_err(bad_form)?;
                options.explanation_mode = ExplanationMode::parse(&v)
                    .ok_or_else(|| ApiError::bad_request("invalid_request", format!("unknown explanation mode {v:?}")))?;
            }
            "top_k" => {
                let v = field.text().await.map_err(bad_form)?;
                options.top_k = Some(
                    v.trim().parse().map_err(|_| ApiError::bad_request("invalid_request", "top_k must be an integer"))?,
                );
            }
            _ => {}
        }
    }
    let text = text.ok_or_else(|| ApiError::bad_request("invalid_request", "multipart field \"file\" is missing"))?;
    Ok(Json(run_analysis(state, text, options).await?))
}

async fn reload(State(state): State<Arc<AppState>>) -> ApiResult<Json<serde_json::Value>> {
    let path = state
        .model_path
        .clone()
        .ok_or_else(|| ApiError::bad_request("no_model_path", "service was started without a model file"))?;
    let detector = tokio::task::spawn_blocking(move || load_model(&path))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    let version = state.swap(detector);
    tracing::info!(%version, "model reloaded");
    Ok(Json(json!({"model_version": version})))
}

fn panic_response(_: Box<dyn std::any::Any + Send + 'static>) -> Response {
    ApiError::internal("request handler panicked").into_response()
}

fn cors(origins: &[String]) -> Result<CorsLayer> {
    let allow = if origins.is_empty() {
        AllowOrigin::any()
    } else {
        let values = origins
            .iter()
            .map(|o| HeaderValue::from_str(o).map_err(|_| Error::Config(format!("invalid CORS origin {o:?}"))))
            .collect::<Result<Vec<_>>>()?;
        AllowOrigin::list(values)
    };
    Ok(CorsLayer::new().allow_origin(allow).allow_methods([Method::GET, Method::POST]).allow_headers([header::CONTENT_TYPE]))
}

pub fn router(state: Arc<AppState>, config: &Config) -> Result<Router> {
    let mut app = Router::new()
        .route("/api/health", get(health))
        .route("/api/model/info", get(model_info))
        .route("/api/analyze", post(analyze))
        .route("/api/analyze/file", post(analyze_file))
        .route("/api/admin/reload", post(reload))
        .with_state(state);
    if let Some(dir) = &config.service.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    Ok(app
        .layer(DefaultBodyLimit::max(config.service.max_body_bytes))
        .layer(cors(&config.service.cors_origins)?)
        .layer(CatchPanicLayer::custom(panic_response)))
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    tracing::info!("shutting down; finishing in-flight requests");
}

/// Binds and serves until interrupted, then drains in-flight requests.
pub async fn serve(state: Arc<AppState>, config: &Config) -> Result<()> {
    let app = router(state, config)?;
    let addr = config.service.bind;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| Error::BindFailure { addr: addr.to_string(), source })?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown_signal())
        .await
        .map_err(Error::Server)
}
