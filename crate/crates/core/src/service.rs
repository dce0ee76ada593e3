//! HTTP facade over a [`Workspace`].
//!
//! Reads clone the current snapshot and never wait on writers. Ingest,
//! serialize and dashboard creation take the writer lock, build the next
//! snapshot and publish it with a single pointer swap.
//!
//! Errors are `{"error": <error name>, "detail": <message>}`.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

use crate::dashboard::{FilterExpr, VizSpec};
use crate::discovery::SuitabilityResult;
use crate::rdf::serialize_turtle;
use crate::serializer::SerializeError;
use crate::workspace::{self, IngestRequest, Snapshot, Workspace, WorkspaceError};

pub struct AppState {
    workspace: Workspace,
    current: RwLock<Arc<Snapshot>>,
    writer: Mutex<()>,
}

impl AppState {
    pub fn new(workspace: Workspace, snapshot: Snapshot) -> Arc<Self> {
        Arc::new(AppState {
            workspace,
            current: RwLock::new(Arc::new(snapshot)),
            writer: Mutex::new(()),
        })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock poisoned").clone()
    }

    fn publish(&self, next: Snapshot) {
        *self.current.write().expect("snapshot lock poisoned") = Arc::new(next);
    }
}

pub struct ApiError(WorkspaceError);

impl<E: Into<WorkspaceError>> From<E> for ApiError {
    fn from(e: E) -> Self {
        ApiError(e.into())
    }
}

fn status_of(e: &WorkspaceError) -> StatusCode {
    match e {
        WorkspaceError::Ingest(i) if i.is_characterization_gap() => StatusCode::UNPROCESSABLE_ENTITY,
        WorkspaceError::Serialize(SerializeError::EmptyKg) => StatusCode::CONFLICT,
        WorkspaceError::Serialize(SerializeError::Io { .. }) | WorkspaceError::Io { .. } => {
            StatusCode::INTERNAL_SERVER_ERROR
        }
        WorkspaceError::Serialize(_) => StatusCode::CONFLICT,
        WorkspaceError::NotSerialized | WorkspaceError::UnknownDashboard(_) | WorkspaceError::UnknownViz { .. } => {
            StatusCode::NOT_FOUND
        }
        _ => StatusCode::BAD_REQUEST,
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ErrorBody {
    pub error: String,
    pub detail: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = status_of(&self.0);
        if status.is_server_error() {
            tracing::error!(error = %self.0, "request failed");
        }
        let body = ErrorBody {
            error: self.0.name().to_string(),
            detail: self.0.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Parses a JSON body; malformed input is a 400 with the parser's message.
fn body<T: DeserializeOwned>(bytes: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError(WorkspaceError::InvalidRequest(e.to_string())))
}

/// Body that may be empty, standing for the default value.
fn optional_body<T: DeserializeOwned + Default>(bytes: &[u8]) -> ApiResult<T> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        Ok(T::default())
    } else {
        body(bytes)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct Created {
    pub id: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DashboardRequest {
    #[serde(default)]
    pub visualizations: Vec<VizSpec>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QueryRequest {
    pub viz: String,
    #[serde(default)]
    pub filters: Vec<FilterExpr>,
}

#[derive(Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SelectionRequest {
    #[serde(default)]
    pub filters: Vec<FilterExpr>,
}

#[derive(Serialize)]
struct DiscoveredBody<'a> {
    turtle: String,
    indicators: Vec<&'a SuitabilityResult>,
}

async fn post_dataset(State(st): State<Arc<AppState>>, bytes: Bytes) -> ApiResult<Response> {
    let req: IngestRequest = body(&bytes)?;
    let _w = st.writer.lock().await;
    let (next, record) = st.workspace.ingest(&st.snapshot(), &req)?;
    st.publish(next);
    tracing::info!(id = %record.id, class = %record.records_class, "dataset ingested");
    Ok((StatusCode::CREATED, Json(Created { id: record.id })).into_response())
}

async fn list_datasets(State(st): State<Arc<AppState>>) -> Response {
    Json(st.snapshot().datasets.clone()).into_response()
}

async fn post_serialize(State(st): State<Arc<AppState>>) -> ApiResult<Response> {
    let _w = st.writer.lock().await;
    let next = st.workspace.serialize(&st.snapshot())?;
    let manifest = next.serialized()?.manifest.clone();
    st.publish(next);
    Ok(Json(manifest).into_response())
}

async fn get_manifest(State(st): State<Arc<AppState>>) -> ApiResult<Response> {
    let snap = st.snapshot();
    Ok(Json(&snap.serialized()?.manifest).into_response())
}

fn wants_turtle(headers: &HeaderMap) -> bool {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.contains("text/turtle"))
}

async fn get_discovered(State(st): State<Arc<AppState>>, headers: HeaderMap) -> ApiResult<Response> {
    let snap = st.snapshot();
    let s = snap.serialized()?;
    let turtle = serialize_turtle(&s.discovered);
    if wants_turtle(&headers) {
        return Ok(([(header::CONTENT_TYPE, "text/turtle; charset=utf-8")], turtle).into_response());
    }
    Ok(Json(DiscoveredBody {
        turtle,
        indicators: s.results.iter().filter(|r| r.suitable).collect(),
    })
    .into_response())
}

async fn post_dashboard(State(st): State<Arc<AppState>>, bytes: Bytes) -> ApiResult<Response> {
    let req: DashboardRequest = optional_body(&bytes)?;
    let _w = st.writer.lock().await;
    let (next, spec) = st.workspace.create_dashboard(&st.snapshot(), req.visualizations)?;
    st.publish(next);
    Ok((StatusCode::CREATED, Json(Created { id: spec.id.clone() })).into_response())
}

async fn get_dashboard(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let snap = st.snapshot();
    Ok(Json(snap.dashboard(&id)?).into_response())
}

async fn post_query(State(st): State<Arc<AppState>>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Response> {
    let req: QueryRequest = body(&bytes)?;
    let snap = st.snapshot();
    Ok(Json(workspace::query(&snap, &id, &req.viz, &req.filters)?).into_response())
}

async fn post_selection(State(st): State<Arc<AppState>>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Response> {
    let req: SelectionRequest = optional_body(&bytes)?;
    let snap = st.snapshot();
    Ok(Json(workspace::selection(&snap, &id, &req.filters)?).into_response())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/datasets", post(post_dataset).get(list_datasets))
        .route("/kg/serialize", post(post_serialize))
        .route("/kg/manifest", get(get_manifest))
        .route("/indicators/discovered", get(get_discovered))
        .route("/dashboards", post(post_dashboard))
        .route("/dashboards/:id", get(get_dashboard))
        .route("/dashboards/:id/query", post(post_query))
        .route("/dashboards/:id/selection", post(post_selection))
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(workspace: Workspace, addr: SocketAddr) -> Result<(), WorkspaceError> {
    let snapshot = workspace.load()?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| WorkspaceError::Io {
            path: addr.to_string(),
            message: e.to_string(),
        })?;
    let local = listener.local_addr().map_err(|e| WorkspaceError::Io {
        path: addr.to_string(),
        message: e.to_string(),
    })?;
    tracing::info!(%local, root = %workspace.root().display(), "listening");
    eprintln!("listening on http://{local}");
    axum::serve(listener, router(AppState::new(workspace, snapshot)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| WorkspaceError::Io {
            path: local.to_string(),
            message: e.to_string(),
        })
}
