//! HTTP adapter over [`ReviewStore`].

use std::net::SocketAddr;
use std::path::PathBuf;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use super::store::{
    FixRequest, QueueFilter, ReviewError, ReviewStore, ScoreRequest, TaskKind, TaskPayload, TaskStatus,
};

#[derive(Debug, Deserialize)]
struct QueueQuery {
    kind: Option<TaskKind>,
    status: Option<TaskStatus>,
    #[serde(default = "first_page")]
    page: usize,
    #[serde(default = "default_per_page")]
    per_page: usize,
}

fn first_page() -> usize {
    1
}

fn default_per_page() -> usize {
    50
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EnqueueRequest {
    pub kind: TaskKind,
    pub problem_id: String,
    #[serde(default)]
    pub language: Option<String>,
    #[serde(default)]
    pub payload: TaskPayload,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

struct ApiError(ReviewError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, name) = match &self.0 {
            ReviewError::NotFound(_) => (StatusCode::NOT_FOUND, "NotFound"),
            ReviewError::TaskNotOpen { .. } => (StatusCode::CONFLICT, "TaskNotOpen"),
            ReviewError::WrongKind { .. } => (StatusCode::CONFLICT, "WrongKind"),
            ReviewError::OutOfRangeLabel { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "OutOfRangeLabel"),
            ReviewError::InvalidBbox { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "InvalidBbox"),
            ReviewError::InvalidRequest(_) => (StatusCode::UNPROCESSABLE_ENTITY, "InvalidRequest"),
            ReviewError::Io { .. } | ReviewError::CorruptLog { .. } => {
                (StatusCode::INTERNAL_SERVER_ERROR, "StoreFailure")
            }
        };
        (status, Json(ErrorBody { error: name.into(), message: self.0.to_string() })).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn queue(State(store): State<ReviewStore>, Query(q): Query<QueueQuery>) -> impl IntoResponse {
    Json(store.list(&QueueFilter { kind: q.kind, status: q.status }, q.page, q.per_page))
}

async fn enqueue(
    State(store): State<ReviewStore>,
    Json(req): Json<EnqueueRequest>,
) -> Result<(StatusCode, Json<super::ReviewTask>), ApiError> {
    let task = store.enqueue(req.kind, req.problem_id, req.language, req.payload).map_err(ApiError)?;
    Ok((StatusCode::CREATED, Json(task)))
}

async fn task(State(store): State<ReviewStore>, Path(id): Path<u64>) -> ApiResult<super::ReviewTask> {
    store.get(id).map(Json).map_err(ApiError)
}

async fn fix(
    State(store): State<ReviewStore>,
    Path(id): Path<u64>,
    Json(body): Json<FixRequest>,
) -> ApiResult<super::ReviewTask> {
    store.fix(id, body).map(Json).map_err(ApiError)
}

async fn score(
    State(store): State<ReviewStore>,
    Path(id): Path<u64>,
    Json(body): Json<ScoreRequest>,
) -> ApiResult<super::ReviewTask> {
    store.score(id, body).map(Json).map_err(ApiError)
}

/// `GET /queue`, `POST /queue`, `GET /task/{id}`, `POST /task/{id}/fix`,
/// `POST /task/{id}/score`; anything else is served from `static_dir` when
/// given.
pub fn router(store: ReviewStore, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/queue", get(queue).post(enqueue))
        .route("/task/{id}", get(task))
        .route("/task/{id}/fix", post(fix))
        .route("/task/{id}/score", post(score))
        .with_state(store);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serve until the process ends.
pub async fn serve(store: ReviewStore, addr: SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "review service listening");
    axum::serve(listener, router(store, static_dir)).await
}
