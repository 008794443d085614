//! JSON-over-HTTP front end.
//!
//! | method | path                      | body       | reply                                      |
//! |--------|---------------------------|------------|--------------------------------------------|
//! | POST   | `/sessions`               |            | `{session_id, greeting}`                   |
//! | POST   | `/sessions/{id}/messages` | `{text}`   | `{reply, session_id, turn, finished_tasks, active_task}` |
//! | GET    | `/sessions/{id}/tree`     |            | tree snapshot                              |
//! | DELETE | `/sessions/{id}`          |            | 204                                        |
//! | GET    | `/health`                 |            | `{status, bot, version}`                   |
//!
//! Errors are `{error}` with 404 (unknown session), 409 (turn queue full) or
//! 503 (store unreachable).

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tod_core::{SessionError, SessionManager, TreeSnapshot};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CreatedSession {
    pub session_id: String,
    pub greeting: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MessageRequest {
    #[serde(default)]
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MessageResponse {
    pub reply: String,
    pub session_id: String,
    pub turn: u64,
    pub finished_tasks: Vec<String>,
    pub active_task: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ErrorBody {
    pub error: String,
}

struct ApiError(StatusCode, String);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::NotFound(_) => StatusCode::NOT_FOUND,
            SessionError::Busy(_) => StatusCode::CONFLICT,
            SessionError::Store(_) => StatusCode::SERVICE_UNAVAILABLE,
            SessionError::Dialogue(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            log::error!("{e}");
        }
        ApiError(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ErrorBody { error: self.1 })).into_response()
    }
}

type Shared = Arc<SessionManager>;

/// Runs blocking session work off the async executor.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, SessionError> + Send + 'static,
    T: Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => Err(ApiError(StatusCode::INTERNAL_SERVER_ERROR, format!("worker failed: {e}"))),
    }
}

async fn create_session(State(m): State<Shared>) -> Result<Json<CreatedSession>, ApiError> {
    let (session_id, greeting) = blocking(move || m.create_session()).await?;
    Ok(Json(CreatedSession { session_id, greeting }))
}

async fn post_message(
    State(m): State<Shared>,
    Path(id): Path<String>,
    Json(req): Json<MessageRequest>,
) -> Result<Json<MessageResponse>, ApiError> {
    let sid = id.clone();
    let out = blocking(move || m.message(&sid, &req.text)).await?;
    Ok(Json(MessageResponse {
        reply: out.reply,
        session_id: id,
        turn: out.turn,
        finished_tasks: out.effect.finished_tasks,
        active_task: out.active_task,
    }))
}

async fn get_tree(State(m): State<Shared>, Path(id): Path<String>) -> Result<Json<TreeSnapshot>, ApiError> {
    Ok(Json(blocking(move || m.tree(&id)).await?))
}

async fn delete_session(State(m): State<Shared>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    blocking(move || m.delete(&id)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn health(State(m): State<Shared>) -> Json<serde_json::Value> {
    let cfg = m.engine().config();
    Json(serde_json::json!({
        "status": "ok",
        "bot": cfg.bot_meta.bot_name,
        "version": cfg.version,
    }))
}

pub fn router(manager: Arc<SessionManager>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", delete(delete_session))
        .route("/sessions/{id}/messages", post(post_message))
        .route("/sessions/{id}/tree", get(get_tree))
        .route("/health", get(health))
        .with_state(manager)
}
