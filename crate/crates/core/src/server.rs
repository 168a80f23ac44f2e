//! HTTP binding of the session service.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::error::Error;
use crate::session::{SessionError, SessionStore, StepRequest};

impl SessionError {
    pub fn status(&self) -> StatusCode {
        match self {
            SessionError::UnknownSession(_) | SessionError::UnknownRobot { .. } => StatusCode::NOT_FOUND,
            SessionError::Finished => StatusCode::CONFLICT,
            SessionError::Forced { .. } => StatusCode::LOCKED,
            SessionError::BadRequest(_) => StatusCode::BAD_REQUEST,
            SessionError::Core(e) => match e {
                Error::Schema { .. } | Error::Json(_) | Error::Usage(_) => StatusCode::BAD_REQUEST,
                Error::Model(_) | Error::Capability(_) | Error::SequenceUndefined => StatusCode::UNPROCESSABLE_ENTITY,
                Error::AdversaryContract(_) | Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            SessionError::UnknownSession(_) => "unknown-session",
            SessionError::UnknownRobot { .. } => "unknown-robot",
            SessionError::Finished => "formed",
            SessionError::Forced { .. } => "fairness-forcing",
            SessionError::BadRequest(_) => "bad-request",
            SessionError::Core(Error::Schema { .. }) | SessionError::Core(Error::Json(_)) => "schema",
            SessionError::Core(Error::Model(_)) => "model",
            SessionError::Core(Error::Capability(_)) => "capability",
            SessionError::Core(_) => "internal",
        }
    }
}

impl IntoResponse for SessionError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.kind(), "message": self.to_string() });
        match &self {
            SessionError::Core(Error::Schema { path, .. }) => body["path"] = json!(path),
            SessionError::Forced { forced } => body["forced_robot"] = json!(forced),
            _ => {}
        }
        (self.status(), Json(body)).into_response()
    }
}

type Shared = Arc<SessionStore>;

async fn create(State(store): State<Shared>, body: String) -> Result<Response, SessionError> {
    let state = store.create(&body)?;
    Ok((StatusCode::CREATED, Json(state)).into_response())
}

async fn state(State(store): State<Shared>, Path(id): Path<String>) -> Result<Response, SessionError> {
    Ok(Json(store.read(&id, |s| s.state())?).into_response())
}

async fn step(State(store): State<Shared>, Path(id): Path<String>, body: String) -> Result<Response, SessionError> {
    let de = &mut serde_json::Deserializer::from_str(&body);
    let req: StepRequest = serde_path_to_error::deserialize(de).map_err(|e| {
        SessionError::Core(Error::Schema { path: e.path().to_string(), message: e.inner().to_string() })
    })?;
    Ok(Json(store.write(&id, |s| s.step(&req))?).into_response())
}

async fn what_if(State(store): State<Shared>, Path((id, robot)): Path<(String, usize)>) -> Result<Response, SessionError> {
    Ok(Json(store.read(&id, |s| s.what_if(robot))?).into_response())
}

async fn trace(State(store): State<Shared>, Path(id): Path<String>) -> Result<Response, SessionError> {
    let text = store.read(&id, |s| s.trace_jsonl())?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], text).into_response())
}

async fn delete(State(store): State<Shared>, Path(id): Path<String>) -> Result<Response, SessionError> {
    store.delete(&id)?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

/// Session routes, plus the UI bundle at `/` when `static_dir` is given.
pub fn router(store: Shared, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(state).delete(delete))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/what-if/{robot}", get(what_if))
        .route("/sessions/{id}/trace", get(trace))
        .with_state(store);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds `port` on localhost and serves until the process ends.
pub async fn serve(port: u16, static_dir: Option<PathBuf>) -> crate::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    axum::serve(listener, router(Arc::new(SessionStore::default()), static_dir)).await?;
    Ok(())
}
