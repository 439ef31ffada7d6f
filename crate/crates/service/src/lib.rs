//! HTTP front end for the dialogue engine.
//!
//! `POST /chat` runs one turn, `GET /session/{id}` returns the stored
//! conversation state and `GET /health` answers when the service is up.

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use taskbot_core::engine::{ChatError, ChatRequest, Engine};

fn error(status: StatusCode, message: impl ToString) -> Response {
    (status, Json(json!({ "error": message.to_string() }))).into_response()
}

fn chat_error(e: ChatError) -> Response {
    let status = match &e {
        ChatError::TextTooLong { .. } => StatusCode::PAYLOAD_TOO_LARGE,
        e if e.is_client_error() => StatusCode::BAD_REQUEST,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    error(status, e)
}

async fn chat(State(engine): State<Arc<Engine>>, Json(request): Json<ChatRequest>) -> Response {
    let result = tokio::task::spawn_blocking(move || engine.handle_chat(&request)).await;
    match result {
        Ok(Ok(reply)) => Json(reply).into_response(),
        Ok(Err(e)) => chat_error(e),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}

async fn session(State(engine): State<Arc<Engine>>, Path(id): Path<String>) -> Response {
    let result = tokio::task::spawn_blocking(move || engine.session_state(&id)).await;
    match result {
        Ok(Ok(Some(state))) => Json(state).into_response(),
        Ok(Ok(None)) => error(StatusCode::NOT_FOUND, "no such session"),
        Ok(Err(e)) => chat_error(e),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

pub fn app(engine: Arc<Engine>) -> Router {
    Router::new().route("/chat", post(chat)).route("/session/{id}", get(session)).route("/health", get(health)).with_state(engine)
}
