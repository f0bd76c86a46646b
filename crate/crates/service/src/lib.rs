//! HTTP front end for registering app policies and running conformance,
//! obligation and derivation requests against stored data policies.
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | POST | `/dtou/app-policy` | Turtle | `{registration_id}` |
//! | POST | `/dtou/conformance` | `{registration_id, user, time}` | conformance report |
//! | POST | `/dtou/obligations` | `{registration_id, user, time}` | obligation report |
//! | POST | `/dtou/derive` | `{registration_id, output_port, target_uri}` | `{stored_uri, policy}` |
//! | GET | `/dtou/policy/{uri}` | | Turtle |
//! | PUT | `/dtou/policy/{uri}` | Turtle | stored record metadata |
//!
//! The `{uri}` segment is the percent-encoded data URI. Errors are JSON
//! objects `{error, detail}`.

mod engine;

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use engine::{
    ContextRequest, DerivationRequest, DeriveResponse, Engine, RegisterResponse, ServiceConfig, ServiceError,
};

const TURTLE: &str = "text/turtle; charset=utf-8";

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    detail: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let detail = self.to_string();
        let (status, error) = match self {
            ServiceError::BadRequest(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            ServiceError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            // the refused report is still useful to the caller
            ServiceError::Uncovered { report, .. } => return (StatusCode::CONFLICT, Json(report)).into_response(),
            ServiceError::Unprocessable(_) => (StatusCode::UNPROCESSABLE_ENTITY, "unprocessable"),
            ServiceError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        (status, Json(ErrorBody { error, detail })).into_response()
    }
}

type Shared = Arc<Engine>;

fn json_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(format!("malformed request: {e}")))
}

fn text_body(body: &Bytes) -> Result<&str, ServiceError> {
    std::str::from_utf8(body).map_err(|_| ServiceError::BadRequest("body is not UTF-8".into()))
}

/// Runs blocking reasoning work off the async executor.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ServiceError::Internal(e.to_string()))?
}

async fn register(State(engine): State<Shared>, body: Bytes) -> Result<Json<RegisterResponse>, ServiceError> {
    let doc = text_body(&body)?.to_owned();
    blocking(move || engine.register_app(&doc)).await.map(Json)
}

async fn conformance(State(engine): State<Shared>, body: Bytes) -> Result<Response, ServiceError> {
    let req: ContextRequest = json_body(&body)?;
    let report = blocking(move || engine.conformance(&req)).await?;
    Ok(Json(report).into_response())
}

async fn obligations(State(engine): State<Shared>, body: Bytes) -> Result<Response, ServiceError> {
    let req: ContextRequest = json_body(&body)?;
    let report = blocking(move || engine.obligations(&req)).await?;
    Ok(Json(report).into_response())
}

async fn derive(State(engine): State<Shared>, body: Bytes) -> Result<Json<DeriveResponse>, ServiceError> {
    let req: DerivationRequest = json_body(&body)?;
    blocking(move || engine.derive(&req)).await.map(Json)
}

async fn get_policy(State(engine): State<Shared>, Path(uri): Path<String>) -> Result<Response, ServiceError> {
    let doc = engine.policy_document(&uri).ok_or_else(|| ServiceError::NotFound(format!("no policy for <{uri}>")))?;
    Ok(([(header::CONTENT_TYPE, TURTLE)], doc).into_response())
}

#[derive(Serialize)]
struct PutResponse {
    data_uri: String,
    created_at: String,
}

async fn put_policy(
    State(engine): State<Shared>,
    Path(uri): Path<String>,
    body: Bytes,
) -> Result<Json<PutResponse>, ServiceError> {
    let doc = text_body(&body)?.to_owned();
    let rec = blocking(move || Ok(engine.store().put_policy(&uri, &doc)?)).await?;
    Ok(Json(PutResponse { data_uri: rec.data_uri, created_at: rec.created_at.to_rfc3339() }))
}

pub fn router(engine: Arc<Engine>) -> Router {
    let limit = engine.config().max_document_bytes;
    Router::new()
        .route("/dtou/app-policy", post(register))
        .route("/dtou/conformance", post(conformance))
        .route("/dtou/obligations", post(obligations))
        .route("/dtou/derive", post(derive))
        .route("/dtou/policy/{uri}", get(get_policy).put(put_policy))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(engine)
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, engine: Arc<Engine>) -> std::io::Result<()> {
    axum::serve(listener, router(engine)).await
}
