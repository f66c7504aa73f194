//! JSON service over a single frozen checkpoint.
//!
//! Requests answer 503 until the checkpoint has loaded. Each request decodes
//! in its own blocking task against shared read-only parameters.

use crate::config::ServeConfig;
use crate::wire::{icon_to_wire, path_to_wire, paths_from_wire, WirePath};
use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;
use std::sync::{Arc, RwLock};
use vecticon_core::model::Checkpoint;
use vecticon_core::sampler::{DecodeStrategy, SampleError, Sampler, Suggestion};

pub struct Loaded {
    pub checkpoint: Checkpoint,
    pub id: String,
}

enum Slot {
    Loading,
    Ready(Arc<Loaded>),
    Failed(String),
}

#[derive(Clone)]
pub struct AppState {
    slot: Arc<RwLock<Slot>>,
    strategy: DecodeStrategy,
    serve: ServeConfig,
}

impl AppState {
    pub fn loading(strategy: DecodeStrategy, serve: ServeConfig) -> Self {
        Self {
            slot: Arc::new(RwLock::new(Slot::Loading)),
            strategy,
            serve,
        }
    }

    pub fn ready(checkpoint: Checkpoint, strategy: DecodeStrategy, serve: ServeConfig) -> Self {
        let s = Self::loading(strategy, serve);
        s.set_ready(checkpoint);
        s
    }

    pub fn set_ready(&self, checkpoint: Checkpoint) {
        let id = checkpoint.id();
        *self.slot.write().expect("state lock") = Slot::Ready(Arc::new(Loaded { checkpoint, id }));
    }

    pub fn set_failed(&self, message: String) {
        *self.slot.write().expect("state lock") = Slot::Failed(message);
    }

    fn current(&self) -> Result<Arc<Loaded>, ApiError> {
        match &*self.slot.read().expect("state lock") {
            Slot::Ready(l) => Ok(l.clone()),
            Slot::Loading => Err(ApiError::Unavailable("checkpoint is loading".into())),
            Slot::Failed(m) => Err(ApiError::Unavailable(format!("checkpoint failed to load: {m}"))),
        }
    }
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    TooLong(String),
    Unavailable(String),
    Internal(String),
}

impl From<SampleError> for ApiError {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::PromptTooLong { .. } | SampleError::Truncated(_) => ApiError::TooLong(e.to_string()),
            SampleError::Strategy(_) | SampleError::Alpha(_) => ApiError::BadRequest(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (code, kind, msg) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, "bad_request", m),
            ApiError::TooLong(m) => (StatusCode::UNPROCESSABLE_ENTITY, "too_long", m),
            ApiError::Unavailable(m) => (StatusCode::SERVICE_UNAVAILABLE, "unavailable", m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", m),
        };
        (code, Json(json!({ "error": kind, "message": msg }))).into_response()
    }
}

/// Parses a body, reporting the failing field path on error.
fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            ApiError::BadRequest(inner.to_string())
        } else {
            ApiError::BadRequest(format!("{path}: {inner}"))
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateReq {
    text: String,
    count: usize,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuggestReq {
    text: String,
    partial: Vec<WirePath>,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FillReq {
    text: String,
    left: Vec<WirePath>,
    right: Vec<WirePath>,
    seed: Option<u64>,
}

impl AppState {
    fn strategy(&self, seed: Option<u64>) -> DecodeStrategy {
        let mut s = self.strategy.clone();
        s.grammar_constrained = true;
        if let Some(seed) = seed {
            s.seed = seed;
        }
        s
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(format!("worker failed: {e}")))?
}

async fn health(State(st): State<AppState>) -> Response {
    match &*st.slot.read().expect("state lock") {
        Slot::Ready(l) => Json(json!({ "status": "ok", "checkpoint_id": l.id })).into_response(),
        Slot::Loading => (
            StatusCode::SERVICE_UNAVAILABLE,
            Json(json!({ "status": "loading", "checkpoint_id": null })),
        )
            .into_response(),
        Slot::Failed(m) => (
            StatusCode::SERVICE_UNAVAILABLE,
            Json(json!({ "status": "failed", "checkpoint_id": null, "message": m })),
        )
            .into_response(),
    }
}

async fn generate(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: GenerateReq = parse(&body)?;
    if req.count == 0 || req.count > st.serve.max_count {
        return Err(ApiError::BadRequest(format!("count: must lie in [1, {}]", st.serve.max_count)));
    }
    let loaded = st.current()?;
    let base = st.strategy(req.seed);
    let icons = blocking(move || {
        let s = Sampler::new(&loaded.checkpoint.params, &loaded.checkpoint.vocab);
        (0..req.count)
            .map(|i| {
                let strategy = base.clone().with_seed(base.seed.wrapping_add(i as u64));
                Ok(icon_to_wire(&s.generate(&req.text, &strategy)?))
            })
            .collect::<Result<Vec<_>, ApiError>>()
    })
    .await?;
    Ok(Json(json!({ "icons": icons })).into_response())
}

async fn suggest(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: SuggestReq = parse(&body)?;
    let partial = paths_from_wire("partial", &req.partial).map_err(ApiError::BadRequest)?;
    let loaded = st.current()?;
    let strategy = st.strategy(req.seed);
    let out = blocking(move || {
        let s = Sampler::new(&loaded.checkpoint.params, &loaded.checkpoint.vocab);
        Ok(s.suggest_next_path(&req.text, &partial, &strategy)?)
    })
    .await?;
    Ok(match out {
        Suggestion::Path(p) => Json(json!({ "path": path_to_wire(&p) })),
        Suggestion::EndOfIcon => Json(json!({ "end": true })),
    }
    .into_response())
}

async fn fill(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: FillReq = parse(&body)?;
    let left = paths_from_wire("left", &req.left).map_err(ApiError::BadRequest)?;
    let right = paths_from_wire("right", &req.right).map_err(ApiError::BadRequest)?;
    let loaded = st.current()?;
    let strategy = st.strategy(req.seed);
    let filled = blocking(move || {
        let s = Sampler::new(&loaded.checkpoint.params, &loaded.checkpoint.vocab);
        Ok(s.fill_in_middle(&req.text, &left, &right, &strategy)?)
    })
    .await?;
    Ok(Json(json!({ "icon": icon_to_wire(&filled.icon) })).into_response())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/generate", post(generate))
        .route("/suggest", post(suggest))
        .route("/fill", post(fill))
        .with_state(state)
}
