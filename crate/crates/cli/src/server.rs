//! HTTP session service behind `cluster serve`.
//!
//! A session holds the initial seed and the stack of seeds reached by its
//! mutation history. Mutating requests on one session are serialized by a
//! per-session lock; a request arriving while another holds it gets 409.
//! Reads clone the current snapshot and never wait on a mutation.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cluster_core::explorer::{enumerate, EnumLimits};
use cluster_core::seed::{Seed, SeedError, SeedJson};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::CorsLayer;
use uuid::Uuid;

use crate::input::preset;
use crate::state::{describe, StateJson};

pub const DEFAULT_GRAPH_VERTICES: usize = 2_000;
pub const DEFAULT_GRAPH_DEPTH: usize = 32;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    valid: Option<Vec<usize>>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            message: message.into(),
            valid: None,
        }
    }

    fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, format!("unknown session `{id}`"))
    }
}

impl From<SeedError> for ApiError {
    fn from(e: SeedError) -> ApiError {
        let valid = match &e {
            SeedError::NotExchangeable { valid, .. } => Some(valid.iter().map(|k| k + 1).collect()),
            _ => None,
        };
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: e.to_string(),
            valid,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "v": 1, "error": self.message });
        if let Some(valid) = self.valid {
            body["valid"] = json!(valid);
        }
        (self.status, Json(body)).into_response()
    }
}

/// Immutable view of a session at one point of its history.
#[derive(Debug)]
struct Snapshot {
    /// `seeds[0]` is the initial seed, `seeds[i + 1] = seeds[i].mutate(history[i])`.
    seeds: Vec<Seed>,
    history: Vec<usize>,
    state: StateJson,
}

impl Snapshot {
    fn new(id: &str, seeds: Vec<Seed>, history: Vec<usize>) -> Result<Snapshot, SeedError> {
        let state = describe(seeds.last().expect("initial seed"), id, &history)?;
        Ok(Snapshot { seeds, history, state })
    }

    fn current(&self) -> &Seed {
        self.seeds.last().expect("initial seed")
    }
}

struct Session {
    write: tokio::sync::Mutex<()>,
    snapshot: RwLock<Arc<Snapshot>>,
}

impl Session {
    fn read(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }
}

/// On-disk form of a session under `--state-dir`.
#[derive(Debug, Serialize, Deserialize)]
struct StoredSession {
    v: u32,
    id: String,
    initial: SeedJson,
    /// 1-based.
    history: Vec<usize>,
}

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    state_dir: Option<PathBuf>,
}

impl AppState {
    /// Loads every stored session under `state_dir`, replaying its history.
    /// Unreadable files are reported and skipped.
    pub fn new(state_dir: Option<PathBuf>) -> std::io::Result<AppState> {
        let app = AppState {
            sessions: RwLock::default(),
            state_dir,
        };
        if let Some(dir) = &app.state_dir {
            std::fs::create_dir_all(dir)?;
            for entry in std::fs::read_dir(dir)? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "json") {
                    match load_stored(&path) {
                        Ok(snapshot) => app.insert(snapshot),
                        Err(e) => eprintln!("skipping {}: {e}", path.display()),
                    }
                }
            }
        }
        Ok(app)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&self, snapshot: Snapshot) {
        let id = snapshot.state.id.clone();
        let session = Session {
            write: tokio::sync::Mutex::new(()),
            snapshot: RwLock::new(Arc::new(snapshot)),
        };
        self.sessions.write().expect("session map").insert(id, Arc::new(session));
    }

    fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions
            .read()
            .expect("session map")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn persist(&self, snapshot: &Snapshot) -> Result<(), ApiError> {
        let Some(dir) = &self.state_dir else {
            return Ok(());
        };
        let stored = StoredSession {
            v: 1,
            id: snapshot.state.id.clone(),
            initial: snapshot.seeds[0].to_json(),
            history: snapshot.history.iter().map(|k| k + 1).collect(),
        };
        let text = serde_json::to_string_pretty(&stored).expect("serializable");
        let path = dir.join(format!("{}.json", stored.id));
        let tmp = dir.join(format!("{}.json.tmp", stored.id));
        std::fs::write(&tmp, text)
            .and_then(|()| std::fs::rename(&tmp, &path))
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("persisting session: {e}")))
    }
}

fn load_stored(path: &Path) -> Result<Snapshot, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let stored: StoredSession = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let initial = Seed::from_json(&stored.initial).map_err(|e| e.to_string())?;
    let history: Vec<usize> = stored
        .history
        .iter()
        .map(|&k| k.checked_sub(1).ok_or("history is 1-based"))
        .collect::<Result<_, _>>()?;
    let mut seeds = vec![initial];
    for &k in &history {
        let next = seeds.last().expect("initial seed").mutate(k).map_err(|e| e.to_string())?;
        seeds.push(next);
    }
    Snapshot::new(&stored.id, seeds, history).map_err(|e| e.to_string())
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("request body: {e}")))
}

/// Runs CPU-bound algebra off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    seed: Option<SeedJson>,
    preset: Option<String>,
}

#[derive(Debug, Deserialize)]
struct MutateRequest {
    k: usize,
}

#[derive(Debug, Deserialize)]
struct GraphQuery {
    max_vertices: Option<usize>,
    max_depth: Option<usize>,
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "v": 1, "status": "ok" }))
}

async fn create(State(app): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    let initial = match (req.seed, req.preset) {
        (Some(doc), None) => Seed::from_json(&doc)?,
        (None, Some(name)) => preset(&name).map_err(|e| ApiError::bad_request(e.to_string()))?,
        _ => return Err(ApiError::bad_request("give exactly one of `seed` and `preset`")),
    };
    let id = Uuid::new_v4().to_string();
    let snapshot = {
        let id = id.clone();
        blocking(move || Snapshot::new(&id, vec![initial], Vec::new())).await??
    };
    app.persist(&snapshot)?;
    app.insert(snapshot);
    Ok((StatusCode::CREATED, Json(json!({ "v": 1, "id": id }))).into_response())
}

async fn show(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<StateJson>, ApiError> {
    Ok(Json(app.get(&id)?.read().state.clone()))
}

/// Replaces the snapshot of `id` by `step(current)` under the write lock.
async fn transition(
    app: Arc<AppState>,
    id: String,
    step: impl FnOnce(&Snapshot) -> Result<Snapshot, ApiError> + Send + 'static,
) -> Result<Json<StateJson>, ApiError> {
    let session = app.get(&id)?;
    let _guard = session
        .write
        .try_lock()
        .map_err(|_| ApiError::new(StatusCode::CONFLICT, "another mutation of this session is in progress"))?;
    let current = session.read();
    let next = blocking(move || step(&current)).await??;
    app.persist(&next)?;
    let state = next.state.clone();
    *session.snapshot.write().expect("snapshot lock") = Arc::new(next);
    Ok(Json(state))
}

async fn mutate(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Json<StateJson>, ApiError> {
    let req: MutateRequest = parse_body(&body)?;
    let sid = id.clone();
    transition(app, id, move |snap| {
        let seed = snap.current();
        let k = req
            .k
            .checked_sub(1)
            .filter(|&k| seed.matrix().is_exchangeable(k))
            .ok_or_else(|| {
                let valid: Vec<usize> = seed.ex().iter().map(|k| k + 1).collect();
                let labels: Vec<String> = valid.iter().map(ToString::to_string).collect();
                ApiError {
                    status: StatusCode::BAD_REQUEST,
                    message: format!("index {} is not exchangeable; valid indices: {}", req.k, labels.join(", ")),
                    valid: Some(valid),
                }
            })?;
        let mut seeds = snap.seeds.clone();
        seeds.push(seed.mutate(k)?);
        let mut history = snap.history.clone();
        history.push(k);
        Ok(Snapshot::new(&sid, seeds, history)?)
    })
    .await
}

async fn undo(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<StateJson>, ApiError> {
    let sid = id.clone();
    transition(app, id, move |snap| {
        if snap.history.is_empty() {
            return Err(ApiError::bad_request("nothing to undo"));
        }
        let mut seeds = snap.seeds.clone();
        seeds.pop();
        let mut history = snap.history.clone();
        history.pop();
        Ok(Snapshot::new(&sid, seeds, history)?)
    })
    .await
}

async fn graph(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<GraphQuery>,
) -> Result<Response, ApiError> {
    let limits = EnumLimits::new(
        q.max_vertices.unwrap_or(DEFAULT_GRAPH_VERTICES),
        q.max_depth.unwrap_or(DEFAULT_GRAPH_DEPTH),
    )?;
    let defaults = EnumLimits::default();
    if limits.max_vertices > defaults.max_vertices || limits.max_depth > defaults.max_depth {
        return Err(ApiError::bad_request(format!(
            "caps may not exceed {} vertices and depth {}",
            defaults.max_vertices, defaults.max_depth
        )));
    }
    let seed = app.get(&id)?.read().current().clone();
    let g = blocking(move || enumerate(&seed, limits)).await??;
    Ok(Json(g.to_json()).into_response())
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/mutate", post(mutate))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/graph", get(graph))
        .layer(CorsLayer::permissive())
        .with_state(app)
}

pub async fn serve(port: u16, state_dir: Option<PathBuf>) -> std::io::Result<()> {
    let app = Arc::new(AppState::new(state_dir)?);
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!(
        "listening on http://{} ({} stored sessions)",
        listener.local_addr()?,
        app.len()
    );
    axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
