use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use cluster_cli::server::{router, AppState};
use cluster_cli::state::StateJson;
use cluster_core::seed::Seed;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Arc<AppState>, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = router(app.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn create(app: &Arc<AppState>, body: Value) -> String {
    let (status, doc) = call(app, "POST", "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{doc}");
    assert_eq!(doc["v"], 1);
    doc["id"].as_str().unwrap().to_string()
}

async fn state(app: &Arc<AppState>, id: &str) -> StateJson {
    let (status, doc) = call(app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    serde_json::from_value(doc).unwrap()
}

async fn mutate(app: &Arc<AppState>, id: &str, k: usize) -> (StatusCode, Value) {
    call(app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "k": k }))).await
}

fn fresh() -> Arc<AppState> {
    Arc::new(AppState::new(None).unwrap())
}

#[tokio::test]
async fn health() {
    let (status, doc) = call(&fresh(), "GET", "/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc, json!({ "v": 1, "status": "ok" }));
}

#[tokio::test]
async fn a2_mutation_shows_exchanged_variable() {
    let app = fresh();
    let id = create(&app, json!({ "preset": "A2" })).await;
    let s0 = state(&app, &id).await;
    assert!(s0.acyclic);
    assert_eq!(s0.previews[0].variable.as_deref(), Some("(x2 + 1)/x1"));
    let (status, doc) = mutate(&app, &id, 1).await;
    assert_eq!(status, StatusCode::OK);
    let s1: StateJson = serde_json::from_value(doc).unwrap();
    assert_eq!(s1.variables[0].fraction, "(x2 + 1)/x1");
    assert_eq!(s1.variables[0].delta, Some(vec![1, 0]));
    assert_eq!(s1.history, vec![1]);
    assert_eq!(s1.seed.b, vec![vec![0, 1], vec![-1, 0]]);
}

#[tokio::test]
async fn undo_restores_state_exactly() {
    let app = fresh();
    let id = create(&app, json!({ "preset": "B3" })).await;
    mutate(&app, &id, 2).await;
    let before = call(&app, "GET", &format!("/sessions/{id}"), None).await.1;
    let (status, _) = mutate(&app, &id, 3).await;
    assert_eq!(status, StatusCode::OK);
    let (status, after) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after.to_string(), before.to_string());
}

#[tokio::test]
async fn undo_on_fresh_session_is_rejected() {
    let app = fresh();
    let id = create(&app, json!({ "preset": "A1" })).await;
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn pentagon_walk_returns_to_start_up_to_order() {
    let app = fresh();
    let id = create(&app, json!({ "preset": "A2" })).await;
    let s0 = state(&app, &id).await;
    for k in [1, 2, 1, 2, 1] {
        assert_eq!(mutate(&app, &id, k).await.0, StatusCode::OK);
    }
    let s5 = state(&app, &id).await;
    let mut a: Vec<String> = s0.variables.iter().map(|v| v.text.clone()).collect();
    let mut b: Vec<String> = s5.variables.iter().map(|v| v.text.clone()).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[tokio::test]
async fn graph_of_a2_has_five_vertices() {
    let app = fresh();
    let id = create(&app, json!({ "preset": "A2" })).await;
    let (status, doc) = call(&app, "GET", &format!("/sessions/{id}/graph"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["v"], 1);
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 5);
    assert_eq!(doc["verdict"]["kind"], "finite");
}

#[tokio::test]
async fn graph_caps_are_honoured_and_validated() {
    let app = fresh();
    let id = create(&app, json!({ "preset": "rank2:2,2" })).await;
    let (status, doc) = call(&app, "GET", &format!("/sessions/{id}/graph?max_vertices=50&max_depth=6"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["verdict"]["kind"], "exceeded_cap");
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 13);
    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/graph?max_vertices=0"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn errors() {
    let app = fresh();
    let (status, doc) = call(&app, "GET", "/sessions/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(doc["error"].as_str().unwrap().contains("unknown session"));
    assert_eq!(mutate(&app, "nope", 1).await.0, StatusCode::NOT_FOUND);

    let id = create(&app, json!({ "preset": "sl3" })).await;
    for k in [0, 1, 7, 99] {
        let (status, doc) = mutate(&app, &id, k).await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert_eq!(doc["valid"], json!([3, 4, 5, 6]));
    }
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "q": 1 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, doc) = call(&app, "POST", "/sessions", Some(json!({}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(doc["error"].as_str().unwrap().contains("exactly one"));
    let bad = json!({ "seed": { "vars": ["x1", "x2"], "ex": [1, 2], "B": [[0, 1], [1, 0]] } });
    let (status, doc) = call(&app, "POST", "/sessions", Some(bad)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(doc["error"].as_str().unwrap().contains("skew-symmetrizable"));
}

#[tokio::test]
async fn custom_seed_with_frozen_variable() {
    let app = fresh();
    let seed = json!({ "seed": { "v": 1, "vars": ["a", "b", "c"], "ex": [1, 2], "B": [[0, 1], [-1, 0], [1, 0]] } });
    let id = create(&app, seed).await;
    let s = state(&app, &id).await;
    assert_eq!(s.variables.len(), 3);
    assert!(!s.variables[2].exchangeable);
    assert_eq!(s.variables[2].delta, None);
    assert_eq!(s.previews.len(), 2);
    assert_eq!(s.previews[0].exchange.as_deref(), Some("b + c"));
}

/// Replays a state's history from its initial seed.
fn replay(initial: &Seed, s: &StateJson) -> Seed {
    let ks: Vec<usize> = s.history.iter().map(|k| k - 1).collect();
    initial.mutate_sequence(&ks).unwrap()
}

#[tokio::test]
async fn history_replay_matches_current_seed() {
    let app = fresh();
    let id = create(&app, json!({ "preset": "D4" })).await;
    let initial = Seed::from_json(&state(&app, &id).await.seed).unwrap();
    // deterministic pseudo-random walk with undos
    let mut x: u64 = 12345;
    for _ in 0..25 {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        if x >> 60 < 3 {
            let _ = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
        } else {
            assert_eq!(mutate(&app, &id, 1 + (x >> 33) as usize % 4).await.0, StatusCode::OK);
        }
        let s = state(&app, &id).await;
        assert_eq!(replay(&initial, &s).to_json(), s.seed);
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_mutations_are_serialized_or_rejected() {
    let app = fresh();
    let id = create(&app, json!({ "preset": "rank2:2,2" })).await;
    for _ in 0..14 {
        let s = state(&app, &id).await;
        let k = if s.history.last() == Some(&1) { 2 } else { 1 };
        mutate(&app, &id, k).await;
    }
    let before = state(&app, &id).await.history.len();
    let requests = (0..8).map(|i| {
        let app = app.clone();
        let id = id.clone();
        tokio::spawn(async move { mutate(&app, &id, 1 + i % 2).await.0 })
    });
    let statuses: Vec<StatusCode> = futures_join(requests).await;
    assert!(statuses.iter().all(|s| *s == StatusCode::OK || *s == StatusCode::CONFLICT), "{statuses:?}");
    let ok = statuses.iter().filter(|s| **s == StatusCode::OK).count();
    assert!(ok >= 1);
    let s = state(&app, &id).await;
    assert_eq!(s.history.len(), before + ok);
}

async fn futures_join<T>(handles: impl Iterator<Item = tokio::task::JoinHandle<T>>) -> Vec<T> {
    let mut out = Vec::new();
    for h in handles {
        out.push(h.await.unwrap());
    }
    out
}

#[tokio::test]
async fn sessions_survive_restart_with_state_dir() {
    let dir = tempfile::tempdir().unwrap();
    let app = Arc::new(AppState::new(Some(dir.path().to_path_buf())).unwrap());
    let id = create(&app, json!({ "preset": "A3" })).await;
    mutate(&app, &id, 2).await;
    mutate(&app, &id, 1).await;
    let before = call(&app, "GET", &format!("/sessions/{id}"), None).await.1;

    let reloaded = Arc::new(AppState::new(Some(dir.path().to_path_buf())).unwrap());
    assert_eq!(reloaded.len(), 1);
    let after = call(&reloaded, "GET", &format!("/sessions/{id}"), None).await.1;
    assert_eq!(after, before);

    std::fs::write(dir.path().join("junk.json"), "{").unwrap();
    assert_eq!(AppState::new(Some(dir.path().to_path_buf())).unwrap().len(), 1);
}
