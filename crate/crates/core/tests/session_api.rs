use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use oblot::engine::run;
use oblot::scenario::Scenario;
use oblot::server::router;
use oblot::session::SessionStore;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(Arc::new(SessionStore::default()), None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let value = serde_json::from_str(&text).unwrap_or(Value::Null);
    (status, value, text)
}

fn pentagon_body() -> Value {
    let pattern: Vec<[f64; 2]> = (0..5)
        .map(|i| {
            let a = i as f64 * std::f64::consts::TAU / 5.0;
            [a.cos(), a.sin()]
        })
        .collect();
    json!({
        "robots": [[0.0, 0.0], [3.0, 0.2], [1.0, 2.5], [-2.0, 1.0], [-1.0, -2.0], [0.5, -0.7]],
        "frames": "random",
        "pattern": pattern,
        "algorithm": "seq-pf",
        "activation": {"kind": "seq-round-robin"},
        "movement": {"kind": "worst-case-delta", "delta": 0.05},
        "seed": 3
    })
}

fn rendezvous_body(distance: f64, delta: f64) -> Value {
    json!({
        "robots": [[0.0, 0.0], [distance, 0.0]],
        "pattern": [[0.0, 0.0]],
        "algorithm": "rendezvous",
        "activation": {"kind": "interactive"},
        "movement": {"kind": "interactive", "delta": delta}
    })
}

async fn create(app: &Router, body: Value) -> String {
    let (status, state, text) = call(app, "POST", "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{text}");
    state["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn create_returns_round_zero_state() {
    let app = app();
    let (status, state, _) = call(&app, "POST", "/sessions", Some(pentagon_body())).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(state["round"], 0);
    assert_eq!(state["epochs"], 0);
    assert_eq!(state["stage"], "leader-configuration");
    assert_eq!(state["robots"].as_array().unwrap().len(), 6);
    assert!(state["census"].is_array() && state["sec"]["radius"].is_number());
    assert!(state["lambda"]["defined"].is_boolean());
    assert_eq!(state["fairness"]["window"], 300);
    let id = state["id"].as_str().unwrap();
    let (status, again, _) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, state);
}

#[tokio::test]
async fn create_rejects_schema_and_model_violations() {
    let app = app();
    let mut missing = pentagon_body();
    missing.as_object_mut().unwrap().remove("pattern");
    let (status, err, _) = call(&app, "POST", "/sessions", Some(missing)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"], "schema");
    assert!(err["message"].as_str().unwrap().contains("pattern"));

    let mut extra = pentagon_body();
    extra["movement"]["speed"] = json!(2);
    let (status, err, _) = call(&app, "POST", "/sessions", Some(extra)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["path"], "movement.speed");

    let mut few = pentagon_body();
    few["robots"] = json!([[0, 0], [1, 0], [0, 1]]);
    let (status, err, _) = call(&app, "POST", "/sessions", Some(few)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["error"], "model");
    assert!(err["message"].as_str().unwrap().contains("at least as many robots"));
}

#[tokio::test]
async fn what_if_is_a_pure_preview() {
    let app = app();
    let id = create(&app, rendezvous_body(0.3, 0.1)).await;
    let (status, a, _) = call(&app, "GET", &format!("/sessions/{id}/what-if/0"), None).await;
    assert_eq!(status, StatusCode::OK);
    let (_, b, _) = call(&app, "GET", &format!("/sessions/{id}/what-if/0"), None).await;
    assert_eq!(a, b);
    assert_eq!(a["destination"], json!([0.3, 0.0]));
    let interval = a["interval"].as_array().unwrap();
    assert!((interval[0].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert!((interval[1].as_f64().unwrap() - 0.3).abs() < 1e-12);
    let (_, state, _) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(state["round"], 0);

    let (_, step, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 0, "stop_fraction": 0.5}))).await;
    assert_eq!(step["event"]["actions"][0]["intended"], a["destination"]);
}

#[tokio::test]
async fn staying_robot_previews_an_empty_interval() {
    let app = app();
    let body = json!({
        "robots": [[0.0, 0.0], [1.0, 0.0], [5.0, 5.0]],
        "pattern": [[0.0, 0.0]],
        "algorithm": "rendezvous",
        "activation": {"kind": "interactive"},
        "movement": {"kind": "interactive", "delta": 0.1}
    });
    let id = create(&app, body).await;
    let (_, p, _) = call(&app, "GET", &format!("/sessions/{id}/what-if/1"), None).await;
    assert_eq!(p["destination"], p["start"]);
    assert_eq!(p["interval"], json!([0.0, 0.0]));
    assert_eq!(p["path"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn step_fractions_map_onto_the_legal_interval() {
    let app = app();
    let id = create(&app, rendezvous_body(0.5, 0.1)).await;
    let (status, full, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 0, "stop_fraction": 1.0}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(full["state"]["robots"][0], json!([0.5, 0.0]));
    assert_eq!(full["state"]["formed"], true);

    let id = create(&app, rendezvous_body(0.5, 0.1)).await;
    let (_, min, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 0, "stop_fraction": 0.0}))).await;
    let x = min["state"]["robots"][0][0].as_f64().unwrap();
    assert!((x - 0.1).abs() < 1e-12, "{x}");
    assert_eq!(min["event"]["actions"][0]["outcome"]["truncated"], true);
    assert_eq!(min["event"]["round"], 1);
}

#[tokio::test]
async fn one_activation_of_everyone_is_one_epoch() {
    let app = app();
    let id = create(&app, pentagon_body()).await;
    for r in 0..6 {
        let (status, s, text) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": r, "stop_fraction": 1.0}))).await;
        assert_eq!(status, StatusCode::OK, "{text}");
        assert_eq!(s["state"]["epochs"], if r < 5 { 0 } else { 1 });
    }
    let (_, trace, text) = call(&app, "GET", &format!("/sessions/{id}/trace"), None).await;
    assert_eq!(trace, Value::Null);
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.first().unwrap()["type"], "scenario");
    assert_eq!(lines.iter().filter(|l| l["type"] == "round").count(), 6);
    assert_eq!(lines.last().unwrap()["type"], "summary");
}

#[tokio::test]
async fn trace_after_five_steps() {
    let app = app();
    let id = create(&app, pentagon_body()).await;
    for r in [0, 1, 2, 3, 4] {
        call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": r, "stop_fraction": 0.3}))).await;
    }
    let req = Request::builder().uri(format!("/sessions/{id}/trace")).body(Body::empty()).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    assert_eq!(res.headers()["content-type"], "application/x-ndjson");
    let text = String::from_utf8(res.into_body().collect().await.unwrap().to_bytes().to_vec()).unwrap();
    assert_eq!(text.lines().count(), 5 + 2);
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (status, err, _) = call(&app, "GET", "/sessions/nope", None).await;
    assert_eq!((status, err["error"].as_str()), (StatusCode::NOT_FOUND, Some("unknown-session")));

    let id = create(&app, rendezvous_body(0.05, 0.1)).await;
    let (status, _, _) = call(&app, "GET", &format!("/sessions/{id}/what-if/7"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 9, "stop_fraction": 1.0}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 0, "stop_fraction": 1.5}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, err, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 0}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(err["message"].as_str().unwrap().contains("stop_fraction"));

    let (status, _, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 0, "stop_fraction": 1.0}))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, err, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 1, "stop_fraction": 1.0}))).await;
    assert_eq!(status, StatusCode::CONFLICT, "{err}");

    let (status, _, _) = call(&app, "DELETE", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _, _) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _, _) = call(&app, "GET", &format!("/sessions/{id}/trace"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn starved_robot_locks_the_step_endpoint() {
    let app = app();
    let mut body = pentagon_body();
    body["activation"]["window"] = json!(4);
    let id = create(&app, body).await;
    for _ in 0..4 {
        let (status, _, text) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 0, "stop_fraction": 1.0}))).await;
        assert_eq!(status, StatusCode::OK, "{text}");
    }
    let (status, err, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": 0, "stop_fraction": 1.0}))).await;
    assert_eq!(status, StatusCode::LOCKED);
    let forced = err["forced_robot"].as_u64().unwrap();
    assert!((1..6).contains(&forced));
    let (_, state, _) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(state["fairness"]["forced_robot"], forced);
    let (status, _, _) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": forced, "stop_fraction": 1.0}))).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn api_and_scripted_cli_runs_hash_identically() {
    let app = app();
    let body = pentagon_body();
    let id = create(&app, body.clone()).await;
    let robots: Vec<usize> = (0..40).map(|i| (i * 7 + i / 6) % 6).collect();
    let fractions: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64 / 10.0).collect();
    let mut stepped = 0;
    for (&r, &f) in robots.iter().zip(&fractions) {
        let (status, s, text) = call(&app, "POST", &format!("/sessions/{id}/step"), Some(json!({"robot": r, "stop_fraction": f.min(1.0)}))).await;
        if status == StatusCode::CONFLICT {
            break;
        }
        assert_eq!(status, StatusCode::OK, "{text}");
        stepped += 1;
        assert_eq!(s["state"]["round"], stepped);
    }
    let (_, _, text) = call(&app, "GET", &format!("/sessions/{id}/trace"), None).await;
    let summary: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    let api_hash = summary["trace_hash"].as_str().unwrap().to_string();

    let mut scripted = body;
    scripted["activation"] = json!({"kind": "scripted", "script": &robots[..stepped]});
    scripted["movement"] = json!({"kind": "scripted", "delta": 0.05, "script": fractions[..stepped].iter().map(|f| f.min(1.0)).collect::<Vec<_>>()});
    scripted["max_rounds"] = json!(stepped);
    let s = Scenario::from_json(&scripted.to_string()).unwrap();
    assert_eq!(run(&s).unwrap().hash, api_hash);
}
