use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use tutor_cli::server::{router, AppState, SeedPolicy, ServiceConfig};
use tutor_core::personality::canonical_answers;
use tutor_core::Assets;

fn app() -> Router {
    let config = ServiceConfig {
        seed_policy: SeedPolicy::Fixed(7),
        ..ServiceConfig::default()
    };
    router(AppState::new(Arc::new(Assets::defaults()), config))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or(Body::empty(), |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn answers(code: &str) -> Value {
    let a = Assets::defaults();
    serde_json::to_value(canonical_answers(&a.form, code.parse().unwrap())).unwrap()
}

async fn create(app: &Router, mode: &str, code: &str) -> Value {
    let (status, body) = call(app, "POST", "/sessions", Some(json!({"mode": mode, "answers": answers(code)}))).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    serde_json::from_str(&body).unwrap()
}

#[tokio::test]
async fn questionnaire_lists_items() {
    let (status, body) = call(&app(), "GET", "/questionnaire", None).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["items"].as_array().unwrap().len(), 20);
}

#[tokio::test]
async fn env3_isfj_session_is_cooperative_with_en_classmate() {
    let app = app();
    let env = create(&app, "env3", "ISFJ").await;
    assert_eq!(env["group"], "Cooperative");
    assert_eq!(env["vca"], "EN");
    assert_eq!(env["mode"], "Env3");
    assert_eq!(env["status"], "Active");
    assert!(env["exercise"]["prompt"].is_string());
    assert!(env["exercise"].get("answer_key").is_none());
    assert!(env.get("intensities").is_none());
    let id = env["id"].as_str().unwrap();
    let (status, body) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(!body.contains("answer_key"));
}

#[tokio::test]
async fn correct_answer_shows_tutor_congratulation() {
    let app = app();
    let env = create(&app, "Env3", "ISFJ").await;
    let id = env["id"].as_str().unwrap();
    let key = Assets::defaults().bank.exercises[0].answer_key.clone();
    let (status, body) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/actions"),
        Some(json!({"type": "SubmitAnswer", "answer": key, "rt": 3.0, "effort": 0.8})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["last_event"]["kind"], "AccurateResponse");
    let behaviors = v["behaviors"].as_array().unwrap();
    let congrats = behaviors.iter().find(|b| b["tactic"] == "CongratulateStudent").unwrap();
    assert_eq!(congrats["actor"], "VTA");
    assert!(congrats["utterance"].as_str().unwrap().starts_with("Congratulations") || congrats["utterance"].as_str().unwrap().starts_with("Uuuu"));
    assert!(v["emotions"]["Joy"].is_string());
    assert_eq!(v["exercise"]["index"], 1);
}

#[tokio::test]
async fn env1_exposes_no_emotions_or_behaviors() {
    let app = app();
    let env = create(&app, "env1", "ESTJ").await;
    let id = env["id"].as_str().unwrap();
    assert!(env.get("vca").is_none());
    let (_, body) = call(&app, "POST", &format!("/sessions/{id}/actions"), Some(json!({"type": "Skip"}))).await;
    let v: Value = serde_json::from_str(&body).unwrap();
    assert!(v["behaviors"].as_array().unwrap().is_empty());
    assert!(v["emotions"].as_object().unwrap().is_empty());
}

#[tokio::test]
async fn env2_has_no_classmate() {
    let app = app();
    let env = create(&app, "env2", "ENTP").await;
    assert_eq!(env["group"], "Competitive");
    assert!(env.get("vca").is_none());
    let id = env["id"].as_str().unwrap();
    let (_, body) = call(&app, "POST", &format!("/sessions/{id}/actions"), Some(json!({"type": "RequestHelp"}))).await;
    let v: Value = serde_json::from_str(&body).unwrap();
    assert!(v["behaviors"].as_array().unwrap().iter().all(|b| b["actor"] == "VTA"));
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (status, _) = call(&app, "GET", "/sessions/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "POST", "/sessions/nope/actions", Some(json!({"type": "Skip"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "GET", "/sessions/nope/log", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"mode": "env9", "answers": answers("ISTJ")}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"answers": {"ei1": 1.0}}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let env = create(&app, "env3", "ISTJ").await;
    let id = env["id"].as_str().unwrap().to_string();
    let actions = format!("/sessions/{id}/actions");
    let (status, _) = call(&app, "POST", &actions, Some(json!({"type": "Dance"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, "POST", &actions, Some(json!({"type": "SubmitAnswer", "answer": "x", "rt": -2.0}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, body) = call(&app, "POST", &actions, Some(json!({"type": "Leave"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body.contains("\"Closed\""));
    let (status, _) = call(&app, "POST", &actions, Some(json!({"type": "Skip"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn log_endpoint_returns_ndjson_with_seed() {
    let app = app();
    let env = create(&app, "env3", "ENFP").await;
    let id = env["id"].as_str().unwrap();
    for a in [json!({"type": "Think"}), json!({"type": "Skip"})] {
        call(&app, "POST", &format!("/sessions/{id}/actions"), Some(a)).await;
    }
    let (status, log) = call(&app, "GET", &format!("/sessions/{id}/log"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(log.lines().count(), 3);
    let header: Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
    assert_eq!(header["seed"], 7);
    let replayed = tutor_core::session::replay(&log, Arc::new(Assets::defaults())).unwrap();
    assert_eq!(replayed.export_log(), log);
}

#[tokio::test]
async fn debug_flag_exposes_intensities() {
    let app = app();
    let (_, body) = call(&app, "POST", "/sessions", Some(json!({"mode": "env2", "answers": answers("INFJ"), "debug": true}))).await;
    let v: Value = serde_json::from_str(&body).unwrap();
    assert!(v["intensities"]["Hope"].is_number());
    let id = v["id"].as_str().unwrap();
    let env = create(&app, "env2", "INFJ").await;
    let other = env["id"].as_str().unwrap();
    let (_, body) = call(&app, "GET", &format!("/sessions/{other}?debug=true"), None).await;
    assert!(serde_json::from_str::<Value>(&body).unwrap()["intensities"].is_object());
    assert_ne!(id, other);
}

#[tokio::test]
async fn concurrent_sessions_stay_separate() {
    let app = app();
    let mut handles = Vec::new();
    for i in 0..8 {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let code = if i % 2 == 0 { "ISFJ" } else { "ENTP" };
            let env = create(&app, "env3", code).await;
            let id = env["id"].as_str().unwrap().to_string();
            for _ in 0..5 {
                let (s, _) = call(&app, "POST", &format!("/sessions/{id}/actions"), Some(json!({"type": "Think"}))).await;
                assert_eq!(s, StatusCode::OK);
            }
            let (_, log) = call(&app, "GET", &format!("/sessions/{id}/log"), None).await;
            (code, log)
        }));
    }
    for h in handles {
        let (code, log) = h.await.unwrap();
        assert_eq!(log.lines().count(), 6);
        let header: Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
        assert_eq!(header["profile"]["personality_type"], code);
    }
}
