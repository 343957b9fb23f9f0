//! HTTP/JSON session service.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, RwLock};
use tower_http::services::ServeDir;

use tutor_core::session::VcaOutcome;
use tutor_core::tactics::MetaEffect;
use tutor_core::{
    start_session, Answers, Assets, EmotionKind, EventKind, LearnerAction, LearningGroup, Level,
    Mode, RealizedBehavior, SessionError, SessionSetup, SessionState, SessionStatus,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedPolicy {
    Fixed(u64),
    /// Fresh random seed per session; it is recorded in the log header.
    RandomLogged,
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    pub default_mode: Mode,
    pub static_dir: Option<PathBuf>,
    pub seed_policy: SeedPolicy,
    /// Expose numeric emotion intensities in every envelope.
    pub debug: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            addr: SocketAddr::from(([127, 0, 0, 1], 8080)),
            default_mode: Mode::Env3,
            static_dir: None,
            seed_policy: SeedPolicy::RandomLogged,
            debug: false,
        }
    }
}

struct Entry {
    session: SessionState,
    debug: bool,
    behaviors: Vec<RealizedBehavior>,
}

pub struct AppState {
    assets: Arc<Assets>,
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, Arc<Mutex<Entry>>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(assets: Arc<Assets>, config: ServiceConfig) -> Arc<Self> {
        Arc::new(AppState {
            assets,
            config,
            sessions: RwLock::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        })
    }

    async fn entry(&self, id: &str) -> Result<Arc<Mutex<Entry>>, ApiError> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session `{id}`")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e {
            SessionError::Closed(_) => StatusCode::CONFLICT,
            SessionError::InvalidAction(_)
            | SessionError::InvalidSetup(_)
            | SessionError::Personality(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExerciseView {
    pub id: String,
    pub prompt: String,
    pub default_time: f64,
    pub index: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSummary {
    pub seq: u64,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fired_rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vca_outcome: Option<VcaOutcome>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meta: Vec<MetaEffect>,
}

/// What clients see of a session. Answer keys never leave the server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEnvelope {
    pub id: String,
    pub mode: Mode,
    pub seed: u64,
    pub personality_type: String,
    pub group: LearningGroup,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vca: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exercise: Option<ExerciseView>,
    pub behaviors: Vec<RealizedBehavior>,
    pub emotions: BTreeMap<EmotionKind, Level>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensities: Option<BTreeMap<EmotionKind, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_event: Option<EventSummary>,
    pub status: SessionStatus,
}

fn envelope(entry: &Entry) -> SessionEnvelope {
    let s = &entry.session;
    let affective = s.mode() != Mode::Env1;
    SessionEnvelope {
        id: s.id().to_string(),
        mode: s.mode(),
        seed: s.seed(),
        personality_type: s.profile().personality_type.to_string(),
        group: s.group(),
        vca: s.vca().map(|v| v.to_string()),
        exercise: s.current_exercise().map(|e| ExerciseView {
            id: e.id.clone(),
            prompt: e.prompt.clone(),
            default_time: e.default_time,
            index: s.cursor(),
            total: s.assets().bank.len(),
        }),
        behaviors: entry.behaviors.clone(),
        emotions: if affective { s.emotions().levels() } else { BTreeMap::new() },
        intensities: (affective && entry.debug).then(|| s.emotions().intensities().clone()),
        last_event: s.log().last().map(|r| EventSummary {
            seq: r.seq,
            kind: r.kind,
            grade: r.grade,
            fired_rule: r.plan.as_ref().and_then(|p| p.fired_rule.clone()),
            vca_outcome: r.vca_outcome,
            meta: r.meta.clone(),
        }),
        status: s.status(),
    }
}

#[derive(Debug, Deserialize)]
struct CreateSession {
    #[serde(default)]
    mode: Option<String>,
    answers: Answers,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    vca_skill: Option<f64>,
    #[serde(default)]
    debug: bool,
}

#[derive(Debug, Default, Deserialize)]
struct DebugQuery {
    #[serde(default)]
    debug: Option<bool>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::unprocessable(format!("malformed body: {e}")))
}

async fn questionnaire(State(app): State<Arc<AppState>>) -> impl IntoResponse {
    Json(app.assets.form.clone())
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    body: Bytes,
) -> Result<(StatusCode, Json<SessionEnvelope>), ApiError> {
    let req: CreateSession = parse_json(&body)?;
    let mode = match req.mode.as_deref() {
        Some(m) => m.parse::<Mode>().map_err(ApiError::unprocessable)?,
        None => app.config.default_mode,
    };
    let seed = req.seed.unwrap_or_else(|| match app.config.seed_policy {
        SeedPolicy::Fixed(s) => s,
        SeedPolicy::RandomLogged => rand::random(),
    });
    let n = app.next_id.fetch_add(1, Ordering::Relaxed);
    let id = format!("s{n:06}");
    let setup = SessionSetup {
        id: Some(id.clone()),
        mode,
        seed,
        vca_skill: req.vca_skill.unwrap_or(tutor_core::session::DEFAULT_VCA_SKILL),
    };
    let session = start_session(setup, &req.answers, Arc::clone(&app.assets))?;
    let entry = Entry {
        session,
        debug: req.debug || app.config.debug,
        behaviors: Vec::new(),
    };
    let env = envelope(&entry);
    app.sessions.write().await.insert(id, Arc::new(Mutex::new(entry)));
    Ok((StatusCode::CREATED, Json(env)))
}

async fn get_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<DebugQuery>,
) -> Result<Json<SessionEnvelope>, ApiError> {
    let entry = app.entry(&id).await?;
    let guard = entry.lock().await;
    let mut env = envelope(&guard);
    if q.debug == Some(true) && env.mode != Mode::Env1 {
        env.intensities = Some(guard.session.emotions().intensities().clone());
    }
    Ok(Json(env))
}

async fn post_action(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SessionEnvelope>, ApiError> {
    let entry = app.entry(&id).await?;
    let mut guard = entry.lock().await;
    if !guard.session.is_active() {
        return Err(ApiError::new(StatusCode::CONFLICT, format!("session `{id}` is closed")));
    }
    let action: LearnerAction = parse_json(&body)?;
    let record = guard.session.step(action)?;
    guard.behaviors = record.plan.map(|p| p.realized).unwrap_or_default();
    Ok(Json(envelope(&guard)))
}

async fn get_log(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let entry = app.entry(&id).await?;
    let log = entry.lock().await.session.export_log();
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], log).into_response())
}

pub fn router(app: Arc<AppState>) -> Router {
    let static_dir = app.config.static_dir.clone();
    let api = Router::new()
        .route("/questionnaire", get(questionnaire))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/actions", post(post_action))
        .route("/sessions/{id}/log", get(get_log))
        .with_state(app);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(assets: Arc<Assets>, config: ServiceConfig) -> anyhow::Result<()> {
    if let Some(dir) = &config.static_dir {
        anyhow::ensure!(dir.is_dir(), "static directory {} does not exist", dir.display());
    }
    let addr = config.addr;
    let app = router(AppState::new(assets, config));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await?;
    Ok(())
}
