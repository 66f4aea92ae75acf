//! HTTP routes over a session registry.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, PoisonError, RwLock, RwLockReadGuard, RwLockWriteGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::error::{Result, ServiceError};
use crate::session::{replay, Batch, Event, LabeledRow, Metrics, QueryPlan, Session, SessionConfig, Summary};
use crate::store::EventStore;

type Shared = Arc<RwLock<Session>>;

fn read<T>(lock: &RwLock<T>) -> RwLockReadGuard<'_, T> {
    lock.read().unwrap_or_else(PoisonError::into_inner)
}

fn write<T>(lock: &RwLock<T>) -> RwLockWriteGuard<'_, T> {
    lock.write().unwrap_or_else(PoisonError::into_inner)
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

/// Session registry plus the optional event store. Each session has its own
/// lock: writes to one session are serialized, reads run concurrently, and
/// sessions never block each other.
#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Shared>>>,
    store: Option<EventStore>,
}

impl AppState {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens `dir` and replays every session log found there.
    pub fn persistent(dir: impl Into<PathBuf>) -> Result<Self> {
        let store = EventStore::open(dir)?;
        let mut sessions = HashMap::new();
        for id in store.session_ids()? {
            let session = replay(&store.read(&id)?)?;
            sessions.insert(id, Arc::new(RwLock::new(session)));
        }
        Ok(Self {
            sessions: Arc::new(RwLock::new(sessions)),
            store: Some(store),
        })
    }

    pub fn session(&self, id: &str) -> Result<Shared> {
        read(&self.sessions).get(id).cloned().ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = read(&self.sessions).keys().cloned().collect();
        ids.sort();
        ids
    }

    fn log(&self, id: &str, event: &Event) -> Result<()> {
        match &self.store {
            Some(store) => store.append(id, event),
            None => Ok(()),
        }
    }

    pub fn create(&self, config: SessionConfig) -> Result<String> {
        let config = config.resolve()?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let at_ms = now_ms();
        let session = Session::create(id.clone(), config.clone(), at_ms)?;
        self.log(&id, &Event::Created { id: id.clone(), config, at_ms })?;
        write(&self.sessions).insert(id.clone(), Arc::new(RwLock::new(session)));
        Ok(id)
    }

    /// Validates and applies `event` on a copy, logs it, then commits, so a
    /// failed teach or write leaves the session untouched.
    fn commit(&self, session: &mut Session, event: Event) -> Result<()> {
        let mut next = session.clone();
        next.apply(&event)?;
        self.log(session.id(), &event)?;
        *session = next;
        Ok(())
    }

    pub fn query(&self, id: &str, n: Option<usize>) -> Result<Batch> {
        let shared = self.session(id)?;
        let mut s = write(&shared);
        if let QueryPlan::New(ids) = s.plan_query(n)? {
            self.commit(&mut s, Event::Queried { ids, at_ms: now_ms() })?;
        }
        s.batch()
    }

    pub fn label(&self, id: &str, labels: Vec<LabeledRow>) -> Result<Metrics> {
        let shared = self.session(id)?;
        let mut s = write(&shared);
        s.check_labels(&labels)?;
        self.commit(&mut s, Event::Labeled { labels, at_ms: now_ms() })?;
        Ok(s.metrics())
    }

    pub fn cancel(&self, id: &str) -> Result<Summary> {
        let shared = self.session(id)?;
        let mut s = write(&shared);
        if !s.pending().is_empty() {
            self.commit(&mut s, Event::Cancelled { at_ms: now_ms() })?;
        }
        Ok(s.summary())
    }

    pub fn summary(&self, id: &str) -> Result<Summary> {
        Ok(read(&*self.session(id)?).summary())
    }

    pub fn metrics(&self, id: &str) -> Result<Metrics> {
        Ok(read(&*self.session(id)?).metrics())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
}

#[derive(Debug, Deserialize)]
pub struct QueryParams {
    pub n: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabelsBody {
    pub labels: Vec<LabeledRow>,
}

fn parse_json<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(format!("invalid request body: {e}")))
}

/// Runs CPU-bound session work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T> + Send + 'static) -> Result<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::Storage(std::io::Error::other(e.to_string())))?
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Result<(StatusCode, Json<Created>)> {
    let config: SessionConfig = parse_json(&body)?;
    let id = blocking(move || app.create(config)).await?;
    Ok((StatusCode::CREATED, Json(Created { id })))
}

async fn list_sessions(State(app): State<AppState>) -> Json<Vec<String>> {
    Json(app.session_ids())
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Summary>> {
    app.summary(&id).map(Json)
}

async fn query(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<QueryParams>,
) -> Result<Json<Batch>> {
    blocking(move || app.query(&id, params.n)).await.map(Json)
}

async fn labels(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<Metrics>> {
    app.session(&id)?;
    let body: LabelsBody = parse_json(&body)?;
    blocking(move || app.label(&id, body.labels)).await.map(Json)
}

async fn cancel(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Summary>> {
    blocking(move || app.cancel(&id)).await.map(Json)
}

async fn metrics(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Metrics>> {
    app.metrics(&id).map(Json)
}

/// The JSON API without CORS or static files.
pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/query", post(query))
        .route("/sessions/{id}/labels", post(labels))
        .route("/sessions/{id}/pending", delete(cancel))
        .route("/sessions/{id}/metrics", get(metrics))
        .with_state(state)
}

/// The API with permissive CORS, optionally serving a built UI from `ui_dir`.
pub fn app(state: AppState, ui_dir: Option<PathBuf>) -> Router {
    let api = router(state);
    let api = match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    api.layer(CorsLayer::permissive())
}
