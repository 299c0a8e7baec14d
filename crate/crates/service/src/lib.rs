//! HTTP/JSON service for live games against the sampling engine.
//!
//! Sessions live in memory. Each session sits behind its own async mutex, so
//! requests against one game are serialized while different games proceed
//! in parallel. Engine work runs on the blocking pool. Readers get the last
//! published snapshot without waiting for the engine.

pub mod api;
pub mod session;

use std::collections::HashMap;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use tower_http::services::ServeDir;

use api::{ApiError, CreateGame, GameSummary, Heatmap, PostMove, Snapshot, Status};
use session::{Limits, Session};

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub limits: Limits,
    /// Directory served at `/` (the browser bundle).
    pub static_dir: Option<PathBuf>,
    /// Finished games are appended here as JSON lines.
    pub record_log: Option<PathBuf>,
    /// Base for seeds of games created without one.
    pub seed: u64,
}

struct Entry {
    game: Arc<tokio::sync::Mutex<Session>>,
    published: Mutex<Snapshot>,
}

pub struct AppState {
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, Arc<Entry>>>,
    counter: AtomicU64,
    log: Mutex<()>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Arc::new(Self {
            config,
            sessions: RwLock::new(HashMap::new()),
            counter: AtomicU64::new(0),
            log: Mutex::new(()),
        })
    }

    fn entry(&self, id: &str) -> Result<Arc<Entry>, ApiError> {
        self.sessions.read().unwrap().get(id).cloned().ok_or_else(|| ApiError::no_such_game(id))
    }

    fn log_finished(&self, session: &Session) {
        let Some(path) = &self.config.record_log else {
            return;
        };
        let _guard = self.log.lock().unwrap();
        let line = session.record().to_json_line();
        let written =
            std::fs::OpenOptions::new().create(true).append(true).open(path).and_then(|mut f| writeln!(f, "{line}"));
        if let Err(e) = written {
            eprintln!("could not append to {}: {e}", path.display());
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/games", post(create_game).get(list_games))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", post(post_move))
        .route("/games/{id}/heatmap", get(get_heatmap))
        .route("/games/{id}/resign", post(resign))
        .with_state(state.clone());
    match &state.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

async fn create_game(
    State(state): State<Arc<AppState>>,
    Json(req): Json<CreateGame>,
) -> Result<(StatusCode, Json<Snapshot>), ApiError> {
    let k = state.counter.fetch_add(1, Ordering::Relaxed);
    let id = format!("g{k:06x}");
    let seed =
        req.seed.unwrap_or_else(|| randturn::rng::derive_seed(state.config.seed, randturn::rng::domain::GAME, k));
    let limits = state.config.limits;
    let sid = id.clone();
    let session = tokio::task::spawn_blocking(move || Session::create(sid, &req, seed, &limits))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    let snap = session.snapshot();
    if session.status() == Status::Finished {
        state.log_finished(&session);
    }
    let entry = Entry { game: Arc::new(tokio::sync::Mutex::new(session)), published: Mutex::new(snap.clone()) };
    state.sessions.write().unwrap().insert(id, Arc::new(entry));
    Ok((StatusCode::CREATED, Json(snap)))
}

async fn list_games(State(state): State<Arc<AppState>>) -> Json<Vec<GameSummary>> {
    let entries: Vec<Arc<Entry>> = state.sessions.read().unwrap().values().cloned().collect();
    let mut out: Vec<GameSummary> = entries
        .iter()
        .map(|e| {
            let s = e.published.lock().unwrap();
            GameSummary {
                id: s.id.clone(),
                game: s.game.clone(),
                size: s.board.size,
                status: s.status,
                human_side: s.human_side,
                moves: s.moves.len(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Json(out)
}

async fn get_game(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Snapshot>, ApiError> {
    let entry = state.entry(&id)?;
    let snap = entry.published.lock().unwrap().clone();
    Ok(Json(snap))
}

/// Runs `f` on the session under its lock on the blocking pool and publishes
/// the resulting snapshot.
async fn mutate<T, F>(state: &Arc<AppState>, id: &str, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&mut Session) -> Result<T, ApiError> + Send + 'static,
{
    let entry = state.entry(id)?;
    let mut guard = entry.game.clone().lock_owned().await;
    let was_finished = guard.status() == Status::Finished;
    if !was_finished {
        entry.published.lock().unwrap().status = Status::EngineThinking;
    }
    let (guard, out) = tokio::task::spawn_blocking(move || {
        let out = f(&mut guard);
        (guard, out)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    *entry.published.lock().unwrap() = guard.snapshot();
    if !was_finished && guard.status() == Status::Finished {
        state.log_finished(&guard);
    }
    out
}

async fn post_move(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<PostMove>,
) -> Result<Json<Snapshot>, ApiError> {
    let snap = mutate(&state, &id, move |s| {
        s.human_move(req.cell, req.turn)?;
        Ok(s.snapshot())
    })
    .await?;
    Ok(Json(snap))
}

async fn get_heatmap(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Heatmap>, ApiError> {
    Ok(Json(mutate(&state, &id, |s| s.heatmap()).await?))
}

async fn resign(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Snapshot>, ApiError> {
    let snap = mutate(&state, &id, |s| {
        s.resign()?;
        Ok(s.snapshot())
    })
    .await?;
    Ok(Json(snap))
}

/// Serves until ctrl-c.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(config)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
