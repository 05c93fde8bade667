//! HTTP+JSON session API.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use twentyq_core::engine::{TraceLine, TraceReport};
use twentyq_core::{
    Answer, EngineConfig, EngineError, GuessList, Knowledge, Layer, Level, Phase, Question, SessionState,
};
use uuid::Uuid;

use crate::game::{advance, Pending};
use crate::store::StatsStore;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_found() -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", "no such game, or it expired")
    }

    fn conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "wrong_phase", message)
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "unprocessable", message)
    }

    fn not_ready() -> Self {
        Self::new(StatusCode::SERVICE_UNAVAILABLE, "not_ready", "catalog is not loaded")
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::WrongPhase { .. } | EngineError::StaleQuestion(_) | EngineError::BudgetSpent => {
                Self::conflict(e.to_string())
            }
            EngineError::MissingConfirmation | EngineError::NotInGuess(_) => Self::unprocessable(e.to_string()),
            other => {
                tracing::error!("engine failure: {other}");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string())
            }
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                code: self.code,
                message: &self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}

struct GameSession {
    id: Uuid,
    state: SessionState,
    pending: Pending,
    created_at: u64,
    confirmed: Option<String>,
    revealed: Option<String>,
}

struct Slot {
    session: Arc<tokio::sync::Mutex<GameSession>>,
    last_seen: Instant,
}

pub struct AppState {
    knowledge: Option<Arc<Knowledge>>,
    config: EngineConfig,
    stats: RwLock<StatsStore>,
    sessions: Mutex<HashMap<Uuid, Slot>>,
    idle: Duration,
}

impl AppState {
    pub fn new(knowledge: Knowledge, config: EngineConfig, stats: StatsStore, idle: Duration) -> Self {
        AppState {
            knowledge: Some(Arc::new(knowledge)),
            config,
            stats: RwLock::new(stats),
            sessions: Mutex::new(HashMap::new()),
            idle,
        }
    }

    /// A service with no catalog; game routes answer 503.
    pub fn not_ready(config: EngineConfig, stats: StatsStore, idle: Duration) -> Self {
        AppState {
            knowledge: None,
            config,
            stats: RwLock::new(stats),
            sessions: Mutex::new(HashMap::new()),
            idle,
        }
    }

    pub fn live_sessions(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    pub fn elections_recorded(&self) -> u64 {
        self.stats.read().expect("stats lock poisoned").stats().games_recorded()
    }

    /// Drops every session idle for longer than the timeout.
    pub fn sweep(&self) -> usize {
        let mut map = self.sessions.lock().expect("session map poisoned");
        let before = map.len();
        map.retain(|_, slot| slot.last_seen.elapsed() <= self.idle);
        before - map.len()
    }

    fn knowledge(&self) -> Result<&Arc<Knowledge>, ApiError> {
        self.knowledge.as_ref().ok_or_else(ApiError::not_ready)
    }

    fn lookup(&self, raw_id: &str) -> Result<Arc<tokio::sync::Mutex<GameSession>>, ApiError> {
        let id = Uuid::parse_str(raw_id).map_err(|_| ApiError::not_found())?;
        let mut map = self.sessions.lock().expect("session map poisoned");
        let expired = match map.get_mut(&id) {
            None => return Err(ApiError::not_found()),
            Some(slot) if slot.last_seen.elapsed() > self.idle => true,
            Some(slot) => {
                slot.last_seen = Instant::now();
                false
            }
        };
        if expired {
            map.remove(&id);
            return Err(ApiError::not_found());
        }
        Ok(map[&id].session.clone())
    }

    fn step(&self, session: &mut GameSession) -> Result<(), ApiError> {
        let knowledge = self.knowledge()?;
        let stats = self.stats.read().expect("stats lock poisoned");
        session.pending = advance(&mut session.state, knowledge, stats.stats(), &self.config)?;
        Ok(())
    }

    fn payload(&self, session: &GameSession) -> Result<GamePayload, ApiError> {
        let knowledge = self.knowledge()?;
        let mut payload = GamePayload {
            game_id: session.id.to_string(),
            status: session.state.phase,
            questions_used: session.state.questions_used,
            max_questions: self.config.max_questions,
            created_at: session.created_at,
            question: None,
            guess: None,
            r#final: None,
        };
        match &session.pending {
            Pending::Question(q) => payload.question = Some(q.into()),
            Pending::Guess(g) => payload.guess = Some(g.into()),
            Pending::Finished => {
                let reveal = session.confirmed.as_deref().or(session.revealed.as_deref());
                let trace = session.state.trace(reveal, knowledge)?;
                let solved = session.state.phase == Phase::Solved;
                payload.r#final = Some(FinalPayload {
                    status: session.state.phase,
                    movie: session.confirmed.as_deref().map(|id| MoviePayload {
                        movie_id: id.to_string(),
                        title: knowledge.title(id).to_string(),
                    }),
                    questions_used: session.state.questions_used,
                    reveal_prompt: (!solved && session.revealed.is_none()).then(|| {
                        format!(
                            "Which movie was it? POST /api/games/{}/reveal with its title to check each answer.",
                            session.id
                        )
                    }),
                    trace: trace.into(),
                });
            }
        }
        Ok(payload)
    }
}

#[derive(Debug, Serialize)]
pub struct GamePayload {
    pub game_id: String,
    pub status: Phase,
    pub questions_used: u32,
    pub max_questions: u32,
    /// Unix seconds.
    pub created_at: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question: Option<QuestionPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guess: Option<GuessPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r#final: Option<FinalPayload>,
}

#[derive(Debug, Serialize)]
pub struct QuestionPayload {
    pub ordinal: u32,
    pub text: String,
    pub level: Level,
    pub layer: Layer,
    pub value: String,
}

impl From<&Question> for QuestionPayload {
    fn from(q: &Question) -> Self {
        QuestionPayload {
            ordinal: q.ordinal,
            text: q.text.clone(),
            level: q.entity.level,
            layer: q.layer,
            value: q.entity.value.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GuessPayload {
    pub ordinal: u32,
    pub prompt: String,
    pub cumulative_probability: f64,
    pub movies: Vec<RankedMovie>,
}

#[derive(Debug, Serialize)]
pub struct RankedMovie {
    pub rank: usize,
    pub movie_id: String,
    pub title: String,
    pub probability: f64,
}

impl From<&GuessList> for GuessPayload {
    fn from(g: &GuessList) -> Self {
        GuessPayload {
            ordinal: g.ordinal,
            prompt: g.prompt(),
            cumulative_probability: g.cumulative(),
            movies: g
                .entries
                .iter()
                .enumerate()
                .map(|(i, e)| RankedMovie {
                    rank: i + 1,
                    movie_id: e.movie_id.clone(),
                    title: e.title.clone(),
                    probability: e.probability,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MoviePayload {
    pub movie_id: String,
    pub title: String,
}

#[derive(Debug, Serialize)]
pub struct FinalPayload {
    pub status: Phase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub movie: Option<MoviePayload>,
    pub questions_used: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reveal_prompt: Option<String>,
    pub trace: TracePayload,
}

#[derive(Debug, Serialize)]
pub struct TracePayload {
    pub movie_id: Option<String>,
    pub movie_title: Option<String>,
    pub note: Option<String>,
    pub mismatches: usize,
    pub lines: Vec<TraceLine>,
}

impl From<TraceReport> for TracePayload {
    fn from(t: TraceReport) -> Self {
        TracePayload {
            mismatches: t.mismatches(),
            movie_id: t.movie_id,
            movie_title: t.movie_title,
            note: t.note,
            lines: t.lines,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateGame {
    pub birth_year: Option<i32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerBody {
    pub answer: Answer,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuessBody {
    pub accepted: bool,
    pub movie_id: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevealBody {
    pub title: String,
}

/// Parses a JSON request body; an empty body reads as `T::default()` when
/// `allow_empty` is set.
pub fn parse_body<T: DeserializeOwned + Default>(bytes: &[u8], allow_empty: bool) -> Result<T, String> {
    if allow_empty && bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| e.to_string())
}

fn body<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(e.to_string()))
}

pub type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/games", post(create_game))
        .route("/api/games/{id}", get(show_game))
        .route("/api/games/{id}/answer", post(submit_answer))
        .route("/api/games/{id}/guess", post(submit_guess))
        .route("/api/games/{id}/reveal", post(reveal))
        .with_state(state)
}

async fn health(State(app): State<Shared>) -> Result<Json<serde_json::Value>, ApiError> {
    let knowledge = app.knowledge()?;
    Ok(Json(serde_json::json!({
        "status": "ok",
        "movies": knowledge.catalog.len(),
        "sessions": app.live_sessions(),
        "elections_recorded": app.elections_recorded(),
    })))
}

async fn create_game(State(app): State<Shared>, raw: Bytes) -> Result<(StatusCode, Json<GamePayload>), ApiError> {
    let knowledge = app.knowledge()?;
    let req: CreateGame = parse_body(&raw, true).map_err(ApiError::bad_request)?;
    let id = Uuid::new_v4();
    let (hi, lo) = id.as_u64_pair();
    let state = SessionState::start(knowledge, &app.config, req.birth_year, hi ^ lo)?;
    let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let mut session = GameSession {
        id,
        state,
        pending: Pending::Finished,
        created_at,
        confirmed: None,
        revealed: None,
    };
    app.step(&mut session)?;
    let payload = app.payload(&session)?;
    app.sessions.lock().expect("session map poisoned").insert(
        id,
        Slot {
            session: Arc::new(tokio::sync::Mutex::new(session)),
            last_seen: Instant::now(),
        },
    );
    tracing::info!(game_id = %id, birth_year = ?req.birth_year, "game created");
    Ok((StatusCode::CREATED, Json(payload)))
}

async fn show_game(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<GamePayload>, ApiError> {
    let slot = app.lookup(&id)?;
    let session = slot.lock().await;
    Ok(Json(app.payload(&session)?))
}

async fn submit_answer(
    State(app): State<Shared>,
    Path(id): Path<String>,
    raw: Bytes,
) -> Result<Json<GamePayload>, ApiError> {
    let req: AnswerBody = body(&raw)?;
    let slot = app.lookup(&id)?;
    let mut session = slot.lock().await;
    let question = match &session.pending {
        Pending::Question(q) => q.clone(),
        Pending::Guess(_) => return Err(ApiError::conflict("a guess is awaiting feedback")),
        Pending::Finished => return Err(ApiError::conflict("the game is over")),
    };
    let knowledge = app.knowledge()?;
    session
        .state
        .process_answer(&question, req.answer, knowledge, &app.config)?;
    app.step(&mut session)?;
    Ok(Json(app.payload(&session)?))
}

async fn submit_guess(
    State(app): State<Shared>,
    Path(id): Path<String>,
    raw: Bytes,
) -> Result<Json<GamePayload>, ApiError> {
    let req: GuessBody = body(&raw)?;
    let slot = app.lookup(&id)?;
    let mut session = slot.lock().await;
    let guess = match &session.pending {
        Pending::Guess(g) => g.clone(),
        // A retried acceptance returns the same result without learning twice.
        Pending::Finished if req.accepted && req.movie_id.is_some() && req.movie_id == session.confirmed => {
            return Ok(Json(app.payload(&session)?));
        }
        Pending::Finished => return Err(ApiError::conflict("the game is over")),
        Pending::Question(_) => return Err(ApiError::conflict("a question is awaiting an answer")),
    };
    let knowledge = app.knowledge()?;
    if req.accepted {
        let movie = match req.movie_id.as_deref() {
            Some(m) if guess.contains(m) => m.to_string(),
            Some(m) => {
                return Err(ApiError::unprocessable(format!(
                    "movie `{m}` was not part of the guess"
                )))
            }
            None => {
                return Err(ApiError::unprocessable(
                    "an accepted guess needs the movie_id it matched",
                ))
            }
        };
        {
            let mut store = app.stats.write().expect("stats lock poisoned");
            session
                .state
                .process_guess_feedback(true, Some(&movie), knowledge, store.stats_mut(), &app.config)?;
            if let Err(e) = store.persist() {
                tracing::error!("could not persist stats to {}: {e:#}", store.path().display());
            }
        }
        tracing::info!(game_id = %session.id, movie = %movie, "game solved");
        session.confirmed = Some(movie);
    } else {
        // Rejections never touch the statistics.
        let mut scratch = twentyq_core::LearnedStats::new();
        session
            .state
            .process_guess_feedback(false, None, knowledge, &mut scratch, &app.config)?;
    }
    app.step(&mut session)?;
    Ok(Json(app.payload(&session)?))
}

async fn reveal(State(app): State<Shared>, Path(id): Path<String>, raw: Bytes) -> Result<Json<GamePayload>, ApiError> {
    let req: RevealBody = body(&raw)?;
    let slot = app.lookup(&id)?;
    let mut session = slot.lock().await;
    if session.pending != Pending::Finished {
        return Err(ApiError::conflict("the game is still in progress"));
    }
    if session.confirmed.is_none() {
        session.revealed = Some(req.title);
    }
    Ok(Json(app.payload(&session)?))
}
