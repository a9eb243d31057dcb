//! The assistant's JSON API.
//!
//! ```text
//! GET    /api/v1/games
//! POST   /api/v1/sessions                 {game}
//! POST   /api/v1/sessions/{id}/feedback   {guess, response}
//! DELETE /api/v1/sessions/{id}
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use guesscert::corpus::CorpusDescriptor;
use guesscert::{Game, StrategyTree};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::session::{FeedbackError, Session, Snapshot};

pub const DEFAULT_TTL: Duration = Duration::from_secs(24 * 60 * 60);

/// A game the service can run sessions for.
pub struct LoadedGame {
    pub descriptor: CorpusDescriptor,
    pub game: Arc<Game>,
    pub tree: Option<Arc<StrategyTree>>,
}

struct Entry {
    session: Arc<Mutex<Session>>,
    touched: Instant,
}

pub struct AppState {
    games: BTreeMap<String, LoadedGame>,
    sessions: Mutex<HashMap<String, Entry>>,
    ttl: Duration,
}

impl AppState {
    pub fn new(games: Vec<LoadedGame>, ttl: Duration) -> AppState {
        AppState {
            games: games.into_iter().map(|g| (g.descriptor.game.clone(), g)).collect(),
            sessions: Mutex::new(HashMap::new()),
            ttl,
        }
    }

    pub fn session_count(&self) -> usize {
        let mut sessions = self.sessions.lock().unwrap();
        self.expire(&mut sessions);
        sessions.len()
    }

    fn expire(&self, sessions: &mut HashMap<String, Entry>) {
        let now = Instant::now();
        sessions.retain(|_, e| now.duration_since(e.touched) < self.ttl);
    }

    fn lookup(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let mut sessions = self.sessions.lock().unwrap();
        self.expire(&mut sessions);
        let entry = sessions.get_mut(id).ok_or_else(|| ApiError::unknown_session(id))?;
        entry.touched = Instant::now();
        Ok(entry.session.clone())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/v1/games", get(list_games))
        .route("/api/v1/sessions", post(create_session))
        .route("/api/v1/sessions/:id/feedback", post(feedback))
        .route("/api/v1/sessions/:id", delete(delete_session))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: String) -> ApiError {
        ApiError {
            status,
            body: json!({ "error": message }),
        }
    }

    fn unknown_session(id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, format!("unknown session {id:?}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<FeedbackError> for ApiError {
    fn from(e: FeedbackError) -> ApiError {
        match &e {
            FeedbackError::Contradiction {
                guess,
                response,
                candidates_before,
            } => ApiError {
                status: StatusCode::CONFLICT,
                body: json!({
                    "error": e.to_string(),
                    "guess": guess,
                    "response": response,
                    "candidatesBefore": candidates_before,
                }),
            },
            FeedbackError::AlreadySolved => ApiError::new(StatusCode::CONFLICT, e.to_string()),
            FeedbackError::UnknownGuess(_) | FeedbackError::BadResponse(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, e.to_string())
            }
        }
    }
}

async fn list_games(State(state): State<Arc<AppState>>) -> Json<Value> {
    let games: Vec<Value> = state
        .games
        .values()
        .map(|g| {
            json!({
                "descriptor": g.descriptor,
                "game": g.descriptor.game,
                "wordLength": g.game.word_len(),
                "guessCount": g.game.num_guesses(),
                "secretCount": g.game.num_secrets(),
                "hasTree": g.tree.is_some(),
                "guesses": g.game.guesses(),
            })
        })
        .collect();
    Json(json!({ "games": games }))
}

#[derive(Deserialize)]
struct CreateSession {
    game: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Created {
    session_id: String,
    #[serde(flatten)]
    snapshot: Snapshot,
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    Json(req): Json<CreateSession>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let loaded = state
        .games
        .get(&req.game)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown game {:?}", req.game)))?;
    let (game, tree) = (loaded.game.clone(), loaded.tree.clone());
    let (session, snapshot) = tokio::task::spawn_blocking(move || {
        let session = Session::new(game, tree);
        let snapshot = session.snapshot();
        (session, snapshot)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let id = format!("{:032x}", rand::thread_rng().gen::<u128>());
    let mut sessions = state.sessions.lock().unwrap();
    state.expire(&mut sessions);
    sessions.insert(
        id.clone(),
        Entry {
            session: Arc::new(Mutex::new(session)),
            touched: Instant::now(),
        },
    );
    Ok((
        StatusCode::CREATED,
        Json(Created {
            session_id: id,
            snapshot,
        }),
    ))
}

#[derive(Deserialize)]
struct Feedback {
    guess: String,
    response: String,
}

async fn feedback(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<Feedback>,
) -> Result<Json<Snapshot>, ApiError> {
    let session = state.lookup(&id)?;
    // Suggestions can take a while on large candidate sets; keep that off
    // the async workers. The per-session lock serialises its mutations.
    let snapshot = tokio::task::spawn_blocking(move || session.lock().unwrap().feedback(&req.guess, &req.response))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(snapshot))
}

async fn delete_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    let mut sessions = state.sessions.lock().unwrap();
    state.expire(&mut sessions);
    match sessions.remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::unknown_session(&id)),
    }
}
