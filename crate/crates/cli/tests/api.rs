use std::sync::{Arc, OnceLock};
use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use guesscert::corpus::{builtin_descriptor, wordle_original, CorpusDescriptor, CorpusSource, ListDescriptor};
use guesscert::search::greedy_tree;
use guesscert::valuation::choose_guess;
use guesscert::{CombinedValuation, Game, StrategyTree};
use guesscert_cli::api::{router, AppState, LoadedGame, DEFAULT_TTL};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Wordle {
    game: Arc<Game>,
    tree: Arc<StrategyTree>,
}

/// The Wordle game with its greedy default-ordering strategy (root TRACE).
fn wordle() -> &'static Wordle {
    static W: OnceLock<Wordle> = OnceLock::new();
    W.get_or_init(|| {
        let game = wordle_original();
        let tree = greedy_tree(&game, &CombinedValuation::default_ordering(), &game.all_secrets()).unwrap();
        Wordle {
            game: Arc::new(game),
            tree: Arc::new(tree),
        }
    })
}

fn toy() -> LoadedGame {
    let words: Vec<String> = ["ABC", "ACB", "BAC", "BCA", "CAB", "CBA"].iter().map(|w| w.to_string()).collect();
    let game = Game::new("toy", 3, "ABC", &words, &words).unwrap();
    LoadedGame {
        descriptor: CorpusDescriptor {
            game: "toy".into(),
            word_length: 3,
            alphabet: "ABC".into(),
            guesses: ListDescriptor {
                source: CorpusSource::File("toy.txt".into()),
                expected_size: Some(6),
                digest: None,
            },
            secrets: None,
        },
        game: Arc::new(game),
        tree: None,
    }
}

fn app_with(ttl: Duration, with_tree: bool) -> (Router, Arc<AppState>) {
    let w = wordle();
    let games = vec![
        LoadedGame {
            descriptor: builtin_descriptor("wordle-original").unwrap(),
            game: w.game.clone(),
            tree: with_tree.then(|| w.tree.clone()),
        },
        toy(),
    ];
    let state = Arc::new(AppState::new(games, ttl));
    (router(state.clone()), state)
}

fn app() -> Router {
    app_with(DEFAULT_TTL, true).0
}

async fn send(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn open(app: &Router, game: &str) -> (String, Value) {
    let (status, body) = send(app, Method::POST, "/api/v1/sessions", Some(json!({ "game": game }))).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    (body["sessionId"].as_str().unwrap().to_string(), body)
}

async fn feedback(app: &Router, id: &str, guess: &str, response: &str) -> (StatusCode, Value) {
    let uri = format!("/api/v1/sessions/{id}/feedback");
    send(app, Method::POST, &uri, Some(json!({ "guess": guess, "response": response }))).await
}

#[tokio::test]
async fn games_lists_descriptors_and_guess_lists() {
    let (status, body) = send(&app(), Method::GET, "/api/v1/games", None).await;
    assert_eq!(status, StatusCode::OK);
    let games = body["games"].as_array().unwrap();
    let names: Vec<&str> = games.iter().map(|g| g["game"].as_str().unwrap()).collect();
    assert_eq!(names, ["toy", "wordle-original"]);
    let wordle = &games[1];
    assert_eq!(wordle["guessCount"], 12972);
    assert_eq!(wordle["secretCount"], 2315);
    assert_eq!(wordle["hasTree"], true);
    assert_eq!(wordle["guesses"].as_array().unwrap().len(), 12972);
    assert_eq!(wordle["descriptor"]["wordLength"], 5);
    assert_eq!(games[0]["hasTree"], false);
}

#[tokio::test]
async fn fresh_session_suggests_the_tree_root() {
    let (_, body) = open(&app(), "wordle-original").await;
    assert_eq!(body["suggestion"], "TRACE");
    assert_eq!(body["suggestionSource"], "tree");
    assert_eq!(body["candidateCount"], 2315);
    assert_eq!(body["solved"], false);
}

#[tokio::test]
async fn on_tree_play_follows_the_tree_and_the_filter_chain() {
    let app = app();
    let w = wordle();
    let g = &w.game;
    for secret in (0..g.num_secrets() as u32).step_by(97) {
        let (id, first) = open(&app, "wordle-original").await;
        let mut suggestion = first["suggestion"].as_str().unwrap().to_string();
        let mut offline = g.all_secrets();
        let transcript = w.tree.replay(g, secret).unwrap();
        for (turn, (guess, response)) in transcript.iter().enumerate() {
            assert_eq!(suggestion, g.word(*guess), "secret {} turn {turn}", g.secret_word(secret));
            offline = g.filter(&offline, *guess, *response);
            let (status, body) = feedback(&app, &id, &suggestion, &response.render(5)).await;
            assert_eq!(status, StatusCode::OK, "{body}");
            assert_eq!(body["candidateCount"], offline.len());
            let sample: Vec<&str> = body["sampleCandidates"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
            let expected: Vec<&str> = g.words_of(&offline).into_iter().take(20).collect();
            assert_eq!(sample, expected);
            let last = turn + 1 == transcript.len();
            assert_eq!(body["solved"], last);
            if last {
                assert!(body["suggestion"].is_null());
            } else {
                assert_eq!(body["suggestionSource"], "tree");
                suggestion = body["suggestion"].as_str().unwrap().to_string();
            }
        }
    }
}

#[tokio::test]
async fn off_tree_guess_falls_back_to_the_default_valuation() {
    let app = app();
    let g = &wordle().game;
    let (id, _) = open(&app, "wordle-original").await;
    let (status, body) = feedback(&app, &id, "fuzzy", "BBBBB").await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let c = g.filter(&g.all_secrets(), g.guess_index("FUZZY").unwrap(), guesscert::Response(0));
    let expected = choose_guess(g, &CombinedValuation::default_ordering(), &c).unwrap();
    assert_eq!(body["candidateCount"], c.len());
    assert_eq!(body["suggestion"], g.word(expected));
    assert_eq!(body["suggestionSource"], "fallback");
}

#[tokio::test]
async fn sessions_without_a_tree_use_the_fallback() {
    let (app, _) = app_with(DEFAULT_TTL, false);
    let (_, body) = open(&app, "wordle-original").await;
    let g = &wordle().game;
    let expected = choose_guess(g, &CombinedValuation::default_ordering(), &g.all_secrets()).unwrap();
    assert_eq!(body["suggestion"], g.word(expected));
    assert_eq!(body["suggestionSource"], "fallback");
}

#[tokio::test]
async fn affirmative_feedback_solves_the_session() {
    let app = app();
    let (id, _) = open(&app, "toy").await;
    let (status, body) = feedback(&app, &id, "CAB", "222").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["solved"], true);
    assert_eq!(body["candidateCount"], 1);
    assert_eq!(body["sampleCandidates"], json!(["CAB"]));
    let (status, _) = feedback(&app, &id, "ABC", "000").await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (id, _) = open(&app, "toy").await;

    let (status, body) = feedback(&app, "no-such-session", "ABC", "222").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(body["error"].as_str().unwrap().contains("unknown session"));

    for bad in ["2x2", "22", "2222", ""] {
        let (status, _) = feedback(&app, &id, "ABC", bad).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad:?}");
    }
    let (status, _) = feedback(&app, &id, "ZZZ", "000").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    // Every toy word is a permutation of ABC, so nothing scores all grey.
    let (status, body) = feedback(&app, &id, "ABC", "000").await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["candidatesBefore"], 6);
    assert_eq!(body["response"], "000");

    // Rejected feedback leaves the session as it was.
    let (status, body) = feedback(&app, &id, "ABC", "211").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["sampleCandidates"], json!(["ACB"]));

    let (status, _) = send(&app, Method::POST, "/api/v1/sessions", Some(json!({ "game": "nope" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn delete_ends_a_session() {
    let (app, state) = app_with(DEFAULT_TTL, true);
    let (id, _) = open(&app, "toy").await;
    assert_eq!(state.session_count(), 1);
    let uri = format!("/api/v1/sessions/{id}");
    let (status, _) = send(&app, Method::DELETE, &uri, None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = send(&app, Method::DELETE, &uri, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = feedback(&app, &id, "ABC", "222").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(state.session_count(), 0);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let (app, state) = app_with(Duration::from_millis(200), false);
    let (id, _) = open(&app, "toy").await;
    let (status, _) = feedback(&app, &id, "ABC", "211").await;
    assert_eq!(status, StatusCode::OK);
    tokio::time::sleep(Duration::from_millis(400)).await;
    assert_eq!(state.session_count(), 0);
    let (status, _) = feedback(&app, &id, "ACB", "222").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn session_ids_are_distinct() {
    let app = app();
    let mut ids = std::collections::HashSet::new();
    for _ in 0..20 {
        ids.insert(open(&app, "toy").await.0);
    }
    assert_eq!(ids.len(), 20);
}

#[tokio::test]
async fn fresh_session_with_the_optimal_tree_suggests_salet() {
    let w = wordle();
    let doc = include_str!("../../core/tests/data/wordle-salet.tree.json");
    let tree = StrategyTree::parse(doc, &w.game).unwrap();
    let games = vec![LoadedGame {
        descriptor: builtin_descriptor("wordle-original").unwrap(),
        game: w.game.clone(),
        tree: Some(Arc::new(tree)),
    }];
    let app = router(Arc::new(AppState::new(games, DEFAULT_TTL)));
    let (_, body) = open(&app, "wordle-original").await;
    assert_eq!(body["suggestion"], "SALET");
    assert_eq!(body["suggestionSource"], "tree");
}
