//! JSON over HTTP.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | GET | `/scenarios` | | scenario summaries |
//! | POST | `/sessions` | `{"scenario": name or inline scenario}` | 201 `{id, state}` |
//! | GET | `/sessions` | | `[{id, scenario, status}]` |
//! | GET | `/sessions/{id}` | | `{id, state}` |
//! | DELETE | `/sessions/{id}` | | 204 |
//! | GET | `/sessions/{id}/questions` | | range of attention with askability |
//! | POST | `/sessions/{id}/moves` | a move in the scenario script format | `{id, state, added}` |
//! | POST | `/sessions/{id}/oracle` | `{"question_seq": n}` or `{"question": q}` or `{}` | `{id, state, added, answer}` |
//! | POST | `/sessions/{id}/preview` | `{"premises": [n, ...], "witness": "c"}` | conclusions per rule |
//! | GET | `/sessions/{id}/tableau?format=text\|markdown\|json` | | rendered tableau |
//!
//! `state` is the tableau document (see `iqgame::render`). Errors are
//! `{"error": {"code", "message", "missing"?}}` with status 400 for
//! malformed input, 404 for unknown sessions or scenarios and 422 for moves
//! the game does not allow.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use iqgame::game::{AvailableQuestion, GameError};
use iqgame::render::{status_line, TableauDocument};
use iqgame::scenario::{MoveFile, QuestionRef, ScenarioError, ScenarioFile, ScriptedMove};
use iqgame::{builtin, builtin_scenarios, load_scenario, render_tableau, Answer, Format, Scenario};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::session::{Session, SessionError, SessionStore};

pub struct AppState {
    pub store: SessionStore,
    /// Directories searched for `<name>.json` after the builtins.
    pub scenario_path: Vec<PathBuf>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
    missing: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
            missing: None,
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn session_not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "session_not_found", format!("no session `{id}`"))
    }
}

impl From<GameError> for ApiError {
    fn from(e: GameError) -> Self {
        let missing = match &e {
            GameError::Blocked { missing, .. } => Some(missing.canonical()),
            _ => None,
        };
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            code: e.code().to_string(),
            message: e.to_string(),
            missing,
        }
    }
}

impl From<ScenarioError> for ApiError {
    fn from(e: ScenarioError) -> Self {
        let status = match &e {
            ScenarioError::NotFound(_) => StatusCode::NOT_FOUND,
            ScenarioError::AskOutsideRange { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ScenarioError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Replay(g) => g.into(),
            SessionError::Scenario(s) => s.into(),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, other.code(), other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut error = json!({"code": self.code, "message": self.message});
        if let Some(m) = self.missing {
            error["missing"] = Value::String(m);
        }
        (self.status, Json(json!({ "error": error }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    let body: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(e.to_string()))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/scenarios", get(list_scenarios))
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/:id", get(get_session).delete(delete_session))
        .route("/sessions/:id/questions", get(questions))
        .route("/sessions/:id/moves", post(post_move))
        .route("/sessions/:id/oracle", post(consult_oracle))
        .route("/sessions/:id/preview", post(preview))
        .route("/sessions/:id/tableau", get(tableau))
        .with_state(state)
}

#[derive(Serialize)]
struct ScenarioSummary {
    name: String,
    inquirer: String,
    principal: String,
    range_of_attention: Vec<String>,
    scripted: bool,
    notes: String,
}

fn summary(s: &Scenario) -> ScenarioSummary {
    ScenarioSummary {
        name: s.name.clone(),
        inquirer: s.inquirer.clone(),
        principal: s.principal.canonical(),
        range_of_attention: s.ra.iter().map(|q| q.canonical()).collect(),
        scripted: s.moves.is_some(),
        notes: s.notes.clone(),
    }
}

async fn list_scenarios() -> Json<Vec<ScenarioSummary>> {
    Json(builtin_scenarios().iter().map(|s| summary(s)).collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    /// A scenario name, or a whole scenario in the file format.
    scenario: Value,
}

fn lookup_scenario(app: &AppState, name: &str) -> ApiResult<Arc<Scenario>> {
    if let Some(s) = builtin(name) {
        return Ok(s);
    }
    // Names only; a server never opens arbitrary paths on request.
    let plain = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if plain {
        for dir in &app.scenario_path {
            let path = dir.join(format!("{name}.json"));
            if path.is_file() {
                return Ok(Arc::new(load_scenario(path)?));
            }
        }
    }
    Err(ScenarioError::NotFound(name.to_string()).into())
}

fn document(session: &Session) -> TableauDocument {
    TableauDocument::new(session.game.state(), &session.game.scenario().inquirer)
}

fn session_json(session: &Session) -> Value {
    json!({"id": session.id, "state": document(session)})
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let req: CreateSession = parse_body(&body)?;
    let scenario = match req.scenario {
        Value::String(name) => lookup_scenario(&app, &name)?,
        inline => {
            let file: ScenarioFile = serde_json::from_value(inline)
                .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "schema", e.to_string()))?;
            Arc::new(file.into_scenario()?)
        }
    };
    let shared = app.store.create(scenario)?;
    let session = shared.lock().unwrap();
    Ok((StatusCode::CREATED, Json(session_json(&session))).into_response())
}

async fn list_sessions(State(app): State<Arc<AppState>>) -> Json<Vec<Value>> {
    let list = app
        .store
        .ids()
        .into_iter()
        .filter_map(|id| app.store.get(&id))
        .map(|shared| {
            let s = shared.lock().unwrap();
            json!({
                "id": s.id,
                "scenario": s.game.scenario().name,
                "status": status_line(&s.game.state().status),
            })
        })
        .collect();
    Json(list)
}

fn with_session<T>(
    app: &AppState,
    id: &str,
    f: impl FnOnce(&mut Session) -> ApiResult<T>,
) -> ApiResult<T> {
    let shared = app.store.get(id).ok_or_else(|| ApiError::session_not_found(id))?;
    let mut session = shared.lock().unwrap();
    f(&mut session)
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_session(&app, &id, |s| Ok(Json(session_json(s))))
}

async fn delete_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    if app.store.remove(&id)? {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::session_not_found(&id))
    }
}

#[derive(Serialize)]
struct QuestionView {
    index: usize,
    text: String,
    unicode: String,
    #[serde(flatten)]
    available: AvailableQuestion,
}

async fn questions(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Vec<QuestionView>>> {
    with_session(&app, &id, |s| {
        Ok(Json(
            s.game
                .available_questions()
                .into_iter()
                .enumerate()
                .map(|(i, a)| QuestionView {
                    index: i + 1,
                    text: a.question.canonical(),
                    unicode: a.question.unicode(),
                    available: a,
                })
                .collect(),
        ))
    })
}

/// Resolves and applies one scripted move, then persists the session.
fn play(app: &AppState, session: &mut Session, m: ScriptedMove) -> ApiResult<Vec<usize>> {
    let resolved = session.game.resolve_scripted(&m)?;
    let added = session.game.apply(resolved)?;
    app.store.save(session)?;
    Ok(added)
}

async fn post_move(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let file: MoveFile = parse_body(&body)?;
    with_session(&app, &id, |s| {
        let index = s.game.history().len() + 1;
        let m = s.game.scenario().resolve_move(file, index)?;
        let added = play(&app, s, m)?;
        let mut out = session_json(s);
        out["added"] = json!(added);
        Ok(Json(out))
    })
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OracleRequest {
    question_seq: Option<usize>,
    question: Option<QuestionRef>,
}

async fn consult_oracle(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let req: OracleRequest = parse_body(&body)?;
    with_session(&app, &id, |s| {
        let scenario = s.game.scenario().clone();
        let question = req
            .question
            .map(|q| {
                q.resolve(&scenario.signature)
                    .map(|q| scenario.resolve_question(&q))
                    .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "question", e.to_string()))
            })
            .transpose()?;
        let m = ScriptedMove::Answer {
            seq: req.question_seq,
            question,
            answer: None,
        };
        let resolved = s.game.resolve_scripted(&m)?;
        let answer = match &resolved {
            iqgame::Move::Answer { answer: Answer::Direct(f), .. } => json!(f.canonical()),
            _ => json!("refuse"),
        };
        let added = s.game.apply(resolved)?;
        app.store.save(s)?;
        let mut out = session_json(s);
        out["added"] = json!(added);
        out["answer"] = answer;
        Ok(Json(out))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PreviewRequest {
    premises: Vec<usize>,
    witness: Option<String>,
}

async fn preview(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let req: PreviewRequest = parse_body(&body)?;
    let witness = req
        .witness
        .map(|w| iqgame::parser::parse_term(&w))
        .transpose()
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "parse", e.to_string()))?;
    with_session(&app, &id, |s| {
        let options = s.game.preview(&req.premises, witness.as_ref())?;
        Ok(Json(json!(options
            .into_iter()
            .map(|(rule, conclusions)| json!({
                "rule": rule,
                "conclusions": conclusions
                    .iter()
                    .map(|f| json!({"text": f.canonical(), "unicode": f.unicode()}))
                    .collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>())))
    })
}

#[derive(Deserialize)]
struct TableauQuery {
    format: Option<String>,
}

async fn tableau(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<TableauQuery>,
) -> ApiResult<Response> {
    let format: Format = match q.format {
        Some(f) => f.parse().map_err(ApiError::bad_request)?,
        None => Format::Json,
    };
    with_session(&app, &id, |s| {
        let body = render_tableau(s.game.state(), &s.game.scenario().inquirer, format);
        let content_type = match format {
            Format::Json => "application/json",
            Format::Markdown => "text/markdown; charset=utf-8",
            Format::Text => "text/plain; charset=utf-8",
        };
        Ok(([(header::CONTENT_TYPE, content_type)], body).into_response())
    })
}

pub async fn serve(app: Arc<AppState>, host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app)).await
}
