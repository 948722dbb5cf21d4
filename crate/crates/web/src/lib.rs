//! Browser bindings for the static demo page in `www/`.
//!
//! Every export takes and returns plain strings; results are JSON documents
//! with either an `ok: true` payload or `ok: false` and an `error` message.
//! The `*_json` functions hold the logic so native tests can call them.

use iqgame::erotetics::QuestionSpec;
use iqgame::game::describe;
use iqgame::render::{status_line, DisplayRow};
use iqgame::{builtin, builtin_scenarios, display_rows, is_tautology_skeleton, parse_formula, Game, Question};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(result: Result<Value, String>) -> String {
    match result {
        Ok(mut v) => {
            v["ok"] = Value::Bool(true);
            v.to_string()
        }
        Err(error) => json!({ "ok": false, "error": error }).to_string(),
    }
}

pub fn parse_json(text: &str) -> Result<Value, String> {
    let f = parse_formula(text, None).map_err(|e| e.to_string())?;
    Ok(json!({
        "canonical": f.canonical(),
        "unicode": f.unicode(),
        "free_variables": f.free_variables(),
        "sentence": f.free_variables().is_empty(),
    }))
}

/// Accepts question text (`exists x. D(x)?`, `S | !S?`) or a JSON question spec.
pub fn presupposition_json(text: &str) -> Result<Value, String> {
    let trimmed = text.trim();
    let q = if trimmed.starts_with('{') {
        let spec: QuestionSpec = serde_json::from_str(trimmed).map_err(|e| e.to_string())?;
        Question::from_spec(&spec, None)
    } else {
        Question::parse(trimmed, None)
    }
    .map_err(|e| e.to_string())?;
    let p = q.presupposition();
    Ok(json!({
        "kind": q.kind(),
        "question": q.canonical(),
        "presupposition": p.canonical(),
        "unicode": p.unicode(),
        "tautology": is_tautology_skeleton(&p).ok(),
    }))
}

pub fn scenarios_json() -> Value {
    let list: Vec<Value> = builtin_scenarios()
        .iter()
        .map(|s| json!({ "name": s.name, "inquirer": s.inquirer, "moves": s.moves.as_ref().map_or(0, Vec::len) }))
        .collect();
    json!({ "scenarios": list })
}

fn snapshot(game: &Game, description: String, rows: Vec<DisplayRow>) -> Value {
    json!({
        "move": description,
        "entries": game.state().entries.len(),
        "status": status_line(&game.state().status),
        "rows": rows,
    })
}

/// Replays a built-in scenario and returns the display rows after each
/// move, starting with the opening position.
pub fn replay_steps_json(name: &str) -> Result<Value, String> {
    let scenario = builtin(name).ok_or_else(|| format!("no built-in scenario named `{name}`"))?;
    let script = scenario.moves.clone().unwrap_or_default();
    let mut game = Game::new(scenario.clone()).map_err(|e| e.to_string())?;
    let mut steps = vec![snapshot(&game, "opening position".into(), display_rows(game.state()))];
    for (i, scripted) in script.iter().enumerate() {
        let m = game
            .resolve_scripted(scripted)
            .map_err(|e| format!("move {}: {e}", i + 1))?;
        let description = describe(&m);
        let added = game.apply(m).map_err(|e| format!("move {}: {e}", i + 1))?;
        let description = format!("{}. {description} (+{} entries)", i + 1, added.len());
        steps.push(snapshot(&game, description, display_rows(game.state())));
    }
    Ok(json!({ "scenario": scenario.name, "inquirer": scenario.inquirer, "steps": steps }))
}

#[wasm_bindgen]
pub fn parse(text: &str) -> String {
    respond(parse_json(text))
}

#[wasm_bindgen]
pub fn presupposition(question: &str) -> String {
    respond(presupposition_json(question))
}

#[wasm_bindgen]
pub fn scenarios() -> String {
    respond(Ok(scenarios_json()))
}

#[wasm_bindgen]
pub fn replay_steps(name: &str) -> String {
    respond(replay_steps_json(name))
}
