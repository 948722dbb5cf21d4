use iqgame::{builtin, display_rows, replay};
use iqgame_web::{parse, presupposition, replay_steps, scenarios};
use serde_json::Value;

fn call(out: String) -> Value {
    serde_json::from_str(&out).expect("exports return JSON")
}

#[test]
fn parse_reports_both_notations() {
    let v = call(parse("exists z. forall y. (!B(d, y) -> y = z)"));
    assert_eq!(v["ok"], true);
    assert_eq!(v["unicode"], "∃z ∀y (¬B(d, y) → y = z)");
    assert_eq!(v["sentence"], true);

    let v = call(parse("B(x, t) &"));
    assert_eq!(v["ok"], false);
    assert!(!v["error"].as_str().unwrap().is_empty());
}

#[test]
fn presupposition_of_both_question_kinds() {
    let v = call(presupposition("B(d, t) | !B(d, t)?"));
    assert_eq!(v["ok"], true);
    assert_eq!(v["kind"], "yesno");
    assert_eq!(v["presupposition"], "B(d, t) | !B(d, t)");
    assert_eq!(v["tautology"], true);
    let v = call(presupposition(r#"{"kind": "yesno", "formula": "B(d, t)"}"#));
    assert_eq!(v["presupposition"], "B(d, t) | !B(d, t)");

    // Question text is the presupposition followed by `?`.
    let v = call(presupposition("exists x. D(x)?"));
    assert_eq!(v["kind"], "wh");
    assert_eq!(v["presupposition"], "exists x. D(x)");

    let v = call(presupposition(r#"{"kind": "wh", "var": "x", "formula": "x = t"}"#));
    assert_eq!(v["kind"], "wh");
    assert_eq!(v["presupposition"], "exists x. x = t");
    assert_eq!(v["tautology"], false);

    assert_eq!(call(presupposition("{not json"))["ok"], false);
}

#[test]
fn scenario_list_names_the_builtins() {
    let v = call(scenarios());
    let names: Vec<&str> = v["scenarios"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["holmes", "mendel"]);
}

#[test]
fn replay_steps_end_where_a_full_replay_ends() {
    for name in ["holmes", "mendel"] {
        let v = call(replay_steps(name));
        assert_eq!(v["ok"], true, "{v}");
        let steps = v["steps"].as_array().unwrap();
        let (game, report) = replay(builtin(name).unwrap(), true).unwrap();
        assert_eq!(steps.len(), report.moves.len() + 1);

        let expected = serde_json::to_value(display_rows(game.state())).unwrap();
        assert_eq!(steps.last().unwrap()["rows"], expected);

        let counts: Vec<u64> = steps.iter().map(|s| s["entries"].as_u64().unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }
    let holmes = call(replay_steps("holmes"));
    let last = holmes["steps"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["status"], "status: solved: t = o (witness o)");
}

#[test]
fn unknown_scenario_is_an_error() {
    let v = call(replay_steps("watson"));
    assert_eq!(v["ok"], false);
}
