use std::path::PathBuf;

use assert_cmd::Command;

fn iqgame() -> Command {
    let mut cmd = Command::cargo_bin("iqgame").unwrap();
    cmd.env_remove("IQGAME_SCENARIO_PATH");
    cmd
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn stdout(cmd: &mut Command) -> String {
    let out = cmd.assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

#[test]
fn parse_prints_canonical_form() {
    let out = stdout(iqgame().args(["parse", "exists x.D(x)|!exists x.D(x)"]));
    assert_eq!(out, "exists x. D(x) | !exists x. D(x)\n");
    let out = stdout(iqgame().args(["parse", "--unicode", "D1(a) & N(5,474, a)"]));
    assert_eq!(out, "D1(a) ∧ N(5474, a)\n");
}

#[test]
fn parse_error_exits_one() {
    let assert = iqgame().args(["parse", "exists x D(x)"]).assert().code(1);
    let err = String::from_utf8(assert.get_output().stderr.clone()).unwrap();
    assert!(err.starts_with("error[parse]:"), "{err}");
}

#[test]
fn usage_error_exits_two() {
    iqgame().arg("parse").assert().code(2);
    iqgame().arg("frobnicate").assert().code(2);
    iqgame().args(["replay", "holmes", "--format", "html"]).assert().code(2);
}

#[test]
fn presupposition_from_json_and_text() {
    let out = stdout(iqgame().args(["presup", r#"{"kind":"wh","var":"x","formula":"x = t"}"#]));
    assert_eq!(out, "exists x. x = t\n");
    let out = stdout(iqgame().args(["presup", r#"{"kind":"yesno","formula":"exists x. D(x)"}"#]));
    assert_eq!(out, "exists x. D(x) | !exists x. D(x)\n");
    let out = stdout(iqgame().args(["presup", "B(d, t) | !B(d, t)?"]));
    assert_eq!(out, "B(d, t) | !B(d, t)\n");
    iqgame().args(["presup", "{not json"]).assert().code(1);
}

#[test]
fn replay_holmes_text() {
    let out = stdout(iqgame().args(["replay", "holmes", "--strict"]));
    assert!(out.contains("|  # | SOURCE OF INFORMATION "), "{out}");
    assert!(out.contains("INQUIRER: HOLMES"));
    assert!(out.contains("|  7 | D(d) "));
    assert!(out.contains("| 31 | t = o "));
    assert!(out.ends_with("status: solved: t = o (witness o)\n"));
}

#[test]
fn replay_report_lists_moves() {
    let out = stdout(iqgame().args(["replay", "holmes", "--report", "--format", "markdown"]));
    assert!(out.starts_with("move 1: ask exists x. D(x) | !exists x. D(x)? -> [3, 4]\n"), "{out}");
    assert!(out.contains("| 3 | ∃x D(x) ∨ ¬∃x D(x) |"));
}

#[test]
fn replay_mendel_prints_ratio() {
    let out = stdout(iqgame().args(["replay", "mendel", "--strict"]));
    assert!(out.contains("D1(a) & N(5474, a)"));
    assert!(out.contains("R1(b) & N(1850, b)"));
    assert!(out.ends_with("ratio 5474 : 1850 = 2.96 : 1\n"), "{out}");
}

#[test]
fn replay_json_parses() {
    let out = stdout(iqgame().args(["replay", "holmes", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tableau_version"], 1);
    assert_eq!(v["status"]["witness"], "o");
}

#[test]
fn strict_replay_rejects_out_of_order_question() {
    let path = fixtures().join("holmes-broken.json");
    let assert = iqgame()
        .args(["replay", "--strict"])
        .arg(&path)
        .assert()
        .code(1);
    let err = String::from_utf8(assert.get_output().stderr.clone()).unwrap();
    assert!(err.starts_with("error[blocked]: move 1:"), "{err}");
    assert!(err.contains("`exists x. D(x)`"));

    let assert = iqgame().arg("replay").arg(&path).assert().success();
    let err = String::from_utf8(assert.get_output().stderr.clone()).unwrap();
    assert!(err.starts_with("warning: move 1:"), "{err}");
}

#[test]
fn scenario_search_path() {
    iqgame().args(["replay", "holmes-wh"]).assert().code(1);
    let out = stdout(
        iqgame()
            .env("IQGAME_SCENARIO_PATH", fixtures())
            .args(["replay", "holmes-wh", "--strict"]),
    );
    assert!(out.contains("status: solved: t = o"));
}

#[test]
fn missing_scenario() {
    let assert = iqgame().args(["replay", "watson"]).assert().code(1);
    let err = String::from_utf8(assert.get_output().stderr.clone()).unwrap();
    assert!(err.starts_with("error[not_found]:"), "{err}");
}

const HOLMES_SESSION: &str = "\
questions
ask 1
answer
deduce existential_instantiation 5 d
ask 2
answer
ask 3
answer
deduce existential_instantiation 12 c
ask 4
answer
deduce universal_instantiation 13 o
deduce modus_ponens 16 17
deduce equality_substitution 18 13 c
deduce 2 19 t
deduce
3
9 20
quit
";

#[test]
fn play_holmes_to_the_end() {
    let out = stdout(iqgame().args(["play", "holmes"]).write_stdin(HOLMES_SESSION));
    assert!(!out.contains("error["), "{out}");
    assert!(out.contains("  [6] source: D(d)\n"), "{out}");
    assert!(out.contains("  [21] source: t = o\nstatus: solved: t = o (witness o)\n"), "{out}");
}

#[test]
fn play_reports_errors_and_continues() {
    let script = "ask 9\nanswer\ndeduce modus_ponens 1 2\nask 1\nfly\nshow markdown\n";
    let out = stdout(iqgame().args(["play", "mendel"]).write_stdin(script));
    assert!(out.contains("usage: ask N"));
    // With no other open question the source answers the principal one and
    // refuses.
    assert!(out.contains("  [6] refused"), "{out}");
    assert!(out.contains("error[invalid_step]"));
    assert!(out.contains("unknown command `fly`"));
    assert!(out.contains("| # | SOURCE OF INFORMATION | INQUIRER: MENDEL | # |"));
}

#[test]
fn play_lists_blocked_questions() {
    let out = stdout(iqgame().args(["play", "mendel"]).write_stdin("questions\n"));
    assert!(out.contains(
        "exists x. exists y. (D1(x) & N(y, x))? [blocked until exists x. exists y. (D1(x) & N(y, x))]"
    ), "{out}");
}

#[test]
fn export_session_file() {
    use iqgame_cli::session::SessionStore;

    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::persistent(dir.path()).unwrap();
    let shared = store.create(iqgame::builtin("holmes").unwrap()).unwrap();
    let id = {
        let mut s = shared.lock().unwrap();
        let q = s.game.scenario().ra.iter().next().unwrap().clone();
        s.game.ask(&q).unwrap();
        store.save(&s).unwrap();
        s.id.clone()
    };
    let path = dir.path().join(format!("{id}.json"));
    let out = stdout(iqgame().arg("export").arg(&path));
    assert!(out.contains("| 3 | exists x. D(x) | !exists x. D(x) |"), "{out}");
    let out = stdout(iqgame().arg("export").arg(&path).args(["--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);

    std::fs::write(&path, "{}").unwrap();
    let assert = iqgame().arg("export").arg(&path).assert().code(1);
    let err = String::from_utf8(assert.get_output().stderr.clone()).unwrap();
    assert!(err.starts_with("error[schema]:"), "{err}");
}

#[test]
fn lists_builtin_scenarios() {
    let out = stdout(iqgame().arg("scenarios"));
    assert!(out.contains("holmes\tHolmes\texists x. x = t?"));
    assert!(out.contains("mendel\tMendel\t"));
}
