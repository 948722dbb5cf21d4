//! Subcommands of the `iqgame` binary.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use iqgame::erotetics::{QuestionError, QuestionSpec};
use iqgame::game::{GameError, ReplayError};
use iqgame::render::{status_line, TableauDocument};
use iqgame::rules::conclusions;
use iqgame::scenario::{read_counts, ScenarioError};
use iqgame::{
    find_scenario, parse_formula, ratio_report, render_tableau, replay, Answer, Format, Game,
    ParseError, Question, Rule, Scenario, Status, Witness,
};
use thiserror::Error;

use crate::session::{Session, SessionError, SessionRecord, SessionStore};

/// Environment variable listing extra scenario directories, separated like
/// `PATH`.
pub const SCENARIO_PATH_VAR: &str = "IQGAME_SCENARIO_PATH";

#[derive(Debug, Parser)]
#[command(name = "iqgame", version, about = "Interrogative games over first-order logic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and print its canonical form.
    Parse {
        formula: String,
        /// Print with logical symbols instead.
        #[arg(long)]
        unicode: bool,
    },
    /// Print the presupposition of a question, given as JSON or as `...?` text.
    Presup { question: String },
    /// Run a scenario's move script and print the resulting tableau.
    Replay {
        scenario: String,
        /// Stop at the first move that fails.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value = "text")]
        format: Format,
        /// List the moves and the entries they added before the tableau.
        #[arg(long)]
        report: bool,
    },
    /// Play a scenario interactively as the Inquirer.
    Play { scenario: String },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Keep sessions as JSON files in this directory.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Render a stored session file.
    Export {
        session: PathBuf,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// List the builtin scenarios.
    Scenarios,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Question(#[from] QuestionError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("`{0}` is neither question JSON nor question text")]
    BadQuestion(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Question(_) | CliError::BadQuestion(_) => "question",
            CliError::Scenario(e) => e.code(),
            CliError::Game(e) => e.code(),
            CliError::Replay(e) => e.source.code(),
            CliError::Session(e) => e.code(),
            CliError::Io(_) => "io",
        }
    }
}

pub fn scenario_path() -> Vec<PathBuf> {
    std::env::var_os(SCENARIO_PATH_VAR)
        .map(|v| std::env::split_paths(&v).collect())
        .unwrap_or_default()
}

pub fn load(name: &str) -> Result<Arc<Scenario>, CliError> {
    Ok(find_scenario(name, &scenario_path())?)
}

pub fn parse(text: &str, unicode: bool) -> Result<String, CliError> {
    let f = parse_formula(text, None)?;
    Ok(if unicode { f.unicode() } else { f.canonical() })
}

pub fn presupposition(text: &str) -> Result<String, CliError> {
    let trimmed = text.trim();
    let q = if trimmed.starts_with('{') {
        let spec: QuestionSpec =
            serde_json::from_str(trimmed).map_err(|_| CliError::BadQuestion(text.to_string()))?;
        Question::from_spec(&spec, None)?
    } else {
        Question::parse(trimmed, None)?
    };
    Ok(q.presupposition().canonical())
}

/// Ratio line for scenarios that declare count predicates.
fn ratio_line(game: &Game) -> Option<String> {
    let spec = game.scenario().ratio.as_ref()?;
    let (dominant, recessive) = read_counts(spec, &game.state().established)?;
    ratio_report(dominant, recessive)
        .ok()
        .map(|r| format!("ratio {dominant} : {recessive} = {r}"))
}

pub struct ReplayOutput {
    pub stdout: String,
    pub warnings: Vec<String>,
}

pub fn run_replay(name: &str, strict: bool, format: Format, report: bool) -> Result<ReplayOutput, CliError> {
    let scenario = load(name)?;
    let (game, rep) = replay(scenario, strict)?;
    let mut out = String::new();
    if report && format != Format::Json {
        for m in &rep.moves {
            match &m.error {
                None => out.push_str(&format!("move {}: {} -> {:?}\n", m.index, m.description, m.entries)),
                Some(e) => out.push_str(&format!("move {}: failed: {}\n", m.index, e)),
            }
        }
        out.push('\n');
    }
    out.push_str(&render_tableau(game.state(), &game.scenario().inquirer, format));
    if format != Format::Json {
        if let Some(line) = ratio_line(&game) {
            out.push_str(&line);
            out.push('\n');
        }
    } else if !out.ends_with('\n') {
        out.push('\n');
    }
    let warnings = rep
        .moves
        .iter()
        .filter_map(|m| m.error.as_ref().map(|e| format!("move {}: {}", m.index, e)))
        .collect();
    Ok(ReplayOutput { stdout: out, warnings })
}

pub fn export(path: &Path, format: Format) -> Result<String, CliError> {
    let session = Session::from_record(SessionRecord::read(path)?)?;
    let mut out = render_tableau(session.game.state(), &session.game.scenario().inquirer, format);
    if !out.ends_with('\n') {
        out.push('\n');
    }
    Ok(out)
}

/// The state document a replay ends in; used to compare interfaces.
pub fn replay_document(name: &str) -> Result<TableauDocument, CliError> {
    let (game, _) = replay(load(name)?, true)?;
    Ok(TableauDocument::new(game.state(), &game.scenario().inquirer))
}

pub fn serve(host: &str, port: u16, store: Option<PathBuf>) -> Result<(), CliError> {
    let store = match store {
        Some(dir) => SessionStore::persistent(dir)?,
        None => SessionStore::in_memory(),
    };
    let app = Arc::new(crate::http::AppState {
        store,
        scenario_path: scenario_path(),
    });
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(crate::http::serve(app, host, port))?;
    Ok(())
}

const PLAY_HELP: &str = "\
commands:
  questions            list the range of attention
  ask N                ask question N from the list
  answer [SEQ]         let the source answer the latest open question (or entry SEQ)
  deduce               draw a conclusion, prompting for rule, premises and witness
  deduce RULE P.. [W]  the same in one line, e.g. `deduce modus_ponens 9 20`
  show [FORMAT]        print the tableau (text, markdown or json)
  help                 this list
  quit                 leave the game";

/// Interactive loop. Reads commands from `input` until `quit` or end of
/// input; engine errors are reported and the loop goes on.
pub fn play(scenario: Arc<Scenario>, input: &mut impl BufRead, out: &mut impl Write) -> Result<Game, CliError> {
    let mut game = Game::new(scenario)?;
    writeln!(out, "Inquirer: {}", game.scenario().inquirer)?;
    writeln!(out, "principal question: {}", game.scenario().principal.canonical())?;
    writeln!(out, "type `help` for commands")?;
    write!(out, "{}", render_tableau(game.state(), &game.scenario().inquirer, Format::Text))?;
    let mut lines = input.lines();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        let Some(line) = lines.next() else { break };
        let line = line?;
        let words: Vec<&str> = line.split_whitespace().collect();
        let Some((&cmd, args)) = words.split_first() else { continue };
        let before = game.state().entries.len();
        let moves_before = game.history().len();
        let result = match cmd {
            "quit" | "exit" => break,
            "help" => {
                writeln!(out, "{PLAY_HELP}")?;
                Ok(())
            }
            "questions" | "q" => {
                list_questions(&game, out)?;
                Ok(())
            }
            "show" => {
                let format = args.first().map(|f| f.parse::<Format>()).unwrap_or(Ok(Format::Text));
                match format {
                    Ok(f) => {
                        writeln!(out, "{}", render_tableau(game.state(), &game.scenario().inquirer, f))?;
                        Ok(())
                    }
                    Err(e) => {
                        writeln!(out, "{e}")?;
                        Ok(())
                    }
                }
            }
            "ask" => ask_command(&mut game, args, out)?,
            "answer" => answer_command(&mut game, args),
            "deduce" => deduce_command(&mut game, args, &mut lines, out)?,
            other => {
                writeln!(out, "unknown command `{other}`; type `help`")?;
                Ok(())
            }
        };
        match result {
            Ok(()) => {
                for e in &game.state().entries[before..] {
                    let side = match e.side {
                        iqgame::game::Side::Source => "source",
                        iqgame::game::Side::Inquirer => "inquirer",
                    };
                    writeln!(out, "  [{}] {}: {}", e.seq, side, e.text())?;
                }
                if game.state().entries.len() > before {
                    if let Status::Solved { .. } = game.state().status {
                        writeln!(out, "{}", status_line(&game.state().status))?;
                    }
                }
                if let Some(seq) = refused_now(&game, moves_before) {
                    writeln!(out, "  [{seq}] refused")?;
                }
            }
            Err(e) => writeln!(out, "error[{}]: {}", e.code(), e)?,
        }
    }
    Ok(game)
}

fn refused_now(game: &Game, moves_before: usize) -> Option<usize> {
    match game.history()[moves_before..].last() {
        Some(iqgame::Move::Answer {
            question_seq,
            answer: Answer::Refusal,
        }) => Some(*question_seq),
        _ => None,
    }
}

fn list_questions(game: &Game, out: &mut impl Write) -> std::io::Result<()> {
    for (i, a) in game.available_questions().iter().enumerate() {
        let status = match &a.askability {
            iqgame::Askability::Askable => "askable".to_string(),
            iqgame::Askability::Blocked { missing } => format!("blocked until {missing}"),
        };
        let mut flags = String::new();
        if a.open {
            flags.push_str(", open");
        }
        if a.answered {
            flags.push_str(", answered");
        }
        write!(out, "  {}. {} [{status}{flags}]", i + 1, a.question.canonical())?;
        match &a.question.label {
            Some(label) => writeln!(out, "  {label}")?,
            None => writeln!(out)?,
        }
    }
    Ok(())
}

fn ask_command(game: &mut Game, args: &[&str], out: &mut impl Write) -> Result<Result<(), CliError>, CliError> {
    let n = match args.first().and_then(|a| a.parse::<usize>().ok()) {
        Some(n) if n >= 1 && n <= game.scenario().ra.len() => n,
        _ => {
            writeln!(out, "usage: ask N, with N from `questions`")?;
            return Ok(Ok(()));
        }
    };
    let q = game.scenario().ra.iter().nth(n - 1).unwrap().clone();
    Ok(game.ask(&q).map(|_| ()).map_err(CliError::from))
}

fn answer_command(game: &mut Game, args: &[&str]) -> Result<(), CliError> {
    let seq = args.first().and_then(|a| a.parse::<usize>().ok());
    let m = iqgame::scenario::ScriptedMove::Answer {
        seq,
        question: None,
        answer: None,
    };
    let resolved = game.resolve_scripted(&m)?;
    game.apply(resolved)?;
    Ok(())
}

fn prompt<B: BufRead>(
    label: &str,
    lines: &mut std::io::Lines<B>,
    out: &mut impl Write,
) -> Result<Option<String>, CliError> {
    write!(out, "{label}> ")?;
    out.flush()?;
    match lines.next() {
        Some(line) => Ok(Some(line?.trim().to_string())),
        None => Ok(None),
    }
}

fn deduce_command<B: BufRead>(
    game: &mut Game,
    args: &[&str],
    lines: &mut std::io::Lines<B>,
    out: &mut impl Write,
) -> Result<Result<(), CliError>, CliError> {
    let (rule_name, rest): (String, Vec<String>) = match args.split_first() {
        Some((r, rest)) => (r.to_string(), rest.iter().map(|s| s.to_string()).collect()),
        None => {
            writeln!(out, "rules:")?;
            for (i, r) in Rule::ALL.iter().enumerate() {
                writeln!(out, "  {}. {}", i + 1, r)?;
            }
            let Some(r) = prompt("rule", lines, out)? else { return Ok(Ok(())) };
            let Some(p) = prompt("premises (entry numbers)", lines, out)? else { return Ok(Ok(())) };
            (r, p.split_whitespace().map(str::to_string).collect())
        }
    };
    let rule = rule_name
        .parse::<usize>()
        .ok()
        .and_then(|i| i.checked_sub(1))
        .and_then(|i| Rule::ALL.get(i).copied())
        .or_else(|| Rule::from_name(&rule_name));
    let Some(rule) = rule else {
        writeln!(out, "unknown rule `{rule_name}`")?;
        return Ok(Ok(()));
    };
    if rule == Rule::TautologyIntro {
        writeln!(out, "yes-no questions enter their tautology when asked; use `ask`")?;
        return Ok(Ok(()));
    }
    let mut refs = Vec::new();
    let mut witness_text = None;
    for word in &rest {
        match word.parse::<usize>() {
            Ok(n) if refs.len() < rule.premise_count() => refs.push(n),
            _ => witness_text = Some(word.clone()),
        }
    }
    if rule.needs_witness() && witness_text.is_none() {
        let hint = match rule {
            Rule::ExistentialInstantiation => {
                format!("witness (new constant, e.g. {})", iqgame::fresh_constant(&game.state().used_constants, "c"))
            }
            Rule::EqualitySubstitution => "witness (the constant to replace)".to_string(),
            _ => "witness".to_string(),
        };
        let Some(w) = prompt(&hint, lines, out)? else { return Ok(Ok(())) };
        witness_text = Some(w);
    }
    let witness = match witness_text.map(|w| iqgame::parser::parse_term(&w)).transpose() {
        Ok(w) => w,
        Err(e) => return Ok(Err(e.into())),
    };
    let table = game.state().premise_table();
    let mut premises = Vec::new();
    for &r in &refs {
        match r.checked_sub(1).and_then(|i| table.get(i)) {
            Some(Some(f)) => premises.push(f.clone()),
            Some(None) => return Ok(Err(GameError::InvalidStep(iqgame::rules::StepError::QuestionPremise(r)).into())),
            None => return Ok(Err(GameError::InvalidStep(iqgame::rules::StepError::Dangling(r)).into())),
        }
    }
    let options = match conclusions(
        rule,
        &premises,
        witness.clone().map(Witness::Term).as_ref(),
        &game.state().used_constants,
    ) {
        Ok(o) => o,
        Err(e) => {
            return Ok(Err(GameError::InvalidStep(e.into()).into()));
        }
    };
    let conclusion = if options.len() == 1 {
        options[0].clone()
    } else {
        for (i, c) in options.iter().enumerate() {
            writeln!(out, "  {}. {}", i + 1, c)?;
        }
        let Some(choice) = prompt("conclusion", lines, out)? else { return Ok(Ok(())) };
        match choice.parse::<usize>().ok().and_then(|i| i.checked_sub(1)).and_then(|i| options.get(i)) {
            Some(c) => c.clone(),
            None => {
                writeln!(out, "no such conclusion")?;
                return Ok(Ok(()));
            }
        }
    };
    let step = iqgame::DeductionStep {
        rule,
        premise_refs: refs,
        witness,
        conclusion,
    };
    Ok(game.deduce(step).map(|_| ()).map_err(CliError::from))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    match cli.command {
        Command::Parse { formula, unicode } => println!("{}", parse(&formula, unicode)?),
        Command::Presup { question } => println!("{}", presupposition(&question)?),
        Command::Replay {
            scenario,
            strict,
            format,
            report,
        } => {
            let output = run_replay(&scenario, strict, format, report)?;
            for w in &output.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", output.stdout);
        }
        Command::Play { scenario } => {
            let scenario = load(&scenario)?;
            let stdin = std::io::stdin();
            play(scenario, &mut stdin.lock(), &mut stdout.lock())?;
        }
        Command::Serve { host, port, store } => serve(&host, port, store)?,
        Command::Export { session, format } => print!("{}", export(&session, format)?),
        Command::Scenarios => {
            for s in iqgame::builtin_scenarios() {
                println!("{}\t{}\t{}", s.name, s.inquirer, s.principal.canonical());
            }
        }
    }
    Ok(())
}
