//! The two-column interrogative tableau.
//!
//! Sentences established so far sit on the source-of-information side,
//! questions on the Inquirer side. Entries are append-only and carry a dense
//! internal sequence number; the odd/even numbering of the printed tableau
//! is computed when rendering.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::erotetics::{
    askable, compound_witnesses, is_direct_answer, Answer, Askability, Question, QuestionKind,
    QuestionForm,
};
use crate::logic::{match_instance, Formula, Term};
use crate::rules::{conclusions, verify_step, DeductionStep, Rule, StepError, Witness};
use crate::scenario::{PremiseRef, Scenario, ScriptedMove};

pub const TABLEAU_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Source,
    Inquirer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Content {
    Sentence(Formula),
    Question(Question),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Justification {
    InitialPremise,
    PresuppositionOf { seq: usize },
    AnswerTo { seq: usize },
    Deduced { step: DeductionStep },
    AskedFromRa,
    TautologyPremise,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauEntry {
    pub seq: usize,
    pub side: Side,
    pub content: Content,
    pub justification: Justification,
}

impl TableauEntry {
    pub fn sentence(&self) -> Option<&Formula> {
        match &self.content {
            Content::Sentence(f) => Some(f),
            Content::Question(_) => None,
        }
    }

    pub fn question(&self) -> Option<&Question> {
        match &self.content {
            Content::Question(q) => Some(q),
            Content::Sentence(_) => None,
        }
    }

    pub fn text(&self) -> String {
        match &self.content {
            Content::Sentence(f) => f.canonical(),
            Content::Question(q) => q.canonical(),
        }
    }

    pub fn unicode(&self) -> String {
        match &self.content {
            Content::Sentence(f) => f.unicode(),
            Content::Question(q) => q.unicode(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Solved {
        answer: Formula,
        /// Absent for yes-no principal questions.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<Term>,
    },
}

/// The score of a game. Serializes to the documented JSON state schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub tableau_version: u32,
    pub scenario: String,
    pub status: Status,
    pub entries: Vec<TableauEntry>,
    pub established: BTreeSet<Formula>,
    pub used_constants: BTreeSet<String>,
    pub open_questions: BTreeSet<usize>,
    pub refused: BTreeSet<usize>,
}

impl GameState {
    fn empty(scenario: &str) -> Self {
        GameState {
            tableau_version: TABLEAU_VERSION,
            scenario: scenario.to_string(),
            status: Status::InProgress,
            entries: Vec::new(),
            established: BTreeSet::new(),
            used_constants: BTreeSet::new(),
            open_questions: BTreeSet::new(),
            refused: BTreeSet::new(),
        }
    }

    pub fn entry(&self, seq: usize) -> Option<&TableauEntry> {
        seq.checked_sub(1).and_then(|i| self.entries.get(i))
    }

    /// Sentence of each entry by position; `None` marks a question.
    pub fn premise_table(&self) -> Vec<Option<Formula>> {
        self.entries.iter().map(|e| e.sentence().cloned()).collect()
    }

    /// Lowest-numbered source entry holding `f`.
    pub fn find_sentence(&self, f: &Formula) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.sentence() == Some(f))
            .map(|e| e.seq)
    }

    pub fn is_solved(&self) -> bool {
        matches!(self.status, Status::Solved { .. })
    }

    fn push(&mut self, side: Side, content: Content, justification: Justification) -> usize {
        let seq = self.entries.len() + 1;
        match &content {
            Content::Sentence(f) => {
                self.used_constants.extend(f.constants());
                self.established.insert(f.clone());
            }
            Content::Question(q) => {
                self.used_constants.extend(q.constants());
                self.open_questions.insert(seq);
            }
        }
        self.entries.push(TableauEntry {
            seq,
            side,
            content,
            justification,
        });
        seq
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Move {
    Ask { question: Question },
    Answer { question_seq: usize, answer: Answer },
    Deduce(DeductionStep),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("principal question cannot be asked: presupposition `{0}` is not among the premises")]
    PrincipalNotAskable(Formula),
    #[error("`{0}` is not in the range of attention")]
    NotInRange(String),
    #[error("`{question}` is blocked: its presupposition `{missing}` is not established")]
    Blocked { question: String, missing: Formula },
    #[error("entry {0} is not an open question")]
    NotOpen(usize),
    #[error("`{answer}` is not a direct answer to `{question}`")]
    NotADirectAnswer { question: String, answer: Formula },
    #[error("compound answer uses `{0}`, which already occurs in the tableau")]
    StaleCompoundWitness(String),
    #[error("invalid deduction: {0}")]
    InvalidStep(StepError),
    #[error("tautology `{0}` does not come from a yes-no question in the range of attention")]
    TautologyOutsideRange(Formula),
    #[error("no open question to answer")]
    NoOpenQuestion,
    #[error("no established sentence `{0}` to use as a premise")]
    UnknownPremise(Formula),
    #[error("scripted answer `{scripted}` differs from the oracle's `{oracle}`")]
    OracleMismatch { scripted: String, oracle: String },
    #[error("scenario has no move script")]
    NoScript,
}

impl GameError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            GameError::PrincipalNotAskable(_) => "principal_not_askable",
            GameError::NotInRange(_) => "not_in_range",
            GameError::Blocked { .. } => "blocked",
            GameError::NotOpen(_) => "not_open",
            GameError::NotADirectAnswer { .. } => "not_a_direct_answer",
            GameError::StaleCompoundWitness(_) => "stale_witness",
            GameError::InvalidStep(_) => "invalid_step",
            GameError::TautologyOutsideRange(_) => "tautology_outside_range",
            GameError::NoOpenQuestion => "no_open_question",
            GameError::UnknownPremise(_) => "unknown_premise",
            GameError::OracleMismatch { .. } => "oracle_mismatch",
            GameError::NoScript => "no_script",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AvailableQuestion {
    pub question: Question,
    pub askability: Askability,
    pub answered: bool,
    pub open: bool,
}

/// A game in progress: the scenario, its tableau and the moves applied.
#[derive(Debug, Clone)]
pub struct Game {
    scenario: Arc<Scenario>,
    state: GameState,
    history: Vec<Move>,
}

impl Game {
    /// Seeds the source column with the initial premises and asks the
    /// principal question.
    pub fn new(scenario: Arc<Scenario>) -> Result<Game, GameError> {
        let mut state = GameState::empty(&scenario.name);
        for p in &scenario.premises {
            state.push(Side::Source, Content::Sentence(p.clone()), Justification::InitialPremise);
        }
        let principal = scenario.principal.clone();
        if let Askability::Blocked { missing } = askable(&principal, &state.established) {
            return Err(GameError::PrincipalNotAskable(missing));
        }
        let mut game = Game {
            scenario,
            state,
            history: Vec::new(),
        };
        game.push_question(principal);
        game.refresh_status();
        Ok(game)
    }

    /// Rebuilds a game by replaying `moves` from the start.
    pub fn resume(scenario: Arc<Scenario>, moves: &[Move]) -> Result<Game, GameError> {
        let mut game = Game::new(scenario)?;
        for m in moves {
            game.apply(m.clone())?;
        }
        Ok(game)
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn history(&self) -> &[Move] {
        &self.history
    }

    pub fn apply(&mut self, m: Move) -> Result<Vec<usize>, GameError> {
        match m {
            Move::Ask { question } => self.ask(&question),
            Move::Answer {
                question_seq,
                answer,
            } => self.record_answer(question_seq, answer),
            Move::Deduce(step) => self.deduce(step),
        }
    }

    /// Every range-of-attention question with its askability now.
    pub fn available_questions(&self) -> Vec<AvailableQuestion> {
        self.scenario
            .ra
            .iter()
            .map(|q| {
                let asked: Vec<&TableauEntry> = self
                    .state
                    .entries
                    .iter()
                    .filter(|e| e.question() == Some(q))
                    .collect();
                AvailableQuestion {
                    question: q.clone(),
                    askability: askable(q, &self.state.established),
                    answered: asked.iter().any(|e| self.answer_of(e.seq).is_some()),
                    open: asked.iter().any(|e| self.state.open_questions.contains(&e.seq)),
                }
            })
            .collect()
    }

    fn answer_of(&self, question_seq: usize) -> Option<&TableauEntry> {
        self.state.entries.iter().find(|e| {
            matches!(e.justification, Justification::AnswerTo { seq } if seq == question_seq)
        })
    }

    fn push_question(&mut self, q: Question) -> Vec<usize> {
        let mut added = Vec::new();
        let presupposition = q.presupposition();
        if q.kind() == QuestionKind::YesNo && !self.state.established.contains(&presupposition) {
            added.push(self.state.push(
                Side::Source,
                Content::Sentence(presupposition),
                Justification::TautologyPremise,
            ));
        }
        added.push(
            self.state
                .push(Side::Inquirer, Content::Question(q), Justification::AskedFromRa),
        );
        added
    }

    /// Asks a range-of-attention question. A yes-no question first enters
    /// its tautological presupposition unless it is already established.
    pub fn ask(&mut self, q: &Question) -> Result<Vec<usize>, GameError> {
        let q = self
            .scenario
            .ra
            .find(q)
            .cloned()
            .ok_or_else(|| GameError::NotInRange(q.canonical()))?;
        if let Askability::Blocked { missing } = askable(&q, &self.state.established) {
            return Err(GameError::Blocked {
                question: q.canonical(),
                missing,
            });
        }
        self.history.push(Move::Ask {
            question: q.clone(),
        });
        let added = self.push_question(q);
        self.refresh_status();
        Ok(added)
    }

    /// Checks that `answer` may close the open question at `question_seq`.
    pub fn check_answer(&self, question_seq: usize, answer: &Answer) -> Result<(), GameError> {
        if !self.state.open_questions.contains(&question_seq) {
            return Err(GameError::NotOpen(question_seq));
        }
        let q = self
            .state
            .entry(question_seq)
            .and_then(TableauEntry::question)
            .ok_or(GameError::NotOpen(question_seq))?;
        let Answer::Direct(f) = answer else {
            return Ok(());
        };
        if is_direct_answer(q, f) {
            return Ok(());
        }
        match compound_witnesses(q, f) {
            Some(witnesses) => {
                // A compound answer introduces its individuals; numerals are
                // names of numbers and may recur.
                match witnesses
                    .values()
                    .find(|t| !t.is_numeral() && self.state.used_constants.contains(t.name()))
                {
                    Some(stale) => Err(GameError::StaleCompoundWitness(stale.name().to_string())),
                    None => Ok(()),
                }
            }
            None => Err(GameError::NotADirectAnswer {
                question: q.canonical(),
                answer: f.clone(),
            }),
        }
    }

    /// Closes an open question. A direct answer enters the source column;
    /// a refusal leaves the question visible but closed.
    pub fn record_answer(&mut self, question_seq: usize, answer: Answer) -> Result<Vec<usize>, GameError> {
        self.check_answer(question_seq, &answer)?;
        self.history.push(Move::Answer {
            question_seq,
            answer: answer.clone(),
        });
        self.state.open_questions.remove(&question_seq);
        let added = match answer {
            Answer::Direct(f) => vec![self.state.push(
                Side::Source,
                Content::Sentence(f),
                Justification::AnswerTo { seq: question_seq },
            )],
            Answer::Refusal => {
                self.state.refused.insert(question_seq);
                Vec::new()
            }
        };
        self.refresh_status();
        Ok(added)
    }

    /// Checks a deduction against the current entries, including the game
    /// rules the kernel does not know about.
    pub fn check_step(&self, step: &DeductionStep) -> Result<(), GameError> {
        verify_step(&self.state.premise_table(), step, &self.state.used_constants)
            .map_err(GameError::InvalidStep)?;
        if step.rule == Rule::TautologyIntro {
            let from_ra = self.scenario.ra.iter().any(|q| match &q.form {
                QuestionForm::YesNo { body } => q.presupposition() == step.conclusion && body.is_sentence(),
                QuestionForm::Wh { .. } => false,
            });
            if !from_ra {
                return Err(GameError::TautologyOutsideRange(step.conclusion.clone()));
            }
        }
        Ok(())
    }

    pub fn deduce(&mut self, step: DeductionStep) -> Result<Vec<usize>, GameError> {
        self.check_step(&step)?;
        self.history.push(Move::Deduce(step.clone()));
        let seq = self.state.push(
            Side::Source,
            Content::Sentence(step.conclusion.clone()),
            Justification::Deduced { step },
        );
        self.refresh_status();
        Ok(vec![seq])
    }

    /// Conclusions each rule would license from the given entries, without
    /// changing the game. Rules that do not apply are left out.
    pub fn preview(&self, premise_refs: &[usize], witness: Option<&Term>) -> Result<Vec<(Rule, Vec<Formula>)>, GameError> {
        let table = self.state.premise_table();
        let mut premises = Vec::new();
        for &seq in premise_refs {
            match seq.checked_sub(1).and_then(|i| table.get(i)) {
                None => return Err(GameError::InvalidStep(StepError::Dangling(seq))),
                Some(None) => return Err(GameError::InvalidStep(StepError::QuestionPremise(seq))),
                Some(Some(f)) => premises.push(f.clone()),
            }
        }
        let witness = witness.cloned().map(Witness::Term);
        Ok(Rule::ALL
            .into_iter()
            .filter(|r| *r != Rule::TautologyIntro)
            .filter_map(|r| {
                conclusions(r, &premises, witness.as_ref(), &self.state.used_constants)
                    .ok()
                    .map(|cs| (r, cs))
            })
            .collect())
    }

    /// The conclusive answer, if one is established: the lowest-numbered
    /// source sentence that answers the principal question with an
    /// answer-eligible witness.
    pub fn check_solved(&self) -> Option<(Formula, Option<Term>)> {
        let principal = &self.scenario.principal;
        self.state.entries.iter().filter_map(TableauEntry::sentence).find_map(|f| {
            match &principal.form {
                QuestionForm::YesNo { .. } => {
                    is_direct_answer(principal, f).then(|| (f.clone(), None))
                }
                QuestionForm::Wh { var, matrix } => match match_instance(matrix, var, f) {
                    Some(Term::Const(c)) if self.scenario.answer_eligible.contains(&c) => {
                        Some((f.clone(), Some(Term::Const(c))))
                    }
                    _ => None,
                },
            }
        })
    }

    fn refresh_status(&mut self) {
        if self.state.is_solved() {
            return;
        }
        if let Some((answer, witness)) = self.check_solved() {
            self.state.status = Status::Solved { answer, witness };
        }
    }

    /// Turns a scripted move into an engine move against the current state.
    pub fn resolve_scripted(&self, m: &ScriptedMove) -> Result<Move, GameError> {
        match m {
            ScriptedMove::Ask(q) => Ok(Move::Ask { question: q.clone() }),
            ScriptedMove::Answer {
                seq,
                question,
                answer,
            } => {
                let open = &self.state.open_questions;
                let target = match (seq, question) {
                    (Some(seq), _) => *seq,
                    (None, Some(q)) => *open
                        .iter()
                        .rev()
                        .find(|s| self.state.entry(**s).and_then(TableauEntry::question) == Some(q))
                        .ok_or(GameError::NoOpenQuestion)?,
                    (None, None) => *open
                        .iter()
                        .rev()
                        .find(|s| **s != self.principal_seq())
                        .or_else(|| open.iter().next_back())
                        .ok_or(GameError::NoOpenQuestion)?,
                };
                let q = self
                    .state
                    .entry(target)
                    .and_then(TableauEntry::question)
                    .ok_or(GameError::NotOpen(target))?;
                let oracle = self.scenario.oracle.answer(q);
                let answer = match answer {
                    Some(a) if *a != oracle => {
                        return Err(GameError::OracleMismatch {
                            scripted: answer_label(a),
                            oracle: answer_label(&oracle),
                        })
                    }
                    Some(a) => a.clone(),
                    None => oracle,
                };
                Ok(Move::Answer {
                    question_seq: target,
                    answer,
                })
            }
            ScriptedMove::Deduce {
                rule,
                premises,
                witness,
                conclusion,
            } => {
                let premise_refs = premises
                    .iter()
                    .map(|p| match p {
                        PremiseRef::Seq(n) => Ok(*n),
                        PremiseRef::Sentence(f) => self
                            .state
                            .find_sentence(f)
                            .ok_or_else(|| GameError::UnknownPremise(f.clone())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Move::Deduce(DeductionStep {
                    rule: *rule,
                    premise_refs,
                    witness: witness.clone(),
                    conclusion: conclusion.clone(),
                }))
            }
        }
    }

    /// Sequence number of the principal question's entry.
    pub fn principal_seq(&self) -> usize {
        self.scenario.premises.len()
            + if self.scenario.principal.kind() == QuestionKind::YesNo
                && !self.scenario.premises.contains(&self.scenario.principal.presupposition())
            {
                2
            } else {
                1
            }
    }
}

fn answer_label(a: &Answer) -> String {
    match a {
        Answer::Direct(f) => f.canonical(),
        Answer::Refusal => "refuse".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveReport {
    pub index: usize,
    pub description: String,
    /// Sequence numbers of the entries the move added.
    pub entries: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub moves: Vec<MoveReport>,
    pub status: Status,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("move {index}: {source}")]
pub struct ReplayError {
    /// 1-based position in the script; 0 when the game could not start.
    pub index: usize,
    pub source: GameError,
}

/// One-line summary of a move, as shown in replay reports.
pub fn describe(m: &Move) -> String {
    match m {
        Move::Ask { question } => format!("ask {}", question.canonical()),
        Move::Answer {
            question_seq,
            answer,
        } => format!("answer {question_seq}: {}", answer_label(answer)),
        Move::Deduce(step) => format!(
            "deduce {} from {:?}: {}",
            step.rule, step.premise_refs, step.conclusion
        ),
    }
}

/// Runs the scenario's move script. Strict mode stops at the first failing
/// move; lenient mode records the failure and continues.
pub fn replay(scenario: Arc<Scenario>, strict: bool) -> Result<(Game, Report), ReplayError> {
    let script = scenario
        .moves
        .clone()
        .ok_or(ReplayError {
            index: 0,
            source: GameError::NoScript,
        })?;
    let mut game = Game::new(scenario).map_err(|source| ReplayError { index: 0, source })?;
    let mut moves = Vec::with_capacity(script.len());
    let mut errors = 0;
    for (i, scripted) in script.iter().enumerate() {
        let index = i + 1;
        let outcome = game
            .resolve_scripted(scripted)
            .and_then(|m| {
                let description = describe(&m);
                game.apply(m).map(|added| (description, added))
            });
        match outcome {
            Ok((description, entries)) => moves.push(MoveReport {
                index,
                description,
                entries,
                error: None,
            }),
            Err(source) if strict => return Err(ReplayError { index, source }),
            Err(e) => {
                errors += 1;
                moves.push(MoveReport {
                    index,
                    description: format!("{scripted:?}"),
                    entries: Vec::new(),
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let report = Report {
        scenario: game.scenario.name.clone(),
        moves,
        status: game.state.status.clone(),
        errors,
    };
    Ok((game, report))
}
