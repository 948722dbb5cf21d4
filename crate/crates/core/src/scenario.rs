//! Scenario files, scripted oracles and the builtin games.
//!
//! A scenario declares the vocabulary, the initial premises, the principal
//! question, the range of attention and a scripted source of information.
//! It may also carry a move script for replay.
//!
//! File format (UTF-8 JSON, `"scenario_version": 1`):
//!
//! ```json
//! {
//!   "scenario_version": 1,
//!   "name": "holmes",
//!   "inquirer": "Holmes",
//!   "signature": {"predicates": {"D": 1, "B": 2}, "constants": ["t", "o", "d", "c"]},
//!   "answer_eligible": ["o"],
//!   "premises": ["exists x. x = t"],
//!   "principal": {"kind": "wh", "var": "x", "formula": "x = t", "label": "Who is the thief?"},
//!   "ra": [{"kind": "yesno", "formula": "exists x. D(x)"}],
//!   "oracle": [{"question": "exists x. D(x) | !exists x. D(x)?", "answer": "exists x. D(x)"}],
//!   "moves": [
//!     {"type": "ask", "question": "exists x. D(x) | !exists x. D(x)?"},
//!     {"type": "answer"},
//!     {"type": "deduce", "rule": "existential_instantiation",
//!      "premises": ["exists x. D(x)"], "witness": "d", "conclusion": "D(d)"}
//!   ],
//!   "notes": "free text"
//! }
//! ```
//!
//! Questions are written either as objects (`kind`, `var`, `formula`,
//! `label`, `compound`) or in the text syntax (`A | !A?`, `exists x. S?`).
//! An oracle answer of `"refuse"` scripts a refusal. Deduction premises are
//! entry sequence numbers or the text of an established sentence.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::erotetics::{
    compound_witnesses, is_direct_answer, Answer, DuplicateQuestion, Question, QuestionError,
    QuestionSpec, RangeOfAttention,
};
use crate::logic::{is_numeral, Formula, Signature, SignatureError, Term};
use crate::parser::{parse_formula, parse_term, ParseError};
use crate::rules::Rule;

pub const SCENARIO_VERSION: u32 = 1;
pub const REFUSE: &str = "refuse";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unsupported scenario_version {0}")]
    Version(u32),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("in {context}: {source}")]
    Parse { context: String, source: ParseError },
    #[error("in {context}: {source}")]
    Question {
        context: String,
        source: QuestionError,
    },
    #[error("{context}: `{formula}` is not a sentence")]
    NotASentence { context: String, formula: Formula },
    #[error("{context}: constant `{name}` is not declared")]
    UndeclaredConstant { context: String, name: String },
    #[error("answer-eligible `{0}` is not a declared constant")]
    UndeclaredEligible(String),
    #[error(transparent)]
    Duplicate(#[from] DuplicateQuestion),
    #[error("oracle entry for `{0}` is neither in the range of attention nor the principal question")]
    OracleOutsideRange(String),
    #[error("oracle answer `{answer}` does not answer `{question}`")]
    OracleNotAnAnswer { question: String, answer: Formula },
    #[error("move {index}: `{question}` is not in the range of attention")]
    AskOutsideRange { index: usize, question: String },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("no scenario named `{0}` among the builtins or the search path")]
    NotFound(String),
}

impl ScenarioError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ScenarioError::Io { .. } => "io",
            ScenarioError::Schema(_) => "schema",
            ScenarioError::Version(_) => "version",
            ScenarioError::Signature(_) => "signature",
            ScenarioError::Parse { .. } => "parse",
            ScenarioError::Question { .. } => "question",
            ScenarioError::NotASentence { .. } => "not_a_sentence",
            ScenarioError::UndeclaredConstant { .. } => "undeclared_constant",
            ScenarioError::UndeclaredEligible(_) => "undeclared_eligible",
            ScenarioError::Duplicate(_) => "duplicate_question",
            ScenarioError::OracleOutsideRange(_) => "oracle_outside_range",
            ScenarioError::OracleNotAnAnswer { .. } => "oracle_not_an_answer",
            ScenarioError::AskOutsideRange { .. } => "not_in_range",
            ScenarioError::UnknownRule(_) => "unknown_rule",
            ScenarioError::NotFound(_) => "not_found",
        }
    }

    fn parse(context: impl Into<String>) -> impl FnOnce(ParseError) -> ScenarioError {
        let context = context.into();
        move |source| ScenarioError::Parse { context, source }
    }

    fn question(context: impl Into<String>) -> impl FnOnce(QuestionError) -> ScenarioError {
        let context = context.into();
        move |source| ScenarioError::Question { context, source }
    }
}

/// The scripted source of information. Unscripted questions are refused.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Oracle {
    script: BTreeMap<String, (Question, Answer)>,
}

impl Oracle {
    pub fn new(entries: impl IntoIterator<Item = (Question, Answer)>) -> Self {
        Oracle {
            script: entries.into_iter().map(|(q, a)| (q.key(), (q, a))).collect(),
        }
    }

    pub fn answer(&self, q: &Question) -> Answer {
        self.script
            .get(&q.key())
            .map_or(Answer::Refusal, |(_, a)| a.clone())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Question, &Answer)> {
        self.script.values().map(|(q, a)| (q, a))
    }
}

pub fn oracle_answer(oracle: &Oracle, q: &Question) -> Answer {
    oracle.answer(q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PremiseRef {
    Seq(usize),
    Sentence(Formula),
}

/// A move as written in a scenario script; resolved against the game state
/// at replay time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptedMove {
    Ask(Question),
    /// Records an answer to an open question: the one at `seq`, else the
    /// latest open entry asking `question`, else the latest open question.
    /// Without an explicit answer the oracle is consulted.
    Answer {
        seq: Option<usize>,
        question: Option<Question>,
        answer: Option<Answer>,
    },
    Deduce {
        rule: Rule,
        premises: Vec<PremiseRef>,
        witness: Option<Term>,
        conclusion: Formula,
    },
}

/// Predicates from which the dominant:recessive count ratio is read off a
/// finished game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioSpec {
    pub dominant: String,
    pub recessive: String,
    pub count: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub inquirer: String,
    pub signature: Signature,
    pub answer_eligible: BTreeSet<String>,
    pub premises: Vec<Formula>,
    pub principal: Question,
    pub ra: RangeOfAttention,
    pub oracle: Oracle,
    pub moves: Option<Vec<ScriptedMove>>,
    pub ratio: Option<RatioSpec>,
    pub notes: String,
}

impl Scenario {
    pub fn parse_formula(&self, text: &str) -> Result<Formula, ParseError> {
        parse_formula(text, Some(&self.signature))
    }

    /// Reads a question against this scenario's signature and returns the
    /// matching range-of-attention entry when there is one.
    pub fn resolve_question(&self, q: &Question) -> Question {
        self.ra
            .find(q)
            .or_else(|| (*q == self.principal).then_some(&self.principal))
            .cloned()
            .unwrap_or_else(|| q.clone())
    }

    /// Reads a move written in the script format against this scenario.
    /// `index` is only used in error messages.
    pub fn resolve_move(&self, m: MoveFile, index: usize) -> Result<ScriptedMove, ScenarioError> {
        resolve_move(m, index, &self.signature, &self.ra, &self.principal)
    }
}

// ---------------------------------------------------------------------------
// File schema

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuestionRef {
    Text(String),
    Spec(QuestionSpec),
}

impl QuestionRef {
    pub fn resolve(&self, sig: &Signature) -> Result<Question, QuestionError> {
        match self {
            QuestionRef::Text(text) => Question::parse(text, Some(sig)),
            QuestionRef::Spec(spec) => Question::from_spec(spec, Some(sig)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleEntryFile {
    pub question: QuestionRef,
    /// A sentence, or `"refuse"`.
    pub answer: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PremiseRefFile {
    Seq(usize),
    Sentence(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MoveFile {
    Ask {
        question: QuestionRef,
    },
    Answer {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seq: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        question: Option<QuestionRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        answer: Option<String>,
    },
    Deduce {
        rule: String,
        #[serde(default)]
        premises: Vec<PremiseRefFile>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<String>,
        conclusion: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inquirer: Option<String>,
    pub signature: Signature,
    #[serde(default)]
    pub answer_eligible: Vec<String>,
    #[serde(default)]
    pub premises: Vec<String>,
    pub principal: QuestionRef,
    #[serde(default)]
    pub ra: Vec<QuestionRef>,
    #[serde(default)]
    pub oracle: Vec<OracleEntryFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moves: Option<Vec<MoveFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioSpec>,
    #[serde(default)]
    pub notes: String,
}

fn check_sentence(
    f: &Formula,
    sig: &Signature,
    context: &str,
    declared_only: bool,
) -> Result<(), ScenarioError> {
    if !f.is_sentence() {
        return Err(ScenarioError::NotASentence {
            context: context.to_string(),
            formula: f.clone(),
        });
    }
    if declared_only {
        if let Some(name) = f
            .constants()
            .into_iter()
            .find(|c| !sig.has_constant(c) && !is_numeral(c))
        {
            return Err(ScenarioError::UndeclaredConstant {
                context: context.to_string(),
                name,
            });
        }
    }
    Ok(())
}

fn parse_answer(text: &str, sig: &Signature, context: &str) -> Result<Answer, ScenarioError> {
    if text.trim() == REFUSE {
        return Ok(Answer::Refusal);
    }
    let f = parse_formula(text, Some(sig)).map_err(ScenarioError::parse(context))?;
    check_sentence(&f, sig, context, true)?;
    Ok(Answer::Direct(f))
}

fn answer_text(a: &Answer) -> String {
    match a {
        Answer::Direct(f) => f.canonical(),
        Answer::Refusal => REFUSE.to_string(),
    }
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        if self.scenario_version != SCENARIO_VERSION {
            return Err(ScenarioError::Version(self.scenario_version));
        }
        let sig = self.signature;
        sig.validate()?;

        let answer_eligible: BTreeSet<String> = self.answer_eligible.into_iter().collect();
        if let Some(c) = answer_eligible.iter().find(|c| !sig.has_constant(c)) {
            return Err(ScenarioError::UndeclaredEligible(c.clone()));
        }

        let mut premises = Vec::with_capacity(self.premises.len());
        for (i, text) in self.premises.iter().enumerate() {
            let context = format!("premise {}", i + 1);
            let f = parse_formula(text, Some(&sig)).map_err(ScenarioError::parse(&context))?;
            check_sentence(&f, &sig, &context, true)?;
            premises.push(f);
        }

        let principal = self
            .principal
            .resolve(&sig)
            .map_err(ScenarioError::question("principal question"))?;

        let mut questions = Vec::with_capacity(self.ra.len());
        for (i, q) in self.ra.iter().enumerate() {
            questions.push(
                q.resolve(&sig)
                    .map_err(ScenarioError::question(format!("range of attention entry {}", i + 1)))?,
            );
        }
        let ra = RangeOfAttention::new(questions)?;

        let mut script = Vec::with_capacity(self.oracle.len());
        for (i, entry) in self.oracle.iter().enumerate() {
            let context = format!("oracle entry {}", i + 1);
            let q = entry
                .question
                .resolve(&sig)
                .map_err(ScenarioError::question(&context))?;
            let q = match ra.find(&q) {
                Some(found) => found.clone(),
                None if q == principal => principal.clone(),
                None => return Err(ScenarioError::OracleOutsideRange(q.canonical())),
            };
            let answer = parse_answer(&entry.answer, &sig, &context)?;
            if let Answer::Direct(f) = &answer {
                if !is_direct_answer(&q, f) && compound_witnesses(&q, f).is_none() {
                    return Err(ScenarioError::OracleNotAnAnswer {
                        question: q.canonical(),
                        answer: f.clone(),
                    });
                }
            }
            script.push((q, answer));
        }

        let moves = match self.moves {
            None => None,
            Some(moves) => {
                let mut out = Vec::with_capacity(moves.len());
                for (i, m) in moves.into_iter().enumerate() {
                    out.push(resolve_move(m, i + 1, &sig, &ra, &principal)?);
                }
                Some(out)
            }
        };

        Ok(Scenario {
            inquirer: self.inquirer.unwrap_or_else(|| "Inquirer".to_string()),
            name: self.name,
            signature: sig,
            answer_eligible,
            premises,
            principal,
            ra,
            oracle: Oracle::new(script),
            moves,
            ratio: self.ratio,
            notes: self.notes,
        })
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        ScenarioFile {
            scenario_version: SCENARIO_VERSION,
            name: s.name.clone(),
            inquirer: Some(s.inquirer.clone()),
            signature: s.signature.clone(),
            answer_eligible: s.answer_eligible.iter().cloned().collect(),
            premises: s.premises.iter().map(Formula::canonical).collect(),
            principal: QuestionRef::Spec(s.principal.to_spec()),
            ra: s.ra.iter().map(|q| QuestionRef::Spec(q.to_spec())).collect(),
            oracle: s
                .oracle
                .entries()
                .map(|(q, a)| OracleEntryFile {
                    question: QuestionRef::Spec(q.to_spec()),
                    answer: answer_text(a),
                })
                .collect(),
            moves: s
                .moves
                .as_ref()
                .map(|ms| ms.iter().map(move_to_file).collect()),
            ratio: s.ratio.clone(),
            notes: s.notes.clone(),
        }
    }
}

fn resolve_move(
    m: MoveFile,
    index: usize,
    sig: &Signature,
    ra: &RangeOfAttention,
    principal: &Question,
) -> Result<ScriptedMove, ScenarioError> {
    let context = format!("move {index}");
    Ok(match m {
        MoveFile::Ask { question } => {
            let q = question
                .resolve(sig)
                .map_err(ScenarioError::question(&context))?;
            match ra.find(&q) {
                Some(found) => ScriptedMove::Ask(found.clone()),
                None => {
                    return Err(ScenarioError::AskOutsideRange {
                        index,
                        question: q.canonical(),
                    })
                }
            }
        }
        MoveFile::Answer {
            seq,
            question,
            answer,
        } => {
            let question = match question {
                Some(q) => {
                    let q = q.resolve(sig).map_err(ScenarioError::question(&context))?;
                    Some(ra.find(&q).cloned().unwrap_or_else(|| {
                        if q == *principal {
                            principal.clone()
                        } else {
                            q
                        }
                    }))
                }
                None => None,
            };
            let answer = answer
                .map(|a| parse_answer(&a, sig, &context))
                .transpose()?;
            ScriptedMove::Answer {
                seq,
                question,
                answer,
            }
        }
        MoveFile::Deduce {
            rule,
            premises,
            witness,
            conclusion,
        } => {
            let rule = Rule::from_name(&rule).ok_or(ScenarioError::UnknownRule(rule))?;
            let premises = premises
                .into_iter()
                .map(|p| match p {
                    PremiseRefFile::Seq(n) => Ok(PremiseRef::Seq(n)),
                    PremiseRefFile::Sentence(text) => parse_formula(&text, Some(sig))
                        .map(PremiseRef::Sentence)
                        .map_err(ScenarioError::parse(&context)),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let witness = witness
                .map(|w| parse_term(&w).map_err(ScenarioError::parse(&context)))
                .transpose()?;
            let conclusion =
                parse_formula(&conclusion, Some(sig)).map_err(ScenarioError::parse(&context))?;
            check_sentence(&conclusion, sig, &context, false)?;
            ScriptedMove::Deduce {
                rule,
                premises,
                witness,
                conclusion,
            }
        }
    })
}

pub fn move_to_file(m: &ScriptedMove) -> MoveFile {
    match m {
        ScriptedMove::Ask(q) => MoveFile::Ask {
            question: QuestionRef::Spec(q.to_spec()),
        },
        ScriptedMove::Answer {
            seq,
            question,
            answer,
        } => MoveFile::Answer {
            seq: *seq,
            question: question.as_ref().map(|q| QuestionRef::Spec(q.to_spec())),
            answer: answer.as_ref().map(answer_text),
        },
        ScriptedMove::Deduce {
            rule,
            premises,
            witness,
            conclusion,
        } => MoveFile::Deduce {
            rule: rule.name().to_string(),
            premises: premises
                .iter()
                .map(|p| match p {
                    PremiseRef::Seq(n) => PremiseRefFile::Seq(*n),
                    PremiseRef::Sentence(f) => PremiseRefFile::Sentence(f.canonical()),
                })
                .collect(),
            witness: witness.as_ref().map(|w| w.name().to_string()),
            conclusion: conclusion.canonical(),
        },
    }
}

pub fn parse_scenario(json: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile =
        serde_json::from_str(json).map_err(|e| ScenarioError::Schema(e.to_string()))?;
    file.into_scenario()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn scenario_to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("scenario serializes")
}

pub fn save_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    std::fs::write(path, scenario_to_json(s)).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })
}

const HOLMES_JSON: &str = include_str!("../scenarios/holmes.json");
const MENDEL_JSON: &str = include_str!("../scenarios/mendel.json");

/// Source text of the builtin scenarios, by name.
pub const BUILTIN_SOURCES: [(&str, &str); 2] = [("holmes", HOLMES_JSON), ("mendel", MENDEL_JSON)];

pub fn builtin_scenarios() -> Vec<Arc<Scenario>> {
    BUILTIN_SOURCES
        .iter()
        .map(|(name, json)| {
            Arc::new(parse_scenario(json).unwrap_or_else(|e| panic!("builtin `{name}` is invalid: {e}")))
        })
        .collect()
}

pub fn builtin(name: &str) -> Option<Arc<Scenario>> {
    BUILTIN_SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| Arc::new(parse_scenario(json).expect("builtin scenarios are valid")))
}

/// Finds a scenario by builtin name, then as `<name>.json` in each search
/// directory, then as a file path.
pub fn find_scenario(name: &str, search_path: &[PathBuf]) -> Result<Arc<Scenario>, ScenarioError> {
    if let Some(s) = builtin(name) {
        return Ok(s);
    }
    for dir in search_path {
        let candidate = dir.join(format!("{name}.json"));
        if candidate.is_file() {
            return load_scenario(candidate).map(Arc::new);
        }
    }
    let path = Path::new(name);
    if path.is_file() {
        return load_scenario(path).map(Arc::new);
    }
    Err(ScenarioError::NotFound(name.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatioError {
    #[error("recessive count must be positive")]
    ZeroRecessive,
}

/// `n_dominant / n_recessive` rounded half-up to two decimals, as `"R : 1"`.
pub fn ratio_report(n_dominant: u64, n_recessive: u64) -> Result<String, RatioError> {
    if n_recessive == 0 {
        return Err(RatioError::ZeroRecessive);
    }
    let (a, b) = (n_dominant as u128, n_recessive as u128);
    // floor(100 a / b + 1/2)
    let hundredths = (200 * a + b) / (2 * b);
    Ok(format!("{}.{:02} : 1", hundredths / 100, hundredths % 100))
}

/// Reads the dominant and recessive counts off established sentences: an
/// individual `a` with `dominant(a)` and `count(n, a)` for a numeral `n`,
/// and likewise for the recessive predicate. Conjunctions are split.
pub fn read_counts<'a>(
    spec: &RatioSpec,
    established: impl IntoIterator<Item = &'a Formula>,
) -> Option<(u64, u64)> {
    let mut facts: Vec<(&str, Vec<&Term>)> = Vec::new();
    fn split<'f>(f: &'f Formula, out: &mut Vec<(&'f str, Vec<&'f Term>)>) {
        match f {
            Formula::And(g, h) => {
                split(g, out);
                split(h, out);
            }
            Formula::Atom(p, args) => out.push((p.as_str(), args.iter().collect())),
            _ => {}
        }
    }
    for f in established {
        split(f, &mut facts);
    }
    let count_for = |pred: &str| -> Option<u64> {
        facts.iter().find_map(|(p, args)| {
            let [who] = args.as_slice() else { return None };
            if *p != pred {
                return None;
            }
            facts.iter().find_map(|(q, args)| match args.as_slice() {
                [n, x] if *q == spec.count && x == who && n.is_numeral() => n.name().parse().ok(),
                _ => None,
            })
        })
    };
    Some((count_for(&spec.dominant)?, count_for(&spec.recessive)?))
}
