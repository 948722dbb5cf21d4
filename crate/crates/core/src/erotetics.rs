//! Questions, their presuppositions and direct answers.
//!
//! A yes-no question about `S` is written `S | !S?`; its presupposition is
//! the tautology `S | !S`. A wh-question "which `x` is such that `S(x)`?" is
//! written `exists x. S(x)?` and presupposes `exists x. S(x)`. In both cases
//! the presupposition is the question with its question mark dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{match_instances, Formula, Signature, Term};
use crate::parser::{parse_formula, parse_formula_with, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuestionError {
    #[error("yes-no question body must be a sentence: `{0}`")]
    OpenBody(Formula),
    #[error("wh-question `{var}` must leave exactly `{var}` free in its matrix, found {found:?}")]
    BadMatrix { var: String, found: BTreeSet<String> },
    #[error("only wh-questions can be compound")]
    CompoundYesNo,
    #[error("question text must end with `?`")]
    MissingQuestionMark,
    #[error("`{0}` is neither of the form `A | !A` nor `exists x. S`")]
    UnrecognisedShape(String),
    #[error("wh-question without `var` needs a formula of the form `exists x. S`")]
    MissingVar,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuestionKind {
    YesNo,
    Wh,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QuestionForm {
    YesNo { body: Formula },
    Wh { var: String, matrix: Formula },
}

/// A yes-no or wh-question. Equality ignores the display label.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "QuestionSpec", into = "QuestionSpec")]
pub struct Question {
    pub form: QuestionForm,
    pub label: Option<String>,
    /// Accepts fully instantiated answers to a nested existential matrix
    /// (see [`compound_witnesses`]).
    pub compound: bool,
}

impl PartialEq for Question {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form
    }
}

impl Eq for Question {}

impl Question {
    pub fn yes_no(body: Formula) -> Result<Self, QuestionError> {
        if !body.is_sentence() {
            return Err(QuestionError::OpenBody(body));
        }
        Ok(Question {
            form: QuestionForm::YesNo { body },
            label: None,
            compound: false,
        })
    }

    pub fn wh(var: impl Into<String>, matrix: Formula) -> Result<Self, QuestionError> {
        let var = var.into();
        let found = matrix.free_variables();
        if found.len() != 1 || !found.contains(&var) {
            return Err(QuestionError::BadMatrix { var, found });
        }
        Ok(Question {
            form: QuestionForm::Wh { var, matrix },
            label: None,
            compound: false,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn compound(mut self) -> Result<Self, QuestionError> {
        if self.kind() == QuestionKind::YesNo {
            return Err(QuestionError::CompoundYesNo);
        }
        self.compound = true;
        Ok(self)
    }

    pub fn kind(&self) -> QuestionKind {
        match self.form {
            QuestionForm::YesNo { .. } => QuestionKind::YesNo,
            QuestionForm::Wh { .. } => QuestionKind::Wh,
        }
    }

    pub fn presupposition(&self) -> Formula {
        match &self.form {
            QuestionForm::YesNo { body } => Formula::or(body.clone(), Formula::not(body.clone())),
            QuestionForm::Wh { var, matrix } => Formula::exists(var.clone(), matrix.clone()),
        }
    }

    /// The presupposition followed by `?`.
    pub fn canonical(&self) -> String {
        format!("{}?", self.presupposition())
    }

    pub fn unicode(&self) -> String {
        format!("{}?", self.presupposition().unicode())
    }

    /// Identity used for oracle scripts and range-of-attention lookups:
    /// kind tag plus canonical text.
    pub fn key(&self) -> String {
        let tag = match self.kind() {
            QuestionKind::YesNo => "yesno",
            QuestionKind::Wh => "wh",
        };
        format!("{tag} {}", self.canonical())
    }

    pub fn constants(&self) -> BTreeSet<String> {
        self.presupposition().constants()
    }

    /// Reads the text syntax: `A | !A?` is a yes-no question about `A`,
    /// `exists x. S?` a wh-question about `x`.
    pub fn parse(text: &str, sig: Option<&Signature>) -> Result<Self, QuestionError> {
        let body = text
            .trim_end()
            .strip_suffix('?')
            .ok_or(QuestionError::MissingQuestionMark)?;
        let f = parse_formula(body, sig)?;
        match f {
            Formula::Or(a, b) if *b == Formula::not((*a).clone()) => Question::yes_no(*a),
            Formula::Exists(var, matrix) => Question::wh(var, *matrix),
            other => Err(QuestionError::UnrecognisedShape(other.canonical())),
        }
    }

    pub fn from_spec(spec: &QuestionSpec, sig: Option<&Signature>) -> Result<Self, QuestionError> {
        let text = spec.formula.trim_end();
        let text = text.strip_suffix('?').unwrap_or(text);
        let q = match spec.kind {
            QuestionKind::YesNo => Question::yes_no(parse_formula(text, sig)?)?,
            QuestionKind::Wh => match &spec.var {
                Some(var) => Question::wh(var.clone(), parse_formula_with(text, sig, &[var])?)?,
                None => match parse_formula(text, sig)? {
                    Formula::Exists(var, matrix) => Question::wh(var, *matrix)?,
                    _ => return Err(QuestionError::MissingVar),
                },
            },
        };
        let q = if spec.compound { q.compound()? } else { q };
        Ok(Question {
            label: spec.label.clone(),
            ..q
        })
    }

    pub fn to_spec(&self) -> QuestionSpec {
        let (kind, var, formula) = match &self.form {
            QuestionForm::YesNo { body } => (QuestionKind::YesNo, None, body.canonical()),
            QuestionForm::Wh { var, matrix } => (QuestionKind::Wh, Some(var.clone()), matrix.canonical()),
        };
        QuestionSpec {
            kind,
            var,
            formula,
            label: self.label.clone(),
            compound: self.compound,
        }
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// JSON form of a question. For yes-no questions `formula` is the body `S`;
/// for wh-questions it is the matrix over `var`, or `exists x. S` when `var`
/// is omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionSpec {
    pub kind: QuestionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<String>,
    pub formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub compound: bool,
}

impl TryFrom<QuestionSpec> for Question {
    type Error = QuestionError;

    fn try_from(spec: QuestionSpec) -> Result<Self, Self::Error> {
        Question::from_spec(&spec, None)
    }
}

impl From<Question> for QuestionSpec {
    fn from(q: Question) -> Self {
        q.to_spec()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Direct(Formula),
    Refusal,
}

/// `S` and `!S` answer a yes-no question about `S`; closed instances
/// `S(u)` answer a wh-question about `S(x)`.
pub fn is_direct_answer(q: &Question, f: &Formula) -> bool {
    if !f.is_sentence() {
        return false;
    }
    match &q.form {
        QuestionForm::YesNo { body } => f == body || *f == Formula::not(body.clone()),
        QuestionForm::Wh { var, matrix } => {
            crate::logic::match_instance(matrix, var, f).is_some()
        }
    }
}

/// For a compound wh-question whose matrix opens with existential
/// quantifiers, matches `f` against the matrix with those quantifiers
/// stripped and returns a closed term for the query variable and every
/// stripped variable.
pub fn compound_witnesses(q: &Question, f: &Formula) -> Option<BTreeMap<String, Term>> {
    let QuestionForm::Wh { var, matrix } = &q.form else {
        return None;
    };
    if !q.compound || !f.is_sentence() {
        return None;
    }
    let mut vars = vec![var.as_str()];
    let mut core = matrix;
    while let Formula::Exists(v, body) = core {
        vars.push(v.as_str());
        core = body;
    }
    let bindings = match_instances(core, &vars, f)?;
    let free = core.free_variables();
    vars.iter()
        .all(|v| !free.contains(*v) || bindings.contains_key(*v))
        .then_some(bindings)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Askability {
    Askable,
    Blocked { missing: Formula },
}

impl Askability {
    pub fn is_askable(&self) -> bool {
        matches!(self, Askability::Askable)
    }
}

/// Yes-no questions presuppose a tautology and may always be asked. A
/// wh-question may be asked once its presupposition is established.
pub fn askable(q: &Question, established: &BTreeSet<Formula>) -> Askability {
    match q.kind() {
        QuestionKind::YesNo => Askability::Askable,
        QuestionKind::Wh => {
            let presupposition = q.presupposition();
            if established.contains(&presupposition) {
                Askability::Askable
            } else {
                Askability::Blocked {
                    missing: presupposition,
                }
            }
        }
    }
}

pub const MAX_SKELETON_LETTERS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("propositional skeleton has {0} letters; at most {MAX_SKELETON_LETTERS} are checked")]
pub struct TooLarge(pub usize);

/// Replaces atoms, equalities and quantified subformulas by propositional
/// letters and checks the result on every valuation.
pub fn is_tautology_skeleton(f: &Formula) -> Result<bool, TooLarge> {
    let mut letters: Vec<&Formula> = Vec::new();
    collect_letters(f, &mut letters);
    if letters.len() > MAX_SKELETON_LETTERS {
        return Err(TooLarge(letters.len()));
    }
    Ok((0u32..1 << letters.len()).all(|valuation| eval_skeleton(f, &letters, valuation)))
}

fn collect_letters<'a>(f: &'a Formula, letters: &mut Vec<&'a Formula>) {
    match f {
        Formula::Atom(..) | Formula::Equal(..) | Formula::Forall(..) | Formula::Exists(..) => {
            if !letters.contains(&f) {
                letters.push(f);
            }
        }
        Formula::Not(g) => collect_letters(g, letters),
        Formula::And(g, h) | Formula::Or(g, h) | Formula::Implies(g, h) | Formula::Iff(g, h) => {
            collect_letters(g, letters);
            collect_letters(h, letters);
        }
    }
}

fn eval_skeleton(f: &Formula, letters: &[&Formula], valuation: u32) -> bool {
    match f {
        Formula::Not(g) => !eval_skeleton(g, letters, valuation),
        Formula::And(g, h) => eval_skeleton(g, letters, valuation) && eval_skeleton(h, letters, valuation),
        Formula::Or(g, h) => eval_skeleton(g, letters, valuation) || eval_skeleton(h, letters, valuation),
        Formula::Implies(g, h) => {
            !eval_skeleton(g, letters, valuation) || eval_skeleton(h, letters, valuation)
        }
        Formula::Iff(g, h) => eval_skeleton(g, letters, valuation) == eval_skeleton(h, letters, valuation),
        leaf => {
            let i = letters.iter().position(|l| *l == leaf).expect("letter collected");
            valuation & (1 << i) != 0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("question `{0}` occurs twice in the range of attention")]
pub struct DuplicateQuestion(pub String);

/// The ordered questions an Inquirer is prepared to ask.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RangeOfAttention {
    questions: Vec<Question>,
}

impl RangeOfAttention {
    pub fn new(questions: Vec<Question>) -> Result<Self, DuplicateQuestion> {
        let mut seen = BTreeSet::new();
        for q in &questions {
            if !seen.insert(q.key()) {
                return Err(DuplicateQuestion(q.canonical()));
            }
        }
        Ok(RangeOfAttention { questions })
    }

    /// The stored question structurally equal to `q`, with its label and
    /// flags.
    pub fn find(&self, q: &Question) -> Option<&Question> {
        self.questions.iter().find(|r| *r == q)
    }

    pub fn contains(&self, q: &Question) -> bool {
        self.find(q).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Question> {
        self.questions.iter()
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s, None).unwrap()
    }

    fn yes_no(s: &str) -> Question {
        Question::yes_no(p(s)).unwrap()
    }

    fn wh(var: &str, s: &str) -> Question {
        Question::wh(var, parse_formula_with(s, None, &[var]).unwrap()).unwrap()
    }

    #[test]
    fn presuppositions() {
        assert_eq!(
            yes_no("exists x. D(x)").presupposition(),
            p("exists x. D(x) | !exists x. D(x)")
        );
        assert_eq!(wh("x", "x = t").presupposition(), p("exists x. x = t"));
        assert_eq!(yes_no("P").presupposition(), p("P | !P"));
    }

    #[test]
    fn canonical_question_text() {
        assert_eq!(
            yes_no("exists x. D(x)").canonical(),
            "exists x. D(x) | !exists x. D(x)?"
        );
        assert_eq!(wh("x", "x = t").canonical(), "exists x. x = t?");
        assert_eq!(wh("x", "x = t").key(), "wh exists x. x = t?");
    }

    #[test]
    fn question_invariants() {
        assert!(matches!(Question::yes_no(p("D(x)")), Err(QuestionError::OpenBody(_))));
        assert!(matches!(
            Question::wh("x", p("N(y, x)")),
            Err(QuestionError::BadMatrix { .. })
        ));
        assert!(matches!(Question::wh("x", p("P")), Err(QuestionError::BadMatrix { .. })));
        assert!(matches!(yes_no("P").compound(), Err(QuestionError::CompoundYesNo)));
    }

    #[test]
    fn text_syntax() {
        let q = Question::parse("exists x. D(x) | !exists x. D(x)?", None).unwrap();
        assert_eq!(q, yes_no("exists x. D(x)"));
        let q = Question::parse("exists x. x = t?", None).unwrap();
        assert_eq!(q, wh("x", "x = t"));
        assert!(matches!(
            Question::parse("exists x. x = t", None),
            Err(QuestionError::MissingQuestionMark)
        ));
        assert!(matches!(
            Question::parse("P & Q?", None),
            Err(QuestionError::UnrecognisedShape(_))
        ));
    }

    #[test]
    fn direct_answers() {
        assert!(is_direct_answer(&yes_no("exists x. D(x)"), &p("exists x. D(x)")));
        assert!(is_direct_answer(&yes_no("B(d, t)"), &p("!B(d, t)")));
        assert!(is_direct_answer(&wh("x", "D(x)"), &p("D(d)")));
        assert!(!is_direct_answer(&wh("x", "D(x)"), &p("exists x. D(x)")));
        assert!(!is_direct_answer(&yes_no("B(d, t)"), &p("!!B(d, t)")));
        assert!(is_direct_answer(&wh("x", "x = t"), &p("t = o")));
    }

    #[test]
    fn compound_answers() {
        let q = wh("x", "exists y. (D1(x) & N(y, x))").compound().unwrap();
        let w = compound_witnesses(&q, &p("D1(a) & N(5474, a)")).unwrap();
        assert_eq!(w["x"], Term::constant("a"));
        assert_eq!(w["y"], Term::constant("5474"));
        assert!(compound_witnesses(&q, &p("D1(a) & N(5474, b)")).is_none());
        // The same answer does not count without the compound flag.
        let plain = wh("x", "exists y. (D1(x) & N(y, x))");
        assert!(compound_witnesses(&plain, &p("D1(a) & N(5474, a)")).is_none());
        assert!(!is_direct_answer(&plain, &p("D1(a) & N(5474, a)")));
        assert!(is_direct_answer(&plain, &p("exists y. (D1(a) & N(y, a))")));
    }

    #[test]
    fn askability() {
        let empty = BTreeSet::new();
        assert_eq!(askable(&yes_no("exists x. D(x)"), &empty), Askability::Askable);
        let est = BTreeSet::from([p("exists x. x = t")]);
        assert_eq!(askable(&wh("x", "x = t"), &est), Askability::Askable);
        assert_eq!(
            askable(&wh("x", "D(x)"), &empty),
            Askability::Blocked {
                missing: p("exists x. D(x)")
            }
        );
    }

    #[test]
    fn tautology_skeletons() {
        assert_eq!(is_tautology_skeleton(&p("exists x. D(x) | !exists x. D(x)")), Ok(true));
        assert_eq!(is_tautology_skeleton(&p("P")), Ok(false));
        let unique = "exists z. forall y. (!B(d, y) -> y = z)";
        assert_eq!(
            is_tautology_skeleton(&p(&format!("{unique} | !{unique}"))),
            Ok(true)
        );
        assert_eq!(is_tautology_skeleton(&p("P -> P & (Q | !Q)")), Ok(true));
        let wide = (0..21).map(|i| format!("P{i}")).collect::<Vec<_>>().join(" | ");
        assert_eq!(is_tautology_skeleton(&p(&wide)), Err(TooLarge(21)));
    }

    #[test]
    fn range_of_attention_rejects_duplicates() {
        let a = yes_no("P").with_label("first");
        let b = yes_no("P").with_label("second");
        assert!(RangeOfAttention::new(vec![a.clone(), b]).is_err());
        let ra = RangeOfAttention::new(vec![a, wh("x", "D(x)")]).unwrap();
        assert_eq!(ra.find(&yes_no("P")).unwrap().label.as_deref(), Some("first"));
    }

    #[test]
    fn json_form() {
        let q = wh("x", "x = t").with_label("Who is the thief?");
        let json = serde_json::to_value(&q).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"kind": "wh", "var": "x", "formula": "x = t", "label": "Who is the thief?"})
        );
        let back: Question = serde_json::from_value(json).unwrap();
        assert_eq!(back, q);
        let spec: Question =
            serde_json::from_value(serde_json::json!({"kind": "wh", "formula": "exists x. D(x)"}))
                .unwrap();
        assert_eq!(spec, wh("x", "D(x)"));
    }
}
