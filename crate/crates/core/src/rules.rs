//! The deductive move kernel: a closed set of inference rules and a checker
//! for single steps.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Formula, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    ExistentialInstantiation,
    UniversalInstantiation,
    ModusPonens,
    ConjunctionElimLeft,
    ConjunctionElimRight,
    ConjunctionIntro,
    DisjunctiveSyllogism,
    DoubleNegationElim,
    EqualitySubstitution,
    TautologyIntro,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::ExistentialInstantiation,
        Rule::UniversalInstantiation,
        Rule::ModusPonens,
        Rule::ConjunctionElimLeft,
        Rule::ConjunctionElimRight,
        Rule::ConjunctionIntro,
        Rule::DisjunctiveSyllogism,
        Rule::DoubleNegationElim,
        Rule::EqualitySubstitution,
        Rule::TautologyIntro,
    ];

    /// The lower_snake_case name used in scenario files and API payloads.
    pub fn name(self) -> &'static str {
        match self {
            Rule::ExistentialInstantiation => "existential_instantiation",
            Rule::UniversalInstantiation => "universal_instantiation",
            Rule::ModusPonens => "modus_ponens",
            Rule::ConjunctionElimLeft => "conjunction_elim_left",
            Rule::ConjunctionElimRight => "conjunction_elim_right",
            Rule::ConjunctionIntro => "conjunction_intro",
            Rule::DisjunctiveSyllogism => "disjunctive_syllogism",
            Rule::DoubleNegationElim => "double_negation_elim",
            Rule::EqualitySubstitution => "equality_substitution",
            Rule::TautologyIntro => "tautology_intro",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }

    pub fn premise_count(self) -> usize {
        match self {
            Rule::TautologyIntro => 0,
            Rule::ExistentialInstantiation
            | Rule::UniversalInstantiation
            | Rule::ConjunctionElimLeft
            | Rule::ConjunctionElimRight
            | Rule::DoubleNegationElim => 1,
            Rule::ModusPonens
            | Rule::ConjunctionIntro
            | Rule::DisjunctiveSyllogism
            | Rule::EqualitySubstitution => 2,
        }
    }

    pub fn needs_witness(self) -> bool {
        matches!(
            self,
            Rule::ExistentialInstantiation | Rule::UniversalInstantiation | Rule::EqualitySubstitution
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Extra input to a rule: a term for the instantiation and substitution
/// rules, the sentence `S` for tautology introduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Term(Term),
    Formula(Formula),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{rule} takes {expected} premise(s), got {found}")]
    PremiseCount {
        rule: Rule,
        expected: usize,
        found: usize,
    },
    #[error("{rule} does not apply: {detail}")]
    Shape { rule: Rule, detail: String },
    #[error("{0} needs a witness")]
    MissingWitness(Rule),
    #[error("constant `{0}` already occurs in the tableau; existential instantiation needs a new constant")]
    StaleWitness(String),
    #[error("witness `{0}` must be a constant")]
    NonClosedWitness(Term),
    #[error("`{0}` is not a side of the equation")]
    WitnessNotInEquation(Term),
    #[error("premise `{0}` is not a sentence")]
    NotASentence(Formula),
}

fn shape(rule: Rule, detail: impl Into<String>) -> RuleError {
    RuleError::Shape {
        rule,
        detail: detail.into(),
    }
}

fn term_witness(rule: Rule, w: Option<&Witness>) -> Result<&Term, RuleError> {
    match w {
        Some(Witness::Term(t)) => Ok(t),
        _ => Err(RuleError::MissingWitness(rule)),
    }
}

/// Applies `rule` and returns its conclusion.
///
/// Two-premise rules accept their premises in either order. When more than
/// one reading applies (for example both premises are conjunctions), the
/// first in premise order is returned; [`check_step`] accepts any of them.
pub fn apply_rule(
    rule: Rule,
    premises: &[Formula],
    witness: Option<&Witness>,
    used_constants: &BTreeSet<String>,
) -> Result<Formula, RuleError> {
    let mut all = conclusions(rule, premises, witness, used_constants)?;
    Ok(all.remove(0))
}

/// Every conclusion `rule` licenses from `premises`; never empty on success.
pub fn conclusions(
    rule: Rule,
    premises: &[Formula],
    witness: Option<&Witness>,
    used_constants: &BTreeSet<String>,
) -> Result<Vec<Formula>, RuleError> {
    if premises.len() != rule.premise_count() {
        return Err(RuleError::PremiseCount {
            rule,
            expected: rule.premise_count(),
            found: premises.len(),
        });
    }
    if let Some(open) = premises.iter().find(|p| !p.is_sentence()) {
        return Err(RuleError::NotASentence(open.clone()));
    }
    let pairs = || {
        if premises.len() == 2 {
            vec![(&premises[0], &premises[1]), (&premises[1], &premises[0])]
        } else {
            Vec::new()
        }
    };
    let mut out: Vec<Formula> = Vec::new();
    match rule {
        Rule::ExistentialInstantiation => {
            let Formula::Exists(var, body) = &premises[0] else {
                return Err(shape(rule, "premise is not existential"));
            };
            let c = term_witness(rule, witness)?;
            let Term::Const(name) = c else {
                return Err(RuleError::NonClosedWitness(c.clone()));
            };
            if used_constants.contains(name) || premises[0].constants().contains(name) {
                return Err(RuleError::StaleWitness(name.clone()));
            }
            out.push(body.substitute(var, c));
        }
        Rule::UniversalInstantiation => {
            let Formula::Forall(var, body) = &premises[0] else {
                return Err(shape(rule, "premise is not universal"));
            };
            let u = term_witness(rule, witness)?;
            if !u.is_closed() {
                return Err(RuleError::NonClosedWitness(u.clone()));
            }
            out.push(body.substitute(var, u));
        }
        Rule::ModusPonens => {
            for (a, b) in pairs() {
                if let Formula::Implies(ante, cons) = b {
                    if **ante == *a {
                        out.push((**cons).clone());
                    }
                }
            }
            if out.is_empty() {
                return Err(shape(rule, "no premise is an implication whose antecedent is the other"));
            }
        }
        Rule::ConjunctionElimLeft | Rule::ConjunctionElimRight => {
            let Formula::And(l, r) = &premises[0] else {
                return Err(shape(rule, "premise is not a conjunction"));
            };
            out.push(if rule == Rule::ConjunctionElimLeft { (**l).clone() } else { (**r).clone() });
        }
        Rule::ConjunctionIntro => {
            for (a, b) in pairs() {
                out.push(Formula::and(a.clone(), b.clone()));
            }
        }
        Rule::DisjunctiveSyllogism => {
            for (a, b) in pairs() {
                if let (Formula::Or(l, r), Formula::Not(neg)) = (a, b) {
                    if **neg == **l {
                        out.push((**r).clone());
                    }
                    if **neg == **r {
                        out.push((**l).clone());
                    }
                }
            }
            if out.is_empty() {
                return Err(shape(rule, "need a disjunction and the negation of one disjunct"));
            }
        }
        Rule::DoubleNegationElim => match &premises[0] {
            Formula::Not(inner) => match &**inner {
                Formula::Not(f) => out.push((**f).clone()),
                _ => return Err(shape(rule, "premise is not a double negation")),
            },
            _ => return Err(shape(rule, "premise is not a double negation")),
        },
        Rule::EqualitySubstitution => {
            let replaced = term_witness(rule, witness)?;
            let Term::Const(from) = replaced else {
                return Err(RuleError::NonClosedWitness(replaced.clone()));
            };
            let mut saw_equation = false;
            for (eq, target) in pairs() {
                let Formula::Equal(u, v) = eq else { continue };
                saw_equation = true;
                let other = if u == replaced {
                    v
                } else if v == replaced {
                    u
                } else {
                    continue;
                };
                out.push(target.replace_constant(from, other));
            }
            if out.is_empty() {
                return Err(if saw_equation {
                    RuleError::WitnessNotInEquation(replaced.clone())
                } else {
                    shape(rule, "neither premise is an equation")
                });
            }
        }
        Rule::TautologyIntro => {
            let Some(Witness::Formula(body)) = witness else {
                return Err(RuleError::MissingWitness(rule));
            };
            if !body.is_sentence() {
                return Err(RuleError::NotASentence(body.clone()));
            }
            out.push(Formula::or(body.clone(), Formula::not(body.clone())));
        }
    }
    out.dedup();
    Ok(out)
}

/// A deductive move: a rule applied to earlier tableau entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeductionStep {
    pub rule: Rule,
    /// Sequence numbers of the premises (1-based).
    pub premise_refs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Term>,
    pub conclusion: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("premise reference {0} does not name an earlier entry")]
    Dangling(usize),
    #[error("entry {0} is a question, not a sentence")]
    QuestionPremise(usize),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("{rule} yields `{expected}`, not `{found}`")]
    ConclusionMismatch {
        rule: Rule,
        expected: Formula,
        found: Formula,
    },
    #[error("tautology introduction needs a conclusion of the form `S | !S`, got `{0}`")]
    NotExcludedMiddle(Formula),
}

/// Checks `step` against the entries so far; `entries[i]` holds the sentence
/// of entry `i + 1`, or `None` for a question.
pub fn verify_step(
    entries: &[Option<Formula>],
    step: &DeductionStep,
    used_constants: &BTreeSet<String>,
) -> Result<(), StepError> {
    let mut premises = Vec::with_capacity(step.premise_refs.len());
    for &seq in &step.premise_refs {
        match seq.checked_sub(1).and_then(|i| entries.get(i)) {
            None => return Err(StepError::Dangling(seq)),
            Some(None) => return Err(StepError::QuestionPremise(seq)),
            Some(Some(f)) => premises.push(f.clone()),
        }
    }
    let witness = if step.rule == Rule::TautologyIntro {
        match &step.conclusion {
            Formula::Or(a, b) if **b == Formula::not((**a).clone()) => {
                Some(Witness::Formula((**a).clone()))
            }
            other => return Err(StepError::NotExcludedMiddle(other.clone())),
        }
    } else {
        step.witness.clone().map(Witness::Term)
    };
    let candidates = conclusions(step.rule, &premises, witness.as_ref(), used_constants)?;
    if candidates.contains(&step.conclusion) {
        Ok(())
    } else {
        Err(StepError::ConclusionMismatch {
            rule: step.rule,
            expected: candidates[0].clone(),
            found: step.conclusion.clone(),
        })
    }
}

/// `Ok(true)` iff the step is valid. Only a dangling reference is an error;
/// every other defect makes the step invalid.
pub fn check_step(
    entries: &[Option<Formula>],
    step: &DeductionStep,
    used_constants: &BTreeSet<String>,
) -> Result<bool, StepError> {
    match verify_step(entries, step, used_constants) {
        Ok(()) => Ok(true),
        Err(StepError::Dangling(seq)) => Err(StepError::Dangling(seq)),
        Err(_) => Ok(false),
    }
}

/// `hint` if unused, otherwise `hint` with the smallest numeric suffix that
/// is unused.
pub fn fresh_constant(used: &BTreeSet<String>, hint: &str) -> String {
    if !used.contains(hint) {
        return hint.to_string();
    }
    (1..)
        .map(|i| format!("{hint}{i}"))
        .find(|name| !used.contains(name))
        .expect("unbounded suffixes")
}
