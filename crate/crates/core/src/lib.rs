//! Interrogative games over classical first-order logic.
//!
//! An Inquirer works toward a principal question by asking operative
//! questions from a range of attention and drawing deductive conclusions;
//! a source of information answers. The score is kept in a two-column
//! tableau.

pub mod erotetics;
pub mod game;
pub mod logic;
pub mod model;
pub mod parser;
pub mod render;
pub mod rules;
pub mod scenario;

pub use logic::{match_instance, match_instances, Formula, Signature, Term};
pub use parser::{parse_formula, parse_formula_with, ParseError, ParseErrorKind};
pub use erotetics::{askable, is_direct_answer, is_tautology_skeleton, Answer, Askability, Question, RangeOfAttention};
pub use model::{model_check_entailment, satisfiable};
pub use rules::{apply_rule, check_step, fresh_constant, DeductionStep, Rule, Witness};
pub use game::{replay, Game, GameError, GameState, Move, Report, Status, TableauEntry};
pub use scenario::{builtin, builtin_scenarios, find_scenario, load_scenario, parse_scenario, ratio_report, Oracle, Scenario, ScenarioError};
pub use render::{display_rows, render_tableau, Format, TableauDocument};
