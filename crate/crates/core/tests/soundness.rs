mod common;

use common::*;
use iqgame::{model_check_entailment, satisfiable, Formula, Rule};

macro_rules! rule_tests {
    ($($name:ident => $rule:expr,)*) => {$(
        #[test]
        fn $name() {
            check_rule($rule).unwrap();
        }
    )*};
}

rule_tests! {
    existential_instantiation_conserves_satisfiability => Rule::ExistentialInstantiation,
    universal_instantiation_is_sound => Rule::UniversalInstantiation,
    modus_ponens_is_sound => Rule::ModusPonens,
    conjunction_elim_left_is_sound => Rule::ConjunctionElimLeft,
    conjunction_elim_right_is_sound => Rule::ConjunctionElimRight,
    conjunction_intro_is_sound => Rule::ConjunctionIntro,
    disjunctive_syllogism_is_sound => Rule::DisjunctiveSyllogism,
    double_negation_elim_is_sound => Rule::DoubleNegationElim,
    equality_substitution_is_sound => Rule::EqualitySubstitution,
    tautology_intro_is_sound => Rule::TautologyIntro,
}

#[test]
fn stale_witness_breaks_conservation() {
    // The oracle can tell: reusing a constant is not conservative.
    let premises = [
        parse("exists x. Q(x)"),
        parse("!Q(a)"),
    ];
    let careless = parse("Q(a)");
    assert!(satisfiable(&premises, 3).unwrap());
    let mut all = premises.to_vec();
    all.push(careless);
    assert!(!satisfiable(&all, 3).unwrap());
}

#[test]
fn unsound_step_is_caught() {
    // Affirming the consequent must be rejected by the oracle.
    assert!(!model_check_entailment(&[parse("Q(b)"), parse("Q(a) -> Q(b)")], &parse("Q(a)"), 3).unwrap());
}

fn parse(s: &str) -> Formula {
    iqgame::parse_formula(s, None).unwrap()
}
