#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use iqgame::game::GameError;
use iqgame::{
    apply_rule, model_check_entailment, parse_scenario, satisfiable, Answer, DeductionStep,
    Formula, Game, Question, Rule, Term, Witness,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub const VARS: [&str; 7] = ["x", "y", "z", "u", "w", "x1", "y'"];
pub const CONSTS: [&str; 9] = ["a", "b", "c", "d", "t", "o", "seed_form", "5474", "0"];
pub const PREDS: [(&str, usize); 8] = [
    ("P", 0),
    ("S", 0),
    ("D", 1),
    ("D1", 1),
    ("dog_in_the_stables", 1),
    ("B", 2),
    ("N", 2),
    ("G", 3),
];

fn term(vars: &'static [&'static str], consts: &'static [&'static str]) -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vars).prop_map(Term::var),
        prop::sample::select(consts).prop_map(Term::constant),
    ]
}

fn atom(
    preds: &'static [(&'static str, usize)],
    vars: &'static [&'static str],
    consts: &'static [&'static str],
) -> impl Strategy<Value = Formula> {
    let atoms = prop::sample::select(preds).prop_flat_map(move |(p, n)| {
        prop::collection::vec(term(vars, consts), n).prop_map(move |args| Formula::atom(p, args))
    });
    prop_oneof![
        4 => atoms,
        1 => (term(vars, consts), term(vars, consts)).prop_map(|(l, r)| Formula::equal(l, r)),
    ]
}

fn formula_over(
    preds: &'static [(&'static str, usize)],
    vars: &'static [&'static str],
    consts: &'static [&'static str],
    depth: u32,
) -> impl Strategy<Value = Formula> {
    atom(preds, vars, consts).prop_recursive(depth, 48, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::and(f, g)),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::or(f, g)),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::implies(f, g)),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::iff(f, g)),
            (prop::sample::select(vars), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
            (prop::sample::select(vars), inner).prop_map(|(v, f)| Formula::exists(v, f)),
        ]
    })
}

/// Formulas over a mixed vocabulary, possibly open, of depth at most `depth`.
pub fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    formula_over(&PREDS, &VARS, &CONSTS, depth)
}

/// Wraps every free variable in a quantifier chosen by `universal`.
pub fn close(f: Formula, universal: &[bool]) -> Formula {
    let free: Vec<String> = f.free_variables().into_iter().collect();
    free.iter().enumerate().fold(f, |acc, (i, v)| {
        if universal.get(i).copied().unwrap_or(false) {
            Formula::forall(v.clone(), acc)
        } else {
            Formula::exists(v.clone(), acc)
        }
    })
}

pub fn sentence(depth: u32) -> impl Strategy<Value = Formula> {
    (formula(depth), prop::collection::vec(any::<bool>(), 8)).prop_map(|(f, q)| close(f, &q))
}

/// Small vocabulary the finite-model checker handles quickly: P/0, Q/1,
/// R/2, constants a, b, c.
pub const SMALL_PREDS: [(&str, usize); 3] = [("P", 0), ("Q", 1), ("R", 2)];
pub const SMALL_VARS: [&str; 2] = ["x", "y"];
pub const SMALL_CONSTS: [&str; 3] = ["a", "b", "c"];

pub fn small_formula(depth: u32) -> impl Strategy<Value = Formula> {
    formula_over(&SMALL_PREDS, &SMALL_VARS, &SMALL_CONSTS, depth)
}

pub fn small_sentence(depth: u32) -> impl Strategy<Value = Formula> {
    (small_formula(depth), prop::collection::vec(any::<bool>(), 2)).prop_map(|(f, q)| close(f, &q))
}

pub fn small_constant() -> impl Strategy<Value = Term> {
    prop::sample::select(&SMALL_CONSTS[..]).prop_map(Term::constant)
}

/// Every formula written in the two worked tableaux and the surrounding
/// prose, in the ASCII grammar, paired with its canonical printing.
pub const CORPUS: [(&str, &str); 24] = [
    ("exists x. (x = t)", "exists x. x = t"),
    ("exists x. D(x) | !exists x. D(x)", "exists x. D(x) | !exists x. D(x)"),
    ("exists x. D(x)", "exists x. D(x)"),
    ("D(d)", "D(d)"),
    ("D(x)", "D(x)"),
    ("B(d, t) | !B(d, t)", "B(d, t) | !B(d, t)"),
    ("!B(d, t)", "!B(d, t)"),
    ("B(x, t)", "B(x, t)"),
    ("exists z. forall y. (!B(d, y) -> y = z)", "exists z. forall y. (!B(d, y) -> y = z)"),
    (
        "exists z. forall y. (!B(d, y) -> y = z) | !exists z. forall y. (!B(d, y) -> y = z)",
        "exists z. forall y. (!B(d, y) -> y = z) | !exists z. forall y. (!B(d, y) -> y = z)",
    ),
    ("!B(d, y) -> t = o", "!B(d, y) -> t = o"),
    ("B(d, t) -> t = o", "B(d, t) -> t = o"),
    ("t = o", "t = o"),
    ("S | !S", "S | !S"),
    ("S", "S"),
    ("!S", "!S"),
    ("exists x. S(x)", "exists x. S(x)"),
    ("!(A | B)", "!(A | B)"),
    ("exists x. dog_in_the_stables(x)", "exists x. dog_in_the_stables(x)"),
    ("exists x. exists y. (D1(x) & N(y, x))", "exists x. exists y. (D1(x) & N(y, x))"),
    ("D1(a) & N(5,474, a)", "D1(a) & N(5474, a)"),
    ("exists x. exists y. (R1(x) & N(y, x))", "exists x. exists y. (R1(x) & N(y, x))"),
    ("R1(a) & N(1,850, b)", "R1(a) & N(1850, b)"),
    ("R1(b) & N(1850, b)", "R1(b) & N(1850, b)"),
];

/// Closes every free variable except `keep` existentially.
pub fn close_except(f: Formula, keep: &str) -> Formula {
    let free: Vec<String> = f.free_variables().into_iter().filter(|v| v != keep).collect();
    free.into_iter().fold(f, |acc, v| Formula::exists(v, acc))
}

pub fn wh_matrix(f: Formula) -> Formula {
    Formula::and(Formula::atom("Q", vec![Term::var("x")]), close_except(f, "x"))
}

pub fn ordering_scenario(matrix: &Formula) -> Arc<iqgame::Scenario> {
    let presupposition = Formula::exists("x", matrix.clone());
    let json = serde_json::json!({
        "scenario_version": 1,
        "name": "ordering",
        "signature": {"predicates": {"P": 0, "Q": 1, "R": 2}, "constants": ["a", "b", "c"]},
        "premises": [],
        "principal": {"kind": "yesno", "formula": "P"},
        "ra": [
            {"kind": "wh", "var": "x", "formula": matrix.canonical()},
            {"kind": "yesno", "formula": presupposition.canonical()},
            {"kind": "yesno", "formula": Formula::and(presupposition.clone(), Formula::atom("P", vec![])).canonical()},
            {"kind": "yesno", "formula": Formula::not(Formula::not(presupposition)).canonical()},
        ],
    });
    Arc::new(parse_scenario(&json.to_string()).unwrap())
}

pub const INSTANCES: u32 = 200;

fn with_x(f: Formula) -> Formula {
    let free: Vec<String> = f.free_variables().into_iter().filter(|v| v != "x").collect();
    let body = free.into_iter().fold(f, |acc, v| Formula::forall(v, acc));
    Formula::or(Formula::atom("Q", vec![Term::var("x")]), body)
}

/// Premises, witness and (for EI) surrounding context for one rule.
#[derive(Debug, Clone)]
struct Instance {
    premises: Vec<Formula>,
    witness: Option<Witness>,
    context: Vec<Formula>,
}

fn instances(rule: Rule) -> BoxedStrategy<Instance> {
    let plain = |premises: Vec<Formula>| Instance {
        premises,
        witness: None,
        context: Vec::new(),
    };
    let s = || small_sentence(3);
    match rule {
        Rule::ExistentialInstantiation => (small_formula(3), prop::collection::vec(s(), 0..3))
            .prop_map(|(f, context)| Instance {
                premises: vec![Formula::exists("x", with_x(f))],
                witness: Some(Witness::Term(Term::constant("e"))),
                context,
            })
            .boxed(),
        Rule::UniversalInstantiation => (small_formula(3), small_constant())
            .prop_map(|(f, c)| Instance {
                premises: vec![Formula::forall("x", with_x(f))],
                witness: Some(Witness::Term(c)),
                context: Vec::new(),
            })
            .boxed(),
        Rule::ModusPonens => (s(), s(), any::<bool>())
            .prop_map(move |(a, b, swap)| {
                let imp = Formula::implies(a.clone(), b);
                plain(if swap { vec![imp, a] } else { vec![a, imp] })
            })
            .boxed(),
        Rule::ConjunctionElimLeft | Rule::ConjunctionElimRight | Rule::ConjunctionIntro => {
            (s(), s())
                .prop_map(move |(a, b)| {
                    plain(if rule == Rule::ConjunctionIntro {
                        vec![a, b]
                    } else {
                        vec![Formula::and(a, b)]
                    })
                })
                .boxed()
        }
        Rule::DisjunctiveSyllogism => (s(), s(), any::<bool>(), any::<bool>())
            .prop_map(move |(a, b, deny_right, swap)| {
                let neg = Formula::not(if deny_right { b.clone() } else { a.clone() });
                let or = Formula::or(a, b);
                plain(if swap { vec![neg, or] } else { vec![or, neg] })
            })
            .boxed(),
        Rule::DoubleNegationElim => s()
            .prop_map(move |a| plain(vec![Formula::not(Formula::not(a))]))
            .boxed(),
        Rule::EqualitySubstitution => (small_constant(), small_constant(), s(), any::<bool>(), any::<bool>())
            .prop_map(|(u, v, f, flip, swap)| {
                let target = Formula::and(Formula::atom("Q", vec![u.clone()]), f);
                let eq = if flip {
                    Formula::equal(v, u.clone())
                } else {
                    Formula::equal(u.clone(), v)
                };
                Instance {
                    premises: if swap { vec![target, eq] } else { vec![eq, target] },
                    witness: Some(Witness::Term(u)),
                    context: Vec::new(),
                }
            })
            .boxed(),
        Rule::TautologyIntro => s()
            .prop_map(|a| Instance {
                premises: Vec::new(),
                witness: Some(Witness::Formula(a)),
                context: Vec::new(),
            })
            .boxed(),
    }
}

/// Runs `INSTANCES` generated applications of `rule` through the finite-model
/// oracle; the error describes the first unsound instance.
pub fn check_rule(rule: Rule) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: INSTANCES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&instances(rule), |inst| {
            let used: BTreeSet<String> = inst
                .premises
                .iter()
                .chain(&inst.context)
                .flat_map(Formula::constants)
                .collect();
            let conclusion = apply_rule(rule, &inst.premises, inst.witness.as_ref(), &used)
                .map_err(|e| TestCaseError::fail(format!("rule did not apply: {e}")))?;
            if rule == Rule::ExistentialInstantiation {
                let mut before = inst.premises.clone();
                before.extend(inst.context.iter().cloned());
                if satisfiable(&before, 3).unwrap() {
                    before.push(conclusion.clone());
                    prop_assert!(satisfiable(&before, 3).unwrap(), "lost satisfiability: {:?}", before);
                }
            } else {
                prop_assert!(
                    model_check_entailment(&inst.premises, &conclusion, 3).unwrap(),
                    "{:?} does not entail {}",
                    inst.premises.iter().map(Formula::canonical).collect::<Vec<_>>(),
                    conclusion
                );
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}


/// A wh-question is refused until its presupposition is established, then
/// accepted. `route` picks how the presupposition gets established: a direct
/// yes, a conjunction split by elimination, or a double negation removed.
pub fn ordering_case(f: Formula, route: u8) -> Result<(), TestCaseError> {
    let matrix = wh_matrix(f);
    let which = Question::wh("x", matrix.clone()).unwrap();
    let presupposition = which.presupposition();
    let mut game = Game::new(ordering_scenario(&matrix)).unwrap();

    let before = game.state().clone();
    let err = game.ask(&which).unwrap_err();
    prop_assert_eq!(
        err,
        GameError::Blocked {
            question: which.canonical(),
            missing: presupposition.clone()
        }
    );
    prop_assert_eq!(game.state(), &before);

    let last = |g: &Game| g.state().entries.len();
    let (asked, rule) = match route % 3 {
        0 => (presupposition.clone(), None),
        1 => (
            Formula::and(presupposition.clone(), Formula::atom("P", vec![])),
            Some(Rule::ConjunctionElimLeft),
        ),
        _ => (
            Formula::not(Formula::not(presupposition.clone())),
            Some(Rule::DoubleNegationElim),
        ),
    };
    game.ask(&Question::yes_no(asked.clone()).unwrap()).unwrap();
    let seq = last(&game);
    game.record_answer(seq, Answer::Direct(asked)).unwrap();
    if let Some(rule) = rule {
        let step = DeductionStep {
            rule,
            premise_refs: vec![last(&game)],
            witness: None,
            conclusion: presupposition.clone(),
        };
        game.deduce(step).unwrap();
    }
    prop_assert!(game.state().established.contains(&presupposition));
    let added = game.ask(&which).unwrap();
    prop_assert_eq!(added.len(), 1);
    prop_assert!(game.state().open_questions.contains(&added[0]));
    Ok(())
}

/// Runs `test` on `cases` generated values; the error describes the first
/// (shrunk) failure.
pub fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// Presupposition law for one yes-no and one wh-question built from `f`.
pub fn presupposition_case(s: Formula, f: Formula) -> Result<(), TestCaseError> {
    let yn = Question::yes_no(s.clone()).unwrap();
    let p = yn.presupposition();
    prop_assert_eq!(&p, &Formula::or(s.clone(), Formula::not(s)));
    prop_assert_eq!(iqgame::is_tautology_skeleton(&p), Ok(true));
    let matrix = wh_matrix(f);
    let wh = Question::wh("x", matrix.clone()).unwrap();
    prop_assert_eq!(wh.presupposition(), Formula::exists("x", matrix));
    for q in [&yn, &wh] {
        prop_assert_eq!(format!("{}?", q.presupposition().canonical()), q.canonical());
    }
    Ok(())
}

pub fn round_trip_case(f: Formula) -> Result<(), TestCaseError> {
    prop_assert!(f.depth() <= 6);
    let text = f.canonical();
    let back = iqgame::parse_formula(&text, None).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
    prop_assert_eq!(&back, &f, "{}", text);
    prop_assert_eq!(back.canonical(), text);
    Ok(())
}
