mod common;

use std::collections::BTreeSet;

use common::*;
use iqgame::erotetics::QuestionKind;
use iqgame::{
    askable, is_direct_answer, is_tautology_skeleton, match_instance, model_check_entailment,
    parse_formula, Answer, Askability, Formula, Game, Question, Term,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(f in formula(6)) {
        round_trip_case(f)?;
    }

    #[test]
    fn presupposition_of_yes_no(s in sentence(4)) {
        let q = Question::yes_no(s.clone()).unwrap();
        let p = q.presupposition();
        prop_assert_eq!(&p, &Formula::or(s.clone(), Formula::not(s)));
        prop_assert_eq!(is_tautology_skeleton(&p), Ok(true));
        prop_assert_eq!(format!("{}?", p.canonical()), q.canonical());
    }

    #[test]
    fn presupposition_of_wh(f in formula(4)) {
        let matrix = wh_matrix(f);
        let q = Question::wh("x", matrix.clone()).unwrap();
        prop_assert_eq!(q.presupposition(), Formula::exists("x", matrix));
        prop_assert_eq!(format!("{}?", q.presupposition().canonical()), q.canonical());
        let reparsed = Question::parse(&q.canonical(), None).unwrap();
        prop_assert_eq!(reparsed.kind(), QuestionKind::Wh);
        prop_assert_eq!(reparsed, q);
    }

    #[test]
    fn free_variable_oracle(f in formula(5), v in prop::sample::select(&VARS[..])) {
        // A variable is free exactly when substituting a fresh constant for
        // it changes the formula.
        let changed = f.substitute(v, &Term::constant("fresh_k")) != f;
        prop_assert_eq!(f.free_variables().contains(v), changed);
    }

    #[test]
    fn substitution_never_captures(
        f in formula(5),
        v in prop::sample::select(&VARS[..]),
        w in prop::sample::select(&VARS[..]),
    ) {
        let g = f.substitute(v, &Term::var(w));
        let mut expected: BTreeSet<String> = f.free_variables();
        let was_free = expected.remove(v);
        if was_free {
            expected.insert(w.to_string());
        }
        prop_assert_eq!(g.free_variables(), expected);
    }

    #[test]
    fn closed_substitution_removes_variable(
        f in formula(5),
        v in prop::sample::select(&VARS[..]),
        c in prop::sample::select(&CONSTS[..]),
    ) {
        let g = f.substitute(v, &Term::constant(c));
        let mut expected = f.free_variables();
        expected.remove(v);
        prop_assert_eq!(g.free_variables(), expected);
        prop_assert_eq!(g.depth(), f.depth());
    }

    #[test]
    fn match_instance_recovers_witness(
        f in formula(5),
        c in prop::sample::select(&CONSTS[..]),
    ) {
        let matrix = wh_matrix(f);
        let candidate = matrix.substitute("x", &Term::constant(c));
        let found = match_instance(&matrix, "x", &candidate);
        prop_assert_eq!(found, Some(Term::constant(c)));
    }

    #[test]
    fn match_instance_is_sound(f in formula(4), g in formula(4)) {
        let matrix = wh_matrix(f);
        if let Some(u) = match_instance(&matrix, "x", &g) {
            prop_assert!(matrix.substitute("x", &u).equiv_modulo_symmetry(&g));
        }
    }

    #[test]
    fn askable_is_monotone(
        f in small_formula(3),
        base in prop::collection::vec(small_sentence(2), 0..4),
        extra in prop::collection::vec(small_sentence(2), 0..4),
        include in any::<bool>(),
    ) {
        let q = Question::wh("x", wh_matrix(f)).unwrap();
        let mut small: BTreeSet<Formula> = base.into_iter().collect();
        if include {
            small.insert(q.presupposition());
        }
        let mut large = small.clone();
        large.extend(extra);
        if askable(&q, &small).is_askable() {
            prop_assert!(askable(&q, &large).is_askable());
        }
        let yn = Question::yes_no(q.presupposition()).unwrap();
        prop_assert_eq!(askable(&yn, &BTreeSet::new()), Askability::Askable);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn direct_answers_entail_presupposition(
        s in small_sentence(2),
        f in small_formula(2),
        c in small_constant(),
    ) {
        let yn = Question::yes_no(s.clone()).unwrap();
        for answer in [s.clone(), Formula::not(s)] {
            prop_assert!(is_direct_answer(&yn, &answer));
            prop_assert!(model_check_entailment(&[answer], &yn.presupposition(), 3).unwrap());
        }
        let matrix = wh_matrix(f);
        let wh = Question::wh("x", matrix.clone()).unwrap();
        let answer = matrix.substitute("x", &c);
        prop_assert!(is_direct_answer(&wh, &answer));
        prop_assert!(model_check_entailment(&[answer], &wh.presupposition(), 3).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ordering_discipline(f in small_formula(3), route in 0..3u8) {
        ordering_case(f, route)?;
    }

    #[test]
    fn entries_only_grow(f in small_formula(2), answers in prop::collection::vec(any::<bool>(), 1..5)) {
        let matrix = wh_matrix(f);
        let presupposition = Formula::exists("x", matrix.clone());
        let mut game = Game::new(ordering_scenario(&matrix)).unwrap();
        let yn = Question::yes_no(presupposition.clone()).unwrap();
        for yes in answers {
            let before = game.state().clone();
            game.ask(&yn).unwrap();
            let seq = game.state().entries.len();
            let answer = if yes { presupposition.clone() } else { Formula::not(presupposition.clone()) };
            game.record_answer(seq, Answer::Direct(answer)).unwrap();
            let after = game.state();
            prop_assert!(after.entries.starts_with(&before.entries));
            prop_assert!(before.established.is_subset(&after.established));
            prop_assert!(after.entries.iter().enumerate().all(|(i, e)| e.seq == i + 1));
        }
    }
}

#[test]
fn corpus_round_trips() {
    for (input, canonical) in CORPUS {
        let f = parse_formula(input, None).unwrap_or_else(|e| panic!("{input}: {e}"));
        assert_eq!(f.canonical(), canonical, "{input}");
        assert_eq!(parse_formula(canonical, None).unwrap(), f, "{canonical}");
    }
}

#[test]
fn corpus_unicode_matches_written_notation() {
    let pairs = [
        ("exists x. D(x) | !exists x. D(x)", "∃x D(x) ∨ ¬∃x D(x)"),
        ("exists z. forall y. (!B(d, y) -> y = z)", "∃z ∀y (¬B(d, y) → y = z)"),
        ("D1(a) & N(5,474, a)", "D1(a) ∧ N(5474, a)"),
        ("exists x. exists y. (D1(x) & N(y, x))", "∃x ∃y (D1(x) ∧ N(y, x))"),
    ];
    for (input, shown) in pairs {
        assert_eq!(parse_formula(input, None).unwrap().unicode(), shown);
    }
}
