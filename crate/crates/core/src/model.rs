//! Brute-force finite-model search.
//!
//! Enumerates every interpretation of the constants and predicates occurring
//! in a set of sentences over domains of size 1 up to a small bound, with
//! `=` read as identity. Used as an independent oracle for rule soundness.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::logic::{Formula, Term};

pub const MAX_DOMAIN: usize = 4;
/// Largest number of interpretations examined for a single domain size.
pub const MAX_INTERPRETATIONS: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelCheckError {
    #[error("search space of {0} interpretations exceeds the limit of 2^24")]
    SearchSpaceTooLarge(u128),
    #[error("domain size {0} is outside 1..={MAX_DOMAIN}")]
    DomainSize(usize),
    #[error("`{0}` is not a sentence")]
    NotASentence(Formula),
}

#[derive(Debug)]
enum Arg {
    Const(usize),
    // De Bruijn level of the binding quantifier.
    Var(usize),
}

#[derive(Debug)]
enum Node {
    Atom { pred: usize, args: Vec<Arg> },
    Eq(Arg, Arg),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Forall(Box<Node>),
    Exists(Box<Node>),
}

#[derive(Default)]
struct Vocabulary {
    constants: BTreeMap<String, usize>,
    predicates: BTreeMap<(String, usize), usize>,
}

impl Vocabulary {
    fn arg(&mut self, t: &Term, scope: &[String]) -> Arg {
        match t {
            Term::Var(v) => Arg::Var(
                scope
                    .iter()
                    .rposition(|b| b == v)
                    .expect("sentences have no free variables"),
            ),
            Term::Const(c) => {
                let next = self.constants.len();
                Arg::Const(*self.constants.entry(c.clone()).or_insert(next))
            }
        }
    }

    fn compile(&mut self, f: &Formula, scope: &mut Vec<String>) -> Node {
        let bin = |me: &mut Self, g: &Formula, h: &Formula, scope: &mut Vec<String>| {
            (Box::new(me.compile(g, scope)), Box::new(me.compile(h, scope)))
        };
        match f {
            Formula::Atom(p, args) => {
                let next = self.predicates.len();
                let pred = *self.predicates.entry((p.clone(), args.len())).or_insert(next);
                Node::Atom {
                    pred,
                    args: args.iter().map(|a| self.arg(a, scope)).collect(),
                }
            }
            Formula::Equal(a, b) => Node::Eq(self.arg(a, scope), self.arg(b, scope)),
            Formula::Not(g) => Node::Not(Box::new(self.compile(g, scope))),
            Formula::And(g, h) => {
                let (l, r) = bin(self, g, h, scope);
                Node::And(l, r)
            }
            Formula::Or(g, h) => {
                let (l, r) = bin(self, g, h, scope);
                Node::Or(l, r)
            }
            Formula::Implies(g, h) => {
                let (l, r) = bin(self, g, h, scope);
                Node::Implies(l, r)
            }
            Formula::Iff(g, h) => {
                let (l, r) = bin(self, g, h, scope);
                Node::Iff(l, r)
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                scope.push(v.clone());
                let body = Box::new(self.compile(g, scope));
                scope.pop();
                if matches!(f, Formula::Forall(..)) {
                    Node::Forall(body)
                } else {
                    Node::Exists(body)
                }
            }
        }
    }
}

struct Interpretation<'a> {
    size: usize,
    constants: &'a [usize],
    /// Bit offset of each predicate's truth table inside `bits`.
    offsets: &'a [usize],
    bits: u64,
}

impl Interpretation<'_> {
    fn value(&self, a: &Arg, env: &[usize]) -> usize {
        match a {
            Arg::Const(i) => self.constants[*i],
            Arg::Var(level) => env[*level],
        }
    }

    fn eval(&self, node: &Node, env: &mut Vec<usize>) -> bool {
        match node {
            Node::Atom { pred, args } => {
                let mut index = 0;
                for a in args {
                    index = index * self.size + self.value(a, env);
                }
                self.bits >> (self.offsets[*pred] + index) & 1 == 1
            }
            Node::Eq(a, b) => self.value(a, env) == self.value(b, env),
            Node::Not(g) => !self.eval(g, env),
            Node::And(g, h) => self.eval(g, env) && self.eval(h, env),
            Node::Or(g, h) => self.eval(g, env) || self.eval(h, env),
            Node::Implies(g, h) => !self.eval(g, env) || self.eval(h, env),
            Node::Iff(g, h) => self.eval(g, env) == self.eval(h, env),
            Node::Forall(g) => (0..self.size).all(|d| self.with(env, d, g)),
            Node::Exists(g) => (0..self.size).any(|d| self.with(env, d, g)),
        }
    }

    fn with(&self, env: &mut Vec<usize>, d: usize, body: &Node) -> bool {
        env.push(d);
        let out = self.eval(body, env);
        env.pop();
        out
    }
}

struct Problem {
    vocab: Vocabulary,
    nodes: Vec<Node>,
}

impl Problem {
    fn new(formulas: &[&Formula]) -> Result<Self, ModelCheckError> {
        let mut vocab = Vocabulary::default();
        let mut nodes = Vec::with_capacity(formulas.len());
        for f in formulas {
            if !f.is_sentence() {
                return Err(ModelCheckError::NotASentence((*f).clone()));
            }
            nodes.push(vocab.compile(f, &mut Vec::new()));
        }
        Ok(Problem { vocab, nodes })
    }

    fn table_bits(&self, size: usize) -> Vec<usize> {
        let mut sizes = vec![0; self.vocab.predicates.len()];
        for ((_, arity), &i) in &self.vocab.predicates {
            sizes[i] = size.pow(*arity as u32);
        }
        sizes
    }

    fn check_budget(&self, max_domain: usize) -> Result<(), ModelCheckError> {
        if !(1..=MAX_DOMAIN).contains(&max_domain) {
            return Err(ModelCheckError::DomainSize(max_domain));
        }
        for size in 1..=max_domain {
            let bits: usize = self.table_bits(size).iter().sum();
            let assignments = (size as u128).pow(self.vocab.constants.len() as u32);
            let space = assignments.saturating_mul(1u128 << bits.min(120));
            if bits > 64 || space > MAX_INTERPRETATIONS {
                return Err(ModelCheckError::SearchSpaceTooLarge(space));
            }
        }
        Ok(())
    }

    /// Calls `visit` on interpretations until it returns `true`; reports
    /// whether it did.
    fn search(&self, max_domain: usize, mut visit: impl FnMut(&Interpretation<'_>) -> bool) -> bool {
        let k = self.vocab.constants.len();
        for size in 1..=max_domain {
            let widths = self.table_bits(size);
            let mut offsets = Vec::with_capacity(widths.len());
            let mut total = 0;
            for w in &widths {
                offsets.push(total);
                total += w;
            }
            // Constant assignments up to a permutation of the domain:
            // each constant takes a value at most one past the largest so far.
            let mut found = false;
            for_each_canonical_assignment(k, size, &mut |constants| {
                for bits in 0..(1u64 << total) {
                    let interp = Interpretation {
                        size,
                        constants,
                        offsets: &offsets,
                        bits,
                    };
                    if visit(&interp) {
                        found = true;
                        return true;
                    }
                }
                false
            });
            if found {
                return true;
            }
        }
        false
    }
}

/// Restricted-growth enumeration; stops early when `f` returns `true`.
fn for_each_canonical_assignment(k: usize, size: usize, f: &mut impl FnMut(&[usize]) -> bool) {
    fn go(
        i: usize,
        k: usize,
        size: usize,
        top: usize,
        buf: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if i == k {
            return f(buf);
        }
        let limit = (top + 1).min(size);
        for v in 0..limit {
            buf.push(v);
            let stop = go(i + 1, k, size, top.max(v + 1), buf, f);
            buf.pop();
            if stop {
                return true;
            }
        }
        false
    }
    go(0, k, size, 0, &mut Vec::with_capacity(k), f);
}

/// True iff every interpretation over domains of size `1..=max_domain` that
/// satisfies all `premises` also satisfies `conclusion`.
pub fn model_check_entailment(
    premises: &[Formula],
    conclusion: &Formula,
    max_domain: usize,
) -> Result<bool, ModelCheckError> {
    let mut all: Vec<&Formula> = premises.iter().collect();
    all.push(conclusion);
    let problem = Problem::new(&all)?;
    problem.check_budget(max_domain)?;
    let (goal, hyps) = problem.nodes.split_last().expect("conclusion present");
    let mut env = Vec::new();
    let counterexample = problem.search(max_domain, |m| {
        hyps.iter().all(|h| m.eval(h, &mut env)) && !m.eval(goal, &mut env)
    });
    Ok(!counterexample)
}

/// True iff some interpretation over a domain of size `1..=max_domain`
/// satisfies every formula.
pub fn satisfiable(formulas: &[Formula], max_domain: usize) -> Result<bool, ModelCheckError> {
    let refs: Vec<&Formula> = formulas.iter().collect();
    let problem = Problem::new(&refs)?;
    problem.check_budget(max_domain)?;
    let mut env = Vec::new();
    Ok(problem.search(max_domain, |m| problem.nodes.iter().all(|n| m.eval(n, &mut env))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s, None).unwrap()
    }

    #[test]
    fn existential_generalisation_is_valid() {
        assert_eq!(model_check_entailment(&[p("D(d)")], &p("exists x. D(x)"), 3), Ok(true));
    }

    #[test]
    fn modus_ponens_instance() {
        assert_eq!(
            model_check_entailment(&[p("!B(d, t)"), p("!B(d, t) -> t = o")], &p("t = o"), 3),
            Ok(true)
        );
    }

    #[test]
    fn distinct_constants_may_differ() {
        assert_eq!(model_check_entailment(&[p("D(d)")], &p("D(e)"), 2), Ok(false));
    }

    #[test]
    fn domain_size_matters() {
        // Two distinct elements exist only in domains of size two or more.
        let two = p("exists x. exists y. !x = y");
        assert_eq!(model_check_entailment(&[], &two, 1), Ok(false));
        assert_eq!(satisfiable(std::slice::from_ref(&two), 1), Ok(false));
        assert_eq!(satisfiable(&[two], 2), Ok(true));
        assert_eq!(satisfiable(&[p("P"), p("!P")], 3), Ok(false));
    }

    #[test]
    fn equality_is_identity() {
        assert_eq!(
            model_check_entailment(&[p("a = b"), p("P(a)")], &p("P(b)"), 3),
            Ok(true)
        );
        assert_eq!(model_check_entailment(&[p("a = b")], &p("b = a"), 3), Ok(true));
    }

    #[test]
    fn uniqueness_chain_is_sound() {
        let premises = [
            p("forall y. (!B(d, y) -> y = c)"),
            p("!B(d, o)"),
            p("!B(d, t)"),
        ];
        assert_eq!(model_check_entailment(&premises, &p("t = o"), 3), Ok(true));
        // Without the fact about the owner the conclusion does not follow.
        assert_eq!(model_check_entailment(&premises[..1], &p("t = o"), 3), Ok(false));
    }

    #[test]
    fn rejects_oversized_searches() {
        let wide = p("R(a, b) & S(b, c) & T(c, d) & U(d, e)");
        assert!(matches!(
            model_check_entailment(&[wide], &p("P"), 3),
            Err(ModelCheckError::SearchSpaceTooLarge(_))
        ));
        assert_eq!(
            model_check_entailment(&[], &p("P"), 5),
            Err(ModelCheckError::DomainSize(5))
        );
        assert!(matches!(
            model_check_entailment(&[], &p("P(x)"), 2),
            Err(ModelCheckError::NotASentence(_))
        ));
    }
}
