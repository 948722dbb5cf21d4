//! First-order syntax with equality.
//!
//! Terms are variables or constants (no function symbols). Numerals such as
//! `5474` are plain constants named by their digits. Formulas are immutable
//! trees; every operation here is a pure function over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::parser;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Term::Const(_))
    }

    pub fn is_numeral(&self) -> bool {
        matches!(self, Term::Const(n) if is_numeral(n))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Equal(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

// Small constructors; they keep tests and builtin tables readable.
impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(pred.into(), args)
    }

    pub fn equal(left: Term, right: Term) -> Self {
        Formula::Equal(left, right)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Self {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Self {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Formula, g: Formula) -> Self {
        Formula::Implies(Box::new(f), Box::new(g))
    }

    pub fn iff(f: Formula, g: Formula) -> Self {
        Formula::Iff(Box::new(f), Box::new(g))
    }

    pub fn forall(var: impl Into<String>, f: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(f))
    }

    pub fn exists(var: impl Into<String>, f: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(f))
    }

    /// Canonical ASCII text; `parse_formula` reads it back to the same tree.
    pub fn canonical(&self) -> String {
        self.to_string()
    }

    /// Rendering with the usual logical symbols (∧ ∨ ¬ → ↔ ∀ ∃). Output only.
    pub fn unicode(&self) -> String {
        let mut out = String::new();
        write_formula(&mut out, self, Notation::Unicode);
        out
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Every constant occurring anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Predicate names with the argument counts they are used at.
    pub fn predicates(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p, args) = f {
                out.insert((p.clone(), args.len()));
            }
        });
        out
    }

    /// Variables occurring anywhere, bound or free, including binder names.
    pub fn all_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Forall(v, _) | Formula::Exists(v, _) => {
                out.insert(v.clone());
            }
            Formula::Atom(_, args) => out.extend(
                args.iter()
                    .filter(|t| matches!(t, Term::Var(_)))
                    .map(|t| t.name().to_string()),
            ),
            Formula::Equal(a, b) => out.extend(
                [a, b]
                    .into_iter()
                    .filter(|t| matches!(t, Term::Var(_)))
                    .map(|t| t.name().to_string()),
            ),
            _ => {}
        });
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Equal(..) => 0,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.depth(),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Implies(f, g) | Formula::Iff(f, g) => {
                1 + f.depth().max(g.depth())
            }
        }
    }

    /// Pre-order traversal over subformulas.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Atom(..) | Formula::Equal(..) => {}
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit(f),
            Formula::And(g, h) | Formula::Or(g, h) | Formula::Implies(g, h) | Formula::Iff(g, h) => {
                g.visit(f);
                h.visit(f);
            }
        }
    }

    fn visit_terms<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        self.visit(&mut |g| match g {
            Formula::Atom(_, args) => args.iter().for_each(&mut *f),
            Formula::Equal(a, b) => {
                f(a);
                f(b);
            }
            _ => {}
        });
    }

    /// Capture-avoiding substitution of `term` for the free occurrences of `var`.
    ///
    /// A binder that would capture a variable of `term` is renamed by appending
    /// apostrophes until the name is unused.
    pub fn substitute(&self, var: &str, term: &Term) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter().map(|a| subst_term(a, var, term)).collect(),
            ),
            Formula::Equal(a, b) => Formula::Equal(subst_term(a, var, term), subst_term(b, var, term)),
            Formula::Not(f) => Formula::not(f.substitute(var, term)),
            Formula::And(f, g) => Formula::and(f.substitute(var, term), g.substitute(var, term)),
            Formula::Or(f, g) => Formula::or(f.substitute(var, term), g.substitute(var, term)),
            Formula::Implies(f, g) => {
                Formula::implies(f.substitute(var, term), g.substitute(var, term))
            }
            Formula::Iff(f, g) => Formula::iff(f.substitute(var, term), g.substitute(var, term)),
            Formula::Forall(v, body) => {
                let (v, body) = subst_under_binder(v, body, var, term);
                Formula::Forall(v, Box::new(body))
            }
            Formula::Exists(v, body) => {
                let (v, body) = subst_under_binder(v, body, var, term);
                Formula::Exists(v, Box::new(body))
            }
        }
    }

    /// Replaces every occurrence of the constant `from` by `to`.
    pub fn replace_constant(&self, from: &str, to: &Term) -> Formula {
        let swap = |t: &Term| match t {
            Term::Const(c) if c == from => to.clone(),
            _ => t.clone(),
        };
        match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(swap).collect()),
            Formula::Equal(a, b) => Formula::Equal(swap(a), swap(b)),
            Formula::Not(f) => Formula::not(f.replace_constant(from, to)),
            Formula::And(f, g) => {
                Formula::and(f.replace_constant(from, to), g.replace_constant(from, to))
            }
            Formula::Or(f, g) => Formula::or(f.replace_constant(from, to), g.replace_constant(from, to)),
            Formula::Implies(f, g) => {
                Formula::implies(f.replace_constant(from, to), g.replace_constant(from, to))
            }
            Formula::Iff(f, g) => Formula::iff(f.replace_constant(from, to), g.replace_constant(from, to)),
            Formula::Forall(v, f) => Formula::forall(v.clone(), f.replace_constant(from, to)),
            Formula::Exists(v, f) => Formula::exists(v.clone(), f.replace_constant(from, to)),
        }
    }

    /// Structural equality up to renaming of bound variables and orientation
    /// of equality atoms.
    pub fn equiv_modulo_symmetry(&self, other: &Formula) -> bool {
        match_instances(self, &[], other).is_some()
    }
}

fn subst_term(t: &Term, var: &str, replacement: &Term) -> Term {
    match t {
        Term::Var(v) if v == var => replacement.clone(),
        _ => t.clone(),
    }
}

fn subst_under_binder(bound: &str, body: &Formula, var: &str, term: &Term) -> (String, Formula) {
    if bound == var || !body.free_variables().contains(var) {
        return (bound.to_string(), body.clone());
    }
    match term {
        Term::Var(tv) if tv == bound => {
            let mut avoid = body.all_variables();
            avoid.insert(tv.clone());
            avoid.insert(var.to_string());
            let fresh = fresh_variable(bound, &avoid);
            let renamed = body.substitute(bound, &Term::Var(fresh.clone()));
            (fresh, renamed.substitute(var, term))
        }
        _ => (bound.to_string(), body.substitute(var, term)),
    }
}

/// `base` with apostrophes appended until it is not in `avoid`.
pub fn fresh_variable(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mut note = |t: &Term, bound: &Vec<String>| {
        if let Term::Var(v) = t {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
    };
    match f {
        Formula::Atom(_, args) => args.iter().for_each(|a| note(a, bound)),
        Formula::Equal(a, b) => {
            note(a, bound);
            note(b, bound);
        }
        Formula::Not(g) => collect_free(g, bound, out),
        Formula::And(g, h) | Formula::Or(g, h) | Formula::Implies(g, h) | Formula::Iff(g, h) => {
            collect_free(g, bound, out);
            collect_free(h, bound, out);
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            bound.push(v.clone());
            collect_free(g, bound, out);
            bound.pop();
        }
    }
}

/// Finds the closed term `u` such that `candidate` is `matrix[var := u]`,
/// comparing equality atoms in either orientation.
///
/// Returns `None` when `var` has no free occurrence in `matrix`: every term
/// would then be a witness and none is determined.
pub fn match_instance(matrix: &Formula, var: &str, candidate: &Formula) -> Option<Term> {
    match_instances(matrix, &[var], candidate)?.remove(var)
}

/// Simultaneous version of [`match_instance`] over several variables.
///
/// The returned map binds each variable of `vars` that occurs free in
/// `matrix`.
pub fn match_instances(
    matrix: &Formula,
    vars: &[&str],
    candidate: &Formula,
) -> Option<BTreeMap<String, Term>> {
    let mut matcher = Matcher {
        targets: vars,
        binders: Vec::new(),
    };
    let bindings = matcher.formula(matrix, candidate, BTreeMap::new())?;
    let free = matrix.free_variables();
    if vars.iter().any(|v| free.contains(*v) && !bindings.contains_key(*v)) {
        return None;
    }
    Some(bindings)
}

struct Matcher<'v> {
    targets: &'v [&'v str],
    // Pairs of (pattern binder, candidate binder), innermost last.
    binders: Vec<(String, String)>,
}

type Bindings = BTreeMap<String, Term>;

impl Matcher<'_> {
    fn term(&self, pat: &Term, cand: &Term, mut b: Bindings) -> Option<Bindings> {
        let pat_bound = match pat {
            Term::Var(v) => self.binders.iter().rposition(|(p, _)| p == v),
            Term::Const(_) => None,
        };
        let cand_bound = match cand {
            Term::Var(v) => self.binders.iter().rposition(|(_, c)| c == v),
            Term::Const(_) => None,
        };
        match (pat, pat_bound) {
            (Term::Var(_), Some(i)) => (cand_bound == Some(i)).then_some(b),
            (Term::Var(v), None) if self.targets.contains(&v.as_str()) => {
                // The instantiating term must be closed at this position.
                if !cand.is_closed() {
                    return None;
                }
                match b.get(v) {
                    Some(prev) => (prev == cand).then_some(b),
                    None => {
                        b.insert(v.clone(), cand.clone());
                        Some(b)
                    }
                }
            }
            (Term::Var(_), None) => (cand_bound.is_none() && pat == cand).then_some(b),
            (Term::Const(_), _) => (pat == cand).then_some(b),
        }
    }

    fn formula(&mut self, pat: &Formula, cand: &Formula, b: Bindings) -> Option<Bindings> {
        match (pat, cand) {
            (Formula::Atom(p, pa), Formula::Atom(q, ca)) if p == q && pa.len() == ca.len() => pa
                .iter()
                .zip(ca)
                .try_fold(b, |b, (x, y)| self.term(x, y, b)),
            (Formula::Equal(l, r), Formula::Equal(cl, cr)) => {
                let straight = self
                    .term(l, cl, b.clone())
                    .and_then(|b| self.term(r, cr, b));
                straight.or_else(|| self.term(l, cr, b).and_then(|b| self.term(r, cl, b)))
            }
            (Formula::Not(f), Formula::Not(g)) => self.formula(f, g, b),
            (Formula::And(f1, f2), Formula::And(g1, g2))
            | (Formula::Or(f1, f2), Formula::Or(g1, g2))
            | (Formula::Implies(f1, f2), Formula::Implies(g1, g2))
            | (Formula::Iff(f1, f2), Formula::Iff(g1, g2)) => {
                // Equality atoms may match in two orientations, so a later
                // failure can require revisiting an earlier choice.
                self.pair(f1, f2, g1, g2, b)
            }
            (Formula::Forall(v, f), Formula::Forall(w, g))
            | (Formula::Exists(v, f), Formula::Exists(w, g)) => {
                self.binders.push((v.clone(), w.clone()));
                let out = self.formula(f, g, b);
                self.binders.pop();
                out
            }
            _ => None,
        }
    }

    fn pair(
        &mut self,
        f1: &Formula,
        f2: &Formula,
        g1: &Formula,
        g2: &Formula,
        b: Bindings,
    ) -> Option<Bindings> {
        for first in self.all_matches(f1, g1, b) {
            if let Some(done) = self.formula(f2, g2, first) {
                return Some(done);
            }
        }
        None
    }

    /// All distinct binding extensions under which `pat` matches `cand`.
    fn all_matches(&mut self, pat: &Formula, cand: &Formula, b: Bindings) -> Vec<Bindings> {
        match (pat, cand) {
            (Formula::Equal(l, r), Formula::Equal(cl, cr)) => {
                let mut out = Vec::new();
                if let Some(x) = self.term(l, cl, b.clone()).and_then(|b| self.term(r, cr, b)) {
                    out.push(x);
                }
                if let Some(y) = self.term(l, cr, b).and_then(|b| self.term(r, cl, b)) {
                    if !out.contains(&y) {
                        out.push(y);
                    }
                }
                out
            }
            (Formula::Not(f), Formula::Not(g)) => self.all_matches(f, g, b),
            (Formula::And(f1, f2), Formula::And(g1, g2))
            | (Formula::Or(f1, f2), Formula::Or(g1, g2))
            | (Formula::Implies(f1, f2), Formula::Implies(g1, g2))
            | (Formula::Iff(f1, f2), Formula::Iff(g1, g2)) => {
                let mut out = Vec::new();
                for first in self.all_matches(f1, g1, b) {
                    for done in self.all_matches(f2, g2, first) {
                        if !out.contains(&done) {
                            out.push(done);
                        }
                    }
                }
                out
            }
            (Formula::Forall(v, f), Formula::Forall(w, g))
            | (Formula::Exists(v, f), Formula::Exists(w, g)) => {
                self.binders.push((v.clone(), w.clone()));
                let out = self.all_matches(f, g, b);
                self.binders.pop();
                out
            }
            _ => self.formula(pat, cand, b).into_iter().collect(),
        }
    }
}

/// Matches the identifier grammar `[A-Za-z_][A-Za-z0-9_]*`, optionally
/// followed by apostrophes (produced by fresh renaming).
pub fn is_identifier(name: &str) -> bool {
    let core = name.trim_end_matches('\'');
    let mut chars = core.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !parser::is_keyword(core)
}

pub fn is_numeral(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_digit())
}

/// Naming convention for free identifiers: a single letter `u`..`z`,
/// optionally followed by digits, underscores or apostrophes.
pub fn is_variable_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('u'..='z'))
        && chars.all(|c| c.is_ascii_digit() || c == '_' || c == '\'')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("`{0}` is not a valid identifier")]
    BadName(String),
    #[error("`{0}` is declared both as a predicate and as a constant")]
    Clash(String),
    #[error("constant `{0}` would read as a variable; constants may not be named like u..z variables")]
    VariableLikeConstant(String),
}

/// Declared predicates (with arities) and constants.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    #[serde(default)]
    pub predicates: BTreeMap<String, usize>,
    #[serde(default)]
    pub constants: BTreeSet<String>,
}

impl Signature {
    pub fn new(
        predicates: impl IntoIterator<Item = (impl Into<String>, usize)>,
        constants: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, SignatureError> {
        let sig = Signature {
            predicates: predicates.into_iter().map(|(p, n)| (p.into(), n)).collect(),
            constants: constants.into_iter().map(Into::into).collect(),
        };
        sig.validate()?;
        Ok(sig)
    }

    pub fn validate(&self) -> Result<(), SignatureError> {
        for p in self.predicates.keys() {
            if !is_identifier(p) {
                return Err(SignatureError::BadName(p.clone()));
            }
        }
        for c in &self.constants {
            if !(is_identifier(c) || is_numeral(c)) {
                return Err(SignatureError::BadName(c.clone()));
            }
            if is_variable_name(c) {
                return Err(SignatureError::VariableLikeConstant(c.clone()));
            }
            if self.predicates.contains_key(c) {
                return Err(SignatureError::Clash(c.clone()));
            }
        }
        Ok(())
    }

    pub fn arity(&self, pred: &str) -> Option<usize> {
        self.predicates.get(pred).copied()
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }
}

// Binding strength used by the printer; larger binds tighter.
const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_UNARY: u8 = 5;
const PREC_ATOM: u8 = 6;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Atom(..) | Formula::Equal(..) => PREC_ATOM,
        Formula::Not(_) | Formula::Forall(..) | Formula::Exists(..) => PREC_UNARY,
        Formula::And(..) => PREC_AND,
        Formula::Or(..) => PREC_OR,
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Iff(..) => PREC_IFF,
    }
}

#[derive(Clone, Copy)]
enum Notation {
    Ascii,
    Unicode,
}

struct Symbols {
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    iff: &'static str,
}

impl Notation {
    fn symbols(self) -> Symbols {
        match self {
            Notation::Ascii => Symbols {
                not: "!",
                and: " & ",
                or: " | ",
                implies: " -> ",
                iff: " <-> ",
            },
            Notation::Unicode => Symbols {
                not: "¬",
                and: " ∧ ",
                or: " ∨ ",
                implies: " → ",
                iff: " ↔ ",
            },
        }
    }

    fn quantifier(self, universal: bool, var: &str) -> String {
        match (self, universal) {
            (Notation::Ascii, true) => format!("forall {var}. "),
            (Notation::Ascii, false) => format!("exists {var}. "),
            (Notation::Unicode, true) => format!("∀{var} "),
            (Notation::Unicode, false) => format!("∃{var} "),
        }
    }
}

fn write_child(out: &mut String, f: &Formula, parens: bool, n: Notation) {
    if parens {
        out.push('(');
        write_formula(out, f, n);
        out.push(')');
    } else {
        write_formula(out, f, n);
    }
}

fn write_formula(out: &mut String, f: &Formula, n: Notation) {
    let sym = n.symbols();
    match f {
        Formula::Atom(p, args) => {
            out.push_str(p);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(a.name());
                }
                out.push(')');
            }
        }
        Formula::Equal(a, b) => {
            out.push_str(a.name());
            out.push_str(" = ");
            out.push_str(b.name());
        }
        Formula::Not(g) => {
            out.push_str(sym.not);
            write_child(out, g, precedence(g) < PREC_UNARY, n);
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            out.push_str(&n.quantifier(matches!(f, Formula::Forall(..)), v));
            write_child(out, g, precedence(g) < PREC_UNARY, n);
        }
        Formula::And(g, h) | Formula::Or(g, h) | Formula::Iff(g, h) => {
            // Left-associative levels.
            let level = precedence(f);
            let op = match f {
                Formula::And(..) => sym.and,
                Formula::Or(..) => sym.or,
                _ => sym.iff,
            };
            write_child(out, g, precedence(g) < level, n);
            out.push_str(op);
            write_child(out, h, precedence(h) <= level, n);
        }
        Formula::Implies(g, h) => {
            write_child(out, g, precedence(g) <= PREC_IMPLIES, n);
            out.push_str(sym.implies);
            write_child(out, h, precedence(h) < PREC_IMPLIES, n);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_formula(&mut out, self, Notation::Ascii);
        f.write_str(&out)
    }
}

// Formulas travel through JSON as canonical text. Only sentences are
// guaranteed to read back identically without extra context.
impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parser::parse_formula(&text, None).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parser::parse_term(&text).map_err(serde::de::Error::custom)
    }
}
