//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "forall" IDENT "." unary | "exists" IDENT "." unary | atom
//! atom    := "(" formula ")" | term "=" term | IDENT ("(" term ("," term)* ")")?
//! term    := IDENT | NUMBER
//! ```
//!
//! An identifier in term position is a variable when an enclosing quantifier
//! binds it or when it is supplied as a free query variable. Otherwise it is
//! a constant if it is a numeral or a declared constant, and a variable if it
//! follows the `u`..`z` naming convention. Anything else is a constant.

use thiserror::Error;

use crate::logic::{is_variable_name, Formula, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("predicate `{pred}` takes {expected} argument(s), found {found}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("quantifier binds `{0}`, which is a declared constant")]
    QuantifiedConstant(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at offset {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub position: usize,
}

impl ParseError {
    fn syntax(position: usize, msg: impl Into<String>) -> Self {
        ParseError {
            kind: ParseErrorKind::Syntax(msg.into()),
            position,
        }
    }
}

const KEYWORDS: [&str; 2] = ["forall", "exists"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Bang,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Number(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b if b.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'=' => Tok::Eq,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::DoubleArrow
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                while i < bytes.len() && bytes[i] == b'\'' {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            b if b.is_ascii_digit() => {
                // Digit groups may be separated by commas ("5,474"). A comma
                // only belongs to the numeral when a digit follows it, so
                // argument lists such as N(5, a) still split.
                let mut digits = String::new();
                while i < bytes.len() {
                    if bytes[i].is_ascii_digit() {
                        digits.push(bytes[i] as char);
                        i += 1;
                    } else if bytes[i] == b','
                        && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)
                        && bytes.get(i + 2).is_some_and(u8::is_ascii_digit)
                        && bytes.get(i + 3).is_some_and(u8::is_ascii_digit)
                        && !bytes.get(i + 4).is_some_and(u8::is_ascii_digit)
                    {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Number(digits), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        toks.push((tok, start));
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    sig: Option<&'a Signature>,
    free_vars: &'a [&'a str],
    bound: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(ParseError::syntax(
                at,
                format!("expected {}, found {}", want.describe(), t.describe()),
            )),
            None => Err(ParseError::syntax(
                at,
                format!("expected {}, found end of input", want.describe()),
            )),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.implication()?;
        while self.peek() == Some(&Tok::DoubleArrow) {
            self.bump();
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while self.peek() == Some(&Tok::Bar) {
            self.bump();
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(kw)) if is_keyword(kw) => {
                let universal = kw == "forall";
                self.bump();
                let at = self.offset();
                let var = match self.bump() {
                    Some(Tok::Ident(v)) if !is_keyword(&v) => v,
                    _ => return Err(ParseError::syntax(at, "expected a variable after quantifier")),
                };
                if self.sig.is_some_and(|s| s.has_constant(&var)) {
                    return Err(ParseError {
                        kind: ParseErrorKind::QuantifiedConstant(var),
                        position: at,
                    });
                }
                self.expect(Tok::Dot)?;
                self.bound.push(var.clone());
                let body = self.unary();
                self.bound.pop();
                let body = body?;
                Ok(if universal {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Number(_)) => self.equality(),
            Some(Tok::Ident(_)) if self.peek_at(1) == Some(&Tok::Eq) => self.equality(),
            Some(Tok::Ident(name)) => {
                self.bump();
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.bump();
                    args.push(self.term()?);
                    while self.peek() == Some(&Tok::Comma) {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                }
                self.check_predicate(&name, args.len(), at)?;
                Ok(Formula::Atom(name, args))
            }
            Some(t) => Err(ParseError::syntax(at, format!("unexpected {}", t.describe()))),
            None => Err(ParseError::syntax(at, "unexpected end of input")),
        }
    }

    fn equality(&mut self) -> Result<Formula, ParseError> {
        let left = self.term()?;
        self.expect(Tok::Eq)?;
        let right = self.term()?;
        Ok(Formula::Equal(left, right))
    }

    fn check_predicate(&self, name: &str, found: usize, at: usize) -> Result<(), ParseError> {
        let Some(sig) = self.sig else { return Ok(()) };
        match sig.arity(name) {
            Some(expected) if expected == found => Ok(()),
            Some(expected) => Err(ParseError {
                kind: ParseErrorKind::ArityMismatch {
                    pred: name.to_string(),
                    expected,
                    found,
                },
                position: at,
            }),
            None => Err(ParseError {
                kind: ParseErrorKind::UnknownSymbol(name.to_string()),
                position: at,
            }),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Number(n)) => Ok(Term::Const(n)),
            Some(Tok::Ident(name)) if !is_keyword(&name) => {
                if self.bound.contains(&name) || self.free_vars.contains(&name.as_str()) {
                    return Ok(Term::Var(name));
                }
                if let Some(sig) = self.sig {
                    if sig.has_constant(&name) {
                        return Ok(Term::Const(name));
                    }
                    if sig.arity(&name).is_some() {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnknownSymbol(name),
                            position: at,
                        });
                    }
                }
                Ok(if is_variable_name(&name) {
                    Term::Var(name)
                } else {
                    Term::Const(name)
                })
            }
            Some(t) => Err(ParseError::syntax(at, format!("expected a term, found {}", t.describe()))),
            None => Err(ParseError::syntax(at, "expected a term, found end of input")),
        }
    }
}

/// Parses `text`; with a signature, every atom is checked against the
/// declared predicates and arities.
pub fn parse_formula(text: &str, sig: Option<&Signature>) -> Result<Formula, ParseError> {
    parse_formula_with(text, sig, &[])
}

/// Like [`parse_formula`], reading the names in `free_vars` as variables
/// wherever no quantifier binds them.
pub fn parse_formula_with(
    text: &str,
    sig: Option<&Signature>,
    free_vars: &[&str],
) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
        sig,
        free_vars,
        bound: Vec::new(),
    };
    let f = parser.formula()?;
    if let Some(t) = parser.peek() {
        return Err(ParseError::syntax(
            parser.offset(),
            format!("unexpected trailing {}", t.describe()),
        ));
    }
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
        sig: None,
        free_vars: &[],
        bound: Vec::new(),
    };
    let t = parser.term()?;
    if parser.peek().is_some() {
        return Err(ParseError::syntax(parser.offset(), "expected a single term"));
    }
    Ok(t)
}
