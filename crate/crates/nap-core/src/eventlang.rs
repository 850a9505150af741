//! Parser and evaluator for propositional event expressions.
//!
//! Grammar (tightest first): `!` > `&` > `|` > `->` > `<->`, with `->`
//! right-associative and the other binary operators left-associative.
//! Atoms are identifiers `[A-Za-z_][A-Za-z0-9_]*`; `T` and `F` are the
//! constants (and therefore reserved). Evaluation is by sets: NOT is
//! complement, AND intersection, OR union, with `->` and `<->` desugared
//! classically.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::events::{Event, SampleSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventExpr {
    Atom(String),
    Top,
    Bottom,
    Not(Box<EventExpr>),
    And(Box<EventExpr>, Box<EventExpr>),
    Or(Box<EventExpr>, Box<EventExpr>),
    Implies(Box<EventExpr>, Box<EventExpr>),
    Iff(Box<EventExpr>, Box<EventExpr>),
}

/// Syntax error with a byte position and the token classes that would have
/// been accepted there.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: expected {}; found {found}", expected.join(" or "))]
pub struct ExprParseError {
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound atom '{0}'")]
    UnboundAtom(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{}'", s),
            Tok::Bang => "'!'".to_string(),
            Tok::Amp => "'&'".to_string(),
            Tok::Pipe => "'|'".to_string(),
            Tok::Arrow => "'->'".to_string(),
            Tok::DArrow => "'<->'".to_string(),
            Tok::LParen => "'('".to_string(),
            Tok::RParen => "')'".to_string(),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<(Tok, usize)>, ExprParseError> {
    let mut out = Vec::new();
    let mut it = input.char_indices().peekable();
    while let Some(&(at, ch)) = it.peek() {
        match ch {
            c if c.is_whitespace() => {
                it.next();
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&(_, c)) = it.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(ident), at));
            }
            '!' => {
                it.next();
                out.push((Tok::Bang, at));
            }
            '&' => {
                it.next();
                out.push((Tok::Amp, at));
            }
            '|' => {
                it.next();
                out.push((Tok::Pipe, at));
            }
            '(' => {
                it.next();
                out.push((Tok::LParen, at));
            }
            ')' => {
                it.next();
                out.push((Tok::RParen, at));
            }
            '-' => {
                it.next();
                match it.peek() {
                    Some(&(_, '>')) => {
                        it.next();
                        out.push((Tok::Arrow, at));
                    }
                    _ => {
                        return Err(ExprParseError {
                            position: at,
                            expected: vec!["'->'".to_string()],
                            found: "'-'".to_string(),
                        })
                    }
                }
            }
            '<' => {
                it.next();
                let ok = matches!(it.peek(), Some(&(_, '-')));
                if ok {
                    it.next();
                }
                match (ok, it.peek()) {
                    (true, Some(&(_, '>'))) => {
                        it.next();
                        out.push((Tok::DArrow, at));
                    }
                    _ => {
                        return Err(ExprParseError {
                            position: at,
                            expected: vec!["'<->'".to_string()],
                            found: "'<'".to_string(),
                        })
                    }
                }
            }
            other => {
                return Err(ExprParseError {
                    position: at,
                    expected: vec!["an atom".to_string(), "an operator".to_string()],
                    found: format!("'{}'", other),
                })
            }
        }
    }
    out.push((Tok::End, input.len()));
    Ok(out)
}

/// Parses an event expression.
pub fn parse(input: &str) -> Result<EventExpr, ExprParseError> {
    let tokens = tokenize(input)?;
    let mut p = ExprParser { tokens, pos: 0 };
    let e = p.iff()?;
    let (tok, at) = p.peek();
    if *tok != Tok::End {
        return Err(ExprParseError {
            position: at,
            expected: vec!["an operator".to_string(), "end of input".to_string()],
            found: tok.describe(),
        });
    }
    Ok(e)
}

struct ExprParser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> (&Tok, usize) {
        let (t, at) = &self.tokens[self.pos];
        (t, *at)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn iff(&mut self) -> Result<EventExpr, ExprParseError> {
        let mut acc = self.implies()?;
        while matches!(self.peek().0, Tok::DArrow) {
            self.bump();
            let rhs = self.implies()?;
            acc = EventExpr::Iff(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn implies(&mut self) -> Result<EventExpr, ExprParseError> {
        let lhs = self.or()?;
        if matches!(self.peek().0, Tok::Arrow) {
            self.bump();
            let rhs = self.implies()?; // right-associative
            Ok(EventExpr::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<EventExpr, ExprParseError> {
        let mut acc = self.and()?;
        while matches!(self.peek().0, Tok::Pipe) {
            self.bump();
            let rhs = self.and()?;
            acc = EventExpr::Or(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<EventExpr, ExprParseError> {
        let mut acc = self.unary()?;
        while matches!(self.peek().0, Tok::Amp) {
            self.bump();
            let rhs = self.unary()?;
            acc = EventExpr::And(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<EventExpr, ExprParseError> {
        if matches!(self.peek().0, Tok::Bang) {
            self.bump();
            Ok(EventExpr::Not(Box::new(self.unary()?)))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<EventExpr, ExprParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Ident(name) if name == "T" => Ok(EventExpr::Top),
            Tok::Ident(name) if name == "F" => Ok(EventExpr::Bottom),
            Tok::Ident(name) => Ok(EventExpr::Atom(name)),
            Tok::LParen => {
                let e = self.iff()?;
                let (t, at2) = self.bump();
                if t == Tok::RParen {
                    Ok(e)
                } else {
                    Err(ExprParseError {
                        position: at2,
                        expected: vec!["')'".to_string()],
                        found: t.describe(),
                    })
                }
            }
            other => Err(ExprParseError {
                position: at,
                expected: vec![
                    "an atom".to_string(),
                    "'T'".to_string(),
                    "'F'".to_string(),
                    "'!'".to_string(),
                    "'('".to_string(),
                ],
                found: other.describe(),
            }),
        }
    }
}

/// Evaluates an expression to an event under a label binding.
pub fn evaluate(
    e: &EventExpr,
    binding: &HashMap<String, Event>,
    space: &SampleSpace,
) -> Result<Event, EvalError> {
    let full = space.full_event();
    eval_with(e, full, &|label| binding.get(label).copied())
}

/// Resolves an expression over the normal atoms of a table: atom `i` is the
/// singleton `{i}`, and the result is the set of atom indices whose
/// disjunction is equivalent to the expression.
pub fn normal_form(e: &EventExpr, atoms: &[String]) -> Result<Vec<usize>, EvalError> {
    let full = Event::all(atoms.len());
    let ev = eval_with(e, full, &|label| {
        atoms.iter().position(|a| a == label).map(Event::singleton)
    })?;
    Ok(ev.indices().filter(|&i| i < atoms.len()).collect())
}

fn eval_with(
    e: &EventExpr,
    full: Event,
    lookup: &impl Fn(&str) -> Option<Event>,
) -> Result<Event, EvalError> {
    Ok(match e {
        EventExpr::Atom(label) => {
            lookup(label).ok_or_else(|| EvalError::UnboundAtom(label.clone()))?
        }
        EventExpr::Top => full,
        EventExpr::Bottom => Event::EMPTY,
        EventExpr::Not(a) => full.difference(eval_with(a, full, lookup)?),
        EventExpr::And(a, b) => {
            eval_with(a, full, lookup)?.intersect(eval_with(b, full, lookup)?)
        }
        EventExpr::Or(a, b) => eval_with(a, full, lookup)?.union(eval_with(b, full, lookup)?),
        EventExpr::Implies(a, b) => full
            .difference(eval_with(a, full, lookup)?)
            .union(eval_with(b, full, lookup)?),
        EventExpr::Iff(a, b) => {
            let ea = eval_with(a, full, lookup)?;
            let eb = eval_with(b, full, lookup)?;
            ea.intersect(eb)
                .union(full.difference(ea).intersect(full.difference(eb)))
        }
    })
}

fn prec(e: &EventExpr) -> u8 {
    match e {
        EventExpr::Iff(..) => 1,
        EventExpr::Implies(..) => 2,
        EventExpr::Or(..) => 3,
        EventExpr::And(..) => 4,
        EventExpr::Not(..) => 5,
        _ => 6,
    }
}

impl fmt::Display for EventExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(f: &mut fmt::Formatter<'_>, e: &EventExpr, min: u8) -> fmt::Result {
            if prec(e) < min {
                write!(f, "({})", e)
            } else {
                write!(f, "{}", e)
            }
        }
        match self {
            EventExpr::Atom(a) => f.write_str(a),
            EventExpr::Top => f.write_str("T"),
            EventExpr::Bottom => f.write_str("F"),
            EventExpr::Not(a) => {
                f.write_str("!")?;
                side(f, a, 5)
            }
            EventExpr::And(a, b) => {
                side(f, a, 4)?;
                f.write_str(" & ")?;
                side(f, b, 5)
            }
            EventExpr::Or(a, b) => {
                side(f, a, 3)?;
                f.write_str(" | ")?;
                side(f, b, 4)
            }
            EventExpr::Implies(a, b) => {
                side(f, a, 3)?; // right-associative: parenthesize a nested '->' on the left
                f.write_str(" -> ")?;
                side(f, b, 2)
            }
            EventExpr::Iff(a, b) => {
                side(f, a, 1)?;
                f.write_str(" <-> ")?;
                side(f, b, 2)
            }
        }
    }
}
