//! Textual rendering and parsing of field values.
//!
//! Values print in polynomial syntax over `e`, e.g. `(1 + 2e)/(2 + e^2)`,
//! with rationals as `p/q`. Rendering of a canonical value parses back to
//! the same canonical value.
//!
//! The parser accepts a small arithmetic grammar (all evaluated exactly):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '·' | '/') factor | <implicit 'e'-factor>)*
//! factor  := '-' factor | primary
//! primary := INT | 'e' ('^' INT)? | '(' expr ')'
//! ```
//!
//! `*`, `·` and `/` share one precedence level and associate left, so
//! `1/2e` is `(1/2)·e` and `e/(1+e)` is a quotient of polynomials. An
//! integer or closing parenthesis directly followed by `e` multiplies
//! implicitly (`2e`, `(1/2)e`).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::EpsPoly;
use super::{FieldValue, Rational};

/// Error from [`parse_value`], with a byte position into the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ValueParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ValueParseError {}

/// Renders a field value in canonical polynomial syntax.
///
/// When a denominator is present, both sides are rescaled to primitive
/// integer coefficients for display (`(1 + 2e)/(2 + e^2)` rather than the
/// stored `(1/2 + e)/(1 + 1/2·e^2)`); the rescaling preserves the value, so
/// parsing the rendering recovers the canonical form exactly.
pub fn render_value(v: &FieldValue) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    if v.den().is_one() {
        return render_poly(v.num());
    }
    let (num, den) = display_scaled(v.num(), v.den());
    format!("{}/{}", render_operand(&num), render_den_operand(&den))
}

fn display_scaled(num: &EpsPoly, den: &EpsPoly) -> (EpsPoly, EpsPoly) {
    // num/den = (p/q)·(num_ints/den_ints) with p/q reduced, so scaling the
    // integer parts by p and q respectively is already jointly primitive.
    let ratio = num.scale_factor() / den.scale_factor();
    let p = Rational::from_integer(ratio.numer().clone());
    let q = Rational::from_integer(ratio.denom().clone());
    let mut n = num.primitive_part().scale(&p);
    let mut d = den.primitive_part().scale(&q);
    if d.lowest_sign() < 0 {
        n = n.neg();
        d = d.neg();
    }
    (n, d)
}

fn nonzero_terms(p: &EpsPoly) -> usize {
    p.coeffs().iter().filter(|c| !c.is_zero()).count()
}

fn render_operand(p: &EpsPoly) -> String {
    if nonzero_terms(p) > 1 {
        format!("({})", render_poly(p))
    } else {
        render_poly(p)
    }
}

/// A single-term divisor like `4e` must still be parenthesized: `1/4e`
/// would re-parse as `(1/4)·e` under left-associative division.
fn render_den_operand(p: &EpsPoly) -> String {
    if nonzero_terms(p) == 1 {
        let k = p.order().expect("denominator is nonzero");
        if k >= 1 && !p.coeff(k).abs().is_one() {
            return format!("({})", render_poly(p));
        }
        return render_poly(p);
    }
    format!("({})", render_poly(p))
}

fn render_poly(p: &EpsPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if first {
            if c.is_negative() {
                out.push('-');
            }
            first = false;
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&render_term(&c.abs(), i));
    }
    out
}

fn render_term(c: &Rational, power: usize) -> String {
    let eps = match power {
        0 => return c.to_string(),
        1 => "e".to_string(),
        k => format!("e^{}", k),
    };
    if c.is_one() {
        eps
    } else if c.is_integer() {
        format!("{}{}", c, eps)
    } else {
        format!("{}·{}", c, eps)
    }
}

/// Truncated decimal rendering of an exact rational (at most `digits`
/// fractional digits, trailing zeros dropped).
pub fn decimal_string(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let r = r.abs();
    let int = r.numer() / r.denom();
    let mut rem = r.numer() % r.denom();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if !rem.is_zero() && digits > 0 {
        out.push('.');
        for _ in 0..digits {
            rem *= 10;
            let digit = &rem / r.denom();
            out.push_str(&digit.to_string());
            rem %= r.denom();
            if rem.is_zero() {
                break;
            }
        }
    }
    out
}

/// Parses a field value; inverse of [`render_value`] on canonical forms.
pub fn parse_value(input: &str) -> Result<FieldValue, ValueParseError> {
    let tokens = tokenize(input)?;
    let mut p = Parser { tokens, pos: 0 };
    let v = p.expr()?;
    match p.peek() {
        (Tok::End, _) => Ok(v),
        (_, at) => Err(err(at, "unexpected trailing input")),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Eps,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn err(position: usize, message: impl Into<String>) -> ValueParseError {
    ValueParseError {
        position,
        message: message.into(),
    }
}

fn tokenize(input: &str) -> Result<Vec<(Tok, usize)>, ValueParseError> {
    let mut out = Vec::new();
    let mut it = input.char_indices().peekable();
    while let Some(&(at, ch)) = it.peek() {
        match ch {
            ' ' | '\t' | '\n' | '\r' => {
                it.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                let n = digits.parse::<BigInt>().map_err(|_| err(at, "bad integer"))?;
                out.push((Tok::Int(n), at));
            }
            'e' => {
                it.next();
                out.push((Tok::Eps, at));
            }
            '+' => {
                it.next();
                out.push((Tok::Plus, at));
            }
            '-' => {
                it.next();
                out.push((Tok::Minus, at));
            }
            '*' | '·' => {
                it.next();
                out.push((Tok::Star, at));
            }
            '/' => {
                it.next();
                out.push((Tok::Slash, at));
            }
            '^' => {
                it.next();
                out.push((Tok::Caret, at));
            }
            '(' => {
                it.next();
                out.push((Tok::LParen, at));
            }
            ')' => {
                it.next();
                out.push((Tok::RParen, at));
            }
            other => return Err(err(at, format!("unexpected character '{}'", other))),
        }
    }
    out.push((Tok::End, input.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

const MAX_EXPONENT: usize = 10_000;

impl Parser {
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

    fn expr(&mut self) -> Result<FieldValue, ValueParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FieldValue, ValueParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                (Tok::Star, _) => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                (Tok::Slash, at) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc
                        .checked_div(&rhs)
                        .map_err(|_| err(at, "division by zero"))?;
                }
                // Implicit multiplication: `2e`, `(1/2)e`.
                (Tok::Eps, _) => {
                    acc = &acc * &self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<FieldValue, ValueParseError> {
        match self.peek() {
            (Tok::Minus, _) => {
                self.bump();
                Ok(-self.factor()?)
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<FieldValue, ValueParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Int(n) => Ok(FieldValue::from_rational(Rational::from_integer(n))),
            Tok::Eps => {
                if matches!(self.peek().0, Tok::Caret) {
                    self.bump();
                    let (t, at2) = self.bump();
                    match t {
                        Tok::Int(k) => {
                            if k.is_negative() || k > BigInt::from(MAX_EXPONENT) {
                                return Err(err(at2, "exponent out of range"));
                            }
                            let k: usize =
                                k.try_into().map_err(|_| err(at2, "exponent out of range"))?;
                            Ok(FieldValue::eps_pow(k as i64))
                        }
                        _ => Err(err(at2, "expected integer exponent after '^'")),
                    }
                } else {
                    Ok(FieldValue::epsilon())
                }
            }
            Tok::LParen => {
                let v = self.expr()?;
                let (t, at2) = self.bump();
                if t == Tok::RParen {
                    Ok(v)
                } else {
                    Err(err(at2, "expected ')'"))
                }
            }
            Tok::End => Err(err(at, "unexpected end of input")),
            _ => Err(err(at, "expected a number, 'e' or '('")),
        }
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_value(self))
    }
}
