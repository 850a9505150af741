//! Ranks, valuations, remainder sequences, and the lexicographic view of
//! field values.
//!
//! Every nonzero value of Q(e) has an e-adic valuation and a Laurent
//! expansion `c_0·e^v + c_1·e^(v+1) + ...` at `e = 0`. Peeling expansion
//! terms off one power at a time yields a remainder sequence whose
//! valuation can only move up; comparing two values by their first
//! diverging expansion term reproduces the field order exactly. Rank units
//! are fixed as the powers `e^k`, which makes every expansion coefficient a
//! unique rational.
//!
//! Expansions that do not terminate (the denominator is not a power of
//! `e`) are exposed as a truncated series together with an exact field
//! remainder; nothing is ever rounded.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::field::{EpsPoly, FieldValue, Rational};

/// Degree of infinitesimality of a value. `Top` is the rank of zero and
/// sits above every finite rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Int(i64),
    Top,
}

impl Rank {
    /// Rank of a product: valuations add, and zero absorbs.
    pub fn plus(self, other: Rank) -> Rank {
        match (self, other) {
            (Rank::Int(a), Rank::Int(b)) => Rank::Int(a + b),
            _ => Rank::Top,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Int(k) => write!(f, "{}", k),
            Rank::Top => write!(f, "top"),
        }
    }
}

/// Whether the expansion of a value terminates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureDepth {
    Finite(usize),
    NonTerminating,
}

/// A (possibly truncated) lexicographic decomposition of a field value:
/// consecutive rational coefficients starting at the valuation, so
/// coefficient `i` belongs to the rank unit `e^(valuation + i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexSeries {
    pub valuation: Rank,
    pub coefficients: Vec<Rational>,
    /// True when the expansion terminates and is complete, in which case
    /// the reconstituted sum reproduces the source value exactly.
    pub exact: bool,
}

impl LexSeries {
    /// The sum of the stored terms as an exact field value. For an exact
    /// series this is the decomposed value itself; otherwise it is the
    /// partial sum (source minus remainder).
    pub fn to_field_value(&self) -> FieldValue {
        let v = match self.valuation {
            Rank::Top => return FieldValue::zero(),
            Rank::Int(v) => v,
        };
        laurent_terms_value(v, &self.coefficients)
    }
}

impl fmt::Display for LexSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.valuation {
            Rank::Top => return write!(f, "0"),
            Rank::Int(v) => v,
        };
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
                first = false;
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            f.write_str(&series_term(&c.abs(), v + i as i64))?;
        }
        if !self.exact {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "O({})", eps_power(v + self.coefficients.len() as i64))?;
        }
        Ok(())
    }
}

fn eps_power(p: i64) -> String {
    match p {
        0 => "1".to_string(),
        1 => "e".to_string(),
        k => format!("e^{}", k),
    }
}

fn series_term(c: &Rational, power: i64) -> String {
    if power == 0 {
        return c.to_string();
    }
    let eps = eps_power(power);
    if c.is_one() {
        eps
    } else if c.is_integer() {
        format!("{}{}", c, eps)
    } else {
        format!("{}·{}", c, eps)
    }
}

/// The e-adic valuation; `Top` for zero. Two values have the same rank in
/// the multiplicative sense exactly when their valuations agree.
pub fn valuation(a: &FieldValue) -> Rank {
    a.order().map(Rank::Int).unwrap_or(Rank::Top)
}

/// Coefficient of `e^k` in the Laurent expansion of `a` at `e = 0`.
pub fn coefficient_at(a: &FieldValue, k: i64) -> Rational {
    match a.order() {
        None => Rational::zero(),
        Some(v) if k < v => Rational::zero(),
        Some(v) => {
            let prefix = laurent_prefix(a, (k - v) as usize + 1);
            prefix.last().cloned().unwrap_or_else(Rational::zero)
        }
    }
}

/// First `len` Laurent coefficients of a nonzero value, starting at its
/// valuation. Synthetic division by the denominator; the canonical form
/// guarantees the denominator's lowest coefficient is 1, so no division is
/// needed.
fn laurent_prefix(a: &FieldValue, len: usize) -> Vec<Rational> {
    let num = a.num().coeffs();
    let den = a.den().coeffs();
    let (Some(nv), Some(dv)) = (a.num().order(), a.den().order()) else {
        return Vec::new();
    };
    let at = |v: &[Rational], i: usize| v.get(i).cloned().unwrap_or_else(Rational::zero);
    let mut out = Vec::with_capacity(len);
    for j in 0..len {
        let mut s = at(&num, nv + j);
        for i in 1..=j {
            let d = at(&den, dv + i);
            if !d.is_zero() {
                s -= d * &out[j - i];
            }
        }
        out.push(s);
    }
    out
}

/// `sum coeffs[i] * e^(v + i)` as an exact field value.
fn laurent_terms_value(v: i64, coeffs: &[Rational]) -> FieldValue {
    let shift = (-v).max(0) as usize;
    let mut poly = vec![Rational::zero(); v.max(0) as usize + coeffs.len()];
    for (i, c) in coeffs.iter().enumerate() {
        poly[(v + i as i64 + shift as i64) as usize] = c.clone();
    }
    FieldValue::from_ratio(
        EpsPoly::from_coeffs(poly),
        EpsPoly::monomial(shift, Rational::one()),
    )
}

/// `a` minus the sum of its first `depth` expansion terms (terms indexed
/// from the valuation upward). `remainder(a, 0) = a`.
pub fn remainder(a: &FieldValue, depth: usize) -> FieldValue {
    if depth == 0 || a.is_zero() {
        return a.clone();
    }
    let v = a.order().unwrap();
    let prefix = laurent_prefix(a, depth);
    a - &laurent_terms_value(v, &prefix)
}

/// Number of expansion terms after which the remainder vanishes, if the
/// expansion terminates. It terminates exactly when the canonical
/// denominator is a power of `e`.
pub fn closure_depth(a: &FieldValue) -> ClosureDepth {
    if a.is_zero() {
        return ClosureDepth::Finite(0);
    }
    match terminating_length(a) {
        Some(len) => ClosureDepth::Finite(len),
        None => ClosureDepth::NonTerminating,
    }
}

fn terminating_length(a: &FieldValue) -> Option<usize> {
    let den = a.den();
    let dv = den.order().unwrap();
    if den.degree() != Some(dv) {
        return None; // denominator has more than one term
    }
    debug_assert!(den.coeff(dv).is_one());
    let num = a.num();
    Some(num.degree().unwrap() - num.order().unwrap() + 1)
}

/// Expands `a` into up to `depth` consecutive expansion coefficients
/// (`depth` must be positive). `exact` is set when the remainder after
/// those terms is zero.
pub fn expand(a: &FieldValue, depth: usize) -> LexSeries {
    assert!(depth > 0, "expansion depth must be positive");
    if a.is_zero() {
        return LexSeries {
            valuation: Rank::Top,
            coefficients: Vec::new(),
            exact: true,
        };
    }
    let v = a.order().unwrap();
    let (len, exact) = match terminating_length(a) {
        Some(full) if full <= depth => (full, true),
        _ => (depth, false),
    };
    LexSeries {
        valuation: Rank::Int(v),
        coefficients: laurent_prefix(a, len),
        exact,
    }
}

/// Lexicographic comparison: find the first rank where the expansions of
/// `a` and `b` diverge and compare that term. Agrees with the field order
/// on all pairs.
pub fn compare_lex(a: &FieldValue, b: &FieldValue) -> Ordering {
    match lex_divergence(a, b) {
        None => Ordering::Equal,
        Some((_, c)) => {
            if c.is_positive() {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
    }
}

/// The first divergence between two expansions: the rank at which they
/// differ and the expansion coefficient of `a - b` there. `None` when the
/// values are equal.
pub fn lex_divergence(a: &FieldValue, b: &FieldValue) -> Option<(i64, Rational)> {
    let diff = a - b;
    let d = diff.order()?;
    Some((d, coefficient_at(&diff, d)))
}
