//! The ordered non-Archimedean field Q(e): exact arithmetic, total order,
//! and standard parts.
//!
//! `e` is a formal positive infinitesimal: `0 < e < q` for every positive
//! rational `q`. Values are quotients of polynomials in `e` with rational
//! coefficients, held in a canonical reduced form so that structural
//! equality coincides with field equality. All arithmetic is exact; there
//! is no floating point anywhere in this crate.

mod poly;
mod text;
mod value;

pub use poly::EpsPoly;
pub use text::{decimal_string, parse_value, render_value, ValueParseError};
pub use value::FieldValue;

use thiserror::Error;

/// Exact rational scalar used for all coefficients.
///
/// Invariants (maintained by the arithmetic): numerator and denominator are
/// coprime and the denominator is positive.
pub type Rational = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is infinite; no standard part")]
    InfiniteValue,
}

/// Convenience constructor for a rational `p/q`; panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

/// Parses a rational written as `p/q` or `p` (optionally signed).
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let s = s.trim();
    let bad = || RationalParseError(s.to_string());
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer: num_bigint::BigInt = num_str.parse().map_err(|_| bad())?;
    let denom: num_bigint::BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => 1.into(),
    };
    if denom == 0.into() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("malformed rational '{0}'")]
pub struct RationalParseError(pub String);
