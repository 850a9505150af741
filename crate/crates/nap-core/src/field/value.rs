//! Elements of the ordered field Q(e) of rational functions in one positive
//! infinitesimal `e`, kept in a canonical reduced form.
//!
//! Canonical form: `num/den` with `gcd(num, den) = 1`, and the lowest-index
//! nonzero coefficient of `den` equal to 1. Zero is `0/1`. Two values are
//! equal as field elements exactly when their canonical forms are
//! structurally equal, so `Eq` and `Hash` are derived.
//!
//! The order makes `e` a positive infinitesimal: a nonzero value is positive
//! exactly when the lowest nonzero coefficient of its canonical numerator is
//! positive.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::EpsPoly;
use super::{FieldError, Rational};

/// An element of Q(e) in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldValue {
    num: EpsPoly,
    den: EpsPoly,
}

impl FieldValue {
    /// Builds `num/den` and reduces to canonical form.
    pub fn from_parts(num: EpsPoly, den: EpsPoly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(FieldValue {
                num: EpsPoly::zero(),
                den: EpsPoly::one(),
            });
        }
        let g = EpsPoly::gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        let low = den.lowest_coeff().expect("nonzero denominator");
        if !low.is_one() {
            num = num.unscale(&low);
            den = den.unscale(&low);
        }
        Ok(FieldValue { num, den })
    }

    /// As `from_parts`, but panics on a zero denominator.
    pub fn from_ratio(num: EpsPoly, den: EpsPoly) -> Self {
        Self::from_parts(num, den).expect("zero denominator")
    }

    pub fn zero() -> Self {
        FieldValue {
            num: EpsPoly::zero(),
            den: EpsPoly::one(),
        }
    }

    pub fn one() -> Self {
        FieldValue {
            num: EpsPoly::one(),
            den: EpsPoly::one(),
        }
    }

    /// The designated positive infinitesimal.
    pub fn epsilon() -> Self {
        FieldValue {
            num: EpsPoly::monomial(1, Rational::one()),
            den: EpsPoly::one(),
        }
    }

    /// `e^k`, for any integer `k` (negative powers are infinite elements).
    pub fn eps_pow(k: i64) -> Self {
        if k >= 0 {
            FieldValue {
                num: EpsPoly::monomial(k as usize, Rational::one()),
                den: EpsPoly::one(),
            }
        } else {
            FieldValue {
                num: EpsPoly::one(),
                den: EpsPoly::monomial((-k) as usize, Rational::one()),
            }
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        FieldValue {
            num: EpsPoly::constant(r),
            den: EpsPoly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn num(&self) -> &EpsPoly {
        &self.num
    }

    pub fn den(&self) -> &EpsPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The e-adic order: least exponent with a nonzero coefficient in the
    /// Laurent expansion at `e = 0`. `None` for zero. Negative orders are
    /// infinite elements; positive orders are infinitesimals.
    pub fn order(&self) -> Option<i64> {
        let n = self.num.order()? as i64;
        let d = self.den.order().expect("nonzero denominator") as i64;
        Some(n - d)
    }

    pub fn is_finite(&self) -> bool {
        self.order().map_or(true, |v| v >= 0)
    }

    pub fn is_infinitesimal(&self) -> bool {
        self.order().map_or(false, |v| v > 0)
    }

    /// Sign in the field order: -1, 0 or +1.
    pub fn sign(&self) -> i32 {
        self.num.lowest_sign()
    }

    /// The unique rational infinitesimally close to a finite value.
    pub fn standard_part(&self) -> Result<Rational, FieldError> {
        match self.order() {
            None => Ok(Rational::zero()),
            Some(v) if v < 0 => Err(FieldError::InfiniteValue),
            Some(v) if v > 0 => Ok(Rational::zero()),
            _ => Ok(self.num.coeff(0) / self.den.coeff(0)),
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        FieldValue::from_parts(self.den.clone(), self.num.clone())
    }

    /// Exact quotient; errors on a zero divisor.
    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        if other.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(FieldValue::zero());
        }
        if !cross_cancel_pays(self, other) {
            return FieldValue::from_parts(
                self.num.mul(&other.den),
                self.den.mul(&other.num),
            );
        }
        // Cross-cancel before multiplying to keep gcd inputs small.
        let g1 = EpsPoly::gcd(&self.num, &other.num);
        let g2 = EpsPoly::gcd(&other.den, &self.den);
        let num = self.num.div_exact(&g1).mul(&other.den.div_exact(&g2));
        let den = self.den.div_exact(&g2).mul(&other.num.div_exact(&g1));
        FieldValue::from_parts(num, den)
    }

    /// Total-order comparison with `e` a positive infinitesimal: the sign of
    /// `a - b` is the sign of the lowest-index nonzero coefficient of the
    /// canonical numerator of the difference.
    pub fn compare(&self, other: &Self) -> Ordering {
        // Canonical denominators are positive (lowest coefficient 1), so the
        // sign of the difference is the sign of the cross product.
        let diff = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        match diff.lowest_sign() {
            0 => Ordering::Equal,
            s if s > 0 => Ordering::Greater,
            _ => Ordering::Less,
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }
}

/// Cross-cancelling costs two extra gcd probes per operation; it only pays
/// off when the operands are big enough for the plain product's final
/// reduction to hurt.
fn cross_cancel_pays(a: &FieldValue, b: &FieldValue) -> bool {
    let deg = |p: &EpsPoly| p.degree().unwrap_or(0);
    deg(&a.num) + deg(&a.den) + deg(&b.num) + deg(&b.den) >= 16
}

impl fmt::Debug for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldValue({})", self)
    }
}

impl PartialOrd for FieldValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl Add for &FieldValue {
    type Output = FieldValue;
    fn add(self, rhs: &FieldValue) -> FieldValue {
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        let den = self.den.mul(&rhs.den);
        FieldValue::from_ratio(num, den)
    }
}

impl Sub for &FieldValue {
    type Output = FieldValue;
    fn sub(self, rhs: &FieldValue) -> FieldValue {
        let num = self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den));
        let den = self.den.mul(&rhs.den);
        FieldValue::from_ratio(num, den)
    }
}

impl Mul for &FieldValue {
    type Output = FieldValue;
    fn mul(self, rhs: &FieldValue) -> FieldValue {
        if self.is_zero() || rhs.is_zero() {
            return FieldValue::zero();
        }
        if !cross_cancel_pays(self, rhs) {
            return FieldValue::from_ratio(self.num.mul(&rhs.num), self.den.mul(&rhs.den));
        }
        // Cross-cancel: gcd(a.num, b.den) and gcd(b.num, a.den).
        let g1 = EpsPoly::gcd(&self.num, &rhs.den);
        let g2 = EpsPoly::gcd(&rhs.num, &self.den);
        let num = self.num.div_exact(&g1).mul(&rhs.num.div_exact(&g2));
        let den = self.den.div_exact(&g2).mul(&rhs.den.div_exact(&g1));
        FieldValue::from_ratio(num, den)
    }
}

impl Div for &FieldValue {
    type Output = FieldValue;
    fn div(self, rhs: &FieldValue) -> FieldValue {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        // Negating the numerator preserves canonical form.
        FieldValue {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: FieldValue) -> FieldValue {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldValue> for FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: &FieldValue) -> FieldValue {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        -&self
    }
}
