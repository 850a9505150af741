//! Dense polynomials in the infinitesimal `e` with exact rational coefficients.
//!
//! These are the building blocks for [`FieldValue`](super::FieldValue): a field
//! element is a quotient of two of these. Coefficient index `i` holds the
//! coefficient of `e^i`; the zero polynomial is the empty coefficient vector,
//! and a nonzero polynomial never stores a zero leading (highest-index)
//! coefficient.
//!
//! Internally a polynomial is a single rational scale times a primitive
//! integer-coefficient polynomial (content 1, positive leading coefficient).
//! That keeps the hot paths in integer arithmetic: multiplication is a plain
//! convolution (products of primitive polynomials are primitive), addition
//! needs one content pass, and rescaling is O(1). The normal form is unique,
//! so structural equality still coincides with coefficientwise equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// A polynomial in `e` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpsPoly {
    /// Nonzero rational scale; exactly 1 for the zero polynomial.
    scale: Rational,
    /// Primitive integer coefficients: content 1, positive leading
    /// coefficient. Empty for the zero polynomial.
    ints: Vec<BigInt>,
}

impl EpsPoly {
    /// Builds a polynomial from coefficients (index = power of `e`),
    /// trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return EpsPoly::zero();
        }
        let mut lcm = BigInt::one();
        for c in &coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let raw: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        Self::from_ints(raw, Rational::new(BigInt::one(), lcm))
    }

    /// Normalizes integer coefficients times a scale into the unique
    /// internal form.
    fn from_ints(mut raw: Vec<BigInt>, scale: Rational) -> Self {
        while raw.last().map_or(false, |c| c.is_zero()) {
            raw.pop();
        }
        if raw.is_empty() || scale.is_zero() {
            return EpsPoly::zero();
        }
        let mut content = BigInt::zero();
        for c in &raw {
            if !c.is_zero() {
                content = content.gcd(c);
                if content.is_one() {
                    break;
                }
            }
        }
        if raw.last().unwrap().is_negative() {
            content = -content;
        }
        if !content.is_one() {
            for c in &mut raw {
                *c = &*c / &content;
            }
        }
        EpsPoly {
            scale: scale * Rational::from_integer(content),
            ints: raw,
        }
    }

    pub fn zero() -> Self {
        EpsPoly {
            scale: Rational::one(),
            ints: Vec::new(),
        }
    }

    pub fn one() -> Self {
        EpsPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            EpsPoly::zero()
        } else {
            EpsPoly {
                scale: c,
                ints: vec![BigInt::one()],
            }
        }
    }

    /// `c * e^k`.
    pub fn monomial(k: usize, c: Rational) -> Self {
        if c.is_zero() {
            return EpsPoly::zero();
        }
        let mut ints = vec![BigInt::zero(); k + 1];
        ints[k] = BigInt::one();
        EpsPoly { scale: c, ints }
    }

    pub fn is_zero(&self) -> bool {
        self.ints.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.ints.len() == 1 && self.ints[0].is_one() && self.scale.is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.ints.len().checked_sub(1)
    }

    /// Index of the lowest nonzero coefficient (the e-adic order),
    /// or `None` for the zero polynomial.
    pub fn order(&self) -> Option<usize> {
        self.ints.iter().position(|c| !c.is_zero())
    }

    /// Coefficient of `e^i` (zero beyond the stored range).
    pub fn coeff(&self, i: usize) -> Rational {
        match self.ints.get(i) {
            None => Rational::zero(),
            Some(c) if c.is_zero() => Rational::zero(),
            Some(c) => &self.scale * Rational::from_integer(c.clone()),
        }
    }

    /// All coefficients up to the degree, materialized as rationals.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.ints
            .iter()
            .map(|c| {
                if c.is_zero() {
                    Rational::zero()
                } else {
                    &self.scale * Rational::from_integer(c.clone())
                }
            })
            .collect()
    }

    /// The lowest nonzero coefficient; `None` for zero.
    pub fn lowest_coeff(&self) -> Option<Rational> {
        self.order().map(|i| self.coeff(i))
    }

    /// Sign of the lowest nonzero coefficient: -1, 0 (zero polynomial), +1.
    pub fn lowest_sign(&self) -> i32 {
        match self.order() {
            None => 0,
            Some(i) => {
                let neg = self.ints[i].is_negative() ^ self.scale.is_negative();
                if neg {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub(crate) fn scale_factor(&self) -> &Rational {
        &self.scale
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return EpsPoly::zero();
        }
        EpsPoly {
            scale: -&self.scale,
            ints: self.ints.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        if other.is_zero() {
            return self.clone();
        }
        // Bring both scales over one denominator; the coefficient work is
        // then pure integer arithmetic.
        let qa = self.scale.denom();
        let qb = other.scale.denom();
        let q = qa.lcm(qb);
        let ma = self.scale.numer() * (&q / qa);
        let mut mb = other.scale.numer() * (&q / qb);
        if negate {
            mb = -mb;
        }
        let n = self.ints.len().max(other.ints.len());
        let mut raw = Vec::with_capacity(n);
        for i in 0..n {
            let x = match self.ints.get(i) {
                Some(v) if !v.is_zero() => &ma * v,
                _ => BigInt::zero(),
            };
            let y = match other.ints.get(i) {
                Some(v) if !v.is_zero() => &mb * v,
                _ => BigInt::zero(),
            };
            raw.push(x + y);
        }
        Self::from_ints(raw, Rational::new(BigInt::one(), q))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return EpsPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.ints.len() + other.ints.len() - 1];
        for (i, a) in self.ints.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.ints.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] += a * b;
            }
        }
        // Products of primitive polynomials are primitive, and the leading
        // coefficient is a product of positives.
        EpsPoly {
            scale: &self.scale * &other.scale,
            ints: out,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() || self.is_zero() {
            return EpsPoly::zero();
        }
        EpsPoly {
            scale: &self.scale * c,
            ints: self.ints.clone(),
        }
    }

    /// Divides every coefficient by `c`; `c` must be nonzero.
    pub fn unscale(&self, c: &Rational) -> Self {
        assert!(!c.is_zero(), "division of polynomial by zero scalar");
        if self.is_zero() {
            return EpsPoly::zero();
        }
        EpsPoly {
            scale: &self.scale / c,
            ints: self.ints.clone(),
        }
    }

    /// Multiplies by `e^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut ints = vec![BigInt::zero(); k];
        ints.extend(self.ints.iter().cloned());
        EpsPoly {
            scale: self.scale.clone(),
            ints,
        }
    }

    /// Divides exactly by `e^k`; requires order >= k.
    pub fn shift_down(&self, k: usize) -> Self {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        debug_assert!(self.order().map_or(true, |o| o >= k));
        EpsPoly {
            scale: self.scale.clone(),
            ints: self.ints[k.min(self.ints.len())..].to_vec(),
        }
    }

    /// Euclidean division: returns `(quotient, remainder)` with
    /// `self = quotient * div + remainder` and `deg(remainder) < deg(div)`.
    pub fn divrem(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "polynomial division by zero");
        let dd = div.degree().unwrap();
        if self.is_zero() || self.degree().unwrap() < dd {
            return (EpsPoly::zero(), self.clone());
        }
        let dcoeffs = div.coeffs();
        let lead = &dcoeffs[dd];
        let mut rem = self.coeffs();
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] / lead;
            for j in 0..dd {
                let t = &q * &dcoeffs[j];
                rem[i - dd + j] -= t;
            }
            rem[i] = Rational::zero();
            quot[i - dd] = q;
        }
        (EpsPoly::from_coeffs(quot), EpsPoly::from_coeffs(rem))
    }

    /// Exact division; panics if `div` does not divide `self`.
    pub fn div_exact(&self, div: &Self) -> Self {
        if self.is_zero() {
            return EpsPoly::zero();
        }
        if div.is_one() {
            return self.clone();
        }
        if let Some(c) = div.as_constant() {
            return self.unscale(&c);
        }
        // Both integer parts are primitive, so divisibility over the
        // rationals is integer divisibility of the primitive parts, and the
        // integer quotient of primitives is again primitive with a positive
        // leading coefficient.
        let ints = int_poly_div_exact(&div.ints, &self.ints).expect("div_exact: not divisible");
        EpsPoly {
            scale: &self.scale / &div.scale,
            ints,
        }
    }

    fn as_constant(&self) -> Option<Rational> {
        if self.ints.len() == 1 {
            Some(self.coeff(0))
        } else {
            None
        }
    }

    /// Polynomial gcd, returned in primitive integer form (positive leading
    /// coefficient, integer coefficients with content 1).
    ///
    /// Random inputs are almost always coprime, so a single modular image is
    /// tried first: a constant gcd mod p certifies a constant gcd over the
    /// rationals. Nontrivial gcds are computed modularly as well (images
    /// modulo word-size primes, combined by CRT and certified by exact trial
    /// division), which keeps the cost small even when the operands carry
    /// hundreds of digits per coefficient.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.primitive_part();
        }
        if b.is_zero() {
            return a.primitive_part();
        }
        if a.degree() == Some(0) || b.degree() == Some(0) || coprime_mod_p(a, b) {
            return EpsPoly::one();
        }
        modular_gcd(a, b)
    }

    /// `self` with the scale dropped: primitive integer coefficients and a
    /// positive leading coefficient. Zero stays zero.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return EpsPoly::zero();
        }
        EpsPoly {
            scale: Rational::one(),
            ints: self.ints.clone(),
        }
    }
}

const PROBE_PRIME: u64 = (1 << 61) - 1; // Mersenne prime

/// True when the images of `a` and `b` in F_p provably have gcd 1, which
/// certifies coprimality over the rationals. Conservative: a vanishing
/// leading coefficient mod p returns false and the caller falls back to the
/// full computation.
fn coprime_mod_p(a: &EpsPoly, b: &EpsPoly) -> bool {
    let (Some(fa), Some(fb)) = (
        reduce_ints_mod(&a.ints, PROBE_PRIME),
        reduce_ints_mod(&b.ints, PROBE_PRIME),
    ) else {
        return false;
    };
    poly_gcd_mod(&fa, &fb, PROBE_PRIME).len() == 1
}

/// Reduces integer coefficients into F_p. `None` when the leading
/// coefficient vanishes mod p (the image would not be degree-faithful).
fn reduce_ints_mod(ints: &[BigInt], p: u64) -> Option<Vec<u64>> {
    let out: Vec<u64> = ints.iter().map(|c| mod_big(c, p)).collect();
    if out.last() == Some(&0) {
        return None;
    }
    Some(out)
}

fn mod_big(x: &BigInt, p: u64) -> u64 {
    use num_traits::ToPrimitive;
    // Small values (the common case) avoid bignum division entirely.
    if let Some(v) = x.to_i128() {
        let r = v % p as i128;
        return if r < 0 { (r + p as i128) as u64 } else { r as u64 };
    }
    let mut r = x % BigInt::from(p);
    if r.is_negative() {
        r += BigInt::from(p);
    }
    r.to_u64().expect("residue fits in u64")
}

fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p) // Fermat
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, p);
        }
        base = mod_mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse-free remainder in F_p[x]: computes `lead(b)^k · a mod b`, which
/// has the same degree chain as the true remainder (unit scaling is
/// irrelevant for gcd purposes).
fn mod_poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let lead = b[db];
    let mut rem: Vec<u64> = a.to_vec();
    while rem.len() > db {
        let dr = rem.len() - 1;
        let coef = rem[dr];
        if coef != 0 {
            for c in rem.iter_mut().take(dr) {
                *c = mod_mul(*c, lead, p);
            }
            for j in 0..db {
                let t = mod_mul(coef, b[j], p);
                let idx = dr - db + j;
                // p < 2^62, so this cannot overflow.
                rem[idx] = (rem[idx] + p - t) % p;
            }
        }
        rem.pop();
        while rem.last() == Some(&0) {
            rem.pop();
        }
    }
    rem
}

/// Gcd of two nonzero polynomials over F_p, up to a unit.
fn poly_gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        let r = mod_poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn make_monic(mut v: Vec<u64>, p: u64) -> Vec<u64> {
    let inv = mod_inv(*v.last().unwrap(), p);
    for c in &mut v {
        *c = mod_mul(*c, inv, p);
    }
    v
}

/// Word-size primes for the modular gcd, found once by deterministic
/// Miller-Rabin below 2^62.
fn gcd_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut primes = Vec::with_capacity(48);
        let mut candidate = (1u64 << 62) - 1;
        while primes.len() < 48 {
            if is_prime_u64(candidate) {
                primes.push(candidate);
            }
            candidate -= 2;
        }
        primes
    })
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    // Deterministic witness set for all u64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brown-style modular gcd for a nontrivial common factor: gather monic gcd
/// images modulo word-size primes (scaled by the gcd of the leading
/// coefficients), combine them by CRT in the symmetric range, and certify
/// the primitive candidate by exact trial division. Unlucky primes show up
/// as images of the wrong degree and are discarded.
fn modular_gcd(a: &EpsPoly, b: &EpsPoly) -> EpsPoly {
    let ia = &a.ints;
    let ib = &b.ints;
    let gamma: BigInt = ia.last().unwrap().gcd(ib.last().unwrap());

    let mut modulus = BigInt::zero();
    let mut acc: Vec<BigInt> = Vec::new();
    let mut degree = usize::MAX;

    let cached = gcd_primes();
    let mut overflow_candidate = cached.last().unwrap() - 2;
    let mut idx = 0usize;
    loop {
        let p = if idx < cached.len() {
            cached[idx]
        } else {
            // Only finitely many primes can be unlucky; extend on demand.
            while !is_prime_u64(overflow_candidate) {
                overflow_candidate -= 2;
            }
            let p = overflow_candidate;
            overflow_candidate -= 2;
            p
        };
        idx += 1;
        let pb = BigInt::from(p);
        let (Some(fa), Some(fb)) = (reduce_ints_mod(ia, p), reduce_ints_mod(ib, p)) else {
            continue;
        };
        let g = poly_gcd_mod(&fa, &fb, p);
        if g.len() == 1 {
            return EpsPoly::one();
        }
        if g.len() - 1 > degree && degree != usize::MAX {
            continue; // unlucky prime
        }
        let g = make_monic(g, p);
        let scale = mod_big(&gamma, p);
        let image: Vec<u64> = g.iter().map(|&c| mod_mul(c, scale, p)).collect();
        if g.len() - 1 < degree || degree == usize::MAX {
            // Strictly better degree bound: restart accumulation.
            degree = g.len() - 1;
            modulus = pb.clone();
            acc = image
                .iter()
                .map(|&c| symmetric(BigInt::from(c), &pb))
                .collect();
        } else {
            // Same degree: CRT-combine coefficientwise.
            let m_inv = mod_inv(mod_big(&modulus, p), p);
            let new_modulus = &modulus * &pb;
            for (av, &iv) in acc.iter_mut().zip(&image) {
                let r = mod_big(av, p);
                let delta = mod_mul((iv + p - r) % p, m_inv, p);
                *av += &modulus * BigInt::from(delta);
                *av = symmetric(av.clone(), &new_modulus);
            }
            modulus = new_modulus;
        }
        // Try to certify the current candidate.
        let candidate = EpsPoly::from_ints(acc.clone(), Rational::one()).primitive_part();
        if !candidate.is_zero()
            && int_poly_divides(&candidate.ints, ia)
            && int_poly_divides(&candidate.ints, ib)
        {
            return candidate;
        }
    }
}

fn symmetric(mut x: BigInt, modulus: &BigInt) -> BigInt {
    x = x.mod_floor(modulus);
    if &x * 2 > *modulus {
        x -= modulus;
    }
    x
}

/// Exact division of integer polynomials (coefficient vectors, nonzero
/// leading terms). Returns `None` as soon as a quotient coefficient fails to
/// be an integer or the remainder is nonzero; coefficients never grow past
/// their natural sizes.
fn int_poly_div_exact(h: &[BigInt], a: &[BigInt]) -> Option<Vec<BigInt>> {
    let dh = h.len() - 1;
    if a.len() < h.len() {
        return None;
    }
    let lead = &h[dh];
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - dh];
    for k in (dh..a.len()).rev() {
        if rem[k].is_zero() {
            continue;
        }
        let (q, r) = rem[k].div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        for j in 0..dh {
            let t = &q * &h[j];
            rem[k - dh + j] -= t;
        }
        rem[k] = BigInt::zero();
        quot[k - dh] = q;
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

fn int_poly_divides(h: &[BigInt], a: &[BigInt]) -> bool {
    int_poly_div_exact(h, a).is_some()
}
