//! Exact arithmetic: big integers, reduced rationals and elements `p + q*sqrt(D)`
//! of a real quadratic field.
//!
//! Integers and rationals come from `num-bigint` / `num-rational`; a
//! [`Rational`] is always stored in lowest terms with a positive denominator.
//! [`ExactQuad`] is the field element type used for every closed form in the
//! crate, so Binet-style expressions are compared by equality, never by
//! tolerance.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use num_bigint::BigInt;

/// Exact rational, always reduced.
pub type Rational = num_rational::BigRational;

/// Builds the reduced rational `num/den`. Panics if `den == 0`.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn parse_bigint(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Parses `"p"` or `"p/q"`; the result is reduced.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let n = parse_bigint(n)?;
            let d = parse_bigint(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("{s:?}: zero denominator")));
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(parse_bigint(s)?),
    };
    Ok(r)
}

/// Returns the value as an integer if the denominator is 1.
pub fn to_integer(r: &Rational) -> Option<BigInt> {
    r.is_integer().then(|| r.numer().clone())
}

/// True for `d >= 2` with no repeated prime factor.
pub fn is_square_free(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2u32;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// `p + q*sqrt(d)` with rational `p`, `q` and square-free `d`.
///
/// Elements with different `d` never mix: the `try_*` operations return
/// [`Error::Domain`] instead of coercing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactQuad {
    p: Rational,
    q: Rational,
    d: u32,
}

impl ExactQuad {
    pub fn new(p: Rational, q: Rational, d: u32) -> Result<Self> {
        if !is_square_free(d) {
            return Err(Error::Domain(format!("radicand {d} is not square-free")));
        }
        Ok(Self { p, q, d })
    }

    /// Shorthand for `(p_num/den) + (q_num/den)*sqrt(d)` over a shared denominator.
    pub fn from_parts(p_num: i64, q_num: i64, den: i64, d: u32) -> Result<Self> {
        Self::new(ratio(p_num, den), ratio(q_num, den), d)
    }

    pub fn from_rational(p: Rational, d: u32) -> Result<Self> {
        Self::new(p, Rational::zero(), d)
    }

    pub fn from_int(n: i64, d: u32) -> Result<Self> {
        Self::from_rational(int(n), d)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt(d: u32) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn one(d: u32) -> Result<Self> {
        Self::from_int(1, d)
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "mismatched radicands sqrt({}) and sqrt({})",
                self.d, other.d
            )))
        }
    }

    fn with(&self, p: Rational, q: Rational) -> Self {
        Self { p, q, d: self.d }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(&self.p + &other.p, &self.q + &other.q))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(&self.p - &other.p, &self.q - &other.q))
    }

    /// `(p1 p2 + q1 q2 d) + (p1 q2 + p2 q1) sqrt(d)`
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let d = int(self.d);
        let p = &self.p * &other.p + &self.q * &other.q * d;
        let q = &self.p * &other.q + &other.p * &self.q;
        self.with(p, q)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    pub fn neg(&self) -> Self {
        self.with(-&self.p, -&self.q)
    }

    /// Galois conjugate `p - q*sqrt(d)`.
    pub fn conj(&self) -> Self {
        self.with(self.p.clone(), -&self.q)
    }

    /// Field norm `p^2 - d q^2`.
    pub fn norm(&self) -> Rational {
        &self.p * &self.p - &self.q * &self.q * int(self.d)
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        // d is square-free, so the norm vanishes only at zero
        if n.is_zero() {
            return Err(Error::Domain("division by zero in quadratic field".into()));
        }
        let c = self.conj();
        Ok(self.with(c.p / &n, c.q / n))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        self.with(&self.p * s, &self.q * s)
    }

    /// `self^n` by repeated squaring; `pow(0)` is one.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = self.with(Rational::one(), Rational::zero());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    /// `Some(p)` when the irrational part is zero.
    pub fn rational_part(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }
}

impl fmt::Display for ExactQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.p, self.q, self.d)
    }
}

impl FromStr for ExactQuad {
    type Err = Error;

    /// Accepts exactly the `Display` form `p + q*sqrt(D)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected \"p + q*sqrt(D)\", got {s:?}"));
        let (p, rest) = s.split_once(" + ").ok_or_else(bad)?;
        let (q, rest) = rest.split_once("*sqrt(").ok_or_else(bad)?;
        let d = rest.strip_suffix(')').ok_or_else(bad)?;
        let d: u32 = d.trim().parse().map_err(|_| bad())?;
        Self::new(parse_rational(p)?, parse_rational(q)?, d)
    }
}

/// Greatest common divisor, always non-negative.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b).abs()
}
