//! Arbitrary-precision rationals.
//!
//! `BigRational` already keeps values reduced with a positive denominator,
//! so it is used directly; this module only adds parsing and conversions.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"`, `"-p"` or `"p/q"` (surrounding whitespace allowed).
pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    let bad = |message: &str| Error::Parse {
        position: 0,
        message: alloc::format!("{message}: `{text}`"),
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let num: BigInt = num.parse().map_err(|_| bad("bad rational numerator"))?;
    let den: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad("bad rational denominator"))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rat::new(num, den))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Integer-valued `Rat` from `k`.
pub fn from_usize(k: usize) -> Rat {
    Rat::from_integer(BigInt::from(k))
}

/// Least common multiple of denominators, as a positive integer.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Gcd of the numerators of integer-valued rationals (zero if all are zero).
pub fn integer_content<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, r| acc.gcd(r.numer()))
}

/// Size used to rank pivots: total bit length of numerator and denominator.
pub fn bit_size(r: &Rat) -> u64 {
    r.numer().bits() + r.denom().bits()
}

pub fn powi(base: &Rat, exp: u32) -> Rat {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn to_strings(values: &[Rat]) -> Vec<alloc::string::String> {
    use alloc::string::ToString;
    values.iter().map(|v| v.to_string()).collect()
}
