//! The rational coefficient field.
//!
//! `Rat` is `num`'s arbitrary-precision rational, which already maintains
//! the invariants we rely on everywhere: always reduced, denominator
//! positive, canonical zero 0/1. The canonical text encoding is "p/q",
//! or just "p" when q = 1, which is exactly its Display/FromStr behaviour.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed};

use super::{ArithError, Result};

pub type Rat = BigRational;

/// Shorthand for small rational constants.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parses the canonical "p/q" (or "p") encoding.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|_| ArithError::BadRational(s.to_string()))
}

/// Canonical text encoding "p/q", or "p" when the denominator is 1.
pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

/// Exact square root, via integer square roots of numerator and denominator.
///
/// Returns an error when the value is negative or not a rational square.
pub fn rat_sqrt(r: &Rat) -> Result<Rat> {
    if r.is_negative() {
        return Err(ArithError::NotARationalSquare(r.to_string()));
    }
    let n = int_sqrt(r.numer())?;
    let d = int_sqrt(r.denom())?;
    Ok(Rat::new(n, d))
}

fn int_sqrt(n: &BigInt) -> Result<BigInt> {
    let s = n.sqrt();
    if &(&s * &s) == n {
        Ok(s)
    } else {
        Err(ArithError::NotARationalSquare(n.to_string()))
    }
}

/// r^k for any integer k (errors only implicitly via panic on 0^negative,
/// which callers rule out).
pub fn rat_pow(r: &Rat, k: i64) -> Rat {
    if k == 0 {
        return Rat::one();
    }
    let mut base = if k > 0 { r.clone() } else { r.recip() };
    let mut e = k.unsigned_abs();
    let mut acc = Rat::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// f64 approximation (for the numeric layers only).
pub fn rat_to_f64(r: &Rat) -> f64 {
    num::ToPrimitive::to_f64(r).unwrap_or_else(|| {
        // fall back through a scaled division for extreme magnitudes
        let n = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
        let d = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
        n / d
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_round_trip() {
        let r = rat(-3, 6);
        assert_eq!(rat_to_string(&r), "-1/2");
        assert_eq!(rat_from_str("-1/2").unwrap(), r);
        assert_eq!(rat_to_string(&rat(4, 2)), "2");
        assert_eq!(rat_from_str("2").unwrap(), rat(2, 1));
    }

    #[test]
    fn reduced_with_positive_denominator() {
        let r = Rat::new(BigInt::from(4), BigInt::from(-6));
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
        assert_eq!(Rat::zero(), rat(0, 5));
    }

    #[test]
    fn sqrt_exact_or_error() {
        assert_eq!(rat_sqrt(&rat(9, 4)).unwrap(), rat(3, 2));
        assert_eq!(rat_sqrt(&rat(0, 1)).unwrap(), Rat::zero());
        assert!(rat_sqrt(&rat(2, 1)).is_err());
        assert!(rat_sqrt(&rat(-1, 4)).is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(rat_pow(&rat(2, 3), 3), rat(8, 27));
        assert_eq!(rat_pow(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(rat_pow(&rat(5, 7), 0), rat(1, 1));
    }
}
