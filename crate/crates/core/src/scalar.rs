//! Scalar abstraction for planar primitives, plus rational helpers.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{Num, One, Signed, Zero};

use crate::Rational;

/// Coordinate type accepted by the planar predicates.
///
/// Exact rationals give exact predicates; `f64` is accepted for plotting
/// and quick filtering but its predicates are only as good as the inputs.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Send + Sync {
    /// Exact rational value of the scalar.
    fn to_rational(&self) -> Rational;
}

impl Scalar for Rational {
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

impl Scalar for f64 {
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("finite coordinate")
    }
}

impl Scalar for i64 {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(*self))
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn pow4(e: u32) -> BigInt {
    BigInt::one() << (2 * e as usize)
}

pub fn pow2(e: u32) -> BigInt {
    BigInt::one() << (e as usize)
}

/// Exact square root when `r` is the square of a rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rational::zero());
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// Parse `"p/q"` or `"p"` into a rational; `q` must be positive.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if !d.is_positive() {
                return Err(format!("denominator must be positive in {s:?}"));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| format!("not a rational: {s:?}"))?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(exact_sqrt(&rat(225, 1)), Some(int(15)));
        assert_eq!(exact_sqrt(&rat(1125, 100)), None);
        assert_eq!(exact_sqrt(&rat(9, 4)), Some(rat(3, 2)));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&int(-3)), "-3");
    }
}
