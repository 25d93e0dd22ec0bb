//! Binary floating values `m * 2^e` with arbitrary-precision mantissa.
//!
//! Addition, subtraction and multiplication are exact. Division and square
//! roots round in a caller-chosen direction to a caller-chosen number of
//! significant bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Rounding direction for inexact operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

#[derive(Clone, Debug)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

fn bit_len(x: &BigInt) -> i64 {
    x.bits() as i64
}

fn shl(x: &BigInt, s: i64) -> BigInt {
    debug_assert!(s >= 0);
    x << (s as usize)
}

/// `floor` or `ceil` of `num / den` for `den > 0`.
fn div_round(num: &BigInt, den: &BigInt, round: Round) -> BigInt {
    match round {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz as usize;
            self.exponent += tz as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Exact conversion to a rational.
    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_integer(shl(&self.mantissa, self.exponent))
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << ((-self.exponent) as usize))
        }
    }

    /// Round a rational to a dyadic with `frac_bits` bits after the binary point.
    pub fn from_rational_fixed(r: &Rational, frac_bits: i64, round: Round) -> Self {
        let (num, den) = (r.numer(), r.denom());
        let m = if frac_bits >= 0 {
            div_round(&shl(num, frac_bits), den, round)
        } else {
            div_round(num, &shl(den, -frac_bits), round)
        };
        Dyadic::new(m, -frac_bits)
    }

    /// Round a rational to `bits` significant bits.
    pub fn from_rational(r: &Rational, bits: u32, round: Round) -> Self {
        if r.is_zero() {
            return Dyadic::zero();
        }
        let mag = bit_len(r.numer()) - bit_len(r.denom());
        let frac = bits as i64 - mag + 1;
        Dyadic::from_rational_fixed(r, frac, round)
    }

    /// Round to the nearest multiple of `2^-frac_bits` (ties away from zero are fine here).
    pub fn round_to_fixed(&self, frac_bits: i64) -> Self {
        if -self.exponent <= frac_bits {
            return self.clone();
        }
        let shift = (-self.exponent - frac_bits) as usize;
        let half = BigInt::one() << (shift - 1);
        let m = (&self.mantissa + half) >> shift;
        Dyadic::new(m, -frac_bits)
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        let e = self.exponent.min(o.exponent);
        let a = shl(&self.mantissa, self.exponent - e);
        let b = shl(&o.mantissa, o.exponent - e);
        Dyadic::new(a + b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &o.mantissa, self.exponent + o.exponent)
    }

    /// Quotient rounded to at least `bits` significant bits. `o` must be nonzero.
    pub fn div(&self, o: &Dyadic, bits: u32, round: Round) -> Dyadic {
        assert!(!o.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let (mut num, mut den) = (self.mantissa.clone(), o.mantissa.clone());
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let s = bits as i64 + 2 + bit_len(&den) - bit_len(&num);
        let q = if s >= 0 {
            div_round(&shl(&num, s), &den, round)
        } else {
            div_round(&num, &shl(&den, -s), round)
        };
        Dyadic::new(q, self.exponent - o.exponent - s)
    }

    /// Directed `bits`-significant-bit bound on `sqrt(r)` for `r >= 0`.
    pub fn sqrt_rational(r: &Rational, bits: u32, round: Round) -> Dyadic {
        assert!(!r.is_negative(), "square root of a negative rational");
        if r.is_zero() {
            return Dyadic::zero();
        }
        let mag = bit_len(r.numer()) - bit_len(r.denom());
        // scale so that r * 4^s has about 2*bits + 4 bits before the binary point
        let s = bits as i64 + 3 - Integer::div_floor(&mag, &2);
        let (num, den) = (r.numer(), r.denom());
        let scaled = if s >= 0 {
            div_round(&shl(num, 2 * s), den, round)
        } else {
            div_round(num, &shl(den, -2 * s), round)
        };
        let mut root = scaled.sqrt();
        if round == Round::Up && &root * &root < scaled {
            root += 1;
        }
        Dyadic::new(root, -s)
    }

    /// Exact value of a finite float.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite float");
        if v == 0.0 {
            return Dyadic::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1i64 << 52), exp - 1075) };
        Dyadic::new(BigInt::from(sign * m), e)
    }

    /// Directed conversion to `f64`.
    pub fn to_f64(&self, round: Round) -> f64 {
        rational_to_f64(&self.to_rational(), round)
    }
}

/// `f64` bound on a rational in the requested direction.
pub fn rational_to_f64(r: &Rational, round: Round) -> f64 {
    let approx = r.to_f64().unwrap_or(match r.is_negative() {
        true => f64::NEG_INFINITY,
        false => f64::INFINITY,
    });
    if !approx.is_finite() {
        return match round {
            Round::Down if approx > 0.0 => f64::MAX,
            Round::Up if approx < 0.0 => f64::MIN,
            _ => approx,
        };
    }
    let exact = Rational::from_float(approx).expect("finite float");
    match (round, exact.cmp(r)) {
        (Round::Down, Ordering::Greater) => approx.next_down(),
        (Round::Up, Ordering::Less) => approx.next_up(),
        _ => approx,
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let e = self.exponent.min(o.exponent);
        shl(&self.mantissa, self.exponent - e).cmp(&shl(&o.mantissa, o.exponent - e))
    }
}

impl fmt::Display for Dyadic {
    /// Renders as `m*2^e`, the form used by the gadget file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl std::str::FromStr for Dyadic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, e) = s.split_once("*2^").ok_or_else(|| format!("not a dyadic string: {s}"))?;
        let m: BigInt = m.trim().parse().map_err(|_| format!("bad mantissa in {s}"))?;
        let e: i64 = e.trim().parse().map_err(|_| format!("bad exponent in {s}"))?;
        Ok(Dyadic::new(m, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt_brackets_and_is_exact_on_squares() {
        let r = q(25, 1);
        let lo = Dyadic::sqrt_rational(&r, 32, Round::Down);
        let hi = Dyadic::sqrt_rational(&r, 32, Round::Up);
        assert_eq!(lo, Dyadic::from_int(5));
        assert_eq!(hi, Dyadic::from_int(5));

        let r = q(2, 1);
        for bits in [8u32, 53, 64, 200] {
            let lo = Dyadic::sqrt_rational(&r, bits, Round::Down).to_rational();
            let hi = Dyadic::sqrt_rational(&r, bits, Round::Up).to_rational();
            assert!(&lo * &lo <= r && &hi * &hi >= r);
            let width = &hi - &lo;
            let bound = &hi * Rational::new(BigInt::one(), BigInt::one() << (bits as usize - 1));
            assert!(width <= bound, "bits={bits}");
        }
    }

    #[test]
    fn division_rounds_in_requested_direction() {
        let one = Dyadic::from_int(1);
        let three = Dyadic::from_int(3);
        let lo = one.div(&three, 40, Round::Down).to_rational();
        let hi = one.div(&three, 40, Round::Up).to_rational();
        assert!(lo < q(1, 3) && q(1, 3) < hi);
        assert_eq!(Dyadic::from_int(6).div(&three, 10, Round::Down), Dyadic::from_int(2));
    }

    #[test]
    fn directed_f64_conversion() {
        let third = q(1, 3);
        let lo = rational_to_f64(&third, Round::Down);
        let hi = rational_to_f64(&third, Round::Up);
        assert!(Rational::from_float(lo).unwrap() < third);
        assert!(Rational::from_float(hi).unwrap() > third);
        assert_eq!(rational_to_f64(&q(1, 4), Round::Down), 0.25);
    }

    #[test]
    fn float_conversion_is_exact() {
        for v in [1.5f64, -0.1, 3.0e-300, 1e300, 5e-324] {
            assert_eq!(Dyadic::from_f64(v).to_rational(), Rational::from_float(v).unwrap());
        }
    }

    #[test]
    fn string_round_trip() {
        let d = Dyadic::new(BigInt::from(-12345), -17);
        let s = d.to_string();
        assert_eq!(s.parse::<Dyadic>().unwrap(), d);
    }

    #[test]
    fn fixed_rounding() {
        let d = Dyadic::from_rational_fixed(&q(1, 3), 10, Round::Down);
        assert_eq!(d.to_rational(), q(341, 1024));
        assert_eq!(d.round_to_fixed(4).to_rational(), q(5, 16));
    }
}
