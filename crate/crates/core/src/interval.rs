//! Certified enclosures `[lo, hi]` of real quantities.
//!
//! [`Interval`] is generic over its endpoint type. `f64` endpoints with
//! directed rounding give a fast first pass; [`Dyadic`] endpoints give
//! arbitrary precision for escalation.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::dyadic::{rational_to_f64, Dyadic, Round};
use crate::Rational;

/// Number of significant bits carried by the `f64` stage.
pub const F64_BITS: u32 = 53;

/// Endpoint arithmetic with directed rounding.
pub trait Bound: Clone + PartialOrd + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn from_rational(r: &Rational, bits: u32, round: Round) -> Self;
    fn sqrt_rational(r: &Rational, bits: u32, round: Round) -> Self;
    fn add(&self, o: &Self, round: Round) -> Self;
    fn sub(&self, o: &Self, round: Round) -> Self;
    fn mul(&self, o: &Self, bits: u32, round: Round) -> Self;
    fn div(&self, o: &Self, bits: u32, round: Round) -> Self;
    fn cmp_rational(&self, r: &Rational) -> Ordering;
    fn to_rational(&self) -> Rational;
    fn approx(&self) -> f64;
}

impl Bound for Dyadic {
    fn zero() -> Self {
        Dyadic::zero()
    }
    fn from_rational(r: &Rational, bits: u32, round: Round) -> Self {
        Dyadic::from_rational(r, bits, round)
    }
    fn sqrt_rational(r: &Rational, bits: u32, round: Round) -> Self {
        Dyadic::sqrt_rational(r, bits, round)
    }
    fn add(&self, o: &Self, _round: Round) -> Self {
        Dyadic::add(self, o)
    }
    fn sub(&self, o: &Self, _round: Round) -> Self {
        Dyadic::sub(self, o)
    }
    fn mul(&self, o: &Self, _bits: u32, _round: Round) -> Self {
        Dyadic::mul(self, o)
    }
    fn div(&self, o: &Self, bits: u32, round: Round) -> Self {
        Dyadic::div(self, o, bits, round)
    }
    fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.to_rational().cmp(r)
    }
    fn to_rational(&self) -> Rational {
        Dyadic::to_rational(self)
    }
    fn approx(&self) -> f64 {
        self.to_f64(Round::Down)
    }
}

/// Error-free transformation of a sum: `a + b = s + err` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn nudge(v: f64, residual_sign: f64, round: Round) -> f64 {
    match round {
        Round::Down if residual_sign < 0.0 => v.next_down(),
        Round::Up if residual_sign > 0.0 => v.next_up(),
        _ => v,
    }
}

impl Bound for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_rational(r: &Rational, _bits: u32, round: Round) -> Self {
        rational_to_f64(r, round)
    }
    fn sqrt_rational(r: &Rational, _bits: u32, round: Round) -> Self {
        if r.is_zero() {
            return 0.0;
        }
        let x = rational_to_f64(r, round);
        let s = x.sqrt();
        // sqrt is correctly rounded, so one step outward is an enclosure;
        // stay put when the square is exact
        let sq = Rational::from_float(s).expect("finite");
        match (round, (&sq * &sq).cmp(r)) {
            (Round::Down, Ordering::Greater) => s.next_down(),
            (Round::Up, Ordering::Less) => s.next_up(),
            _ => s,
        }
    }
    fn add(&self, o: &Self, round: Round) -> Self {
        let (s, err) = two_sum(*self, *o);
        nudge(s, err, round)
    }
    fn sub(&self, o: &Self, round: Round) -> Self {
        Bound::add(self, &-*o, round)
    }
    fn mul(&self, o: &Self, _bits: u32, round: Round) -> Self {
        let p = self * o;
        let err = self.mul_add(*o, -p);
        nudge(p, err, round)
    }
    fn div(&self, o: &Self, _bits: u32, round: Round) -> Self {
        let q = self / o;
        // a - q*b computed exactly; its sign relative to b is the sign of the error
        let rem = (-q).mul_add(*o, *self);
        let err = if *o < 0.0 { -rem } else { rem };
        nudge(q, err, round)
    }
    fn cmp_rational(&self, r: &Rational) -> Ordering {
        match Rational::from_float(*self) {
            Some(v) => v.cmp(r),
            None if *self > 0.0 => Ordering::Greater,
            None => Ordering::Less,
        }
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("finite bound")
    }
    fn approx(&self) -> f64 {
        *self
    }
}

/// A closed interval guaranteed to contain the quantity it stands for.
#[derive(Clone, Debug)]
pub struct Interval<B = Dyadic> {
    pub lo: B,
    pub hi: B,
    pub precision_bits: u32,
}

pub type FastInterval = Interval<f64>;

impl<B: Bound> Interval<B> {
    pub fn new(lo: B, hi: B, precision_bits: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval {lo:?} > {hi:?}");
        Interval { lo, hi, precision_bits }
    }

    pub fn point(v: B, precision_bits: u32) -> Self {
        Interval { lo: v.clone(), hi: v, precision_bits }
    }

    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        Interval::new(B::from_rational(r, bits, Round::Down), B::from_rational(r, bits, Round::Up), bits)
    }

    /// Enclosure of `sqrt(r)` for a nonnegative rational.
    pub fn sqrt(r: &Rational, bits: u32) -> Self {
        Interval::new(B::sqrt_rational(r, bits, Round::Down), B::sqrt_rational(r, bits, Round::Up), bits)
    }

    pub fn zero(bits: u32) -> Self {
        Interval::point(B::zero(), bits)
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval {
            lo: self.lo.add(&o.lo, Round::Down),
            hi: self.hi.add(&o.hi, Round::Up),
            precision_bits: self.precision_bits.min(o.precision_bits),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval {
            lo: self.lo.sub(&o.hi, Round::Down),
            hi: self.hi.sub(&o.lo, Round::Up),
            precision_bits: self.precision_bits.min(o.precision_bits),
        }
    }

    /// Product of two nonnegative intervals.
    pub fn mul_nonneg(&self, o: &Self) -> Self {
        let bits = self.precision_bits.min(o.precision_bits);
        Interval { lo: self.lo.mul(&o.lo, bits, Round::Down), hi: self.hi.mul(&o.hi, bits, Round::Up), precision_bits: bits }
    }

    /// Quotient of a nonnegative interval by a strictly positive one.
    pub fn div_pos(&self, o: &Self) -> Self {
        let bits = self.precision_bits.min(o.precision_bits);
        Interval {
            lo: self.lo.div(&o.hi, bits, Round::Down),
            hi: self.hi.div(&o.lo, bits, Round::Up),
            precision_bits: bits,
        }
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        self.lo.cmp_rational(r) != Ordering::Greater && self.hi.cmp_rational(r) != Ordering::Less
    }

    /// Certified comparison with a rational: `Some(Less)` when `hi < r`,
    /// `Some(Greater)` when `lo > r`, `Some(Equal)` when `lo = hi = r`.
    pub fn cmp_rational(&self, r: &Rational) -> Option<Ordering> {
        if self.hi.cmp_rational(r) == Ordering::Less {
            Some(Ordering::Less)
        } else if self.lo.cmp_rational(r) == Ordering::Greater {
            Some(Ordering::Greater)
        } else if self.lo.cmp_rational(r) == Ordering::Equal && self.hi.cmp_rational(r) == Ordering::Equal {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// `true` when the whole interval is `<= r`.
    pub fn certainly_le(&self, r: &Rational) -> bool {
        self.hi.cmp_rational(r) != Ordering::Greater
    }

    /// `true` when the whole interval is `> r`.
    pub fn certainly_gt(&self, r: &Rational) -> bool {
        self.lo.cmp_rational(r) == Ordering::Greater
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        !(self.hi < o.lo || o.hi < self.lo)
    }

    /// Smallest interval containing both.
    pub fn hull(&self, o: &Self) -> Self {
        let lo = if o.lo < self.lo { o.lo.clone() } else { self.lo.clone() };
        let hi = if o.hi > self.hi { o.hi.clone() } else { self.hi.clone() };
        Interval { lo, hi, precision_bits: self.precision_bits.min(o.precision_bits) }
    }

    pub fn width(&self) -> Rational {
        self.hi.to_rational() - self.lo.to_rational()
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (self.lo.approx() + self.hi.approx())
    }

    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational()
    }

    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational()
    }
}

impl Interval<Dyadic> {
    /// Same enclosure widened to `f64` endpoints.
    pub fn to_fast(&self) -> FastInterval {
        Interval { lo: self.lo.to_f64(Round::Down), hi: self.hi.to_f64(Round::Up), precision_bits: F64_BITS }
    }
}

impl<B: Bound> fmt::Display for Interval<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17}, {:.17}] @{}b", self.lo.approx(), self.hi.approx(), self.precision_bits)
    }
}

/// Whether the nonnegative interval has `lo >= 0`.
pub fn is_nonneg<B: Bound>(iv: &Interval<B>) -> bool {
    !iv.lo.to_rational().is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn f64_directed_ops_enclose() {
        let a = 0.1f64;
        let b = 0.2f64;
        let lo = Bound::add(&a, &b, Round::Down);
        let hi = Bound::add(&a, &b, Round::Up);
        let exact = Rational::from_float(a).unwrap() + Rational::from_float(b).unwrap();
        assert!(lo.cmp_rational(&exact) != Ordering::Greater);
        assert!(hi.cmp_rational(&exact) != Ordering::Less);
        assert!(lo < hi);
        // exact sums stay tight
        assert_eq!(Bound::add(&1.0f64, &1.0, Round::Up), 2.0);

        let lo = Bound::div(&1.0f64, &3.0, 53, Round::Down);
        let hi = Bound::div(&1.0f64, &3.0, 53, Round::Up);
        assert!(lo.cmp_rational(&q(1, 3)) == Ordering::Less);
        assert!(hi.cmp_rational(&q(1, 3)) == Ordering::Greater);
        assert_eq!(Bound::div(&6.0f64, &3.0, 53, Round::Down), 2.0);
    }

    #[test]
    fn f64_sqrt_encloses() {
        let r = q(2, 1);
        let iv = FastInterval::sqrt(&r, F64_BITS);
        let lo = iv.lo.to_rational();
        let hi = iv.hi.to_rational();
        assert!(&lo * &lo <= r && &hi * &hi >= r);
        let five = FastInterval::sqrt(&q(25, 1), F64_BITS);
        assert_eq!((five.lo, five.hi), (5.0, 5.0));
    }

    #[test]
    fn threshold_comparison() {
        let iv: Interval = Interval::sqrt(&q(2, 1), 64);
        assert_eq!(iv.cmp_rational(&q(3, 2)), Some(Ordering::Less));
        assert_eq!(iv.cmp_rational(&q(1, 1)), Some(Ordering::Greater));
        let one: Interval = Interval::from_rational(&q(1, 1), 64);
        assert_eq!(one.cmp_rational(&q(1, 1)), Some(Ordering::Equal));
        assert!(one.certainly_le(&q(1, 1)));
    }
}
