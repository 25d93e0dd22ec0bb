//! Planar primitives: points, squared distances, orientation, crossings,
//! certified distances and circle–circle intersection.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point<T = Rational> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Point::new(self.x.clone() - o.x.clone(), self.y.clone() - o.y.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        Point::new(self.x.clone() + o.x.clone(), self.y.clone() + o.y.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Point::new(self.x.clone() * s.clone(), self.y.clone() * s.clone())
    }

    /// Reflection in the y-axis.
    pub fn mirror(&self) -> Self {
        Point::new(-self.x.clone(), self.y.clone())
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    pub fn cross(&self, o: &Self) -> T {
        self.x.clone() * o.y.clone() - self.y.clone() * o.x.clone()
    }

    pub fn to_exact(&self) -> Point<Rational> {
        Point::new(self.x.to_rational(), self.y.to_rational())
    }
}

impl Point<Rational> {
    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Rational::from_integer(x.into()), Rational::from_integer(y.into()))
    }

    pub fn to_f64(&self) -> Point<f64> {
        use num_traits::ToPrimitive;
        Point::new(self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment<T = Rational> {
    pub a: Point<T>,
    pub b: Point<T>,
}

impl<T: Scalar> Segment<T> {
    pub fn new(a: Point<T>, b: Point<T>) -> Result<Self> {
        if a == b {
            return Err(Error::DegenerateSegment);
        }
        Ok(Segment { a, b })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

pub fn squared_distance<T: Scalar>(p: &Point<T>, q: &Point<T>) -> T {
    let d = p.sub(q);
    d.dot(&d)
}

/// Sign of `(b - a) x (c - a)`.
pub fn orientation<T: Scalar>(a: &Point<T>, b: &Point<T>, c: &Point<T>) -> Orientation {
    let det = b.sub(a).cross(&c.sub(a));
    if det.is_positive() {
        Orientation::CounterClockwise
    } else if det.is_negative() {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// Positive-length overlap of two collinear segments.
fn collinear_overlap<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> bool {
    let dir = s1.b.sub(&s1.a);
    let key = |p: &Point<T>| p.sub(&s1.a).dot(&dir);
    let (mut a0, mut a1) = (key(&s1.a), key(&s1.b));
    let (mut b0, mut b1) = (key(&s2.a), key(&s2.b));
    if a0 > a1 {
        std::mem::swap(&mut a0, &mut a1);
    }
    if b0 > b1 {
        std::mem::swap(&mut b0, &mut b1);
    }
    let lo = if a0 > b0 { a0 } else { b0 };
    let hi = if a1 < b1 { a1 } else { b1 };
    lo < hi
}

/// Crossing at a point interior to both segments, or a collinear overlap of
/// positive length. Touching at an endpoint does not count.
pub fn segments_properly_cross<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> bool {
    use Orientation::*;
    let o1 = orientation(&s1.a, &s1.b, &s2.a);
    let o2 = orientation(&s1.a, &s1.b, &s2.b);
    let o3 = orientation(&s2.a, &s2.b, &s1.a);
    let o4 = orientation(&s2.a, &s2.b, &s1.b);
    if [o1, o2, o3, o4].iter().all(|o| *o == Collinear) {
        return collinear_overlap(s1, s2);
    }
    o1 != Collinear && o2 != Collinear && o1 != o2 && o3 != Collinear && o4 != Collinear && o3 != o4
}

/// Certified enclosure of `|pq|` carrying `bits` significant bits.
pub fn distance_interval(p: &Point, q: &Point, bits: u32) -> Interval {
    Interval::sqrt(&squared_distance(p, q), bits.max(8))
}

/// Dyadic approximation of one intersection point of two circles.
#[derive(Clone, Debug)]
pub struct CircleIntersection {
    pub point: Point,
    /// `|squared_distance(point, c_k) - r_k^2|` for both circles.
    pub residuals: [Rational; 2],
    /// Number of fractional binary digits in the coordinates of `point`.
    pub frac_bits: u32,
}

fn fixed_sqrt(t: &Rational, frac_bits: u32) -> Rational {
    // floor(sqrt(t) * 2^m) / 2^m, error below 2^-m
    let scaled = (t.numer() << (2 * frac_bits as usize)) / t.denom();
    Rational::new(scaled.sqrt(), BigInt::one() << frac_bits as usize)
}

/// Intersection of the circles `|x - c1|^2 = r1_sq` and `|x - c2|^2 = r2_sq`
/// lying strictly left of the directed line `c1 -> c2`, within `2^-bits`.
///
/// Coordinates carry extra guard bits so that both residuals stay below
/// `2^(4 - bits)` even for large radii.
pub fn circle_intersection_upper(
    c1: &Point,
    r1_sq: &Rational,
    c2: &Point,
    r2_sq: &Rational,
    bits: u32,
) -> Result<CircleIntersection> {
    let bits = bits.max(8);
    let delta = c2.sub(c1);
    let dist_sq = delta.dot(&delta);
    if dist_sq.is_zero() {
        return Err(Error::NoIntersection);
    }
    let two = Rational::from_integer(2.into());
    // foot of the chord: c1 + lambda * delta
    let lambda = (r1_sq - r2_sq + &dist_sq) / (&two * &dist_sq);
    let base = c1.add(&delta.scale(&lambda));
    // half-chord over |delta|, squared
    let t = r1_sq / &dist_sq - &lambda * &lambda;
    match t.cmp(&Rational::zero()) {
        Ordering::Less => return Err(Error::NoIntersection),
        Ordering::Equal => return Err(Error::Tangent { point: Box::new(base) }),
        Ordering::Greater => {}
    }
    let perp = Point::new(-delta.y.clone(), delta.x.clone());

    let radius_bits = r1_sq.clone().max(r2_sq.clone()).ceil().to_integer().bits() as u32 / 2 + 1;
    let frac_bits = bits + radius_bits + 6;
    let perp_bits = perp.x.abs().max(perp.y.abs()).ceil().to_integer().bits() as u32;
    let s = fixed_sqrt(&t, frac_bits + perp_bits + 4);

    let round = |v: Rational| Dyadic::from_rational_fixed(&v, frac_bits as i64 * 2, crate::dyadic::Round::Down)
        .round_to_fixed(frac_bits as i64)
        .to_rational();
    let x = round(&base.x + &s * &perp.x);
    let y = round(&base.y + &s * &perp.y);
    let point = Point::new(x, y);
    let residuals = [
        (squared_distance(&point, c1) - r1_sq).abs(),
        (squared_distance(&point, c2) - r2_sq).abs(),
    ];
    Ok(CircleIntersection { point, residuals, frac_bits })
}
