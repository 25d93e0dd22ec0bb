//! Exact gadget construction and its integer-coordinate form.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Layout, PartitionInstance};
use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};
use crate::geometry::{circle_intersection_upper, squared_distance, Point};
use crate::network::PointSet;
use crate::scalar::{exact_sqrt, int, pow2, pow4, rat};
use crate::Rational;

/// Defining circles of one `d_i`: `|c_i d_i| = radius_c`, `|d_i a_{i+1}| = radius_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DDef {
    pub center_c: Point,
    pub radius_c: Rational,
    pub center_a: Point,
    pub radius_a: Rational,
}

/// How closely the stored `d` points are expected to meet their circles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DTolerance {
    /// Computed directly at `d_bits`.
    Native,
    /// Rounded to `k` fractional bits.
    Rounded { k: u32 },
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub instance: PartitionInstance,
    pub layout: Layout,
    pub alphas: Vec<Rational>,
    /// Sum of the alphas, always 1/10.
    pub sigma_total: Rational,
    pub xi: Rational,
    pub points: PointSet,
    pub d_defs: Vec<DDef>,
    pub d_bits: u32,
    pub tolerance: DTolerance,
}

fn v43(s: &Rational) -> Point {
    Point::new(s * int(4), s * int(3))
}

/// Exact coordinates of every point except the `d` points (which are `None`).
fn exact_points(inst: &PartitionInstance) -> Vec<Option<Point>> {
    let n = inst.n();
    let l = Layout::new(n);
    let mut pts: Vec<Option<Point>> = vec![None; l.len()];
    let q4 = |e: usize| Rational::from_integer(pow4(e as u32));
    let a = |i: usize| Point::new(rat(5, 2), int(0)).add(&v43(&(q4(i - 1) - int(1))));
    for i in 1..=n + 1 {
        pts[l.a(i)] = Some(a(i));
    }
    for i in 1..=n {
        let b = a(i).add(&v43(&(q4(i - 1) / int(5))));
        let c = b.add(&v43(&(q4(i - 1) * int(3) / int(5))));
        pts[l.b(i)] = Some(b);
        pts[l.c(i)] = Some(c);
    }
    let f = q4(n) / int(9) - rat(179, 1800);
    let an = a(n + 1);
    pts[l.p1()] = Some(an.add(&Point::new(&f * int(3), &f * int(-4))));
    pts[l.p2()] = Some(an.add(&Point::new(&f * int(12), &f * int(-16))));
    pts[l.q1()] = Some(Point::new(int(0), int(0)));
    pts[l.q2()] = Some(Point::new(int(0), -(rat(25, 9) * q4(n)) + rat(11, 18)));
    for idx in 2..l.mirror(2) {
        if let Some(p) = pts[idx].clone() {
            pts[l.mirror(idx)] = Some(p.mirror());
        }
    }
    pts
}

fn d_defs(inst: &PartitionInstance, exact: &[Option<Point>]) -> Vec<DDef> {
    let l = Layout::new(inst.n());
    (1..=inst.n())
        .map(|i| {
            let q = Rational::from_integer(pow4(i as u32 - 1));
            DDef {
                center_c: exact[l.c(i)].clone().expect("c is exact"),
                radius_c: &q * int(9) + inst.alpha(i),
                center_a: exact[l.a(i + 1)].clone().expect("a is exact"),
                radius_a: q * int(2),
            }
        })
        .collect()
}

/// Build the gadget with each `d_i` approximated to within `2^-d_bits`.
pub fn build_gadget(inst: &PartitionInstance, d_bits: u32) -> Result<Gadget> {
    if d_bits < 32 {
        return Err(Error::InvalidInput(format!("d_bits must be at least 32, got {d_bits}")));
    }
    let n = inst.n();
    let l = Layout::new(n);
    let exact = exact_points(inst);
    let defs = d_defs(inst, &exact);
    let mut pts = exact;
    for (i, def) in defs.iter().enumerate() {
        let r_c = &def.radius_c * &def.radius_c;
        let r_a = &def.radius_a * &def.radius_a;
        let hit = circle_intersection_upper(&def.center_c, &r_c, &def.center_a, &r_a, d_bits)?;
        pts[l.mirror(l.d(i + 1))] = Some(hit.point.mirror());
        pts[l.d(i + 1)] = Some(hit.point);
    }
    let points = PointSet::with_labels(pts.into_iter().map(|p| p.expect("all points set")).collect(), Some(l.labels()))?;
    Ok(Gadget::assemble(inst.clone(), points, defs, d_bits, DTolerance::Native))
}

impl Gadget {
    fn assemble(instance: PartitionInstance, points: PointSet, d_defs: Vec<DDef>, d_bits: u32, tolerance: DTolerance) -> Self {
        let n = instance.n();
        let alphas = instance.alphas();
        let sigma_total = alphas.iter().fold(Rational::zero(), |a, b| a + b);
        let xi = Rational::new(BigInt::one(), pow4(n as u32 + 4) * BigInt::from(instance.sigma_dot()));
        Gadget { instance, layout: Layout::new(n), alphas, sigma_total, xi, points, d_defs, d_bits, tolerance }
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    /// `P = 3 * 4^(n+4) * sigma_dot + 1`.
    pub fn p(&self) -> BigInt {
        pow4(self.n() as u32 + 4) * BigInt::from(self.instance.sigma_dot()) * 3 + 1
    }

    /// `Q = 2 * 4^(n+4) * sigma_dot`.
    pub fn q(&self) -> BigInt {
        pow4(self.n() as u32 + 4) * BigInt::from(self.instance.sigma_dot()) * 2
    }

    /// `P / Q = 3/2 + xi/2`.
    pub fn threshold(&self) -> Rational {
        Rational::new(self.p(), self.q())
    }

    pub fn point(&self, idx: usize) -> &Point {
        self.points.point(idx)
    }

    /// Copy with one point replaced (used to build deliberately broken gadgets).
    pub fn with_point(&self, idx: usize, p: Point) -> Result<Gadget> {
        let mut pts = self.points.points().to_vec();
        pts[idx] = p;
        let mut g = self.clone();
        g.points = PointSet::with_labels(pts, self.points.labels().map(<[String]>::to_vec))?;
        Ok(g)
    }

    /// Defining data of `d_i`, or of `d'_i` mirrored.
    fn d_def_of(&self, idx: usize) -> Option<(usize, bool)> {
        let l = self.layout;
        (1..=self.n()).find_map(|i| {
            if idx == l.d(i) {
                Some((i, false))
            } else if idx == l.mirror(l.d(i)) {
                Some((i, true))
            } else {
                None
            }
        })
    }

    /// Length of `uv` where the construction fixes it as a rational number:
    /// pairs of non-`d` points at rational distance, and `c_i d_i`, `d_i a_{i+1}`
    /// (and mirrors), whose lengths are the defining radii.
    pub fn edge_length_exact(&self, u: usize, v: usize) -> Option<Rational> {
        let l = self.layout;
        match (self.d_def_of(u), self.d_def_of(v)) {
            (None, None) => exact_sqrt(&squared_distance(self.point(u), self.point(v))),
            (Some(_), Some(_)) => None,
            (Some((i, m)), None) | (None, Some((i, m))) => {
                let other = if self.d_def_of(u).is_some() { v } else { u };
                let side = |x: usize| if m { l.mirror(x) } else { x };
                let def = &self.d_defs[i - 1];
                if other == side(l.c(i)) {
                    Some(def.radius_c.clone())
                } else if other == side(l.a(i + 1)) {
                    Some(def.radius_a.clone())
                } else {
                    None
                }
            }
        }
    }

    /// Rebuild from an integer instance, checking every exact coordinate.
    pub fn from_integer_instance(ii: &IntegerInstance) -> Result<Gadget> {
        let inst = PartitionInstance::new(ii.alphas_dot.clone())?;
        let inv = Rational::one() / Rational::from_integer(ii.scale());
        let pts = ii.points.points().iter().map(|p| p.scale(&inv)).collect();
        Gadget::from_points(inst, pts, ii.points.labels(), ii.k, DTolerance::Rounded { k: ii.k })
    }

    /// Assemble from explicit coordinates. Every point other than the `d`
    /// points must match the construction exactly, and `d'_i` must mirror `d_i`.
    pub fn from_points(inst: PartitionInstance, pts: Vec<Point>, labels: Option<&[String]>, d_bits: u32, tolerance: DTolerance) -> Result<Gadget> {
        let l = Layout::new(inst.n());
        if pts.len() != l.len() {
            return Err(Error::InvalidInput(format!("{} points, expected {}", pts.len(), l.len())));
        }
        let names = l.labels();
        if labels.is_some_and(|lab| lab != names.as_slice()) {
            return Err(Error::InvalidInput("labels are not in canonical gadget order".into()));
        }
        let exact = exact_points(&inst);
        for (idx, want) in exact.iter().enumerate() {
            if let Some(w) = want {
                if *w != pts[idx] {
                    return Err(Error::InvalidInput(format!("point {} does not match the construction", names[idx])));
                }
            }
        }
        for i in 1..=inst.n() {
            if pts[l.mirror(l.d(i))] != pts[l.d(i)].mirror() {
                return Err(Error::InvalidInput(format!("d'{i} is not the mirror image of d{i}")));
            }
        }
        let defs = d_defs(&inst, &exact);
        let points = PointSet::with_labels(pts, Some(names))?;
        Ok(Gadget::assemble(inst, points, defs, d_bits, tolerance))
    }
}

/// `d*_i = c_i + (9 * 4^(i-1) / 5) (4, 3)`, on the segment `a_i a_{i+1}`.
pub fn auxiliary_dstar(g: &Gadget, i: usize) -> Result<Point> {
    if !(1..=g.n()).contains(&i) {
        return Err(Error::InvalidInput(format!("index {i} outside 1..={}", g.n())));
    }
    let s = Rational::from_integer(pow4(i as u32 - 1) * 9) / int(5);
    Ok(g.d_defs[i - 1].center_c.add(&v43(&s)))
}

/// Smallest `k` with `2^(k - 4n - 22) > n * sigma_dot`.
pub fn default_k(n: usize, sigma_dot: u64) -> u32 {
    let m = BigInt::from(n) * BigInt::from(sigma_dot);
    4 * n as u32 + 22 + m.bits() as u32
}

/// Integer-coordinate instance with threshold `P / Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerInstance {
    pub alphas_dot: Vec<u64>,
    pub k: u32,
    /// Coordinates multiplied by `1800 * 2^k`, all integers.
    pub points: PointSet,
    pub p: BigInt,
    pub q: BigInt,
    /// Bound on `|d_i - d~_i|` before scaling, `2^-k`.
    pub epsilon_bound: Rational,
}

impl IntegerInstance {
    pub fn n(&self) -> usize {
        self.alphas_dot.len()
    }

    pub fn scale(&self) -> BigInt {
        pow2(self.k) * 1800
    }

    pub fn threshold(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.n())
    }

    /// Largest bit length of any coordinate.
    pub fn coordinate_bits(&self) -> u64 {
        self.points.points().iter().flat_map(|p| [p.x.numer().bits(), p.y.numer().bits()]).max().unwrap_or(0)
    }
}

/// Round each `d~_i` to `k` fractional bits and scale everything by `1800 * 2^k`.
pub fn integerize(g: &Gadget, k: Option<u32>) -> Result<IntegerInstance> {
    let n = g.n();
    let min_k = default_k(n, g.instance.sigma_dot());
    let k = k.unwrap_or(min_k);
    if k < min_k {
        return Err(Error::InvalidInput(format!("k = {k} is below the required {min_k}")));
    }
    // nearest rounding adds at most sqrt(2) 2^-(k+1); two guard bits keep the total below 2^-k
    let need = k + 2;
    let have = match g.tolerance {
        DTolerance::Native => g.d_bits,
        DTolerance::Rounded { k: prev } if prev == k => need,
        DTolerance::Rounded { k: prev } => prev,
    };
    if have < need {
        return Err(Error::PrecisionInsufficient { have, need });
    }
    let scale = Rational::from_integer(pow2(k) * 1800);
    let l = g.layout;
    let mut pts = Vec::with_capacity(l.len());
    for idx in 0..l.len() {
        let p = g.point(idx);
        let p = if l.is_d(idx) {
            let r = |v: &Rational| {
                let frac = v.denom().bits() as i64;
                Dyadic::from_rational_fixed(v, frac, Round::Down).round_to_fixed(k as i64).to_rational()
            };
            Point::new(r(&p.x), r(&p.y))
        } else {
            p.clone()
        };
        let s = p.scale(&scale);
        if !s.x.is_integer() || !s.y.is_integer() {
            return Err(Error::InvalidInput(format!("scaled {} is not integral", l.labels()[idx])));
        }
        pts.push(s);
    }
    Ok(IntegerInstance {
        alphas_dot: g.instance.alphas_dot().to_vec(),
        k,
        points: PointSet::with_labels(pts, Some(l.labels()))?,
        p: g.p(),
        q: g.q(),
        epsilon_bound: Rational::new(BigInt::one(), pow2(k)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{orientation, Orientation};
    use std::collections::BTreeSet;

    fn gadget(v: &[u64]) -> Gadget {
        build_gadget(&PartitionInstance::new(v.to_vec()).unwrap(), 64).unwrap()
    }

    #[test]
    fn single_integer_coordinates() {
        let g = gadget(&[1]);
        let l = g.layout;
        assert_eq!(*g.point(l.a(1)), Point::new(rat(5, 2), int(0)));
        assert_eq!(*g.point(l.a(2)), Point::new(rat(29, 2), int(9)));
        assert_eq!(*g.point(l.b(1)), Point::new(rat(33, 10), rat(3, 5)));
        assert_eq!(*g.point(l.c(1)), Point::new(rat(57, 10), rat(12, 5)));
        assert_eq!(*g.point(l.q2()), Point::new(int(0), rat(-21, 2)));
        assert_eq!(squared_distance(g.point(l.q2()), g.point(l.p2())), rat(233, 10) * rat(233, 10));
        assert_eq!(g.sigma_total, rat(1, 10));
        assert_eq!(g.point(l.mirror(l.b(1))), &g.point(l.b(1)).mirror());
    }

    #[test]
    fn dstar() {
        let g = gadget(&[1]);
        let l = g.layout;
        let ds = auxiliary_dstar(&g, 1).unwrap();
        assert_eq!(ds, Point::new(rat(129, 10), rat(39, 5)));
        assert_eq!(squared_distance(&ds, g.point(l.a(2))), int(4));
        let g = gadget(&[1, 2, 3]);
        for i in 1..=3 {
            let ds = auxiliary_dstar(&g, i).unwrap();
            assert_eq!(orientation(g.point(l_a(&g, 1)), g.point(l_a(&g, 4)), &ds), Orientation::Collinear);
        }
        assert!(auxiliary_dstar(&g, 4).is_err());
    }

    fn l_a(g: &Gadget, i: usize) -> usize {
        g.layout.a(i)
    }

    #[test]
    fn integerize_small() {
        let g = gadget(&[1]);
        assert_eq!(default_k(1, 1), 27);
        let ii = integerize(&g, None).unwrap();
        assert_eq!(ii.k, 27);
        assert_eq!((ii.p.clone(), ii.q.clone()), (BigInt::from(3073), BigInt::from(2048)));
        let s = BigInt::from(1800) * pow2(27);
        assert_eq!(ii.points.point(1 + 1).x, Rational::new(s * 5, BigInt::from(2)));
        assert!(ii.coordinate_bits() <= 2 + 27 + 15);
        assert!(matches!(integerize(&g, Some(80)), Err(Error::PrecisionInsufficient { .. })));
        assert!(integerize(&g, Some(20)).is_err());

        let back = Gadget::from_integer_instance(&ii).unwrap();
        assert_eq!(back.tolerance, DTolerance::Rounded { k: 27 });
        assert_eq!(integerize(&back, None).unwrap(), ii);
    }

    #[test]
    fn xi_and_threshold() {
        let g = gadget(&[1, 1]);
        assert_eq!(g.xi, rat(1, 8192));
        assert_eq!(g.threshold(), rat(3, 2) + rat(1, 16384));
    }

    #[test]
    fn exact_edge_ledger() {
        let g = gadget(&[1, 1]);
        let l = g.layout;
        let t = l.standard_tree(&BTreeSet::from([1])).unwrap();
        for &(u, v) in t.edges() {
            if u != l.q2() && v != l.q2() || u == l.q1() {
                assert!(g.edge_length_exact(u, v).is_some(), "{:?}", (g.points.label(u), g.points.label(v)));
            }
        }
        assert_eq!(g.edge_length_exact(l.c(1), l.d(1)), Some(int(9) + rat(1, 20)));
        assert_eq!(g.edge_length_exact(l.mirror(l.d(2)), l.mirror(l.a(3))), Some(int(8)));
    }
}
