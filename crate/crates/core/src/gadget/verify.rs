//! Certified checks of the gadget's geometric properties.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{auxiliary_dstar, DTolerance, Gadget};
use crate::dilation::{sqrt_sum_exceeds, CertConfig, DilationEngine};
use crate::geometry::{circle_intersection_upper, orientation, squared_distance, Orientation, Point};
use crate::scalar::{int, pow2, pow4, rat};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// First failing item, empty on success.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub checks: Vec<Check>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Distances,
    Mirror,
    AlphaSum,
    Residuals,
    Side,
    Angle,
    Slope,
    DStar,
    Critical,
    Alternation,
}

const KINDS: [Kind; 10] = [
    Kind::Distances,
    Kind::Mirror,
    Kind::AlphaSum,
    Kind::Residuals,
    Kind::Side,
    Kind::Angle,
    Kind::Slope,
    Kind::DStar,
    Kind::Critical,
    Kind::Alternation,
];

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Distances => "distance identities",
            Kind::Mirror => "mirror symmetry",
            Kind::AlphaSum => "alpha sum",
            Kind::Residuals => "d residuals",
            Kind::Side => "d side and height",
            Kind::Angle => "angle at a_{i+1}",
            Kind::Slope => "slope of c_i d_i",
            Kind::DStar => "distance to d*",
            Kind::Critical => "critical edges at 8/5",
            Kind::Alternation => "alternation obstruction",
        }
    }
}

/// `|p|^2`-free comparison `sqrt(a) < sqrt(b) + sqrt(c)`.
fn sqrt_lt_sum(a: &Rational, b: &Rational, c: &Rational) -> bool {
    sqrt_sum_exceeds(&Rational::one(), a, b, c)
}

struct Ctx<'a> {
    g: &'a Gadget,
    cfg: CertConfig,
}

impl Ctx<'_> {
    fn p(&self, idx: usize) -> &Point {
        self.g.point(idx)
    }

    fn sq(&self, u: usize, v: usize) -> Rational {
        squared_distance(self.p(u), self.p(v))
    }

    fn q(&self, i: usize) -> Rational {
        Rational::from_integer(pow4(i as u32 - 1))
    }

    /// Allowed slack in the position of each `d` point.
    fn position_slack(&self) -> Rational {
        match self.g.tolerance {
            DTolerance::Native => Rational::new(BigInt::one(), pow2(self.g.d_bits)),
            DTolerance::Rounded { k } => Rational::new(BigInt::one(), pow2(k)),
        }
    }

    fn run(&self, kind: Kind) -> std::result::Result<(), String> {
        let l = self.g.layout;
        let n = l.n;
        let d = |i: usize| l.d(i);
        match kind {
            Kind::Distances => {
                let want = |u: usize, v: usize, len: Rational, what: &str| {
                    if self.sq(u, v) == &len * &len {
                        Ok(())
                    } else {
                        Err(format!("{what} is not {len}"))
                    }
                };
                for i in 1..=n {
                    let q = self.q(i);
                    want(l.a(i), l.a(i + 1), &q * int(15), &format!("|a_{i} a_{}|", i + 1))?;
                    want(l.a(i), l.b(i), q.clone(), &format!("|a_{i} b_{i}|"))?;
                    want(l.b(i), l.c(i), &q * int(3), &format!("|b_{i} c_{i}|"))?;
                    want(l.c(i), l.a(i + 1), &q * int(11), &format!("|c_{i} a_{}|", i + 1))?;
                }
                let span = Rational::from_integer(pow4(n as u32) - 1) * int(5);
                want(l.a(1), l.a(n + 1), span, "|a_1 a_{n+1}|")?;
                let qp = rat(5, 3) * Rational::from_integer(pow4(n as u32 + 1)) - rat(101, 30);
                want(l.q2(), l.p2(), qp.clone(), "|q_2 p_2|")?;
                want(l.q2(), l.mirror(l.p2()), qp, "|q_2 p'_2|")
            }
            Kind::Mirror => {
                for idx in 2..l.mirror(2) {
                    if *self.p(l.mirror(idx)) != self.p(idx).mirror() {
                        return Err(format!("point {} is not mirrored", self.g.points.label(idx)));
                    }
                }
                for idx in [l.q1(), l.q2()] {
                    if !self.p(idx).x.is_zero() {
                        return Err(format!("{} is off the axis", self.g.points.label(idx)));
                    }
                }
                Ok(())
            }
            Kind::AlphaSum => {
                let s = self.g.alphas.iter().fold(Rational::zero(), |a, b| a + b);
                if s == rat(1, 10) && self.g.sigma_total == s && self.g.alphas.iter().all(|a| a.is_positive() && *a <= rat(1, 10)) {
                    Ok(())
                } else {
                    Err(format!("alphas sum to {s}"))
                }
            }
            Kind::Residuals => {
                for i in 1..=n {
                    let def = &self.g.d_defs[i - 1];
                    for (center, r) in [(&def.center_c, &def.radius_c), (&def.center_a, &def.radius_a)] {
                        let res = (squared_distance(self.p(d(i)), center) - r * r).abs();
                        let tol = match self.g.tolerance {
                            DTolerance::Native => Rational::new(BigInt::from(16), pow2(self.g.d_bits)),
                            // moving by eps changes |x - c|^2 by at most (2r + 1) eps
                            DTolerance::Rounded { k } => (r * int(2) + int(1)) / Rational::from_integer(pow2(k)),
                        };
                        if res >= tol {
                            return Err(format!("d_{i} residual {res} not below {tol}"));
                        }
                    }
                    if let DTolerance::Rounded { k } = self.g.tolerance {
                        let fine = k + 16;
                        let r = circle_intersection_upper(&def.center_c, &(&def.radius_c * &def.radius_c), &def.center_a, &(&def.radius_a * &def.radius_a), fine)
                            .map_err(|e| format!("reference d_{i}: {e}"))?;
                        let bound = Rational::new(BigInt::one(), pow2(k)) - Rational::new(BigInt::one(), pow2(fine));
                        if squared_distance(self.p(d(i)), &r.point) > &bound * &bound {
                            return Err(format!("d_{i} is more than 2^-{k} from the circle intersection"));
                        }
                    }
                }
                Ok(())
            }
            Kind::Side => {
                for i in 1..=n {
                    if orientation(self.p(l.a(1)), self.p(l.a(n + 1)), self.p(d(i))) != Orientation::CounterClockwise {
                        return Err(format!("d_{i} is not above the line a_1 a_{{n+1}}"));
                    }
                    if self.p(d(i)).y >= self.p(l.a(i + 1)).y {
                        return Err(format!("d_{i} is not below a_{}", i + 1));
                    }
                }
                Ok(())
            }
            Kind::Angle => {
                for i in 1..=n {
                    let q = self.q(i);
                    let bound = int(1) - Rational::one() / (&q * int(22));
                    if bound < rat(21, 22) {
                        return Err(format!("bound for i = {i} below 21/22"));
                    }
                    // from the defining lengths
                    let ac = &q * int(11);
                    let ad = &q * int(2);
                    let cd = &self.g.d_defs[i - 1].radius_c;
                    let cos = (&ac * &ac + &ad * &ad - cd * cd) / (int(2) * &ac * &ad);
                    if cos <= bound {
                        return Err(format!("defined cosine {cos} at i = {i}"));
                    }
                    // from the stored coordinates: ac is rational, |a d~| is not
                    let sq_ad = self.sq(l.a(i + 1), d(i));
                    let num = self.sq(l.c(i), l.a(i + 1)) + &sq_ad - self.sq(l.c(i), d(i));
                    let rhs_sq = &bound * &bound * int(4) * &ac * &ac * &sq_ad;
                    if !num.is_positive() || num.clone() * num <= rhs_sq {
                        return Err(format!("stored cosine at i = {i}"));
                    }
                }
                Ok(())
            }
            Kind::Slope => {
                for i in 1..=n {
                    let dx = &self.p(d(i)).x - &self.p(l.c(i)).x;
                    let len_sq = self.sq(l.c(i), d(i));
                    let scale = int(9) + self.g.alphas[i - 1].clone() / self.q(i);
                    let lower = rat(68, 10) / &scale;
                    if lower < rat(68, 91) {
                        return Err(format!("bound for i = {i} below 68/91"));
                    }
                    if !dx.is_positive() || &dx * &dx <= &lower * &lower * len_sq {
                        return Err(format!("c_{i} d_{i} too steep"));
                    }
                }
                Ok(())
            }
            Kind::DStar => {
                let slack = self.position_slack() * int(2);
                for i in 1..=n {
                    let ds = auxiliary_dstar(self.g, i).map_err(|e| e.to_string())?;
                    if orientation(self.p(l.a(1)), self.p(l.a(n + 1)), &ds) != Orientation::Collinear {
                        return Err(format!("d*_{i} off the line"));
                    }
                    let two = self.q(i) * int(2);
                    if squared_distance(&ds, self.p(l.a(i + 1))) != &two * &two {
                        return Err(format!("|d*_{i} a_{}| is not {two}", i + 1));
                    }
                    let lim = Rational::from_integer(pow4(i as u32)) / int(11);
                    if !sqrt_lt_sum(&squared_distance(self.p(d(i)), &ds), &lim, &(&slack * &slack)) {
                        return Err(format!("|d_{i} d*_{i}| too large"));
                    }
                }
                Ok(())
            }
            Kind::Critical => {
                let engine = DilationEngine::new(&self.g.points, self.cfg);
                let got = engine.critical_edges(&rat(8, 5));
                let want: BTreeSet<_> = l.critical_edges().into_iter().collect();
                if got == want {
                    return Ok(());
                }
                let lab = |e: &(usize, usize)| format!("{}{}", self.g.points.label(e.0), self.g.points.label(e.1));
                let extra: Vec<String> = got.difference(&want).map(lab).collect();
                let missing: Vec<String> = want.difference(&got).map(lab).collect();
                Err(format!("extra {extra:?}, missing {missing:?}"))
            }
            Kind::Alternation => {
                for i in 1..=n {
                    for side in [false, true] {
                        let m = |x: usize| if side { l.mirror(x) } else { x };
                        let (b, c, dd) = (m(l.b(i)), m(l.c(i)), m(d(i)));
                        if !sqrt_sum_exceeds(&rat(8, 5), &self.sq(c, dd), &self.sq(dd, b), &self.sq(b, c)) {
                            return Err(format!("detour through b_{i} is short enough (mirrored: {side})"));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// Run every check; failures are reported, not raised.
pub fn verify_gadget(g: &Gadget, cfg: CertConfig) -> LemmaReport {
    let ctx = Ctx { g, cfg };
    let checks = KINDS
        .par_iter()
        .map(|&k| {
            let r = ctx.run(k);
            Check { name: k.name().to_string(), passed: r.is_ok(), detail: r.err().unwrap_or_default() }
        })
        .collect();
    LemmaReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{build_gadget, integerize, PartitionInstance};

    fn gadget(v: &[u64]) -> Gadget {
        build_gadget(&PartitionInstance::new(v.to_vec()).unwrap(), 64).unwrap()
    }

    #[test]
    fn small_gadgets_pass() {
        for v in [&[1][..], &[1, 1], &[2, 3, 5]] {
            let r = verify_gadget(&gadget(v), CertConfig::default());
            assert!(r.all_passed(), "{v:?}: {:?}", r.failed().collect::<Vec<_>>());
            assert_eq!(r.checks.len(), KINDS.len());
        }
    }

    #[test]
    fn integer_form_passes() {
        let g = build_gadget(&PartitionInstance::new(vec![1, 2]).unwrap(), 48).unwrap();
        let back = Gadget::from_integer_instance(&integerize(&g, None).unwrap()).unwrap();
        let r = verify_gadget(&back, CertConfig::default());
        assert!(r.all_passed(), "{:?}", r.failed().collect::<Vec<_>>());
    }

    #[test]
    fn reflected_d_fails_side_check() {
        let g = gadget(&[1, 1]);
        let l = g.layout;
        // reflect d_1 across the line a_1 a_{n+1} (direction (4, 3))
        let a1 = g.point(l.a(1)).clone();
        let v = g.point(l.d(1)).sub(&a1);
        let dir = Point::new(int(4), int(3));
        let t = v.dot(&dir) / int(25);
        let foot = dir.scale(&t);
        let refl = a1.add(&foot.scale(&int(2)).sub(&v));
        let bad = g.with_point(l.d(1), refl).unwrap();
        let r = verify_gadget(&bad, CertConfig::default());
        assert!(!r.get("d side and height").unwrap().passed);
        assert!(!r.all_passed());
    }

    #[test]
    fn moved_point_breaks_identities() {
        let g = gadget(&[1]);
        let l = g.layout;
        let bad = g.with_point(l.b(1), Point::new(rat(33, 10), rat(4, 5))).unwrap();
        let r = verify_gadget(&bad, CertConfig::default());
        assert!(!r.get("distance identities").unwrap().passed);
        assert!(!r.get("mirror symmetry").unwrap().passed);
    }
}
