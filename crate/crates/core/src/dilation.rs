//! Tree and network dilation with certified comparisons.
//!
//! Every quantity is first enclosed with `f64` intervals (directed rounding),
//! which settles almost all comparisons. Undecided comparisons escalate through
//! dyadic precision levels `start_bits, 2*start_bits, ..` up to `max_bits`.
//! When every term of a dilation is rational the comparison is made exactly.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};

use crate::dyadic::{rational_to_f64, Dyadic, Round};
use crate::error::{Error, Result};
use crate::geometry::squared_distance;
use crate::interval::{Bound, FastInterval, Interval, F64_BITS};
use crate::network::{adjacency, edge, tree_path, Edge, PointSet, Tree};
use crate::scalar::{exact_sqrt, format_rational};
use crate::Rational;

/// Precision schedule for certified comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertConfig {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for CertConfig {
    fn default() -> Self {
        CertConfig { start_bits: 64, max_bits: 4096 }
    }
}

impl CertConfig {
    pub const ENV_MAX_BITS: &'static str = "DILATREE_MAX_BITS";

    /// Default schedule with the cap taken from `DILATREE_MAX_BITS` when set.
    pub fn from_env() -> Self {
        let mut cfg = CertConfig::default();
        if let Some(cap) = std::env::var(Self::ENV_MAX_BITS).ok().and_then(|v| v.trim().parse::<u32>().ok()) {
            cfg.max_bits = cap.max(8);
            cfg.start_bits = cfg.start_bits.min(cfg.max_bits);
        }
        cfg
    }

    pub fn levels(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut b = self.start_bits.max(8);
        while b <= self.max_bits {
            out.push(b);
            b *= 2;
        }
        if out.last() != Some(&self.max_bits) && self.max_bits > self.start_bits {
            out.push(self.max_bits);
        }
        out
    }
}

/// Whether a dilation is at most a threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThresholdVerdict {
    AtMost,
    Greater,
}

/// Exact symbolic form `(r + sum sqrt(s_i)) / sqrt(den_sq)` of a dilation.
///
/// Two equal forms denote equal reals; unequal forms may still be equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicRatio {
    rational: Rational,
    radicands: Vec<Rational>,
    den_sq: Rational,
}

impl SymbolicRatio {
    pub fn new<'a>(squared_terms: impl IntoIterator<Item = &'a Rational>, den_sq: Rational) -> Self {
        let mut rational = Rational::zero();
        let mut radicands = Vec::new();
        for t in squared_terms {
            match exact_sqrt(t) {
                Some(r) => rational += r,
                None => radicands.push(t.clone()),
            }
        }
        radicands.sort();
        SymbolicRatio { rational, radicands, den_sq }
    }

    /// Exact value when numerator and denominator are both rational.
    pub fn exact(&self) -> Option<Rational> {
        // r / sqrt(D) + sum sqrt(s_i / D)
        let head = if self.rational.is_zero() { Rational::zero() } else { &self.rational / exact_sqrt(&self.den_sq)? };
        self.radicands.iter().try_fold(head, |acc, s| Some(acc + exact_sqrt(&(s / &self.den_sq))?))
    }

    pub fn interval(&self, bits: u32) -> Interval {
        let mut num = Interval::from_rational(&self.rational, bits);
        for r in &self.radicands {
            num = num.add(&Interval::sqrt(r, bits));
        }
        num.div_pos(&Interval::sqrt(&self.den_sq, bits))
    }
}

impl std::fmt::Display for SymbolicRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(v) = self.exact() {
            return write!(f, "{}", format_rational(&v));
        }
        let mut terms: Vec<String> = Vec::new();
        if !self.rational.is_zero() {
            terms.push(format_rational(&self.rational));
        }
        terms.extend(self.radicands.iter().map(|r| format!("sqrt({})", format_rational(r))));
        write!(f, "({})/sqrt({})", terms.join(" + "), format_rational(&self.den_sq))
    }
}

/// Certified dilation of a network.
#[derive(Clone, Debug)]
pub struct DilationReport {
    /// Encloses the maximum pair dilation.
    pub value: Interval,
    pub witness_pair: Edge,
    pub threshold_verdict: Option<ThresholdVerdict>,
    pub precision_used: u32,
    /// Several pairs could not be separated from the maximum.
    pub tied: bool,
    /// Exact form of the maximum when it was pinned to one expression.
    pub symbolic: Option<SymbolicRatio>,
}

/// Outcome of a threshold check, with the pair that decided it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdCheck {
    pub verdict: ThresholdVerdict,
    pub pair: Option<Edge>,
    pub precision_used: u32,
}

/// Squared distances of a point set with lazily computed enclosures.
pub struct DistanceTable {
    n: usize,
    sq: Vec<Rational>,
    fast: Vec<FastInterval>,
    cfg: CertConfig,
    levels: Vec<(u32, OnceLock<Vec<Interval>>)>,
}

impl DistanceTable {
    pub fn new(ps: &PointSet, cfg: CertConfig) -> Self {
        let n = ps.len();
        let mut sq = vec![Rational::zero(); n * n];
        let mut fast = vec![FastInterval::zero(F64_BITS); n * n];
        for u in 0..n {
            for v in u + 1..n {
                let d = squared_distance(ps.point(u), ps.point(v));
                let f = FastInterval::sqrt(&d, F64_BITS);
                sq[u * n + v] = d.clone();
                sq[v * n + u] = d;
                fast[u * n + v] = f.clone();
                fast[v * n + u] = f;
            }
        }
        let levels = cfg.levels().into_iter().map(|b| (b, OnceLock::new())).collect();
        DistanceTable { n, sq, fast, cfg, levels }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> CertConfig {
        self.cfg
    }

    pub fn sq(&self, u: usize, v: usize) -> &Rational {
        &self.sq[u * self.n + v]
    }

    pub fn fast(&self, u: usize, v: usize) -> &FastInterval {
        &self.fast[u * self.n + v]
    }

    fn level(&self, bits: u32) -> Option<&[Interval]> {
        let (_, cell) = self.levels.iter().find(|(b, _)| *b == bits)?;
        Some(cell.get_or_init(|| self.sq.iter().map(|s| Interval::sqrt(s, bits)).collect()))
    }

    /// Enclosure of `|uv|` at `bits`; cached when `bits` is on the schedule.
    pub fn dist(&self, u: usize, v: usize, bits: u32) -> Interval {
        match self.level(bits) {
            Some(lv) => lv[u * self.n + v].clone(),
            None => Interval::sqrt(self.sq(u, v), bits),
        }
    }
}

/// Path lengths from every root, one traversal per root.
fn tree_all_pairs<B: Bound>(adj: &[Vec<usize>], len: impl Fn(usize, usize) -> Interval<B>, bits: u32) -> Vec<Interval<B>> {
    let n = adj.len();
    let mut out = vec![Interval::zero(bits); n * n];
    let mut stack = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        parent.iter_mut().for_each(|p| *p = usize::MAX);
        parent[root] = root;
        stack.push(root);
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    out[root * n + y] = out[root * n + x].add(&len(x, y));
                    stack.push(y);
                }
            }
        }
    }
    out
}

/// One quantity in a certified max/min selection.
pub(crate) trait Quantity {
    fn fast(&self) -> FastInterval;
    fn at(&self, bits: u32) -> Interval;
    fn symbolic(&self) -> Option<SymbolicRatio>;
}

pub(crate) struct Resolution {
    /// Index of the winner; the smallest surviving index.
    pub winner: usize,
    pub survivors: Vec<usize>,
    pub value: Interval,
    pub bits: u32,
    pub tied: bool,
    pub symbolic: Option<SymbolicRatio>,
}

fn fast_to_dyadic(iv: &FastInterval) -> Interval {
    Interval::new(Dyadic::from_f64(iv.lo), Dyadic::from_f64(iv.hi), F64_BITS)
}

fn filter_extremum<B: Bound>(ivs: &[(usize, Interval<B>)], want_max: bool) -> Vec<usize> {
    if want_max {
        let m = ivs.iter().map(|(_, iv)| &iv.lo).fold(None::<&B>, |a, b| match a {
            Some(a) if a >= b => Some(a),
            _ => Some(b),
        });
        let m = m.expect("non-empty").clone();
        ivs.iter().filter(|(_, iv)| iv.hi >= m).map(|(i, _)| *i).collect()
    } else {
        let m = ivs.iter().map(|(_, iv)| &iv.hi).fold(None::<&B>, |a, b| match a {
            Some(a) if a <= b => Some(a),
            _ => Some(b),
        });
        let m = m.expect("non-empty").clone();
        ivs.iter().filter(|(_, iv)| iv.lo <= m).map(|(i, _)| *i).collect()
    }
}

fn hull_of(ivs: &[(usize, Interval)], keep: &[usize]) -> Interval {
    let mut it = ivs.iter().filter(|(i, _)| keep.contains(i)).map(|(_, iv)| iv);
    let first = it.next().expect("non-empty").clone();
    it.fold(first, |acc, iv| acc.hull(iv))
}

/// Certified maximum (or minimum) among `items`, ties going to the lowest index.
pub(crate) fn resolve_extremum<Q: Quantity>(items: &[Q], want_max: bool, cfg: &CertConfig) -> Resolution {
    assert!(!items.is_empty());
    let fast: Vec<(usize, FastInterval)> = items.iter().enumerate().map(|(i, q)| (i, q.fast())).collect();
    let mut survivors = filter_extremum(&fast, want_max);
    let fast_dy: Vec<(usize, Interval)> = fast.iter().map(|(i, iv)| (*i, fast_to_dyadic(iv))).collect();
    let mut value = hull_of(&fast_dy, &survivors);
    let mut bits = F64_BITS;
    if survivors.len() == 1 {
        let w = survivors[0];
        return Resolution { winner: w, symbolic: items[w].symbolic(), survivors, value, bits, tied: false };
    }

    let syms: Vec<Option<SymbolicRatio>> = survivors.iter().map(|&i| items[i].symbolic()).collect();
    if let Some(exact) = syms.iter().map(|s| s.as_ref().and_then(SymbolicRatio::exact)).collect::<Option<Vec<_>>>() {
        let best = exact.iter().fold(None::<&Rational>, |a, b| match a {
            Some(a) if (want_max && a >= b) || (!want_max && a <= b) => Some(a),
            _ => Some(b),
        });
        let best = best.expect("non-empty").clone();
        let keep: Vec<usize> = survivors.iter().zip(&exact).filter(|(_, e)| **e == best).map(|(i, _)| *i).collect();
        let pos = survivors.iter().position(|i| *i == keep[0]).expect("kept survivor");
        return Resolution {
            winner: keep[0],
            tied: keep.len() > 1,
            symbolic: syms[pos].clone(),
            survivors: keep,
            value: Interval::from_rational(&best, cfg.start_bits),
            bits,
        };
    }
    // symbolic identity check over the current survivors
    let original = survivors.clone();
    let form_of = |i: usize| -> &Option<SymbolicRatio> { &syms[original.iter().position(|x| *x == i).expect("survivor")] };
    let same_form = |keep: &[usize]| -> Option<SymbolicRatio> {
        let first = form_of(keep[0]).as_ref()?;
        keep.iter().all(|&i| form_of(i).as_ref() == Some(first)).then(|| first.clone())
    };
    if let Some(form) = same_form(&survivors) {
        return Resolution { winner: survivors[0], tied: true, symbolic: Some(form), survivors, value, bits };
    }

    for level in cfg.levels() {
        let ivs: Vec<(usize, Interval)> = survivors.iter().map(|&i| (i, items[i].at(level))).collect();
        survivors = filter_extremum(&ivs, want_max);
        value = hull_of(&ivs, &survivors);
        bits = level;
        if survivors.len() == 1 {
            let w = survivors[0];
            return Resolution { winner: w, symbolic: form_of(w).clone(), survivors, value, bits, tied: false };
        }
        if let Some(form) = same_form(&survivors) {
            return Resolution { winner: survivors[0], tied: true, symbolic: Some(form), survivors, value, bits };
        }
    }
    Resolution { winner: survivors[0], tied: true, symbolic: None, survivors, value, bits }
}

/// Dilation of one pair along a fixed path.
pub(crate) struct PathRatio<'a> {
    table: &'a DistanceTable,
    path: Vec<usize>,
}

impl<'a> PathRatio<'a> {
    pub fn new(table: &'a DistanceTable, path: Vec<usize>) -> Self {
        PathRatio { table, path }
    }

    fn ends(&self) -> (usize, usize) {
        (self.path[0], *self.path.last().expect("non-empty path"))
    }

    pub fn length_at(&self, bits: u32) -> Interval {
        self.path
            .windows(2)
            .fold(Interval::zero(bits), |acc, w| acc.add(&self.table.dist(w[0], w[1], bits)))
    }

    fn length_fast(&self) -> FastInterval {
        self.path.windows(2).fold(FastInterval::zero(F64_BITS), |acc, w| acc.add(self.table.fast(w[0], w[1])))
    }
}

impl Quantity for PathRatio<'_> {
    fn fast(&self) -> FastInterval {
        let (u, v) = self.ends();
        self.length_fast().div_pos(self.table.fast(u, v))
    }

    fn at(&self, bits: u32) -> Interval {
        let (u, v) = self.ends();
        self.length_at(bits).div_pos(&self.table.dist(u, v, bits))
    }

    fn symbolic(&self) -> Option<SymbolicRatio> {
        let (u, v) = self.ends();
        Some(SymbolicRatio::new(self.path.windows(2).map(|w| self.table.sq(w[0], w[1])), self.table.sq(u, v).clone()))
    }
}

/// Dilation computations over one point set.
pub struct DilationEngine {
    table: DistanceTable,
}

impl DilationEngine {
    pub fn new(ps: &PointSet, cfg: CertConfig) -> Self {
        DilationEngine { table: DistanceTable::new(ps, cfg) }
    }

    pub fn table(&self) -> &DistanceTable {
        &self.table
    }

    pub fn n(&self) -> usize {
        self.table.n
    }

    fn cfg(&self) -> CertConfig {
        self.table.cfg
    }

    fn check_tree(&self, t: &Tree) -> Result<()> {
        if t.n() != self.n() {
            return Err(Error::InvalidTree(format!("tree spans {} vertices, point set has {}", t.n(), self.n())));
        }
        Ok(())
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        if u == v || u >= self.n() || v >= self.n() {
            return Err(Error::InvalidInput(format!("bad pair ({u}, {v})")));
        }
        Ok(())
    }

    /// Enclosure of the tree distance between `u` and `v`.
    pub fn tree_path_length(&self, t: &Tree, u: usize, v: usize, bits: u32) -> Result<Interval> {
        self.check_tree(t)?;
        self.check_pair(u, v)?;
        Ok(PathRatio::new(&self.table, t.path(u, v)).length_at(bits))
    }

    /// Enclosure of `d_T(u, v) / |uv|`.
    pub fn pair_dilation(&self, t: &Tree, u: usize, v: usize, bits: u32) -> Result<Interval> {
        self.check_tree(t)?;
        self.check_pair(u, v)?;
        Ok(PathRatio::new(&self.table, t.path(u, v)).at(bits))
    }

    /// Exact form of the pair dilation of `(u, v)` in `t`.
    pub fn pair_symbolic(&self, t: &Tree, u: usize, v: usize) -> SymbolicRatio {
        PathRatio::new(&self.table, t.path(u, v)).symbolic().expect("paths are symbolic")
    }

    /// `f64` enclosures of all pair dilations, row-major `n * n` (diagonal zero).
    pub fn fast_pair_dilations(&self, t: &Tree) -> Vec<FastInterval> {
        let n = self.n();
        let adj = t.adjacency();
        let paths = tree_all_pairs(&adj, |a, b| self.table.fast(a, b).clone(), F64_BITS);
        let mut out = paths;
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    out[u * n + v] = out[u * n + v].div_pos(self.table.fast(u, v));
                }
            }
        }
        out
    }

    /// `f64` enclosure of the tree dilation.
    pub fn tree_dilation_fast(&self, t: &Tree) -> FastInterval {
        let n = self.n();
        let d = self.fast_pair_dilations(t);
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        for u in 0..n {
            for v in u + 1..n {
                lo = lo.max(d[u * n + v].lo);
                hi = hi.max(d[u * n + v].hi);
            }
        }
        FastInterval::new(lo, hi, F64_BITS)
    }

    /// Enclosure of the tree dilation at a fixed precision (hull over all pairs).
    pub fn tree_dilation_at(&self, t: &Tree, bits: u32) -> Interval {
        let n = self.n();
        let adj = t.adjacency();
        let paths = tree_all_pairs(&adj, |a, b| self.table.dist(a, b, bits), bits);
        let mut best: Option<Interval> = None;
        for u in 0..n {
            for v in u + 1..n {
                let d = paths[u * n + v].div_pos(&self.table.dist(u, v, bits));
                best = Some(match best {
                    None => d,
                    Some(b) => Interval {
                        lo: if d.lo > b.lo { d.lo.clone() } else { b.lo },
                        hi: if d.hi > b.hi { d.hi } else { b.hi },
                        precision_bits: bits,
                    },
                });
            }
        }
        best.unwrap_or_else(|| Interval::from_rational(&Rational::from_integer(1.into()), bits))
    }

    /// Maximum pair dilation, its witness, and the precision needed to pin it.
    pub fn tree_dilation(&self, t: &Tree) -> Result<DilationReport> {
        self.check_tree(t)?;
        let n = self.n();
        if n < 2 {
            return Err(Error::InvalidPointSet("need at least two points".into()));
        }
        let fast = self.fast_pair_dilations(t);
        let max_lo = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| fast[u * n + v].lo)
            .fold(f64::NEG_INFINITY, f64::max);
        let adj = t.adjacency();
        let pairs: Vec<Edge> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| fast[u * n + v].hi >= max_lo)
            .collect();
        let items: Vec<PathRatio> = pairs.iter().map(|&(u, v)| PathRatio::new(&self.table, tree_path(&adj, u, v))).collect();
        let res = resolve_extremum(&items, true, &self.cfg());
        Ok(DilationReport {
            value: res.value,
            witness_pair: pairs[res.winner],
            threshold_verdict: None,
            precision_used: res.bits,
            tied: res.tied,
            symbolic: res.symbolic,
        })
    }

    /// Certified `Δ(t) <= threshold`.
    pub fn compare_to_threshold(&self, t: &Tree, threshold: &Rational) -> Result<ThresholdVerdict> {
        Ok(self.check_threshold(t, threshold, &[])?.verdict)
    }

    /// Threshold check that first tries the `hints` pairs.
    pub fn check_threshold(&self, t: &Tree, threshold: &Rational, hints: &[Edge]) -> Result<ThresholdCheck> {
        self.check_tree(t)?;
        let n = self.n();
        let thr_lo = rational_to_f64(threshold, Round::Down);
        let thr_hi = rational_to_f64(threshold, Round::Up);
        let fast_cmp = |iv: &FastInterval| -> Option<ThresholdVerdict> {
            if iv.lo > thr_hi || (iv.lo > thr_lo && iv.lo.cmp_rational(threshold) == Ordering::Greater) {
                Some(ThresholdVerdict::Greater)
            } else if iv.hi < thr_lo || (iv.hi <= thr_hi && iv.hi.cmp_rational(threshold) != Ordering::Greater) {
                Some(ThresholdVerdict::AtMost)
            } else {
                None
            }
        };
        let greater = |pair: Edge, bits: u32| ThresholdCheck { verdict: ThresholdVerdict::Greater, pair: Some(pair), precision_used: bits };

        let adj = t.adjacency();
        for &(u, v) in hints {
            let q = PathRatio::new(&self.table, tree_path(&adj, u, v));
            if fast_cmp(&q.fast()) == Some(ThresholdVerdict::Greater) {
                return Ok(greater(edge(u, v), F64_BITS));
            }
        }

        let paths = tree_all_pairs(&adj, |a, b| self.table.fast(a, b).clone(), F64_BITS);
        let mut straddling = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let d = paths[u * n + v].div_pos(self.table.fast(u, v));
                match fast_cmp(&d) {
                    Some(ThresholdVerdict::Greater) => return Ok(greater((u, v), F64_BITS)),
                    Some(ThresholdVerdict::AtMost) => {}
                    None => straddling.push((u, v)),
                }
            }
        }

        let mut used = F64_BITS;
        'pairs: for &(u, v) in &straddling {
            let q = PathRatio::new(&self.table, tree_path(&adj, u, v));
            if let Some(exact) = q.symbolic().and_then(|s| s.exact()) {
                if exact > *threshold {
                    return Ok(greater((u, v), used));
                }
                continue;
            }
            for bits in self.cfg().levels() {
                used = used.max(bits);
                match q.at(bits).cmp_rational(threshold) {
                    Some(Ordering::Greater) => return Ok(greater((u, v), bits)),
                    Some(_) => continue 'pairs,
                    None => {}
                }
            }
            return Err(Error::PrecisionExhausted { bits: self.cfg().max_bits, pair: Some((u, v)) });
        }
        Ok(ThresholdCheck { verdict: ThresholdVerdict::AtMost, pair: None, precision_used: used })
    }

    /// Dilation report plus a certified verdict against `threshold`.
    pub fn tree_dilation_with_threshold(&self, t: &Tree, threshold: &Rational) -> Result<DilationReport> {
        let mut report = self.tree_dilation(t)?;
        let check = self.check_threshold(t, threshold, &[report.witness_pair])?;
        report.threshold_verdict = Some(check.verdict);
        report.precision_used = report.precision_used.max(check.precision_used);
        Ok(report)
    }

    fn detour_exceeds(&self, u: usize, v: usize, w: usize, delta: &Rational, df: (f64, f64)) -> bool {
        let (uv, uw, wv) = (self.table.fast(u, v), self.table.fast(u, w), self.table.fast(w, v));
        let lhs_hi = Bound::mul(&df.1, &uv.hi, F64_BITS, Round::Up);
        let rhs_lo = Bound::add(&uw.lo, &wv.lo, Round::Down);
        if lhs_hi < rhs_lo {
            return true;
        }
        let lhs_lo = Bound::mul(&df.0, &uv.lo, F64_BITS, Round::Down);
        let rhs_hi = Bound::add(&uw.hi, &wv.hi, Round::Up);
        if lhs_lo >= rhs_hi {
            return false;
        }
        sqrt_sum_exceeds(delta, self.table.sq(u, v), self.table.sq(u, w), self.table.sq(w, v))
    }

    /// Pairs `uv` with `delta * |uv| < |uw| + |wv|` for every other point `w`.
    pub fn critical_edges(&self, delta: &Rational) -> BTreeSet<Edge> {
        let n = self.n();
        let df = (rational_to_f64(delta, Round::Down), rational_to_f64(delta, Round::Up));
        let mut out = BTreeSet::new();
        for u in 0..n {
            for v in u + 1..n {
                if (0..n).filter(|&w| w != u && w != v).all(|w| self.detour_exceeds(u, v, w, delta, df)) {
                    out.insert((u, v));
                }
            }
        }
        out
    }

    /// Critical edges for an irrational `delta` given in exact symbolic form.
    pub fn critical_edges_symbolic(&self, delta: &SymbolicRatio) -> Result<BTreeSet<Edge>> {
        if let Some(exact) = delta.exact() {
            return Ok(self.critical_edges(&exact));
        }
        let n = self.n();
        let mut out = BTreeSet::new();
        for u in 0..n {
            for v in u + 1..n {
                let mut critical = true;
                for w in (0..n).filter(|&w| w != u && w != v) {
                    let detour = PathRatio::new(&self.table, vec![u, w, v]);
                    if detour.symbolic().as_ref() == Some(delta) {
                        critical = false;
                        break;
                    }
                    // the detour ratio must exceed delta strictly
                    let res = resolve_order(&detour, delta, &self.cfg())
                        .ok_or(Error::PrecisionExhausted { bits: self.cfg().max_bits, pair: Some((u, v)) })?;
                    if res != Ordering::Greater {
                        critical = false;
                        break;
                    }
                }
                if critical {
                    out.insert((u, v));
                }
            }
        }
        Ok(out)
    }

    /// Enclosure of the dilation of an arbitrary network (shortest paths by
    /// Dijkstra on lower and upper edge-length bounds).
    pub fn network_dilation_at(&self, edges: &[Edge], bits: u32) -> Interval {
        network_dilation(self.n(), edges, |a, b| self.table.dist(a, b, bits), bits)
    }

    pub fn network_dilation_fast(&self, edges: &[Edge]) -> FastInterval {
        network_dilation(self.n(), edges, |a, b| self.table.fast(a, b).clone(), F64_BITS)
    }
}

/// Exact test of `delta * sqrt(a) < sqrt(b) + sqrt(c)` for `delta, a, b, c >= 0`.
pub fn sqrt_sum_exceeds(delta: &Rational, a: &Rational, b: &Rational, c: &Rational) -> bool {
    // squared twice: t < 2 sqrt(bc) with t = delta^2 a - b - c
    let t = delta * delta * a - b - c;
    if t.is_negative() {
        return true;
    }
    let four = Rational::from_integer(4.into());
    &t * &t < four * b * c
}

/// Certified order of a path ratio against a symbolic value, escalating precision.
fn resolve_order(q: &PathRatio, delta: &SymbolicRatio, cfg: &CertConfig) -> Option<Ordering> {
    let fast = q.fast();
    let dfast = delta.interval(F64_BITS).to_fast();
    if fast.lo > dfast.hi {
        return Some(Ordering::Greater);
    }
    if fast.hi < dfast.lo {
        return Some(Ordering::Less);
    }
    for bits in cfg.levels() {
        let a = q.at(bits);
        let b = delta.interval(bits);
        if a.lo > b.hi {
            return Some(Ordering::Greater);
        }
        if a.hi < b.lo {
            return Some(Ordering::Less);
        }
    }
    None
}

fn network_dilation<B: Bound>(n: usize, edges: &[Edge], len: impl Fn(usize, usize) -> Interval<B>, bits: u32) -> Interval<B> {
    let adj = adjacency(n, edges);
    let mut best: Option<Interval<B>> = None;
    for src in 0..n {
        let lo = dijkstra(&adj, src, |a, b| len(a, b).lo, Round::Down);
        let hi = dijkstra(&adj, src, |a, b| len(a, b).hi, Round::Up);
        for v in src + 1..n {
            let d = len(src, v);
            let (Some(l), Some(h)) = (&lo[v], &hi[v]) else {
                return Interval::new(B::zero(), B::zero(), bits); // disconnected: caller's error
            };
            let ratio = Interval::new(l.div(&d.hi, bits, Round::Down), h.div(&d.lo, bits, Round::Up), bits);
            best = Some(match best {
                None => ratio,
                Some(b) => Interval {
                    lo: if ratio.lo > b.lo { ratio.lo.clone() } else { b.lo },
                    hi: if ratio.hi > b.hi { ratio.hi } else { b.hi },
                    precision_bits: bits,
                },
            });
        }
    }
    best.unwrap_or_else(|| Interval::zero(bits))
}

fn dijkstra<B: Bound>(adj: &[Vec<usize>], src: usize, w: impl Fn(usize, usize) -> B, round: Round) -> Vec<Option<B>> {
    let n = adj.len();
    let mut dist: Vec<Option<B>> = vec![None; n];
    let mut done = vec![false; n];
    dist[src] = Some(B::zero());
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| !done[v] && dist[v].is_some())
            .min_by(|&a, &b| dist[a].partial_cmp(&dist[b]).unwrap_or(Ordering::Equal));
        let Some(x) = next else { break };
        done[x] = true;
        let dx = dist[x].clone().expect("reached");
        for &y in &adj[x] {
            let cand = dx.add(&w(x, y), round);
            if dist[y].as_ref().is_none_or(|d| cand < *d) {
                dist[y] = Some(cand);
            }
        }
    }
    dist
}

pub fn tree_path_length(ps: &PointSet, t: &Tree, u: usize, v: usize, bits: u32) -> Result<Interval> {
    DilationEngine::new(ps, CertConfig::default()).tree_path_length(t, u, v, bits)
}

pub fn pair_dilation(ps: &PointSet, t: &Tree, u: usize, v: usize, bits: u32) -> Result<Interval> {
    DilationEngine::new(ps, CertConfig::default()).pair_dilation(t, u, v, bits)
}

pub fn tree_dilation(ps: &PointSet, t: &Tree) -> Result<DilationReport> {
    DilationEngine::new(ps, CertConfig::from_env()).tree_dilation(t)
}

/// Certified verdict of `Δ(t) <= p / q`; requires `q >= 1` and `p >= q`.
pub fn compare_to_threshold(ps: &PointSet, t: &Tree, p: &num_bigint::BigInt, q: &num_bigint::BigInt) -> Result<ThresholdVerdict> {
    let thr = threshold(p, q)?;
    DilationEngine::new(ps, CertConfig::from_env()).compare_to_threshold(t, &thr)
}

/// Validated `p / q` threshold.
pub fn threshold(p: &num_bigint::BigInt, q: &num_bigint::BigInt) -> Result<Rational> {
    if !q.is_positive() || p < q {
        return Err(Error::InvalidInput(format!("threshold {p}/{q} must satisfy q >= 1 and p >= q")));
    }
    Ok(Rational::new(p.clone(), q.clone()))
}

/// `delta`-critical edges for `delta = p / q > 1`; requires at least three points.
pub fn critical_edges(ps: &PointSet, p: &num_bigint::BigInt, q: &num_bigint::BigInt) -> Result<BTreeSet<Edge>> {
    if ps.len() < 3 {
        return Err(Error::InvalidPointSet("critical edges need at least three points".into()));
    }
    if !q.is_positive() || p <= q {
        return Err(Error::InvalidInput(format!("delta {p}/{q} must exceed 1")));
    }
    Ok(DilationEngine::new(ps, CertConfig::default()).critical_edges(&Rational::new(p.clone(), q.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn pts(c: &[(i64, i64)]) -> PointSet {
        PointSet::from_ints(c).unwrap()
    }

    fn big(v: i64) -> num_bigint::BigInt {
        v.into()
    }

    /// Straightforward float evaluation used as an oracle.
    fn float_dilation(ps: &PointSet, t: &Tree) -> f64 {
        let p: Vec<(f64, f64)> = ps.points().iter().map(|p| (p.to_f64().x, p.to_f64().y)).collect();
        let d = |a: usize, b: usize| ((p[a].0 - p[b].0).powi(2) + (p[a].1 - p[b].1).powi(2)).sqrt();
        let mut best = 0.0f64;
        for u in 0..ps.len() {
            for v in u + 1..ps.len() {
                let path = t.path(u, v);
                let len: f64 = path.windows(2).map(|w| d(w[0], w[1])).sum();
                best = best.max(len / d(u, v));
            }
        }
        best
    }

    #[test]
    fn path_lengths() {
        let ps = pts(&[(0, 0), (3, 4)]);
        let t = Tree::new(2, [(0, 1)]).unwrap();
        assert!(tree_path_length(&ps, &t, 0, 1, 64).unwrap().contains_rational(&int(5)));

        let ps = pts(&[(0, 0), (1, 0), (2, 0)]);
        let t = Tree::new(3, [(0, 1), (1, 2)]).unwrap();
        let iv = tree_path_length(&ps, &t, 0, 2, 64).unwrap();
        assert_eq!(iv.cmp_rational(&int(2)), Some(Ordering::Equal));
    }

    #[test]
    fn pair_dilation_examples() {
        let square = pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let t = Tree::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(pair_dilation(&square, &t, 0, 1, 64).unwrap().cmp_rational(&int(1)), Some(Ordering::Equal));
        assert_eq!(pair_dilation(&square, &t, 0, 3, 64).unwrap().cmp_rational(&int(3)), Some(Ordering::Equal));
        assert!(pair_dilation(&square, &t, 0, 0, 64).is_err());
    }

    #[test]
    fn two_points() {
        let ps = pts(&[(0, 0), (5, 7)]);
        let t = Tree::new(2, [(0, 1)]).unwrap();
        let r = tree_dilation(&ps, &t).unwrap();
        assert_eq!(r.witness_pair, (0, 1));
        assert!(r.value.contains_rational(&int(1)));
        assert_eq!(compare_to_threshold(&ps, &t, &big(3), &big(2)).unwrap(), ThresholdVerdict::AtMost);
    }

    #[test]
    fn collinear_at_one() {
        let ps = pts(&[(0, 0), (1, 0), (2, 0)]);
        let t = Tree::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(compare_to_threshold(&ps, &t, &big(1), &big(1)).unwrap(), ThresholdVerdict::AtMost);
        let star = Tree::new(3, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(compare_to_threshold(&ps, &star, &big(1), &big(1)).unwrap(), ThresholdVerdict::Greater);
        assert!(compare_to_threshold(&ps, &t, &big(1), &big(2)).is_err());
    }

    #[test]
    fn square_ties_are_flagged() {
        // every pair of the 3-side path over a square: the maximum 3 is attained once
        let square = pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let t = Tree::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = tree_dilation(&square, &t).unwrap();
        assert_eq!(r.witness_pair, (0, 3));
        assert!(!r.tied);
        assert_eq!(r.symbolic.unwrap().exact(), Some(int(3)));

        // star from a corner: (1,2) and (2,3) tie at 1 + sqrt2
        let star = Tree::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = tree_dilation(&square, &star).unwrap();
        assert_eq!(r.witness_pair, (1, 2));
        assert!(r.tied);
        assert!(r.symbolic.is_some());
    }

    #[test]
    fn critical_edge_examples() {
        let tri = PointSet::new(vec![
            Point::new(int(0), int(0)),
            Point::new(int(1), int(0)),
            Point::new(rat(1, 2), int(1)),
        ])
        .unwrap();
        assert_eq!(critical_edges(&tri, &big(8), &big(5)).unwrap().len(), 3);
        let line = pts(&[(0, 0), (1, 0), (2, 0)]);
        let crit = critical_edges(&line, &big(8), &big(5)).unwrap();
        assert_eq!(crit.into_iter().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert!(critical_edges(&pts(&[(0, 0), (1, 0)]), &big(8), &big(5)).is_err());
        assert!(critical_edges(&line, &big(1), &big(1)).is_err());
    }

    #[test]
    fn critical_edges_at_exact_boundary() {
        // the detour through the middle point equals delta * |uv| at delta = 1
        let line = pts(&[(0, 0), (1, 0), (2, 0)]);
        let e = DilationEngine::new(&line, CertConfig::default());
        assert!(!e.critical_edges(&int(1)).contains(&(0, 2)));
        assert!(e.critical_edges(&rat(99, 100)).contains(&(0, 2)));
    }

    #[test]
    fn brute_force_critical_edges_agree() {
        let ps = pts(&[(0, 0), (7, 1), (3, 5), (9, 8), (1, 9), (5, 3)]);
        let e = DilationEngine::new(&ps, CertConfig::default());
        let f = |a: usize, b: usize| ps.point(a).to_f64().sub(&ps.point(b).to_f64()).dot(&ps.point(a).to_f64().sub(&ps.point(b).to_f64())).sqrt();
        for delta in [rat(11, 10), rat(3, 2), rat(8, 5), int(2)] {
            let d = 0.0 + rat_f(&delta);
            let mut expect = BTreeSet::new();
            for u in 0..6 {
                for v in u + 1..6 {
                    if (0..6).filter(|&w| w != u && w != v).all(|w| d * f(u, v) < f(u, w) + f(w, v)) {
                        expect.insert((u, v));
                    }
                }
            }
            assert_eq!(e.critical_edges(&delta), expect);
        }
    }

    fn rat_f(r: &Rational) -> f64 {
        rational_to_f64(r, Round::Down)
    }

    #[test]
    fn symbolic_critical_edges_match_rational_ones() {
        let ps = pts(&[(0, 0), (4, 0), (2, 3), (6, 4)]);
        let e = DilationEngine::new(&ps, CertConfig::default());
        let delta = SymbolicRatio::new([&int(2)], int(1)); // sqrt 2
        let sym = e.critical_edges_symbolic(&delta).unwrap();
        assert_eq!(sym, e.critical_edges(&rat(141421, 100000)));
    }

    #[test]
    fn precision_cap_is_reported() {
        // threshold equal to an irrational-free dilation is decided exactly, so use 1 + sqrt 2
        // approximated tightly; a 16-bit cap cannot separate it
        let square = pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let star = Tree::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let cfg = CertConfig { start_bits: 8, max_bits: 16 };
        let e = DilationEngine::new(&square, cfg);
        let thr = rat(2414213562373095, 1000000000000000);
        match e.compare_to_threshold(&star, &thr) {
            Err(Error::PrecisionExhausted { pair: Some(_), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let e = DilationEngine::new(&square, CertConfig::default());
        assert_eq!(e.compare_to_threshold(&star, &thr).unwrap(), ThresholdVerdict::Greater);
    }

    #[test]
    fn network_dilation_of_square_tour() {
        let square = pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let e = DilationEngine::new(&square, CertConfig::default());
        let iv = e.network_dilation_at(&[(0, 1), (1, 2), (2, 3), (0, 3)], 64);
        // sqrt 2 is the opposite-corner ratio 2 / sqrt 2
        assert!(iv.lo_rational() < rat(14143, 10000) && iv.hi_rational() > rat(14142, 10000));
    }

    fn point_set(max_n: usize) -> impl Strategy<Value = PointSet> {
        prop::collection::btree_set((0i64..40, 0i64..40), 3..=max_n)
            .prop_map(|s| PointSet::from_ints(&s.into_iter().collect::<Vec<_>>()).unwrap())
    }

    fn with_tree(max_n: usize) -> impl Strategy<Value = (PointSet, Tree)> {
        point_set(max_n).prop_flat_map(|ps| {
            let n = ps.len();
            (Just(ps), prop::collection::vec(0..n, n - 2)).prop_map(|(ps, seq)| (ps, Tree::from_prufer(&seq)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn report_encloses_float_oracle((ps, t) in with_tree(7)) {
            let r = tree_dilation(&ps, &t).unwrap();
            let f = float_dilation(&ps, &t);
            prop_assert!(r.value.lo.to_f64(Round::Down) <= f * (1.0 + 1e-12));
            prop_assert!(r.value.hi.to_f64(Round::Up) >= f * (1.0 - 1e-12));
            let w = pair_dilation(&ps, &t, r.witness_pair.0, r.witness_pair.1, 128).unwrap();
            prop_assert!(w.overlaps(&r.value));
        }

        #[test]
        fn lower_bound_one((ps, t) in with_tree(7), bits in 8u32..128) {
            let n = ps.len();
            let slack = Rational::new(1.into(), num_bigint::BigInt::from(1) << (bits as usize - 2));
            for u in 0..n {
                for v in u + 1..n {
                    let iv = pair_dilation(&ps, &t, u, v, bits).unwrap();
                    prop_assert!(iv.lo_rational() >= int(1) - &slack);
                }
            }
        }

        #[test]
        fn extra_edge_never_hurts((ps, t) in with_tree(7), a in 0usize..7, b in 0usize..7) {
            let n = ps.len();
            let (a, b) = (a % n, b % n);
            prop_assume!(a != b && !t.contains(a, b));
            let e = DilationEngine::new(&ps, CertConfig::default());
            let mut edges = t.edges().to_vec();
            let tree_iv = e.network_dilation_at(&edges, 128);
            edges.push(edge(a, b));
            let super_iv = e.network_dilation_at(&edges, 128);
            prop_assert!(!(super_iv.lo > tree_iv.hi));
        }

        #[test]
        fn missing_critical_edge_exceeds_delta((ps, t) in with_tree(6), num in 11i64..30) {
            let delta = rat(num, 10);
            let e = DilationEngine::new(&ps, CertConfig::default());
            let crit = e.critical_edges(&delta);
            if crit.iter().any(|&(u, v)| !t.contains(u, v)) {
                prop_assert_eq!(e.compare_to_threshold(&t, &delta).unwrap(), ThresholdVerdict::Greater);
            }
        }

        #[test]
        fn similarity_invariance((ps, t) in with_tree(6), s in 1i64..9, dx in -20i64..20, dy in -20i64..20, num in 10i64..40) {
            let scale = rat(s, 3);
            let moved = ps.map_points(|p| Point::new(-(&p.y * &scale) + int(dx), &p.x * &scale + int(dy))).unwrap();
            let thr = rat(num, 10);
            let v1 = compare_to_threshold(&ps, &t, thr.numer(), thr.denom()).unwrap();
            let v2 = compare_to_threshold(&moved, &t, thr.numer(), thr.denom()).unwrap();
            prop_assert_eq!(v1, v2);
            let n = ps.len();
            for u in 0..n {
                for v in u + 1..n {
                    let a = pair_dilation(&ps, &t, u, v, 96).unwrap();
                    let b = pair_dilation(&moved, &t, u, v, 96).unwrap();
                    prop_assert!(a.overlaps(&b));
                }
            }
        }

        #[test]
        fn tree_metric_triangle((ps, t) in with_tree(7), u in 0usize..7, v in 0usize..7, w in 0usize..7) {
            let n = ps.len();
            let (u, v, w) = (u % n, v % n, w % n);
            prop_assume!(u != v && v != w && u != w);
            let e = DilationEngine::new(&ps, CertConfig::default());
            let uv = e.tree_path_length(&t, u, v, 128).unwrap();
            let vw = e.tree_path_length(&t, v, w, 128).unwrap();
            let uw = e.tree_path_length(&t, u, w, 128).unwrap();
            let sum = uv.add(&vw);
            prop_assert!(sum.hi >= uw.lo);
            let on_path = t.path(u, w).contains(&v);
            if on_path {
                prop_assert!(sum.overlaps(&uw));
            } else {
                // off the path the detour repeats a positive-length stretch
                prop_assert!(sum.lo > uw.hi);
            }
        }
    }
}
