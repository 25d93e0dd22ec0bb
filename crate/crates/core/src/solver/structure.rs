//! Minimum-dilation spanning paths and tours by exhaustive search.

use itertools::Itertools;

use super::{certify_best_tree, Mode, SolverOptions, SolverResult};
use crate::dilation::{resolve_extremum, DilationEngine, DilationReport, DistanceTable, Quantity, SymbolicRatio};
use crate::error::{Error, Result};
use crate::interval::{Bound, FastInterval, Interval, F64_BITS};
use crate::network::{edge, Edge, PointSet, Tree};

/// Path lengths both ways around a cycle, row-major over vertex ids.
fn cycle_lengths<B: Bound>(order: &[usize], len: impl Fn(usize, usize) -> Interval<B>, bits: u32) -> Vec<(Interval<B>, Interval<B>)> {
    let n = order.len();
    let steps: Vec<Interval<B>> = (0..n).map(|i| len(order[i], order[(i + 1) % n])).collect();
    let mut out = vec![(Interval::zero(bits), Interval::zero(bits)); n * n];
    for i in 0..n {
        let mut fwd = Interval::zero(bits);
        for j in 1..n {
            fwd = fwd.add(&steps[(i + j - 1) % n]);
            out[order[i] * n + order[(i + j) % n]].0 = fwd.clone();
        }
    }
    for u in 0..n {
        for v in 0..n {
            if u != v {
                out[u * n + v].1 = out[v * n + u].0.clone();
            }
        }
    }
    out
}

fn interval_min<B: Bound>(a: &Interval<B>, b: &Interval<B>) -> Interval<B> {
    let lo = if a.lo < b.lo { a.lo.clone() } else { b.lo.clone() };
    let hi = if a.hi < b.hi { a.hi.clone() } else { b.hi.clone() };
    Interval { lo, hi, precision_bits: a.precision_bits }
}

/// One pair's dilation in a tour: the shorter way around over the distance.
struct CyclePair<'a> {
    table: &'a DistanceTable,
    cw: Vec<usize>,
    ccw: Vec<usize>,
}

impl CyclePair<'_> {
    fn way_at(&self, way: &[usize], bits: u32) -> Interval {
        way.windows(2).fold(Interval::zero(bits), |acc, w| acc.add(&self.table.dist(w[0], w[1], bits)))
    }

    fn way_fast(&self, way: &[usize]) -> FastInterval {
        way.windows(2).fold(FastInterval::zero(F64_BITS), |acc, w| acc.add(self.table.fast(w[0], w[1])))
    }

    fn ends(&self) -> (usize, usize) {
        (self.cw[0], *self.cw.last().expect("non-empty"))
    }

    fn form(&self, way: &[usize]) -> SymbolicRatio {
        let (u, v) = self.ends();
        SymbolicRatio::new(way.windows(2).map(|w| self.table.sq(w[0], w[1])), self.table.sq(u, v).clone())
    }
}

impl Quantity for CyclePair<'_> {
    fn fast(&self) -> FastInterval {
        let (u, v) = self.ends();
        interval_min(&self.way_fast(&self.cw), &self.way_fast(&self.ccw)).div_pos(self.table.fast(u, v))
    }

    fn at(&self, bits: u32) -> Interval {
        let (u, v) = self.ends();
        interval_min(&self.way_at(&self.cw, bits), &self.way_at(&self.ccw, bits)).div_pos(&self.table.dist(u, v, bits))
    }

    fn symbolic(&self) -> Option<SymbolicRatio> {
        let (a, b) = (self.form(&self.cw), self.form(&self.ccw));
        if a == b {
            return Some(a);
        }
        let (fa, fb) = (self.way_fast(&self.cw), self.way_fast(&self.ccw));
        if fa.hi < fb.lo {
            Some(a)
        } else if fb.hi < fa.lo {
            Some(b)
        } else {
            match (a.exact(), b.exact()) {
                (Some(x), Some(y)) => Some(if x <= y { a } else { b }),
                _ => None,
            }
        }
    }
}

/// Certified dilation of the tour visiting `order` cyclically.
pub(crate) fn tour_report(engine: &DilationEngine, order: &[usize]) -> DilationReport {
    let n = order.len();
    let pos: Vec<usize> = {
        let mut p = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            p[v] = i;
        }
        p
    };
    let pairs: Vec<Edge> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let items: Vec<CyclePair> = pairs
        .iter()
        .map(|&(u, v)| {
            let (i, j) = (pos[u], pos[v]);
            let cw: Vec<usize> = (0..=(j + n - i) % n).map(|k| order[(i + k) % n]).collect();
            let ccw: Vec<usize> = (0..=(i + n - j) % n).map(|k| order[(i + n - k) % n]).collect();
            CyclePair { table: engine.table(), cw, ccw }
        })
        .collect();
    let res = resolve_extremum(&items, true, &engine.table().config());
    DilationReport {
        value: res.value,
        witness_pair: pairs[res.winner],
        threshold_verdict: None,
        precision_used: res.bits,
        tied: res.tied,
        symbolic: res.symbolic,
    }
}

struct TourCandidate<'a> {
    engine: &'a DilationEngine,
    order: Vec<usize>,
    fast: FastInterval,
    report: DilationReport,
}

fn tour_dilation<B: Bound>(order: &[usize], len: impl Fn(usize, usize) -> Interval<B>, bits: u32) -> Interval<B> {
    let n = order.len();
    let ways = cycle_lengths(order, &len, bits);
    let mut best: Option<Interval<B>> = None;
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = &ways[u * n + v];
            let d = interval_min(a, b).div_pos(&len(u, v));
            best = Some(match best {
                None => d,
                Some(x) => Interval {
                    lo: if d.lo > x.lo { d.lo.clone() } else { x.lo },
                    hi: if d.hi > x.hi { d.hi } else { x.hi },
                    precision_bits: bits,
                },
            });
        }
    }
    best.expect("tours have at least three vertices")
}

impl Quantity for TourCandidate<'_> {
    fn fast(&self) -> FastInterval {
        self.fast.clone()
    }

    fn at(&self, bits: u32) -> Interval {
        tour_dilation(&self.order, |a, b| self.engine.table().dist(a, b, bits), bits)
    }

    fn symbolic(&self) -> Option<SymbolicRatio> {
        self.report.symbolic.clone()
    }
}

fn tour_edges(order: &[usize]) -> Vec<Edge> {
    let n = order.len();
    let mut e: Vec<Edge> = (0..n).map(|i| edge(order[i], order[(i + 1) % n])).collect();
    e.sort_unstable();
    e
}

fn path_tree(order: &[usize]) -> Tree {
    Tree::new(order.len(), order.windows(2).map(|w| (w[0], w[1]))).expect("a Hamiltonian path is a tree")
}

/// Vertex orders of all Hamiltonian paths (each path once, first end smaller).
fn path_orders(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n).permutations(n).filter(|p| p[0] < p[p.len() - 1])
}

/// Vertex orders of all tours (start at 0, each direction once).
fn tour_orders(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..n).permutations(n - 1).filter(|p| p[0] < p[p.len() - 1]).map(|p| std::iter::once(0).chain(p).collect())
}

pub(crate) fn solve_order(ps: &PointSet, opts: &SolverOptions) -> Result<SolverResult> {
    let n = ps.len();
    opts.validate(n)?;
    let engine = DilationEngine::new(ps, opts.cert);
    match opts.mode {
        Mode::Tree => unreachable!("trees go through the branch and bound"),
        Mode::Path => {
            let mut examined = 0u64;
            let mut best_hi = f64::INFINITY;
            let mut keep: Vec<(Vec<usize>, f64)> = Vec::new();
            let orders: Box<dyn Iterator<Item = Vec<usize>>> =
                if n == 2 { Box::new(std::iter::once(vec![0, 1])) } else { Box::new(path_orders(n)) };
            for order in orders {
                examined += 1;
                if opts.enumeration_cap.is_some_and(|c| examined > c) {
                    return Err(Error::EnumerationCapReached { cap: opts.enumeration_cap.unwrap_or_default() });
                }
                let t = path_tree(&order);
                if !opts.admits(ps, t.edges()) {
                    continue;
                }
                let f = engine.tree_dilation_fast(&t);
                if f.lo > best_hi {
                    continue;
                }
                best_hi = best_hi.min(f.hi);
                keep.push((order, f.lo));
            }
            let mut by_tree: Vec<(Tree, Vec<usize>)> =
                keep.into_iter().filter(|(_, lo)| *lo <= best_hi).map(|(o, _)| (path_tree(&o), o)).collect();
            by_tree.sort();
            let (tree, report, tied_with) = certify_best_tree(&engine, by_tree.iter().map(|(t, _)| t.clone()).collect())?;
            let order = by_tree.into_iter().find(|(t, _)| *t == tree).map(|(_, o)| o);
            Ok(SolverResult { mode: Mode::Path, edges: tree.edges().to_vec(), order, report, trees_examined: examined, pruned: 0, tied_with })
        }
        Mode::Tour => {
            if n < 3 {
                return Err(Error::InvalidPointSet("a tour needs at least three points".into()));
            }
            let mut examined = 0u64;
            let mut best_hi = f64::INFINITY;
            let mut keep: Vec<(Vec<usize>, FastInterval)> = Vec::new();
            for order in tour_orders(n) {
                examined += 1;
                if opts.enumeration_cap.is_some_and(|c| examined > c) {
                    return Err(Error::EnumerationCapReached { cap: opts.enumeration_cap.unwrap_or_default() });
                }
                let edges = tour_edges(&order);
                if !opts.admits(ps, &edges) {
                    continue;
                }
                let f = tour_dilation(&order, |a, b| engine.table().fast(a, b).clone(), F64_BITS);
                if f.lo > best_hi {
                    continue;
                }
                best_hi = best_hi.min(f.hi);
                keep.push((order, f));
            }
            let mut cands: Vec<TourCandidate> = keep
                .into_iter()
                .filter(|(_, f)| f.lo <= best_hi)
                .map(|(order, fast)| {
                    let report = tour_report(&engine, &order);
                    TourCandidate { engine: &engine, order, fast, report }
                })
                .collect();
            if cands.is_empty() {
                return Err(Error::Infeasible("no admissible tour".into()));
            }
            cands.sort_by_key(|c| tour_edges(&c.order));
            let res = resolve_extremum(&cands, false, &engine.table().config());
            let win = &cands[res.winner];
            let mut report = win.report.clone();
            report.precision_used = report.precision_used.max(res.bits);
            let tied_with = res.survivors.iter().filter(|&&i| i != res.winner).map(|&i| tour_edges(&cands[i].order)).collect();
            Ok(SolverResult {
                mode: Mode::Tour,
                edges: tour_edges(&win.order),
                order: Some(win.order.clone()),
                report,
                trees_examined: examined,
                pruned: 0,
                tied_with,
            })
        }
    }
}

/// Exhaustive minimum-dilation Hamiltonian path or tour.
pub fn min_dilation_structure(ps: &PointSet, mode: Mode, cert: crate::dilation::CertConfig) -> Result<SolverResult> {
    if mode == Mode::Tree {
        return Err(Error::InvalidInput("min_dilation_structure handles paths and tours".into()));
    }
    let opts = SolverOptions { cert, ..SolverOptions::with_mode(mode) };
    solve_order(ps, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::CertConfig;
    use crate::geometry::Point;
    use crate::scalar::{int, rat};
    use std::cmp::Ordering;

    #[test]
    fn order_counts() {
        assert_eq!(path_orders(4).count(), 12);
        assert_eq!(tour_orders(4).count(), 3);
        assert_eq!(tour_orders(5).count(), 12);
    }

    #[test]
    fn collinear_path() {
        let ps = PointSet::from_ints(&[(0, 0), (2, 0), (1, 0)]).unwrap();
        let r = min_dilation_structure(&ps, Mode::Path, CertConfig::default()).unwrap();
        assert_eq!(r.edges, vec![(0, 2), (1, 2)]);
        assert_eq!(r.report.value.cmp_rational(&int(1)), Some(Ordering::Equal));
    }

    #[test]
    fn square_tour_is_the_perimeter() {
        let ps = PointSet::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        let r = min_dilation_structure(&ps, Mode::Tour, CertConfig::default()).unwrap();
        assert_eq!(r.edges, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(r.trees_examined, 3);
        let v = &r.report.value;
        assert!(v.lo_rational() < rat(141422, 100000) && v.hi_rational() > rat(141421, 100000));
        let sym = r.report.symbolic.unwrap();
        assert_eq!(sym, SymbolicRatio::new([&int(1), &int(1)], int(2)));
    }

    #[test]
    fn triangle_tour_uses_direct_edges() {
        let ps = PointSet::new(vec![Point::new(int(0), int(0)), Point::new(int(2), int(0)), Point::new(int(1), int(7))]).unwrap();
        let r = min_dilation_structure(&ps, Mode::Tour, CertConfig::default()).unwrap();
        assert_eq!(r.edges, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(r.report.symbolic.and_then(|s| s.exact()), Some(int(1)));
        assert!(r.report.value.contains_rational(&int(1)));
        assert!(min_dilation_structure(&ps, Mode::Tree, CertConfig::default()).is_err());
    }
}
