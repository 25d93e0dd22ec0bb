//! Branch and bound over edge include/exclude decisions.
//!
//! Path lengths between already-connected vertices are kept as `f64` intervals.
//! Joining two components determines every pair across them, so a partial tree
//! is dropped as soon as one determined pair certifiably exceeds the incumbent.
//! Edges that are critical at the incumbent value can no longer be excluded.

use num_traits::FromPrimitive;

use super::{certify_best_tree, structure, Mode, SolverOptions, SolverResult};
use crate::dilation::DilationEngine;
use crate::error::{Error, Result};
use crate::geometry::segments_properly_cross;
use crate::interval::{FastInterval, F64_BITS};
use crate::network::{edge, Edge, PointSet, Tree};
use crate::Rational;

struct Search<'a> {
    ps: &'a PointSet,
    engine: &'a DilationEngine,
    n: usize,
    order: Vec<Edge>,
    required: Vec<bool>,
    forced: Vec<bool>,
    crosses: Vec<Vec<bool>>,
    crossing_free: bool,
    prune: bool,
    cap: Option<u64>,
    best_hi: f64,
    candidates: Vec<(Vec<usize>, f64)>,
    examined: u64,
    pruned: u64,
}

#[derive(Clone)]
struct State {
    included: Vec<usize>,
    excluded: Vec<bool>,
    comp: Vec<usize>,
    dist: Vec<FastInterval>,
}

impl Search<'_> {
    fn pair_dilation(&self, dist: &[FastInterval], x: usize, y: usize) -> FastInterval {
        dist[x * self.n + y].div_pos(self.engine.table().fast(x, y))
    }

    /// Join the components of `e`, or `None` when the result is certainly too long.
    fn include(&mut self, st: &State, pos: usize) -> Option<State> {
        let (u, v) = self.order[pos];
        let (cu, cv) = (st.comp[u], st.comp[v]);
        if cu == cv {
            return None;
        }
        if self.crossing_free && st.included.iter().any(|&j| self.crosses[pos][j]) {
            return None;
        }
        let n = self.n;
        let mut next = st.clone();
        let len = self.engine.table().fast(u, v).clone();
        let left: Vec<usize> = (0..n).filter(|&x| st.comp[x] == cu).collect();
        let right: Vec<usize> = (0..n).filter(|&y| st.comp[y] == cv).collect();
        for &x in &left {
            let xu = st.dist[x * n + u].add(&len);
            for &y in &right {
                let d = xu.add(&st.dist[v * n + y]);
                next.dist[x * n + y] = d.clone();
                next.dist[y * n + x] = d;
                if self.prune && self.pair_dilation(&next.dist, x, y).lo > self.best_hi {
                    self.pruned += 1;
                    return None;
                }
            }
        }
        for &y in &right {
            next.comp[y] = cu;
        }
        next.included.push(pos);
        Some(next)
    }

    /// Undecided or included edges still connect every vertex.
    fn connectable(&self, st: &State, from: usize) -> bool {
        let mut comp = st.comp.clone();
        let mut groups = comp.iter().copied().collect::<std::collections::BTreeSet<_>>().len();
        for pos in from..self.order.len() {
            if groups == 1 {
                break;
            }
            if st.excluded[pos] {
                continue;
            }
            let (u, v) = self.order[pos];
            let (a, b) = (comp[u], comp[v]);
            if a != b {
                comp.iter_mut().filter(|c| **c == b).for_each(|c| *c = a);
                groups -= 1;
            }
        }
        groups == 1
    }

    fn leaf(&mut self, st: &State) {
        self.examined += 1;
        let n = self.n;
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        for x in 0..n {
            for y in x + 1..n {
                let d = self.pair_dilation(&st.dist, x, y);
                lo = lo.max(d.lo);
                hi = hi.max(d.hi);
            }
        }
        if lo > self.best_hi {
            return;
        }
        self.candidates.push((st.included.clone(), lo));
        if hi < self.best_hi {
            self.best_hi = hi;
            if self.prune {
                self.refresh_forced();
            }
        }
    }

    fn refresh_forced(&mut self) {
        let delta = Rational::from_f64(self.best_hi).expect("finite incumbent");
        let crit = self.engine.critical_edges(&delta);
        for (pos, e) in self.order.iter().enumerate() {
            self.forced[pos] = crit.contains(e);
        }
    }

    fn capped(&self) -> bool {
        self.cap.is_some_and(|c| self.examined >= c)
    }

    fn run(&mut self, st: State, pos: usize) {
        if self.capped() {
            return;
        }
        if st.included.len() == self.n - 1 {
            self.leaf(&st);
            return;
        }
        if pos == self.order.len() {
            return;
        }
        if self.prune && st.excluded.iter().zip(&self.forced).any(|(x, f)| *x && *f) {
            self.pruned += 1;
            return;
        }
        if let Some(next) = self.include(&st, pos) {
            self.run(next, pos + 1);
        }
        if !self.required[pos] && !(self.prune && self.forced[pos]) {
            let mut next = st;
            next.excluded[pos] = true;
            if self.connectable(&next, pos + 1) {
                self.run(next, pos + 1);
            } else {
                self.pruned += 1;
            }
        }
    }
}

/// Certified minimum-dilation structure; paths and tours use brute force.
pub fn mdst_exact(ps: &PointSet, opts: &SolverOptions) -> Result<SolverResult> {
    if opts.mode != Mode::Tree {
        return structure::solve_order(ps, opts);
    }
    let n = ps.len();
    opts.validate(n)?;
    let engine = DilationEngine::new(ps, opts.cert);
    if n == 2 {
        let t = Tree::new(2, [(0, 1)])?;
        let report = engine.tree_dilation(&t)?;
        return Ok(SolverResult { mode: Mode::Tree, edges: vec![(0, 1)], order: None, report, trees_examined: 1, pruned: 0, tied_with: vec![] });
    }

    let mut order: Vec<Edge> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    order.sort_by(|a, b| {
        let (fa, fb) = (engine.table().fast(a.0, a.1), engine.table().fast(b.0, b.1));
        fa.lo.total_cmp(&fb.lo).then(a.cmp(b))
    });
    let m = order.len();
    let crosses: Vec<Vec<bool>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let (e, f) = (order[i], order[j]);
                    let shared = e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1;
                    !shared && segments_properly_cross(&ps.segment(e), &ps.segment(f))
                })
                .collect()
        })
        .collect();
    let required: Vec<bool> = order.iter().map(|e| opts.required_edges.iter().any(|&(u, v)| edge(u, v) == *e)).collect();

    let mut search = Search {
        ps,
        engine: &engine,
        n,
        order,
        required,
        forced: vec![false; m],
        crosses,
        crossing_free: opts.crossing_free,
        prune: opts.prune,
        cap: opts.enumeration_cap,
        best_hi: f64::INFINITY,
        candidates: Vec::new(),
        examined: 0,
        pruned: 0,
    };
    let mut root = State { included: Vec::new(), excluded: vec![false; m], comp: (0..n).collect(), dist: vec![FastInterval::zero(F64_BITS); n * n] };
    // required edges go in first, in branching order
    for pos in 0..m {
        if search.required[pos] {
            let prune = std::mem::replace(&mut search.prune, false);
            let next = search.include(&root, pos);
            search.prune = prune;
            root = next.ok_or_else(|| Error::Infeasible("required edges cross each other".into()))?;
        }
    }
    search.run(root, 0);
    if search.capped() {
        return Err(Error::EnumerationCapReached { cap: search.cap.unwrap_or_default() });
    }

    let best_hi = search.best_hi;
    let trees = search
        .candidates
        .iter()
        .filter(|(_, lo)| *lo <= best_hi)
        .map(|(inc, _)| Tree::new(n, inc.iter().map(|&p| search.order[p])))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(trees.iter().all(|t| opts.admits(search.ps, t.edges())));
    let (tree, report, tied_with) = certify_best_tree(&engine, trees)?;
    Ok(SolverResult {
        mode: Mode::Tree,
        edges: tree.edges().to_vec(),
        order: None,
        report,
        trees_examined: search.examined,
        pruned: search.pruned,
        tied_with,
    })
}

#[cfg(test)]
mod tests {
    use super::super::exhaustive_mdst;
    use super::*;
    use crate::scalar::int;
    use std::cmp::Ordering;

    #[test]
    fn collinear_path() {
        let ps = PointSet::from_ints(&[(0, 0), (1, 0), (2, 0)]).unwrap();
        let r = mdst_exact(&ps, &SolverOptions::default()).unwrap();
        assert_eq!(r.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(r.report.value.cmp_rational(&int(1)), Some(Ordering::Equal));
    }

    #[test]
    fn agrees_with_exhaustive_on_square_and_pentagon() {
        for pts in [vec![(0, 0), (1, 0), (1, 1), (0, 1)], vec![(0, 0), (10, 1), (13, 9), (5, 14), (-3, 8)]] {
            let ps = PointSet::from_ints(&pts).unwrap();
            let a = mdst_exact(&ps, &SolverOptions::default()).unwrap();
            let b = exhaustive_mdst(&ps, &SolverOptions::default()).unwrap();
            assert_eq!(a.edges, b.edges);
            assert!(a.report.value.overlaps(&b.report.value));
        }
    }

    #[test]
    fn pruning_changes_only_effort() {
        let ps = PointSet::from_ints(&[(0, 0), (7, 2), (3, 9), (12, 5), (6, 6), (1, 4)]).unwrap();
        let on = mdst_exact(&ps, &SolverOptions::default()).unwrap();
        let off = mdst_exact(&ps, &SolverOptions { prune: false, ..SolverOptions::default() }).unwrap();
        assert_eq!(off.trees_examined, 6u64.pow(4));
        assert_eq!(on.edges, off.edges);
        assert!(on.trees_examined < off.trees_examined);
    }

    #[test]
    fn required_and_crossing_free() {
        let ps = PointSet::from_ints(&[(0, 0), (2, 0), (0, 2), (2, 2)]).unwrap();
        let mut opts = SolverOptions::default();
        opts.required_edges.insert((0, 3));
        let r = mdst_exact(&ps, &opts).unwrap();
        assert!(r.edges.contains(&(0, 3)));
        opts.required_edges.insert((1, 2));
        opts.crossing_free = true;
        assert!(matches!(mdst_exact(&ps, &opts), Err(Error::Infeasible(_))));
    }
}
