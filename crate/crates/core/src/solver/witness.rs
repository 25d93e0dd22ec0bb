//! Randomized search for five-point sets whose minimum-dilation tree must cross.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enumerate::{enumerate_spanning_trees, exhaustive_mdst};
use super::uncross::compare_trees;
use super::SolverOptions;
use crate::dilation::{CertConfig, DilationEngine, DilationReport};
use crate::error::{Error, Result};
use crate::geometry::{orientation, segments_properly_cross, Orientation, Point, Segment};
use crate::network::{crossing_pair, Edge, PointSet, Tree};

/// A verified five-point set whose optimal tree has a crossing.
#[derive(Clone, Debug)]
pub struct WitnessFive {
    pub points: PointSet,
    /// Optimal tree over all 125 spanning trees.
    pub tree: Tree,
    pub report: DilationReport,
    /// Best crossing-free tree and its (strictly larger) dilation.
    pub crossing_free_tree: Tree,
    pub crossing_free_best: DilationReport,
    pub crossing: (Edge, Edge),
    /// Edges critical at the optimal dilation.
    pub critical: BTreeSet<Edge>,
    pub critical_is_path: bool,
    pub convex: bool,
    /// Candidates scored before this one was found.
    pub evaluated: u64,
}

impl WitnessFive {
    /// At least one of the two crossing edges is not critical.
    pub fn crossing_leaves_critical_set(&self) -> bool {
        !self.critical.contains(&self.crossing.0) || !self.critical.contains(&self.crossing.1)
    }
}

#[derive(Clone, Debug)]
pub struct WitnessSearch {
    pub seed: u64,
    /// Number of candidate sets scored.
    pub budget: u64,
    /// Coordinates are drawn from `0..=max_coord`.
    pub max_coord: i64,
    /// Annealing steps per restart.
    pub restart_every: u64,
    /// Only accept witnesses whose critical edges form a path of length at
    /// least 3 and leave one crossing edge out.
    pub require_structure: bool,
    pub cert: CertConfig,
}

impl WitnessSearch {
    pub fn new(seed: u64, budget: u64) -> Self {
        WitnessSearch { seed, budget, max_coord: 256, restart_every: 4000, require_structure: true, cert: CertConfig::from_env() }
    }

    pub fn run(&self) -> Option<WitnessFive> {
        let tab = tables();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut seen = BTreeSet::new();
        let mut evaluated = 0u64;
        while evaluated < self.budget {
            let mut cur = self.seed_shape(&mut rng);
            let mut cur_score = tab.score(&cur);
            evaluated += 1;
            let mut temp = 0.02;
            for _ in 0..self.restart_every {
                if cur_score > 1e-9 && seen.insert(cur) {
                    let ps = PointSet::from_ints(&cur).expect("distinct points");
                    if let Ok(Some(mut w)) = verify_witness_five(&ps, self.cert) {
                        if !self.require_structure || (w.critical_is_path && w.crossing_leaves_critical_set()) {
                            w.evaluated = evaluated;
                            return Some(w);
                        }
                    }
                }
                if evaluated >= self.budget {
                    break;
                }
                let next = self.perturb(&cur, &mut rng);
                let s = tab.score(&next);
                evaluated += 1;
                if s >= cur_score || rng.gen::<f64>() < ((s - cur_score) / temp).exp() {
                    cur = next;
                    cur_score = s;
                }
                temp = (temp * 0.999).max(1e-6);
            }
        }
        None
    }

    /// Near-collinear chain of four plus one free point.
    fn seed_shape(&self, rng: &mut ChaCha8Rng) -> [(i64, i64); 5] {
        let m = self.max_coord;
        let step = m / 5;
        let y0 = rng.gen_range(m / 4..=3 * m / 4);
        let jitter = (m / 16).max(1);
        let mut p = [(0, 0); 5];
        for (i, q) in p.iter_mut().take(4).enumerate() {
            *q = (step / 2 + step * i as i64 + rng.gen_range(-jitter..=jitter), y0 + rng.gen_range(-jitter..=jitter));
        }
        p[4] = (rng.gen_range(0..=m), rng.gen_range(0..=m));
        p.map(|(x, y)| (x.clamp(0, m), y.clamp(0, m)))
    }

    fn perturb(&self, p: &[(i64, i64); 5], rng: &mut ChaCha8Rng) -> [(i64, i64); 5] {
        let m = self.max_coord;
        let mut q = *p;
        let i = rng.gen_range(0..5);
        let r = 1i64 << rng.gen_range(0..6);
        q[i] = ((q[i].0 + rng.gen_range(-r..=r)).clamp(0, m), (q[i].1 + rng.gen_range(-r..=r)).clamp(0, m));
        q
    }
}

pub fn witness_search_five(seed: u64, budget: u64) -> Option<WitnessFive> {
    WitnessSearch::new(seed, budget).run()
}

/// Edge list of K5 in lexicographic order.
const K5: [(usize, usize); 10] = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

fn k5_index(u: usize, v: usize) -> usize {
    K5.iter().position(|&e| e == (u.min(v), u.max(v))).expect("K5 edge")
}

struct Tables {
    /// Per tree, per pair: mask of K5 edges on the tree path.
    paths: Vec<[u16; 10]>,
    /// Per tree: mask of vertex-disjoint edge pairs (index into `disjoint`).
    pairs: Vec<u16>,
    disjoint: Vec<(usize, usize)>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut disjoint = Vec::new();
        for (i, &a) in K5.iter().enumerate() {
            for (j, &b) in K5.iter().enumerate().skip(i + 1) {
                if a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1 {
                    disjoint.push((i, j));
                }
            }
        }
        let mut paths = Vec::new();
        let mut pairs = Vec::new();
        for t in enumerate_spanning_trees(5).expect("five points") {
            let adj = t.adjacency();
            let mut row = [0u16; 10];
            for (k, &(u, v)) in K5.iter().enumerate() {
                let path = crate::network::tree_path(&adj, u, v);
                row[k] = path.windows(2).fold(0, |m, w| m | 1 << k5_index(w[0], w[1]));
            }
            let tm: u16 = t.edges().iter().fold(0, |m, &(u, v)| m | 1 << k5_index(u, v));
            let pm = disjoint
                .iter()
                .enumerate()
                .filter(|(_, &(i, j))| tm >> i & 1 == 1 && tm >> j & 1 == 1)
                .fold(0u16, |m, (k, _)| m | 1 << k);
            paths.push(row);
            pairs.push(pm);
        }
        Tables { paths, pairs, disjoint }
    })
}

impl Tables {
    /// Best crossing-free dilation minus best crossing dilation, in `f64`.
    fn score(&self, p: &[(i64, i64); 5]) -> f64 {
        let pts: Vec<Point<i64>> = p.iter().map(|&(x, y)| Point::new(x, y)).collect();
        for i in 0..5 {
            for j in i + 1..5 {
                if pts[i] == pts[j] {
                    return -1.0;
                }
            }
        }
        let len: Vec<f64> = K5.iter().map(|&(u, v)| ((p[u].0 - p[v].0) as f64).hypot((p[u].1 - p[v].1) as f64)).collect();
        let seg = |k: usize| Segment { a: pts[K5[k].0].clone(), b: pts[K5[k].1].clone() };
        let crosses: u16 = self
            .disjoint
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| segments_properly_cross(&seg(i), &seg(j)))
            .fold(0, |m, (k, _)| m | 1 << k);
        let (mut free, mut crossing) = (f64::INFINITY, f64::INFINITY);
        for (row, &pm) in self.paths.iter().zip(&self.pairs) {
            let mut d: f64 = 1.0;
            for k in 0..10 {
                let mut s = 0.0;
                let mut m = row[k];
                while m != 0 {
                    s += len[m.trailing_zeros() as usize];
                    m &= m - 1;
                }
                d = d.max(s / len[k]);
            }
            if pm & crosses != 0 {
                crossing = crossing.min(d);
            } else {
                free = free.min(d);
            }
        }
        if crossing.is_finite() {
            free - crossing
        } else {
            -1.0
        }
    }
}

fn in_convex_position(ps: &PointSet) -> bool {
    let n = ps.len();
    let p = |i: usize| ps.point(i);
    // every triple strictly turns and every point is a hull vertex
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                if orientation(p(i), p(j), p(k)) == Orientation::Collinear {
                    return false;
                }
                for l in 0..n {
                    if [i, j, k].contains(&l) {
                        continue;
                    }
                    let o = [orientation(p(i), p(j), p(l)), orientation(p(j), p(k), p(l)), orientation(p(k), p(i), p(l))];
                    if o.iter().all(|&x| x == o[0]) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn is_simple_path(edges: &BTreeSet<Edge>) -> bool {
    let mut deg = std::collections::BTreeMap::new();
    for &(u, v) in edges {
        *deg.entry(u).or_insert(0) += 1;
        *deg.entry(v).or_insert(0) += 1;
    }
    let list: Vec<Edge> = edges.iter().copied().collect();
    !edges.is_empty()
        && deg.values().all(|&d| d <= 2)
        && deg.len() == edges.len() + 1
        && crate::network::is_forest(deg.keys().max().map_or(0, |m| m + 1), &list)
}

/// Exact check: the optimum over all trees crosses and every crossing-free tree
/// is certified strictly worse. `None` when the set is not a witness (or the
/// optima cannot be separated).
pub fn verify_witness_five(ps: &PointSet, cfg: CertConfig) -> Result<Option<WitnessFive>> {
    if ps.len() != 5 {
        return Err(Error::InvalidPointSet(format!("expected 5 points, got {}", ps.len())));
    }
    let opts = SolverOptions { cert: cfg, ..SolverOptions::default() };
    let best = exhaustive_mdst(ps, &opts)?;
    let tree = best.tree().expect("spanning tree");
    let Some(crossing) = crossing_pair(ps, tree.edges()) else {
        return Ok(None);
    };
    if best.tied_with.iter().any(|e| !crate::network::edges_have_crossing(ps, e)) {
        return Ok(None);
    }
    let free = exhaustive_mdst(ps, &SolverOptions { crossing_free: true, ..opts })?;
    let free_tree = free.tree().expect("spanning tree");
    if compare_trees(ps, &tree, &free_tree, cfg)? != Some(std::cmp::Ordering::Less) {
        return Ok(None);
    }
    let engine = DilationEngine::new(ps, cfg);
    let critical = match &best.report.symbolic {
        Some(s) => engine.critical_edges_symbolic(s)?,
        None => BTreeSet::new(),
    };
    Ok(Some(WitnessFive {
        points: ps.clone(),
        critical_is_path: critical.len() >= 3 && is_simple_path(&critical),
        critical,
        convex: in_convex_position(ps),
        tree,
        report: best.report,
        crossing_free_tree: free_tree,
        crossing_free_best: free.report,
        crossing,
        evaluated: 0,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_is_not_a_witness() {
        let ps = PointSet::from_ints(&[(0, 0), (4, 0), (4, 4), (0, 4), (2, 9)]).unwrap();
        assert!(verify_witness_five(&ps, CertConfig::default()).unwrap().is_none());
    }

    #[test]
    fn one_iteration_finds_nothing() {
        assert!(witness_search_five(0, 1).is_none());
    }

    #[test]
    fn score_tables() {
        let t = tables();
        assert_eq!(t.paths.len(), 125);
        assert_eq!(t.disjoint.len(), 15);
        // a star has no disjoint edges
        assert!(t.pairs.iter().filter(|&&m| m == 0).count() >= 5);
    }

    #[test]
    fn path_shapes() {
        assert!(is_simple_path(&BTreeSet::from([(0, 1), (1, 2), (2, 3)])));
        assert!(!is_simple_path(&BTreeSet::from([(0, 1), (0, 2), (0, 3)])));
        assert!(!is_simple_path(&BTreeSet::from([(0, 1), (2, 3)])));
    }
}
