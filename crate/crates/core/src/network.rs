//! Point sets and spanning structures over them.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{segments_properly_cross, Point, Segment};

pub type Edge = (usize, usize);

/// Order an edge as `(min, max)`.
pub fn edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Pairwise distinct points; index `i` is the identity of point `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Point>,
    labels: Option<Vec<String>>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        Self::with_labels(points, None)
    }

    pub fn with_labels(points: Vec<Point>, labels: Option<Vec<String>>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if !seen.insert(p) {
                return Err(Error::InvalidPointSet(format!("point {i} duplicates an earlier point")));
            }
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(Error::InvalidPointSet(format!("{} labels for {} points", l.len(), points.len())));
            }
        }
        Ok(PointSet { points, labels })
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of point `i`, falling back to its index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    pub fn segment(&self, e: Edge) -> Segment {
        Segment { a: self.points[e.0].clone(), b: self.points[e.1].clone() }
    }

    /// Apply `f` to every point, keeping labels.
    pub fn map_points(&self, f: impl Fn(&Point) -> Point) -> Result<Self> {
        Self::with_labels(self.points.iter().map(f).collect(), self.labels.clone())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Check that `edges` over `n` vertices has no repeated edge or cycle.
pub fn is_forest(n: usize, edges: &[Edge]) -> bool {
    let mut uf = UnionFind::new(n);
    edges.iter().all(|&(u, v)| u < n && v < n && u != v && uf.union(u, v))
}

/// Spanning tree over point indices `0..n`, edges stored as sorted `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    n: usize,
    edges: Vec<Edge>,
}

impl Tree {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges.into_iter().map(|(u, v)| edge(u, v)).collect();
        edges.sort_unstable();
        if n == 0 {
            return Err(Error::InvalidTree("empty vertex set".into()));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!("{} edges for {} vertices", edges.len(), n)));
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u == v || v >= n) {
            return Err(Error::InvalidTree(format!("bad edge ({u}, {v})")));
        }
        if !is_forest(n, &edges) {
            return Err(Error::InvalidTree("edges contain a cycle".into()));
        }
        Ok(Tree { n, edges })
    }

    /// Decode a Prüfer sequence of length `n - 2`.
    pub fn from_prufer(seq: &[usize]) -> Self {
        let n = seq.len() + 2;
        let mut degree = vec![1usize; n];
        for &s in seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always exists");
            edges.push(edge(leaf, s));
            degree[leaf] = 0;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push(edge(rest[0], rest[1]));
        edges.sort_unstable();
        Tree { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&edge(u, v)).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        adjacency(self.n, &self.edges)
    }

    /// Vertices on the unique path from `u` to `v`, both ends included.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        tree_path(&self.adjacency(), u, v)
    }

    /// Tree with edge `remove` replaced by `add`.
    pub fn swap_edge(&self, remove: Edge, add: Edge) -> Result<Self> {
        let remove = edge(remove.0, remove.1);
        if !self.contains(remove.0, remove.1) {
            return Err(Error::InvalidTree(format!("edge {remove:?} not in tree")));
        }
        Tree::new(self.n, self.edges.iter().copied().filter(|&e| e != remove).chain([add]))
    }
}

pub fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

pub fn tree_path(adj: &[Vec<usize>], u: usize, v: usize) -> Vec<usize> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    parent[u] = u;
    let mut stack = vec![u];
    while let Some(x) = stack.pop() {
        if x == v {
            break;
        }
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut path = vec![v];
    let mut x = v;
    while x != u {
        x = parent[x];
        path.push(x);
    }
    path.reverse();
    path
}

/// True iff two edges that share no endpoint cross (see [`segments_properly_cross`]).
pub fn edges_have_crossing(ps: &PointSet, edges: &[Edge]) -> bool {
    crossing_pair(ps, edges).is_some()
}

/// First pair of non-adjacent crossing edges, in edge-list order.
pub fn crossing_pair(ps: &PointSet, edges: &[Edge]) -> Option<(Edge, Edge)> {
    for (i, &e1) in edges.iter().enumerate() {
        for &e2 in &edges[i + 1..] {
            if e1.0 == e2.0 || e1.0 == e2.1 || e1.1 == e2.0 || e1.1 == e2.1 {
                continue;
            }
            if segments_properly_cross(&ps.segment(e1), &ps.segment(e2)) {
                return Some((e1, e2));
            }
        }
    }
    None
}

pub fn tree_has_crossing(ps: &PointSet, t: &Tree) -> bool {
    edges_have_crossing(ps, t.edges())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_validation() {
        assert!(Tree::new(3, [(0, 1), (1, 2)]).is_ok());
        assert!(Tree::new(3, [(0, 1)]).is_err());
        assert!(Tree::new(4, [(0, 1), (1, 0), (2, 3)]).is_err());
        assert!(Tree::new(3, [(0, 1), (1, 3)]).is_err());
        assert!(Tree::new(4, [(0, 1), (1, 2), (2, 0)]).is_err());
    }

    #[test]
    fn prufer_decoding() {
        let t = Tree::from_prufer(&[3, 3, 3]);
        assert_eq!(t.edges(), &[(0, 3), (1, 3), (2, 3), (3, 4)]);
        assert!(Tree::new(5, t.edges().iter().copied()).is_ok());
        let t = Tree::from_prufer(&[]);
        assert_eq!(t.edges(), &[(0, 1)]);
    }

    #[test]
    fn duplicate_points_rejected() {
        assert!(PointSet::from_ints(&[(0, 0), (1, 1), (0, 0)]).is_err());
    }

    #[test]
    fn paths() {
        let t = Tree::new(5, [(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        assert_eq!(t.path(0, 4), vec![0, 1, 3, 4]);
        assert_eq!(t.path(2, 2), vec![2]);
    }

    #[test]
    fn crossing_examples() {
        // convex polygon: star from vertex 0 never crosses
        let hexagon = PointSet::from_ints(&[(2, 0), (4, 1), (4, 3), (2, 4), (0, 3), (0, 1)]).unwrap();
        let star = Tree::new(6, (1..6).map(|v| (0, v))).unwrap();
        assert!(!tree_has_crossing(&hexagon, &star));

        // a,b,c,d in convex position with ad and bc crossing, plus cd
        let quad = PointSet::from_ints(&[(0, 0), (2, 0), (0, 2), (2, 2)]).unwrap();
        let t = Tree::new(4, [(0, 3), (1, 2), (2, 3)]).unwrap();
        assert!(tree_has_crossing(&quad, &t));
    }
}
