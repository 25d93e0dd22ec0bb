//! Exact minimum-dilation trees, paths and tours on small point sets.

use std::collections::BTreeSet;

use crate::dilation::{resolve_extremum, CertConfig, DilationEngine, DilationReport, Quantity, SymbolicRatio};
use crate::error::{Error, Result};
use crate::interval::{FastInterval, Interval};
use crate::network::{edge, is_forest, Edge, PointSet, Tree};

mod bnb;
mod enumerate;
mod structure;
mod uncross;
mod witness;

pub use bnb::mdst_exact;
pub use enumerate::{enumerate_spanning_trees, exhaustive_mdst, PruferTrees};
pub use structure::min_dilation_structure;
pub use uncross::{compare_trees, uncross_four};
pub use witness::{verify_witness_five, witness_search_five, WitnessFive, WitnessSearch};

/// Largest point set accepted by exhaustive tree enumeration.
pub const MAX_TREE_POINTS: usize = 9;
/// Largest point set accepted by path and tour brute force.
pub const MAX_ORDER_POINTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Tree,
    Path,
    Tour,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub mode: Mode,
    pub crossing_free: bool,
    pub required_edges: BTreeSet<Edge>,
    pub max_points: usize,
    pub cert: CertConfig,
    pub enumeration_cap: Option<u64>,
    /// Branch-and-bound pruning; off means plain enumeration.
    pub prune: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            mode: Mode::Tree,
            crossing_free: false,
            required_edges: BTreeSet::new(),
            max_points: MAX_TREE_POINTS,
            cert: CertConfig::from_env(),
            enumeration_cap: None,
            prune: true,
        }
    }
}

impl SolverOptions {
    pub fn with_mode(mode: Mode) -> Self {
        SolverOptions { mode, max_points: if mode == Mode::Tree { MAX_TREE_POINTS } else { MAX_ORDER_POINTS }, ..Self::default() }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        if self.max_points < 2 {
            return Err(Error::InvalidInput("max_points must be at least 2".into()));
        }
        let hard = if self.mode == Mode::Tree { MAX_TREE_POINTS } else { MAX_ORDER_POINTS };
        if n > self.max_points.min(hard) {
            return Err(Error::SizeTooLarge { what: "point set", n, max: self.max_points.min(hard) });
        }
        if n < 2 {
            return Err(Error::InvalidPointSet("need at least two points".into()));
        }
        let req: Vec<Edge> = self.required_edges.iter().map(|&(u, v)| edge(u, v)).collect();
        if !is_forest(n, &req) {
            return Err(Error::InvalidInput("required edges contain a cycle or a bad index".into()));
        }
        Ok(())
    }

    pub(crate) fn admits(&self, ps: &PointSet, edges: &[Edge]) -> bool {
        self.required_edges.iter().all(|&(u, v)| edges.contains(&edge(u, v)))
            && !(self.crossing_free && crate::network::edges_have_crossing(ps, edges))
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub mode: Mode,
    /// Edges of the optimum, sorted.
    pub edges: Vec<Edge>,
    /// Vertex order for paths and tours.
    pub order: Option<Vec<usize>>,
    pub report: DilationReport,
    pub trees_examined: u64,
    pub pruned: u64,
    /// Other optima that could not be separated from `edges`.
    pub tied_with: Vec<Vec<Edge>>,
}

impl SolverResult {
    pub fn tree(&self) -> Option<Tree> {
        let n = self.edges.len() + 1;
        Tree::new(n, self.edges.iter().copied()).ok()
    }
}

/// A candidate tree in a certified minimum selection.
pub(crate) struct TreeCandidate<'a> {
    engine: &'a DilationEngine,
    pub tree: Tree,
    fast: FastInterval,
    pub report: DilationReport,
}

impl<'a> TreeCandidate<'a> {
    pub fn new(engine: &'a DilationEngine, tree: Tree) -> Result<Self> {
        let fast = engine.tree_dilation_fast(&tree);
        let report = engine.tree_dilation(&tree)?;
        Ok(TreeCandidate { engine, tree, fast, report })
    }
}

impl Quantity for TreeCandidate<'_> {
    fn fast(&self) -> FastInterval {
        self.fast.clone()
    }

    fn at(&self, bits: u32) -> Interval {
        self.engine.tree_dilation_at(&self.tree, bits)
    }

    fn symbolic(&self) -> Option<SymbolicRatio> {
        self.report.symbolic.clone()
    }
}

/// Certified best tree among `trees`; ties go to the lexicographically smallest edge set.
pub(crate) fn certify_best_tree(engine: &DilationEngine, mut trees: Vec<Tree>) -> Result<(Tree, DilationReport, Vec<Vec<Edge>>)> {
    if trees.is_empty() {
        return Err(Error::Infeasible("no admissible spanning structure".into()));
    }
    trees.sort();
    trees.dedup();
    let cands = trees.into_iter().map(|t| TreeCandidate::new(engine, t)).collect::<Result<Vec<_>>>()?;
    let res = resolve_extremum(&cands, false, &engine.table().config());
    let win = &cands[res.winner];
    let mut report = win.report.clone();
    report.precision_used = report.precision_used.max(res.bits);
    let tied = res.survivors.iter().filter(|&&i| i != res.winner).map(|&i| cands[i].tree.edges().to_vec()).collect();
    Ok((win.tree.clone(), report, tied))
}
