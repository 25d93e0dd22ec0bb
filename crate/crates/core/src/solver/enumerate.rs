//! Prüfer enumeration of labeled spanning trees and the exhaustive optimum.

use rayon::prelude::*;

use super::{certify_best_tree, Mode, SolverOptions, SolverResult, MAX_TREE_POINTS};
use crate::dilation::DilationEngine;
use crate::error::{Error, Result};
use crate::network::{PointSet, Tree};

/// All `n^(n-2)` labeled trees on `0..n`, in lexicographic Prüfer order.
pub struct PruferTrees {
    n: usize,
    seq: Vec<usize>,
    done: bool,
}

impl PruferTrees {
    /// Trees whose Prüfer sequence starts with `prefix`.
    fn with_prefix(n: usize, prefix: &[usize]) -> Self {
        let mut seq = vec![0; n.saturating_sub(2)];
        seq[..prefix.len()].copy_from_slice(prefix);
        PruferTrees { n, seq, done: false }
    }

    fn advance(&mut self, fixed: usize) {
        for i in (fixed..self.seq.len()).rev() {
            self.seq[i] += 1;
            if self.seq[i] < self.n {
                return;
            }
            self.seq[i] = 0;
        }
        self.done = true;
    }
}

impl Iterator for PruferTrees {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        if self.done {
            return None;
        }
        let t = Tree::from_prufer(&self.seq);
        self.advance(0);
        Some(t)
    }
}

pub fn enumerate_spanning_trees(n: usize) -> Result<PruferTrees> {
    if n > MAX_TREE_POINTS {
        return Err(Error::SizeTooLarge { what: "tree enumeration", n, max: MAX_TREE_POINTS });
    }
    if n < 2 {
        return Err(Error::InvalidInput("tree enumeration needs n >= 2".into()));
    }
    Ok(PruferTrees::with_prefix(n, &[]))
}

/// Trees with a fixed first Prüfer symbol (the whole space when `n == 2`).
fn block(n: usize, first: usize) -> impl Iterator<Item = Tree> {
    let prefix = [first];
    let mut it = PruferTrees::with_prefix(n, if n > 2 { &prefix[..] } else { &[] });
    let fixed = usize::from(n > 2);
    std::iter::from_fn(move || {
        if it.done {
            return None;
        }
        let t = Tree::from_prufer(&it.seq);
        it.advance(fixed);
        Some(t)
    })
}

/// Certified optimum by evaluating every admissible labeled tree.
pub fn exhaustive_mdst(ps: &PointSet, opts: &SolverOptions) -> Result<SolverResult> {
    let n = ps.len();
    let opts = SolverOptions { mode: Mode::Tree, ..opts.clone() };
    opts.validate(n)?;
    let engine = DilationEngine::new(ps, opts.cert);
    let total = (n as u64).pow(n.saturating_sub(2) as u32);
    if let Some(cap) = opts.enumeration_cap {
        if total > cap {
            return Err(Error::EnumerationCapReached { cap });
        }
    }
    let blocks = if n > 2 { n } else { 1 };
    let parts: Vec<(f64, Vec<(Tree, f64)>)> = (0..blocks)
        .into_par_iter()
        .map(|first| {
            let mut best_hi = f64::INFINITY;
            let mut keep = Vec::new();
            for t in block(n, first) {
                if !opts.admits(ps, t.edges()) {
                    continue;
                }
                let f = engine.tree_dilation_fast(&t);
                if f.lo > best_hi {
                    continue;
                }
                best_hi = best_hi.min(f.hi);
                keep.push((t, f.lo));
            }
            (best_hi, keep)
        })
        .collect();
    let best_hi = parts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let cands: Vec<Tree> =
        parts.into_iter().flat_map(|p| p.1).filter(|(_, lo)| *lo <= best_hi).map(|(t, _)| t).collect();
    let (tree, report, tied_with) = certify_best_tree(&engine, cands)?;
    Ok(SolverResult {
        mode: Mode::Tree,
        edges: tree.edges().to_vec(),
        order: None,
        report,
        trees_examined: total,
        pruned: 0,
        tied_with,
    })
}
