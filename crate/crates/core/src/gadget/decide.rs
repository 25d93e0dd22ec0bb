//! Deciding PARTITION by searching the gadget's constrained tree family.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::{Gadget, IntegerInstance, Layout, PartitionSolution};
use crate::dilation::{CertConfig, DilationEngine, ThresholdCheck, ThresholdVerdict};
use crate::error::Result;
use crate::network::{edge, Edge, Tree};
use crate::Rational;

/// Either form of a reduction instance; both describe the same point set up to scale.
#[derive(Clone, Debug)]
pub enum ReductionInstance {
    Gadget(Gadget),
    Integer(IntegerInstance),
}

impl ReductionInstance {
    pub fn gadget(&self) -> Result<Cow<'_, Gadget>> {
        match self {
            ReductionInstance::Gadget(g) => Ok(Cow::Borrowed(g)),
            ReductionInstance::Integer(ii) => Ok(Cow::Owned(Gadget::from_integer_instance(ii)?)),
        }
    }
}

impl From<Gadget> for ReductionInstance {
    fn from(g: Gadget) -> Self {
        ReductionInstance::Gadget(g)
    }
}

impl From<IntegerInstance> for ReductionInstance {
    fn from(ii: IntegerInstance) -> Self {
        ReductionInstance::Integer(ii)
    }
}

/// A tree certified at most `P/Q`, and the split it encodes.
#[derive(Clone, Debug)]
pub struct Decision {
    pub solution: PartitionSolution,
    pub tree: Tree,
    pub check: ThresholdCheck,
    /// Family members checked before (and including) this one.
    pub examined: u64,
}

/// Verdict counts over the whole family.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyScan {
    pub trees: u64,
    pub at_most: u64,
    pub greater: u64,
}

/// Family member `idx`: attachment outermost (q1 first), alternation bits in Gray order.
struct Family {
    layout: Layout,
    attach: Vec<usize>,
}

impl Family {
    fn new(layout: Layout) -> Self {
        let q2 = layout.q2();
        let attach = std::iter::once(layout.q1()).chain((0..layout.len()).filter(|&v| v != q2 && v != layout.q1())).collect();
        Family { layout, attach }
    }

    fn len(&self) -> u64 {
        (self.attach.len() as u64) << (2 * self.layout.n)
    }

    fn tree(&self, idx: u64) -> Tree {
        let n = self.layout.n;
        let bits = 2 * n;
        let attach = self.attach[(idx >> bits) as usize];
        let m = idx & ((1 << bits) - 1);
        let gray = m ^ (m >> 1);
        let right: Vec<bool> = (0..n).map(|i| gray >> i & 1 == 1).collect();
        let left: Vec<bool> = (0..n).map(|i| gray >> (n + i) & 1 == 1).collect();
        self.layout.family_tree(&right, &left, attach).expect("valid family member")
    }
}

fn hints(l: &Layout) -> Vec<Edge> {
    let mut h = vec![edge(l.p2(), l.q2()), edge(l.mirror(l.p2()), l.q2())];
    h.extend((1..=l.n).map(|i| edge(l.d(i), l.mirror(l.d(i)))));
    h
}

fn decode(l: &Layout, t: &Tree) -> PartitionSolution {
    let a = l.decode_subset(t);
    let a_prime: BTreeSet<usize> = (1..=l.n).filter(|&i| t.contains(l.mirror(l.c(i)), l.mirror(l.d(i)))).collect();
    PartitionSolution { a, a_prime }
}

/// First family tree certified at most `P/Q` whose decoded split is a valid partition.
pub fn decide_partition(inst: &ReductionInstance, cfg: CertConfig) -> Result<Option<Decision>> {
    let g = inst.gadget()?;
    let engine = DilationEngine::new(&g.points, cfg);
    let thr = g.threshold();
    let fam = Family::new(g.layout);
    let hints = hints(&g.layout);
    let examined = AtomicU64::new(0);
    let found = (0..fam.len()).into_par_iter().find_map_first(|idx| {
        examined.fetch_add(1, Ordering::Relaxed);
        let t = fam.tree(idx);
        match engine.check_threshold(&t, &thr, &hints) {
            Err(e) => Some(Err(e)),
            Ok(c) if c.verdict == ThresholdVerdict::AtMost => {
                let solution = decode(&g.layout, &t);
                // a tree below the threshold that does not encode a partition would
                // contradict the construction; keep searching rather than report it
                solution.is_valid_for(&g.instance).then_some(Ok((idx, solution, t, c)))
            }
            Ok(_) => None,
        }
    });
    match found {
        None => Ok(None),
        Some(Err(e)) => Err(e),
        Some(Ok((idx, solution, tree, check))) => Ok(Some(Decision { solution, tree, check, examined: idx + 1 })),
    }
}

/// Check every family member against `P/Q`.
pub fn scan_family(g: &Gadget, cfg: CertConfig) -> Result<FamilyScan> {
    let engine = DilationEngine::new(&g.points, cfg);
    let thr = g.threshold();
    let fam = Family::new(g.layout);
    let hints = hints(&g.layout);
    let verdicts = (0..fam.len())
        .into_par_iter()
        .map(|idx| engine.check_threshold(&fam.tree(idx), &thr, &hints).map(|c| c.verdict))
        .collect::<Result<Vec<_>>>()?;
    let at_most = verdicts.iter().filter(|v| **v == ThresholdVerdict::AtMost).count() as u64;
    Ok(FamilyScan { trees: verdicts.len() as u64, at_most, greater: verdicts.len() as u64 - at_most })
}

/// Exact dilation of `(u, v)` in `t` using the construction's edge lengths,
/// when every path edge and `|uv|` are rational.
pub fn standard_tree_symbolic_ratio(g: &Gadget, t: &Tree, u: usize, v: usize) -> Option<Rational> {
    let path = t.path(u, v);
    let len = path.windows(2).try_fold(Rational::from_integer(0.into()), |acc, w| Some(acc + g.edge_length_exact(w[0], w[1])?))?;
    let direct = g.edge_length_exact(u, v)?;
    Some(len / direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{build_gadget, integerize, PartitionInstance};
    use crate::scalar::rat;

    fn gadget(v: &[u64]) -> Gadget {
        build_gadget(&PartitionInstance::new(v.to_vec()).unwrap(), 64).unwrap()
    }

    #[test]
    fn family_order() {
        let fam = Family::new(Layout::new(2));
        assert_eq!(fam.len(), 16 * 23);
        let t0 = fam.tree(0);
        assert!(t0.contains(0, 1));
        assert_eq!(t0.edges().len(), 23);
        // consecutive members differ in one alternation choice
        let diff = fam.tree(1).edges().iter().filter(|e| !t0.edges().contains(e)).count();
        assert_eq!(diff, 1);
    }

    #[test]
    fn two_ones() {
        let g = gadget(&[1, 1]);
        let d = decide_partition(&g.clone().into(), CertConfig::default()).unwrap().unwrap();
        assert!(d.solution.is_valid_for(&g.instance));
        assert_eq!(d.solution.a.len(), 1);
        assert!(d.tree.contains(g.layout.q1(), g.layout.q2()));
    }

    #[test]
    fn odd_sum_has_no_tree() {
        let g = gadget(&[1]);
        assert!(decide_partition(&g.into(), CertConfig::default()).unwrap().is_none());
    }

    #[test]
    fn integer_form_agrees() {
        let g = gadget(&[1, 1]);
        let ii = integerize(&build_gadget(&g.instance, 40).unwrap(), None).unwrap();
        let d = decide_partition(&ii.into(), CertConfig::default()).unwrap().unwrap();
        assert_eq!(d.solution.a.len(), 1);
    }

    #[test]
    fn exact_ratio_on_standard_tree() {
        let g = gadget(&[1, 1]);
        let l = g.layout;
        let t = l.standard_tree(&BTreeSet::from([2])).unwrap();
        assert_eq!(standard_tree_symbolic_ratio(&g, &t, l.p2(), l.q2()), Some(rat(3, 2)));
        assert_eq!(standard_tree_symbolic_ratio(&g, &t, l.mirror(l.p2()), l.q2()), Some(rat(3, 2)));
    }
}
