//! Point sets encoding PARTITION instances as dilation thresholds.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{edge, Edge, Tree};
use crate::Rational;

mod build;
mod decide;
mod verify;

pub use build::{auxiliary_dstar, build_gadget, default_k, integerize, DDef, DTolerance, Gadget, IntegerInstance};
pub use decide::{decide_partition, scan_family, standard_tree_symbolic_ratio, Decision, FamilyScan, ReductionInstance};
pub use verify::{verify_gadget, Check, LemmaReport};

/// Largest `sum(alphas_dot)` accepted by [`partition_oracle`].
pub const DP_SUM_LIMIT: u64 = 1_000_000;

/// Positive integers to split into two halves of equal sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionInstance {
    alphas_dot: Vec<u64>,
}

impl PartitionInstance {
    pub fn new(alphas_dot: Vec<u64>) -> Result<Self> {
        if alphas_dot.is_empty() {
            return Err(Error::InvalidInput("need at least one integer".into()));
        }
        if alphas_dot.contains(&0) {
            return Err(Error::InvalidInput("integers must be positive".into()));
        }
        alphas_dot
            .iter()
            .try_fold(0u64, |acc, &a| acc.checked_add(a))
            .ok_or_else(|| Error::InvalidInput("sum overflows 64 bits".into()))?;
        Ok(PartitionInstance { alphas_dot })
    }

    pub fn n(&self) -> usize {
        self.alphas_dot.len()
    }

    pub fn alphas_dot(&self) -> &[u64] {
        &self.alphas_dot
    }

    pub fn sigma_dot(&self) -> u64 {
        self.alphas_dot.iter().sum()
    }

    /// `alpha_i = alpha_dot_i / (10 sigma_dot)`, 1-based `i`.
    pub fn alpha(&self, i: usize) -> Rational {
        Rational::new(self.alphas_dot[i - 1].into(), (10 * self.sigma_dot()).into())
    }

    pub fn alphas(&self) -> Vec<Rational> {
        (1..=self.n()).map(|i| self.alpha(i)).collect()
    }
}

/// A split of `1..=n` into `a` and `a_prime` (1-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionSolution {
    pub a: BTreeSet<usize>,
    pub a_prime: BTreeSet<usize>,
}

impl PartitionSolution {
    /// Complete `a` with its complement in `1..=n`.
    pub fn from_subset(n: usize, a: BTreeSet<usize>) -> Self {
        let a_prime = (1..=n).filter(|i| !a.contains(i)).collect();
        PartitionSolution { a, a_prime }
    }

    pub fn is_valid_for(&self, inst: &PartitionInstance) -> bool {
        let n = inst.n();
        let covers = self.a.iter().chain(&self.a_prime).all(|&i| (1..=n).contains(&i))
            && self.a.len() + self.a_prime.len() == n
            && self.a.is_disjoint(&self.a_prime);
        let sum = |s: &BTreeSet<usize>| s.iter().map(|&i| inst.alphas_dot[i - 1]).sum::<u64>();
        covers && sum(&self.a) == sum(&self.a_prime)
    }

    pub fn swapped(&self) -> Self {
        PartitionSolution { a: self.a_prime.clone(), a_prime: self.a.clone() }
    }
}

/// Subset-sum dynamic program with reconstruction.
pub fn partition_oracle(inst: &PartitionInstance) -> Result<Option<PartitionSolution>> {
    let sigma = inst.sigma_dot();
    if sigma > DP_SUM_LIMIT {
        return Err(Error::SumTooLarge { sum: sigma, max: DP_SUM_LIMIT });
    }
    if sigma % 2 == 1 {
        return Ok(None);
    }
    let target = (sigma / 2) as usize;
    let mut from = vec![usize::MAX; target + 1];
    let mut reach = vec![false; target + 1];
    reach[0] = true;
    for (i, &a) in inst.alphas_dot.iter().enumerate() {
        let a = a as usize;
        if a > target {
            continue;
        }
        for s in (a..=target).rev() {
            if !reach[s] && reach[s - a] {
                reach[s] = true;
                from[s] = i;
            }
        }
    }
    if !reach[target] {
        return Ok(None);
    }
    let mut a = BTreeSet::new();
    let mut s = target;
    while s > 0 {
        let i = from[s];
        a.insert(i + 1);
        s -= inst.alphas_dot[i] as usize;
    }
    Ok(Some(PartitionSolution::from_subset(inst.n(), a)))
}

/// Canonical point order of a gadget with `n` integers:
/// `q1, q2, a_1..a_{n+1}, b_1..b_n, c_1..c_n, d_1..d_n, p1, p2`, then the
/// mirror images of everything after `q2` in the same order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
}

impl Layout {
    pub fn new(n: usize) -> Self {
        Layout { n }
    }

    pub fn len(&self) -> usize {
        8 * self.n + 8
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of points on one side (everything mirrored).
    fn half(&self) -> usize {
        4 * self.n + 3
    }

    pub fn q1(&self) -> usize {
        0
    }

    pub fn q2(&self) -> usize {
        1
    }

    pub fn a(&self, i: usize) -> usize {
        debug_assert!((1..=self.n + 1).contains(&i));
        1 + i
    }

    pub fn b(&self, i: usize) -> usize {
        debug_assert!((1..=self.n).contains(&i));
        self.n + 2 + i
    }

    pub fn c(&self, i: usize) -> usize {
        2 * self.n + 2 + i
    }

    pub fn d(&self, i: usize) -> usize {
        3 * self.n + 2 + i
    }

    pub fn p1(&self) -> usize {
        4 * self.n + 3
    }

    pub fn p2(&self) -> usize {
        4 * self.n + 4
    }

    /// Mirror image of a right-side point (identity on `q1`, `q2`).
    pub fn mirror(&self, idx: usize) -> usize {
        match idx {
            0 | 1 => idx,
            x if x < 2 + self.half() => x + self.half(),
            x => x - self.half(),
        }
    }

    pub fn is_d(&self, idx: usize) -> bool {
        let r = if idx >= 2 + self.half() { idx - self.half() } else { idx };
        (self.d(1)..=self.d(self.n)).contains(&r)
    }

    pub fn labels(&self) -> Vec<String> {
        let n = self.n;
        let mut right = Vec::with_capacity(self.half());
        right.extend((1..=n + 1).map(|i| format!("a{i}")));
        right.extend((1..=n).map(|i| format!("b{i}")));
        right.extend((1..=n).map(|i| format!("c{i}")));
        right.extend((1..=n).map(|i| format!("d{i}")));
        right.extend(["p1".to_string(), "p2".to_string()]);
        let left: Vec<String> = right.iter().map(|l| format!("{}'{}", &l[..1], &l[1..])).collect();
        ["q1".to_string(), "q2".to_string()].into_iter().chain(right).chain(left).collect()
    }

    /// The `6n + 6` edges every tree of dilation at most 8/5 must contain.
    pub fn critical_edges(&self) -> Vec<Edge> {
        let n = self.n;
        let mut right = vec![edge(self.q1(), self.a(1)), edge(self.a(n + 1), self.p1()), edge(self.p1(), self.p2())];
        for i in 1..=n {
            right.push(edge(self.a(i), self.b(i)));
            right.push(edge(self.b(i), self.c(i)));
            right.push(edge(self.d(i), self.a(i + 1)));
        }
        let mut all: Vec<Edge> = right.iter().map(|&(u, v)| edge(self.mirror(u), self.mirror(v))).chain(right.iter().copied()).collect();
        all.sort_unstable();
        all
    }

    /// Critical edges plus one alternation choice per index and side plus the
    /// edge from `q2` to `attach`. `right_d[i-1]` picks `c_i d_i` over
    /// `c_i a_{i+1}`; `left_d` likewise for the mirrored side.
    pub fn family_tree(&self, right_d: &[bool], left_d: &[bool], attach: usize) -> Result<Tree> {
        let n = self.n;
        if right_d.len() != n || left_d.len() != n || attach == self.q2() || attach >= self.len() {
            return Err(Error::InvalidInput("bad alternation pattern or attachment".into()));
        }
        let mut edges = self.critical_edges();
        for i in 1..=n {
            let right = if right_d[i - 1] { edge(self.c(i), self.d(i)) } else { edge(self.c(i), self.a(i + 1)) };
            let left = if left_d[i - 1] { edge(self.c(i), self.d(i)) } else { edge(self.c(i), self.a(i + 1)) };
            edges.push(right);
            edges.push(edge(self.mirror(left.0), self.mirror(left.1)));
        }
        edges.push(edge(self.q2(), attach));
        Tree::new(self.len(), edges)
    }

    /// Standard tree for the subset `a` (1-based): `c_i d_i` and `c'_i a'_{i+1}`
    /// for `i` in `a`, `c'_i d'_i` and `c_i a_{i+1}` otherwise.
    pub fn standard_tree(&self, a: &BTreeSet<usize>) -> Result<Tree> {
        if a.iter().any(|&i| !(1..=self.n).contains(&i)) {
            return Err(Error::InvalidInput(format!("subset {a:?} not within 1..={}", self.n)));
        }
        let right: Vec<bool> = (1..=self.n).map(|i| a.contains(&i)).collect();
        let left: Vec<bool> = right.iter().map(|x| !x).collect();
        self.family_tree(&right, &left, self.q1())
    }

    /// Subset encoded by a tree: indices `i` with `c_i d_i` present.
    pub fn decode_subset(&self, t: &Tree) -> BTreeSet<usize> {
        (1..=self.n).filter(|&i| t.contains(self.c(i), self.d(i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(v: &[u64]) -> PartitionInstance {
        PartitionInstance::new(v.to_vec()).unwrap()
    }

    #[test]
    fn oracle_examples() {
        let s = partition_oracle(&inst(&[1, 1])).unwrap().unwrap();
        assert!(s.is_valid_for(&inst(&[1, 1])));
        assert!(partition_oracle(&inst(&[1, 2, 4])).unwrap().is_none());
        assert!(partition_oracle(&inst(&[1, 1, 1])).unwrap().is_none());
        let i = inst(&[3, 1, 1, 2, 2, 1]);
        let s = partition_oracle(&i).unwrap().unwrap();
        assert!(s.is_valid_for(&i));
        assert_eq!(s.a.iter().map(|&k| i.alphas_dot()[k - 1]).sum::<u64>(), 5);
        let s = partition_oracle(&inst(&[2, 3, 5])).unwrap().unwrap();
        assert!(s.a == BTreeSet::from([3]) || s.a == BTreeSet::from([1, 2]));
        assert!(matches!(partition_oracle(&inst(&[600_000, 600_000])), Err(Error::SumTooLarge { .. })));
        assert!(partition_oracle(&inst(&[4, 2, 2])).unwrap().unwrap().is_valid_for(&inst(&[4, 2, 2])));
        assert!(PartitionInstance::new(vec![]).is_err());
        assert!(PartitionInstance::new(vec![1, 0]).is_err());
    }

    #[test]
    fn oracle_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=8);
            let v: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
            let total: u64 = v.iter().sum();
            let brute = (0u32..1 << n).any(|m| 2 * (0..n).filter(|&i| m >> i & 1 == 1).map(|i| v[i]).sum::<u64>() == total);
            let i = inst(&v);
            let got = partition_oracle(&i).unwrap();
            assert_eq!(got.is_some(), brute, "{v:?}");
            if let Some(s) = got {
                assert!(s.is_valid_for(&i));
            }
        }
    }

    #[test]
    fn layout_indices() {
        let l = Layout::new(2);
        let labels = l.labels();
        assert_eq!(labels.len(), 24);
        assert_eq!(labels[l.a(3)], "a3");
        assert_eq!(labels[l.d(2)], "d2");
        assert_eq!(labels[l.p2()], "p2");
        assert_eq!(labels[l.mirror(l.c(1))], "c'1");
        assert_eq!(labels[l.mirror(l.p1())], "p'1");
        for i in 0..l.len() {
            assert_eq!(l.mirror(l.mirror(i)), i);
        }
        assert!(l.is_d(l.d(1)) && l.is_d(l.mirror(l.d(2))) && !l.is_d(l.c(2)));
        assert_eq!(l.critical_edges().len(), 6 * 2 + 6);
    }

    #[test]
    fn standard_trees() {
        let l = Layout::new(1);
        let t = l.standard_tree(&BTreeSet::from([1])).unwrap();
        assert_eq!(t.edges().len(), 15);
        assert!(t.contains(l.c(1), l.d(1)));
        assert!(t.contains(l.mirror(l.c(1)), l.mirror(l.a(2))));
        assert!(t.contains(l.q1(), l.q2()));
        assert_eq!(l.decode_subset(&t), BTreeSet::from([1]));

        let l = Layout::new(2);
        let t = l.standard_tree(&BTreeSet::new()).unwrap();
        for i in 1..=2 {
            assert!(t.contains(l.c(i), l.a(i + 1)));
            assert!(t.contains(l.mirror(l.c(i)), l.mirror(l.d(i))));
        }
        assert!(l.standard_tree(&BTreeSet::from([3])).is_err());
    }
}
