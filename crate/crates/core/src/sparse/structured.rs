//! Structured trees: the unlabelled skeletons of compressed runs.
//!
//! Grammar: `Tree ::= C | Simple(C)`, `C ::= Leaf | Complex(Tree, Tree, ...)`
//! with at least two children under `Complex`. Simple vertices therefore
//! never have a simple child.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StructuredTree {
    Leaf,
    Simple(Box<StructuredTree>),
    Complex(Vec<StructuredTree>),
}

impl StructuredTree {
    pub fn leaf_count(&self) -> usize {
        match self {
            StructuredTree::Leaf => 1,
            StructuredTree::Simple(c) => c.leaf_count(),
            StructuredTree::Complex(cs) => cs.iter().map(|c| c.leaf_count()).sum(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            StructuredTree::Leaf => 1,
            StructuredTree::Simple(c) => 1 + c.vertex_count(),
            StructuredTree::Complex(cs) => 1 + cs.iter().map(|c| c.vertex_count()).sum::<usize>(),
        }
    }

    /// No simple vertex has a simple child, and complex vertices branch.
    pub fn is_structured(&self) -> bool {
        match self {
            StructuredTree::Leaf => true,
            StructuredTree::Simple(c) => !matches!(**c, StructuredTree::Simple(_)) && c.is_structured(),
            StructuredTree::Complex(cs) => cs.len() >= 2 && cs.iter().all(|c| c.is_structured()),
        }
    }
}

impl fmt::Display for StructuredTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuredTree::Leaf => write!(f, "L"),
            StructuredTree::Simple(c) => write!(f, "S({c})"),
            StructuredTree::Complex(cs) => {
                write!(f, "C(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Compositions of `n` into `m` positive parts, in lexicographic order.
pub(crate) fn compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 1 {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 1..=n.saturating_sub(m - 1) {
            cur.push(first);
            go(n - first, m - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m >= 1 && n >= m {
        go(n, m, &mut Vec::new(), &mut out);
    }
    out
}

/// Calls `f` on every index vector below `lens`, first position slowest.
pub(crate) fn for_each_product(lens: &[usize], mut f: impl FnMut(&[usize]) -> bool) {
    if lens.contains(&0) {
        return;
    }
    let mut idx = vec![0; lens.len()];
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = lens.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < lens[i] {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Every structured tree with at most `k` leaves, exactly once.
///
/// Order: by leaf count; within a count, the leaf-or-complex trees first
/// and then their `Simple` wrappers in the same order. Complex trees are
/// ordered by number of children, then by the composition of leaf counts,
/// then by children (first child slowest).
pub fn enumerate_structured(k: usize) -> Vec<StructuredTree> {
    let mut by_n: Vec<Vec<StructuredTree>> = vec![Vec::new()];
    for n in 1..=k {
        let mut cs = Vec::new();
        if n == 1 {
            cs.push(StructuredTree::Leaf);
        }
        for m in 2..=n {
            for comp in compositions(n, m) {
                let lens: Vec<usize> = comp.iter().map(|&c| by_n[c].len()).collect();
                for_each_product(&lens, |idx| {
                    cs.push(StructuredTree::Complex(idx.iter().zip(&comp).map(|(&i, &c)| by_n[c][i].clone()).collect()));
                    true
                });
            }
        }
        let simples: Vec<_> = cs.iter().map(|c| StructuredTree::Simple(Box::new(c.clone()))).collect();
        cs.extend(simples);
        by_n.push(cs);
    }
    by_n.into_iter().flatten().collect()
}

/// Number of structured trees with exactly `n` leaves, by the grammar's
/// recurrence alone.
pub fn count_structured(n: usize) -> u64 {
    let mut t = vec![0u64; n + 1];
    for i in 1..=n {
        let mut c = if i == 1 { 1 } else { 0 };
        for m in 2..=i {
            for comp in compositions(i, m) {
                c += comp.iter().map(|&p| t[p]).product::<u64>();
            }
        }
        t[i] = 2 * c;
    }
    t[n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn small_counts() {
        assert_eq!(
            enumerate_structured(1),
            vec![StructuredTree::Leaf, StructuredTree::Simple(Box::new(StructuredTree::Leaf))]
        );
        assert_eq!(enumerate_structured(2).len(), 10);
        assert_eq!(count_structured(3), 80);
        assert_eq!(count_structured(4), 992);
        assert_eq!(enumerate_structured(4).len(), 2 + 8 + 80 + 992);
    }

    #[test]
    fn trees_are_distinct_structured_and_small() {
        let k = 4;
        let all = enumerate_structured(k);
        let set: HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        for t in &all {
            assert!(t.is_structured(), "{t}");
            assert!(t.leaf_count() <= k);
            assert!(t.vertex_count() <= 4 * t.leaf_count() - 2, "{t}");
        }
        let leaves: Vec<usize> = all.iter().map(|t| t.leaf_count()).collect();
        assert!(leaves.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn compositions_lex() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(compositions(2, 3), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn display() {
        let t = StructuredTree::Simple(Box::new(StructuredTree::Complex(vec![StructuredTree::Leaf, StructuredTree::Leaf])));
        assert_eq!(t.to_string(), "S(C(L,L))");
        assert!(!StructuredTree::Simple(Box::new(t)).is_structured());
    }
}
