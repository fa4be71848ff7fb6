//! Sparse emptiness: is there an accepting APS run with at most `k` leaves?
//!
//! Each structured tree with at most `k` leaves is labelled bottom-up with
//! N-automata (leaf: `{(fin, bot)}`; simple vertex: pre* of its child under
//! the single-branch rules; complex vertex: product of its children behind
//! fresh entries). The tree admits a compressed accepting run iff the root
//! automaton stores `(init, bot)`; transition provenance then rebuilds the
//! run.

pub mod nautomaton;
pub mod nps;
pub mod structured;

use std::collections::HashSet;

use crate::aps::{build_aps, derive_nps, run_to_supersync, Aps, ApsRun, RunNode};
use crate::error::SolveError;
use crate::pda::{Pda, PseudoConfig, StateId, StateSet, Word};
use crate::witness::{check_witness, StrategyTree, WitnessKind};

use nautomaton::{complex, prestar, NAutomaton, TransOrigin};
use nps::Nps;
use structured::{compositions, for_each_product, StructuredTree};

#[derive(Clone, Debug, Default)]
pub struct SparseOptions {
    /// Bound on the states of any single product automaton.
    pub state_budget: Option<usize>,
    /// Overrides the leaf bound used by [`det_special_sync`] (default `|I|`).
    pub k: Option<usize>,
}

/// One single-branch step inside a simple vertex: the APS rule applied and
/// the configuration it leads to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: usize,
    pub state: StateId,
    pub stack: Word,
}

/// A compressed accepting run, shaped like a structured tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompressedNode {
    Leaf {
        state: StateId,
        stack: Word,
    },
    /// A sequence of single-branch steps ending where `child` starts.
    Simple {
        state: StateId,
        stack: Word,
        steps: Vec<Step>,
        child: Box<CompressedNode>,
    },
    Complex {
        state: StateId,
        stack: Word,
        rule: usize,
        children: Vec<CompressedNode>,
    },
}

impl CompressedNode {
    pub fn shape(&self) -> StructuredTree {
        match self {
            CompressedNode::Leaf { .. } => StructuredTree::Leaf,
            CompressedNode::Simple { child, .. } => StructuredTree::Simple(Box::new(child.shape())),
            CompressedNode::Complex { children, .. } => StructuredTree::Complex(children.iter().map(|c| c.shape()).collect()),
        }
    }

    /// Unfolds simple vertices into chains of single-child run nodes.
    pub fn expand(&self) -> RunNode {
        match self {
            CompressedNode::Leaf { state, stack } => RunNode::leaf(*state, stack.clone()),
            CompressedNode::Complex { state, stack, rule, children } => RunNode {
                state: *state,
                stack: stack.clone(),
                rule: Some(*rule),
                children: children.iter().map(|c| c.expand()).collect(),
            },
            CompressedNode::Simple { state, stack, steps, child } => {
                let mut cur = child.expand();
                for i in (0..steps.len()).rev() {
                    let (q, w) = if i == 0 {
                        (*state, stack.clone())
                    } else {
                        (steps[i - 1].state, steps[i - 1].stack.clone())
                    };
                    cur = RunNode {
                        state: q,
                        stack: w,
                        rule: Some(steps[i].rule),
                        children: vec![cur],
                    };
                }
                cur
            }
        }
    }
}

enum Kind {
    Leaf,
    Simple(usize),
    Complex(Vec<usize>),
}

/// Labelled vertices, children before parents.
struct Arena<'a> {
    aps: &'a Aps,
    nps: Nps,
    budget: Option<usize>,
    kinds: Vec<Kind>,
    autos: Vec<NAutomaton>,
}

impl<'a> Arena<'a> {
    fn new(aps: &'a Aps, budget: Option<usize>) -> Self {
        Arena {
            aps,
            nps: derive_nps(aps),
            budget,
            kinds: Vec::new(),
            autos: Vec::new(),
        }
    }

    fn push(&mut self, kind: Kind, auto: NAutomaton) -> usize {
        self.kinds.push(kind);
        self.autos.push(auto);
        self.autos.len() - 1
    }

    fn leaf(&mut self) -> usize {
        let m = NAutomaton::leaf(self.aps.num_states(), self.aps.fin(), self.aps.bottom());
        self.push(Kind::Leaf, m)
    }

    fn simple(&mut self, child: usize) -> usize {
        let m = prestar(&self.nps, &self.autos[child]);
        self.push(Kind::Simple(child), m)
    }

    fn complex_auto(&self, kids: &[usize]) -> Result<NAutomaton, SolveError> {
        let cs: Vec<&NAutomaton> = kids.iter().map(|&i| &self.autos[i]).collect();
        complex(self.aps, &cs, self.budget)
    }

    fn build(&mut self, t: &StructuredTree) -> Result<usize, SolveError> {
        Ok(match t {
            StructuredTree::Leaf => self.leaf(),
            StructuredTree::Simple(c) => {
                let c = self.build(c)?;
                self.simple(c)
            }
            StructuredTree::Complex(cs) => {
                let kids = cs.iter().map(|c| self.build(c)).collect::<Result<Vec<_>, _>>()?;
                let m = self.complex_auto(&kids)?;
                self.push(Kind::Complex(kids), m)
            }
        })
    }

    fn shape(&self, v: usize) -> StructuredTree {
        match &self.kinds[v] {
            Kind::Leaf => StructuredTree::Leaf,
            Kind::Simple(c) => StructuredTree::Simple(Box::new(self.shape(*c))),
            Kind::Complex(cs) => StructuredTree::Complex(cs.iter().map(|&c| self.shape(c)).collect()),
        }
    }

    fn root_path(&self, v: usize) -> Option<Vec<u32>> {
        self.autos[v].accepting_path(self.aps.init(), &[self.aps.bottom()])
    }

    /// Rebuilds the compressed run of vertex `v` from `(q, stack)` given an
    /// accepting path of `v`'s automaton over `stack`.
    fn rebuild(&self, v: usize, mut q: StateId, mut stack: Word, mut path: Vec<u32>) -> CompressedNode {
        let m = &self.autos[v];
        match &self.kinds[v] {
            Kind::Leaf => {
                debug_assert!(q == self.aps.fin() && stack == [self.aps.bottom()]);
                CompressedNode::Leaf { state: q, stack }
            }
            Kind::Simple(c) => {
                let (q0, w0) = (q, stack.clone());
                let mut steps = Vec::new();
                while let Some(TransOrigin::Prestar { rule, path: rho }) = m.transition(path[0], stack[0], path[1]).map(|t| &t.origin) {
                    let r = &self.nps.rules[*rule];
                    let mut w = r.push.clone();
                    w.extend_from_slice(&stack[1..]);
                    let mut p = rho.clone();
                    p.extend_from_slice(&path[2..]);
                    q = r.dst;
                    stack = w;
                    path = p;
                    steps.push(Step {
                        rule: r.origin,
                        state: q,
                        stack: stack.clone(),
                    });
                }
                let child = self.rebuild(*c, q, stack, path);
                CompressedNode::Simple {
                    state: q0,
                    stack: w0,
                    steps,
                    child: Box::new(child),
                }
            }
            Kind::Complex(kids) => {
                let Some(TransOrigin::Entry { rule, paths }) = m.transition(path[0], stack[0], path[1]).map(|t| &t.origin) else {
                    unreachable!("complex vertices are entered by entry transitions only")
                };
                let r = &self.aps.rules()[*rule];
                let children = kids
                    .iter()
                    .enumerate()
                    .map(|(i, &kid)| {
                        let (qi, gi) = &r.branches[i];
                        let mut w = gi.clone();
                        w.extend_from_slice(&stack[1..]);
                        let mut p = paths[i].clone();
                        p.extend(path[2..].iter().map(|&s| m.tuple(s).expect("product state")[i]));
                        self.rebuild(kid, *qi, w, p)
                    })
                    .collect();
                CompressedNode::Complex {
                    state: q,
                    stack,
                    rule: *rule,
                    children,
                }
            }
        }
    }

    fn rebuild_root(&self, v: usize) -> Option<CompressedNode> {
        let path = self.root_path(v)?;
        Some(self.rebuild(v, self.aps.init(), vec![self.aps.bottom()], path))
    }
}

/// The automata labelling one structured tree.
#[derive(Clone, Debug)]
pub struct CheckResult {
    /// Whether the root automaton stores `(init, bot)`.
    pub accepted: bool,
    /// One automaton per vertex, children before parents; the root's last.
    pub automata: Vec<NAutomaton>,
    pub compressed: Option<CompressedNode>,
}

/// Labels `tree` bottom-up and tests whether it carries a compressed
/// accepting run from `(init, bot)`.
pub fn check(aps: &Aps, tree: &StructuredTree, opts: &SparseOptions) -> Result<CheckResult, SolveError> {
    let mut arena = Arena::new(aps, opts.state_budget);
    let root = arena.build(tree)?;
    let compressed = arena.rebuild_root(root);
    Ok(CheckResult {
        accepted: compressed.is_some(),
        compressed,
        automata: arena.autos,
    })
}

#[derive(Clone, Debug)]
pub struct SparseResult {
    pub accepted: bool,
    pub tree: Option<StructuredTree>,
    pub compressed: Option<CompressedNode>,
    pub run: Option<ApsRun>,
    /// How many structured trees had their root tested.
    pub trees_checked: usize,
}

/// Decides whether `aps` has an accepting run with at most `k` leaves.
///
/// Trees are generated in the canonical order of
/// [`structured::enumerate_structured`], sharing subtrees. A subtree whose
/// automaton stores nothing is dropped with every tree containing it, which
/// cannot change the first accepting tree.
pub fn sparse_empty(aps: &Aps, k: usize, opts: &SparseOptions) -> Result<SparseResult, SolveError> {
    let mut arena = Arena::new(aps, opts.state_budget);
    let arities: HashSet<usize> = aps.rules().iter().map(|r| r.branches.len()).collect();
    // by_n[n]: arena ids of the surviving trees with n leaves, in order
    let mut by_n: Vec<Vec<usize>> = vec![Vec::new()];
    let mut checked = 0;
    let found = |arena: &Arena, v: usize, checked: usize| -> Option<SparseResult> {
        let c = arena.rebuild_root(v)?;
        let run = ApsRun { root: c.expand() };
        debug_assert_eq!(run.validate(aps, aps.init(), &[aps.bottom()]), Ok(()));
        Some(SparseResult {
            accepted: true,
            tree: Some(arena.shape(v)),
            compressed: Some(c),
            run: Some(run),
            trees_checked: checked,
        })
    };
    for n in 1..=k {
        let mut cs = Vec::new();
        if n == 1 {
            let v = arena.leaf();
            checked += 1;
            if let Some(r) = found(&arena, v, checked) {
                return Ok(r);
            }
            cs.push(v);
        }
        for m in 2..=n {
            if !arities.contains(&m) {
                continue;
            }
            for comp in compositions(n, m) {
                let lens: Vec<usize> = comp.iter().map(|&c| by_n[c].len()).collect();
                let mut res: Result<Option<SparseResult>, SolveError> = Ok(None);
                for_each_product(&lens, |idx| {
                    let kids: Vec<usize> = idx.iter().zip(&comp).map(|(&i, &c)| by_n[c][i]).collect();
                    let auto = match arena.complex_auto(&kids) {
                        Ok(a) => a,
                        Err(e) => {
                            res = Err(e);
                            return false;
                        }
                    };
                    if auto.is_empty() {
                        return true;
                    }
                    let v = arena.push(Kind::Complex(kids), auto);
                    checked += 1;
                    if let Some(r) = found(&arena, v, checked) {
                        res = Ok(Some(r));
                        return false;
                    }
                    cs.push(v);
                    true
                });
                if let Some(r) = res? {
                    return Ok(r);
                }
            }
        }
        let mut all = cs.clone();
        for &c in &cs {
            let v = arena.simple(c);
            checked += 1;
            if let Some(r) = found(&arena, v, checked) {
                return Ok(r);
            }
            all.push(v);
        }
        by_n.push(all);
    }
    Ok(SparseResult {
        accepted: false,
        tree: None,
        compressed: None,
        run: None,
        trees_checked: checked,
    })
}

#[derive(Clone, Debug)]
pub struct DetResult {
    pub accepted: bool,
    pub witness: Option<StrategyTree>,
    pub run: Option<ApsRun>,
    pub aps_states: usize,
    pub trees_checked: usize,
}

/// Special-Sync for deterministic PDAs: is there a super-synchroniser from
/// `(init, bot)` to `target`? Builds `A_P` restricted to subsets of size at
/// most `|init|` and runs sparse emptiness with `k = |init|`.
pub fn det_special_sync(pda: &Pda, init: &StateSet, target: StateId, opts: &SparseOptions) -> Result<DetResult, SolveError> {
    let pda = pda.complete();
    if !pda.is_deterministic() {
        return Err(SolveError::NotDeterministic);
    }
    let sa = build_aps(&pda, init, target, Some(init.len()), opts.state_budget)?;
    let k = opts.k.unwrap_or(init.len()).max(1);
    let res = sparse_empty(&sa.aps, k, opts)?;
    let witness = match &res.run {
        Some(run) => {
            let tree = run_to_supersync(&sa, run)?;
            let root = PseudoConfig::new(&pda, init.clone(), vec![pda.bottom()])?;
            check_witness(&pda, &root, WitnessKind::SuperSynchroniser(target), &tree).map_err(|v| SolveError::NotAnApsRun(v.to_string()))?;
            Some(tree)
        }
        None => None,
    };
    Ok(DetResult {
        accepted: res.accepted,
        witness,
        run: res.run,
        aps_states: sa.aps.num_states(),
        trees_checked: res.trees_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aps::{aps_emptiness, ApsRule};
    use crate::fixtures::run4;
    use crate::pda::Sym;

    fn run4_ap() -> Aps {
        let pda = run4();
        let s4 = pda.state_id("4").unwrap();
        build_aps(&pda, &pda.all_states(), s4, Some(4), None).unwrap().aps
    }

    fn tiny(init_is_fin: bool, rules: Vec<ApsRule>) -> Aps {
        let fin = if init_is_fin { 0 } else { 1 };
        Aps::new(
            vec!["p".into(), "f".into()],
            vec!["A".into(), "bot".into()],
            Sym(1),
            rules,
            StateId(0),
            StateId(fin),
        )
        .unwrap()
    }

    #[test]
    fn leaf_tree_accepts_when_init_is_fin() {
        let aps = tiny(true, vec![]);
        let r = check(&aps, &StructuredTree::Leaf, &SparseOptions::default()).unwrap();
        assert!(r.accepted);
        assert_eq!(r.automata.len(), 1);
    }

    #[test]
    fn simple_leaf_follows_a_chain() {
        // p,bot -> p,A bot ; p,A -> f,eps
        let aps = tiny(
            false,
            vec![
                ApsRule {
                    src: StateId(0),
                    pop: Sym(1),
                    branches: vec![(StateId(0), vec![Sym(0), Sym(1)])],
                },
                ApsRule {
                    src: StateId(0),
                    pop: Sym(0),
                    branches: vec![(StateId(1), vec![])],
                },
            ],
        );
        assert!(!check(&aps, &StructuredTree::Leaf, &SparseOptions::default()).unwrap().accepted);
        let t = StructuredTree::Simple(Box::new(StructuredTree::Leaf));
        let r = check(&aps, &t, &SparseOptions::default()).unwrap();
        assert!(r.accepted);
        let c = r.compressed.unwrap();
        assert_eq!(c.shape(), t);
        let run = ApsRun { root: c.expand() };
        assert_eq!(run.validate(&aps, StateId(0), &[Sym(1)]), Ok(()));
        assert_eq!(run.node_count(), 3);
    }

    #[test]
    fn run4_needs_four_leaves() {
        let aps = run4_ap();
        let opts = SparseOptions::default();
        let yes = sparse_empty(&aps, 4, &opts).unwrap();
        assert!(yes.accepted);
        let run = yes.run.unwrap();
        assert_eq!(run.leaf_count(), 4);
        assert_eq!(run.validate(&aps, aps.init(), &[aps.bottom()]), Ok(()));
        assert_eq!(yes.tree.unwrap().leaf_count(), 4);
        assert!(!sparse_empty(&aps, 3, &opts).unwrap().accepted);
    }

    #[test]
    fn agrees_with_saturation_on_run4() {
        let aps = run4_ap();
        assert!(aps_emptiness(&aps).accepted);
        let pda = run4();
        let r = det_special_sync(&pda, &pda.all_states(), pda.state_id("4").unwrap(), &SparseOptions::default()).unwrap();
        assert!(r.accepted);
        assert!(r.witness.is_some());
    }

    #[test]
    fn singleton_init_is_immediate() {
        let pda = run4();
        let s = pda.state_id("2").unwrap();
        let r = det_special_sync(&pda, &StateSet::singleton(s), s, &SparseOptions::default()).unwrap();
        assert!(r.accepted);
        assert_eq!(r.witness.unwrap().node_count(), 1);
    }

    #[test]
    fn budget_is_reported() {
        let aps = run4_ap();
        let opts = SparseOptions {
            state_budget: Some(1),
            k: None,
        };
        assert!(matches!(sparse_empty(&aps, 4, &opts), Err(SolveError::CapExceeded { .. })));
    }
}
