//! Brute-force deciders over explicitly enumerated configurations. They
//! only ever look at stacks up to a fixed height, so a negative answer is
//! [`Bounded::NoWithinBounds`], never a proof.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;

use crate::aeps::{fork, Aeps, AepsConfig};
use crate::aps::{Aps, ApsRun, RunNode};
use crate::error::{SolveError, ValidationError};
use crate::pda::{Letter, Pda, PseudoConfig, StateId, Word};
use crate::reductions::ProblemInstance;
use crate::sparse::nps::Nps;
use crate::sparse::structured::StructuredTree;
use crate::sparse::{CompressedNode, Step};
use crate::witness::{check_witness, leaf_accepts, Node, StrategyTree, WitnessKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Longest stack any explored configuration may have.
    pub stack_bound: usize,
    /// Deepest witness looked for.
    pub depth_bound: usize,
    /// Most configurations explored before giving up.
    pub node_budget: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            stack_bound: 8,
            depth_bound: 64,
            node_budget: 200_000,
        }
    }
}

impl Bounds {
    pub fn new(stack_bound: usize, depth_bound: usize, node_budget: usize) -> Result<Self, ValidationError> {
        if stack_bound == 0 || depth_bound == 0 || node_budget == 0 {
            return Err(ValidationError::Other("oracle bounds must be positive".into()));
        }
        Ok(Bounds {
            stack_bound,
            depth_bound,
            node_budget,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bounded<T> {
    Yes(T),
    NoWithinBounds,
}

impl<T> Bounded<T> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Bounded::Yes(_))
    }

    pub fn yes(self) -> Option<T> {
        match self {
            Bounded::Yes(t) => Some(t),
            Bounded::NoWithinBounds => None,
        }
    }
}

/// An explicit AND-OR graph: a node wins if it is a target, or if all
/// children of one of its moves win.
struct Graph<K, M> {
    keys: Vec<K>,
    target: Vec<bool>,
    /// Per node: `(move label, children)`.
    moves: Vec<Vec<(M, Vec<usize>)>>,
}

/// Explores everything reachable from `root`. Targets are not expanded;
/// moves with a child outside `keep` are dropped.
fn explore<K: Clone + Eq + Hash, M>(
    root: K,
    budget: usize,
    target: impl Fn(&K) -> bool,
    keep: impl Fn(&K) -> bool,
    expand: impl Fn(&K) -> Vec<(M, Vec<K>)>,
) -> Result<Graph<K, M>, SolveError> {
    let mut g = Graph {
        keys: vec![root.clone()],
        target: vec![target(&root)],
        moves: vec![Vec::new()],
    };
    let mut index = HashMap::from([(root, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        if g.target[v] {
            continue;
        }
        let key = g.keys[v].clone();
        let mut moves = Vec::new();
        for (m, kids) in expand(&key) {
            if !kids.iter().all(&keep) {
                continue;
            }
            let mut ids = Vec::with_capacity(kids.len());
            for k in kids {
                let id = match index.get(&k) {
                    Some(&id) => id,
                    None => {
                        if g.keys.len() >= budget {
                            return Err(SolveError::BudgetExceeded(budget));
                        }
                        let id = g.keys.len();
                        g.target.push(target(&k));
                        g.keys.push(k.clone());
                        g.moves.push(Vec::new());
                        index.insert(k, id);
                        queue.push_back(id);
                        id
                    }
                };
                ids.push(id);
            }
            moves.push((m, ids));
        }
        g.moves[v] = moves;
    }
    Ok(g)
}

impl<K, M> Graph<K, M> {
    /// Least number of rounds after which each node is known to win, within
    /// `depth` rounds.
    fn ranks(&self, depth: usize) -> Vec<Option<usize>> {
        let mut rank: Vec<Option<usize>> = self.target.iter().map(|&t| t.then_some(0)).collect();
        for d in 1..=depth {
            let mut new = Vec::new();
            for v in 0..self.keys.len() {
                if rank[v].is_none() && self.moves[v].iter().any(|(_, ks)| ks.iter().all(|&c| rank[c].is_some_and(|r| r < d))) {
                    new.push(v);
                }
            }
            if new.is_empty() {
                break;
            }
            for v in new {
                rank[v] = Some(d);
            }
        }
        rank
    }

    /// The first move of `v` whose children all have smaller rank.
    fn winning_move(&self, rank: &[Option<usize>], v: usize) -> &(M, Vec<usize>) {
        let r = rank[v].expect("winning node");
        self.moves[v]
            .iter()
            .find(|(_, ks)| ks.iter().all(|&c| rank[c].is_some_and(|x| x < r)))
            .expect("a ranked node has a ranked move")
    }
}

/// Searches for a strategy tree of `kind` from `root` by solving the AND-OR
/// game over pseudo-configurations: the observer picks a letter, the
/// automaton picks any successor. The PDA should be complete.
pub fn bounded_game_solve(pda: &Pda, root: &PseudoConfig, kind: WitnessKind, bounds: &Bounds) -> Result<Bounded<StrategyTree>, SolveError> {
    let g = explore(
        root.clone(),
        bounds.node_budget,
        |pc| leaf_accepts(pda, kind, pc),
        |pc| pc.stack.len() <= bounds.stack_bound,
        |pc| {
            pda.letters()
                .map(|a| (a, pda.succ(pc, a)))
                .filter(|(_, s)| !s.is_empty())
                .collect::<Vec<(Letter, _)>>()
        },
    )?;
    let rank = g.ranks(bounds.depth_bound);
    if rank[0].is_none() {
        return Ok(Bounded::NoWithinBounds);
    }
    fn build(g: &Graph<PseudoConfig, Letter>, rank: &[Option<usize>], v: usize) -> Node {
        let label = g.keys[v].clone();
        if g.target[v] {
            return Node::leaf(label);
        }
        let (a, kids) = g.winning_move(rank, v);
        Node {
            label,
            letter: Some(*a),
            children: kids.iter().map(|&c| build(g, rank, c)).collect(),
        }
    }
    let tree = StrategyTree::new(build(&g, &rank, 0));
    debug_assert_eq!(check_witness(pda, root, kind, &tree), Ok(()));
    Ok(Bounded::Yes(tree))
}

/// Decides `inst` by [`bounded_game_solve`] on its own PDA. For the `ada`
/// variants every target state is tried in order.
pub fn bounded_decide(inst: &ProblemInstance, bounds: &Bounds) -> Result<Bounded<StrategyTree>, SolveError> {
    let pda = inst.pda.complete();
    let root = inst.root();
    let kinds: Vec<WitnessKind> = match inst.witness_kind(None) {
        Some(k) => vec![k],
        None => pda.states().map(WitnessKind::Synchroniser).collect(),
    };
    for kind in kinds {
        if let Bounded::Yes(t) = bounded_game_solve(&pda, &root, kind, bounds)? {
            return Ok(Bounded::Yes(t));
        }
    }
    Ok(Bounded::NoWithinBounds)
}

type Conf = (StateId, Word);

fn aps_graph(aps: &Aps, start: Conf, bounds: &Bounds) -> Result<Graph<Conf, usize>, SolveError> {
    let fin = (aps.fin(), vec![aps.bottom()]);
    explore(
        start,
        bounds.node_budget,
        |c| *c == fin,
        |c| c.1.len() <= bounds.stack_bound,
        |(q, w)| {
            let Some((&top, rest)) = w.split_first() else {
                return Vec::new();
            };
            aps.rules_at(*q, top)
                .iter()
                .map(|&ri| {
                    let kids = aps.rules()[ri]
                        .branches
                        .iter()
                        .map(|(d, push)| {
                            let mut s = push.clone();
                            s.extend_from_slice(rest);
                            (*d, s)
                        })
                        .collect();
                    (ri, kids)
                })
                .collect()
        },
    )
}

const INF: u32 = u32::MAX;

/// Searches for an accepting run of `aps` from `(init, bot)` with at most
/// `max_leaves` leaves (any number when `None`), returning one with the
/// fewest leaves among runs of depth at most `depth_bound`.
pub fn bounded_aps_run_search(aps: &Aps, max_leaves: Option<usize>, bounds: &Bounds) -> Result<Bounded<ApsRun>, SolveError> {
    let g = aps_graph(aps, (aps.init(), vec![aps.bottom()]), bounds)?;
    let n = g.keys.len();
    // layers[d][v]: fewest leaves of a run from v of depth at most d
    let mut layers: Vec<Vec<u32>> = vec![g.target.iter().map(|&t| if t { 1 } else { INF }).collect()];
    for _ in 0..bounds.depth_bound {
        let prev = layers.last().unwrap();
        let mut next = prev.clone();
        for v in 0..n {
            for (_, ks) in &g.moves[v] {
                let sum = ks.iter().try_fold(0u32, |acc, &c| (prev[c] != INF).then(|| acc.saturating_add(prev[c])));
                if let Some(s) = sum {
                    next[v] = next[v].min(s);
                }
            }
        }
        let stable = &next == prev;
        layers.push(next);
        if stable {
            break;
        }
    }
    let d = layers.len() - 1;
    let best = layers[d][0];
    if best == INF || max_leaves.is_some_and(|m| best as usize > m) {
        return Ok(Bounded::NoWithinBounds);
    }
    fn build(g: &Graph<Conf, usize>, layers: &[Vec<u32>], v: usize, mut d: usize) -> RunNode {
        let val = layers[d][v];
        while d > 0 && layers[d - 1][v] == val {
            d -= 1;
        }
        let (state, stack) = g.keys[v].clone();
        if d == 0 {
            return RunNode::leaf(state, stack);
        }
        let prev = &layers[d - 1];
        let (ri, ks) = g.moves[v]
            .iter()
            .find(|(_, ks)| ks.iter().all(|&c| prev[c] != INF) && ks.iter().map(|&c| prev[c]).sum::<u32>() == val)
            .expect("value is achieved by some move");
        RunNode {
            state,
            stack,
            rule: Some(*ri),
            children: ks.iter().map(|&c| build(g, layers, c, d - 1)).collect(),
        }
    }
    let run = ApsRun {
        root: build(&g, &layers, 0, d),
    };
    debug_assert_eq!(run.validate(aps, aps.init(), &[aps.bottom()]), Ok(()));
    Ok(Bounded::Yes(run))
}

/// Searches for a compressed accepting run of `aps` from `(init, bot)` with
/// at most `k` leaves: chains of single-branch steps (possibly empty)
/// alternating with rules of two or more branches.
pub fn bounded_compressed_run_search(aps: &Aps, k: usize, bounds: &Bounds) -> Result<Bounded<CompressedNode>, SolveError> {
    let g = aps_graph(aps, (aps.init(), vec![aps.bottom()]), bounds)?;
    let n = g.keys.len();
    // single-branch successors, for the reachability closure
    let single: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|v| g.moves[v].iter().filter(|(_, ks)| ks.len() == 1).map(|(r, ks)| (*r, ks[0])).collect())
        .collect();
    let reach: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut seen = vec![false; n];
            seen[v] = true;
            let mut order = vec![v];
            let mut i = 0;
            while i < order.len() {
                for &(_, c) in &single[order[i]] {
                    if !seen[c] {
                        seen[c] = true;
                        order.push(c);
                    }
                }
                i += 1;
            }
            order
        })
        .collect();
    // complex[v]: fewest leaves with a complex root; any[v]: with any root
    let mut complex: Vec<u32> = g.target.iter().map(|&t| if t { 1 } else { INF }).collect();
    let mut any: Vec<u32> = (0..n).map(|v| reach[v].iter().map(|&u| complex[u]).min().unwrap()).collect();
    for _ in 0..bounds.depth_bound {
        let mut changed = false;
        for v in 0..n {
            for (_, ks) in &g.moves[v] {
                if ks.len() < 2 {
                    continue;
                }
                let sum = ks.iter().try_fold(0u32, |acc, &c| (any[c] != INF).then(|| acc.saturating_add(any[c])));
                if let Some(s) = sum {
                    if s < complex[v] {
                        complex[v] = s;
                        changed = true;
                    }
                }
            }
        }
        any = (0..n).map(|v| reach[v].iter().map(|&u| complex[u]).min().unwrap()).collect();
        if !changed {
            break;
        }
    }
    if any[0] == INF || any[0] as usize > k {
        return Ok(Bounded::NoWithinBounds);
    }
    let path_to = |v: usize, u: usize| -> Vec<Step> {
        // breadth-first over single-branch steps
        let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            if x == u {
                break;
            }
            for &(r, c) in &single[x] {
                if c != v && !prev.contains_key(&c) {
                    prev.insert(c, (x, r));
                    queue.push_back(c);
                }
            }
        }
        let mut steps = Vec::new();
        let mut x = u;
        while x != v {
            let (p, r) = prev[&x];
            let (state, stack) = g.keys[x].clone();
            steps.push(Step { rule: r, state, stack });
            x = p;
        }
        steps.reverse();
        steps
    };
    // Every complex vertex has at least two children, each worth at least
    // one leaf, so values strictly drop going down and this terminates.
    fn build_complex(g: &Graph<Conf, usize>, complex: &[u32], any: &[u32], v: usize, sub: &dyn Fn(usize) -> CompressedNode) -> CompressedNode {
        let (state, stack) = g.keys[v].clone();
        if g.target[v] {
            return CompressedNode::Leaf { state, stack };
        }
        let (ri, ks) = g.moves[v]
            .iter()
            .find(|(_, ks)| ks.len() >= 2 && ks.iter().all(|&c| any[c] != INF) && ks.iter().map(|&c| any[c]).sum::<u32>() == complex[v])
            .expect("value is achieved by some rule");
        CompressedNode::Complex {
            state,
            stack,
            rule: *ri,
            children: ks.iter().map(|&c| sub(c)).collect(),
        }
    }
    fn build_any(
        g: &Graph<Conf, usize>,
        complex: &[u32],
        any: &[u32],
        reach: &[Vec<usize>],
        path_to: &dyn Fn(usize, usize) -> Vec<Step>,
        v: usize,
    ) -> CompressedNode {
        let sub = |c: usize| build_any(g, complex, any, reach, path_to, c);
        if complex[v] == any[v] {
            return build_complex(g, complex, any, v, &sub);
        }
        let u = *reach[v].iter().find(|&&u| complex[u] == any[v]).unwrap();
        let (state, stack) = g.keys[v].clone();
        CompressedNode::Simple {
            state,
            stack,
            steps: path_to(v, u),
            child: Box::new(build_complex(g, complex, any, u, &sub)),
        }
    }
    let tree = build_any(&g, &complex, &any, &reach, &path_to, 0);
    debug_assert_eq!(ApsRun { root: tree.expand() }.validate(aps, aps.init(), &[aps.bottom()]), Ok(()));
    Ok(Bounded::Yes(tree))
}

/// Is there a compressed accepting run of `aps` from `start` shaped exactly
/// like `tree`? Simple vertices may take any number of single-branch steps,
/// including none; complex vertices use a rule with one branch per child.
pub fn bounded_shaped_run(aps: &Aps, tree: &StructuredTree, start: &Conf, bounds: &Bounds) -> bool {
    fn go(aps: &Aps, t: &StructuredTree, c: &Conf, bounds: &Bounds, memo: &mut HashMap<(*const StructuredTree, Conf), bool>) -> bool {
        let key = (t as *const StructuredTree, c.clone());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let fork = |c: &Conf, branches: &[(StateId, Word)]| -> Option<Vec<Conf>> {
            let rest = &c.1[1..];
            let kids: Vec<Conf> = branches
                .iter()
                .map(|(d, push)| {
                    let mut w = push.clone();
                    w.extend_from_slice(rest);
                    (*d, w)
                })
                .collect();
            kids.iter().all(|k| k.1.len() <= bounds.stack_bound).then_some(kids)
        };
        let v = match t {
            StructuredTree::Leaf => c.0 == aps.fin() && c.1 == [aps.bottom()],
            StructuredTree::Complex(ts) => aps.rules_at(c.0, c.1[0]).iter().any(|&ri| {
                let r = &aps.rules()[ri];
                r.branches.len() == ts.len() && fork(c, &r.branches).is_some_and(|kids| kids.iter().zip(ts).all(|(k, t)| go(aps, t, k, bounds, memo)))
            }),
            StructuredTree::Simple(inner) => {
                let mut seen = std::collections::HashSet::from([c.clone()]);
                let mut queue = VecDeque::from([c.clone()]);
                let mut found = false;
                while let Some(x) = queue.pop_front() {
                    if go(aps, inner, &x, bounds, memo) {
                        found = true;
                        break;
                    }
                    for &ri in aps.rules_at(x.0, x.1[0]) {
                        let r = &aps.rules()[ri];
                        if r.branches.len() != 1 {
                            continue;
                        }
                        if let Some(mut kids) = fork(&x, &r.branches) {
                            let k = kids.pop().unwrap();
                            if seen.insert(k.clone()) {
                                queue.push_back(k);
                            }
                        }
                    }
                }
                found
            }
        };
        memo.insert(key, v);
        v
    }
    go(aps, tree, start, bounds, &mut HashMap::new())
}

/// Every well-formed configuration with stack height at most
/// `bounds.stack_bound` that reaches one of `targets` by a path whose
/// stacks also stay within that height.
pub fn brute_prestar(nps: &Nps, targets: &BTreeSet<Conf>, bounds: &Bounds) -> Result<BTreeSet<Conf>, SolveError> {
    let all = all_configs(nps.num_states, nps.num_syms, nps.bottom, bounds.stack_bound);
    if all.len() > bounds.node_budget {
        return Err(SolveError::BudgetExceeded(bounds.node_budget));
    }
    let index: HashMap<&Conf, usize> = all.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); all.len()];
    for (i, (q, w)) in all.iter().enumerate() {
        for (_, d, w2) in nps.successors(*q, w) {
            if let Some(&j) = index.get(&(d, w2)) {
                preds[j].push(i);
            }
        }
    }
    let mut seen = vec![false; all.len()];
    let mut queue: VecDeque<usize> = targets.iter().filter_map(|t| index.get(t).copied()).collect();
    for &i in &queue {
        seen[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for &p in &preds[i] {
            if !seen[p] {
                seen[p] = true;
                queue.push_back(p);
            }
        }
    }
    Ok(all.into_iter().zip(seen).filter(|(_, s)| *s).map(|(c, _)| c).collect())
}

/// All configurations `(q, w bot)` with `|w bot| <= height`, bottom-free `w`.
pub fn all_configs(num_states: usize, num_syms: usize, bottom: crate::pda::Sym, height: usize) -> Vec<Conf> {
    let others: Vec<_> = (0..num_syms).map(crate::pda::Sym::from_index).filter(|&s| s != bottom).collect();
    let mut words: Vec<Word> = vec![vec![bottom]];
    let mut layer = words.clone();
    for _ in 1..height {
        layer = layer
            .iter()
            .flat_map(|w| {
                others.iter().map(move |&s| {
                    let mut x = vec![s];
                    x.extend_from_slice(w);
                    x
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
    }
    (0..num_states)
        .flat_map(|q| words.iter().map(move |w| (StateId::from_index(q), w.clone())))
        .collect()
}

/// An accepting run of an AEPS: each internal vertex names the rule it
/// forks with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AepsRun {
    pub config: AepsConfig,
    pub rule: Option<usize>,
    pub children: Vec<AepsRun>,
}

impl AepsRun {
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }
}

/// Searches for an accepting run of `aeps` from its initial configuration.
pub fn bounded_aeps_run_search(aeps: &Aeps, bounds: &Bounds) -> Result<Bounded<AepsRun>, SolveError> {
    let g = explore(
        aeps.initial_config(),
        bounds.node_budget,
        |c| aeps.is_accepting(c),
        |c| c.stack.len() <= bounds.stack_bound,
        |c| {
            aeps.rules
                .iter()
                .enumerate()
                .filter_map(|(i, r)| fork(r, c).ok().map(|kids| (i, kids)))
                .collect::<Vec<_>>()
        },
    )?;
    let rank = g.ranks(bounds.depth_bound);
    if rank[0].is_none() {
        return Ok(Bounded::NoWithinBounds);
    }
    fn build(g: &Graph<AepsConfig, usize>, rank: &[Option<usize>], v: usize) -> AepsRun {
        let config = g.keys[v].clone();
        if g.target[v] {
            return AepsRun {
                config,
                rule: None,
                children: Vec::new(),
            };
        }
        let (ri, kids) = g.winning_move(rank, v);
        AepsRun {
            config,
            rule: Some(*ri),
            children: kids.iter().map(|&c| build(g, rank, c)).collect(),
        }
    }
    Ok(Bounded::Yes(build(&g, &rank, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aps::{build_aps, ApsRule};
    use crate::fixtures::run4;
    use crate::pda::{StateSet, Sym};

    fn q(i: u32) -> StateId {
        StateId(i)
    }

    #[test]
    fn run4_super_synchroniser() {
        let p = run4().complete();
        let root = PseudoConfig::new(&p, p.all_states(), vec![p.bottom()]).unwrap();
        let b = Bounds::new(6, 64, 200_000).unwrap();
        let t = bounded_game_solve(&p, &root, WitnessKind::SuperSynchroniser(q(3)), &b).unwrap().yes().unwrap();
        assert_eq!(t.leaf_count(), 4);
        assert_eq!(check_witness(&p, &root, WitnessKind::SuperSynchroniser(q(3)), &t), Ok(()));
    }

    #[test]
    fn trivial_root_is_a_single_node() {
        let p = run4().complete();
        let root = PseudoConfig::new(&p, StateSet::singleton(q(1)), vec![p.bottom()]).unwrap();
        let t = bounded_game_solve(&p, &root, WitnessKind::SuperSynchroniser(q(1)), &Bounds::default())
            .unwrap()
            .yes()
            .unwrap();
        assert_eq!(t.node_count(), 1);
    }

    #[test]
    fn budget_is_an_error() {
        let p = run4().complete();
        let root = PseudoConfig::new(&p, p.all_states(), vec![p.bottom()]).unwrap();
        let b = Bounds::new(6, 64, 3).unwrap();
        assert_eq!(bounded_game_solve(&p, &root, WitnessKind::HomingWord, &b), Err(SolveError::BudgetExceeded(3)));
    }

    #[test]
    fn run4_aps_leaf_counts() {
        let p = run4().complete();
        let sa = build_aps(&p, &p.all_states(), q(3), Some(4), None).unwrap();
        let b = Bounds::new(6, 64, 200_000).unwrap();
        let run = bounded_aps_run_search(&sa.aps, Some(4), &b).unwrap().yes().unwrap();
        assert_eq!(run.leaf_count(), 4);
        assert!(!bounded_aps_run_search(&sa.aps, Some(3), &b).unwrap().is_yes());
        let c = bounded_compressed_run_search(&sa.aps, 4, &b).unwrap().yes().unwrap();
        assert_eq!(c.shape().leaf_count(), 4);
        assert!(!bounded_compressed_run_search(&sa.aps, 3, &b).unwrap().is_yes());
    }

    #[test]
    fn init_is_fin() {
        let aps = Aps::new(vec!["a".into()], vec!["bot".into()], Sym(0), vec![], q(0), q(0)).unwrap();
        let run = bounded_aps_run_search(&aps, None, &Bounds::default()).unwrap().yes().unwrap();
        assert_eq!(run.node_count(), 1);
    }

    #[test]
    fn compressed_run_uses_simple_chains() {
        // init -A-> mid, then a 2-way split back to fin on both sides
        let (bot, a) = (Sym(0), Sym(1));
        let aps = Aps::new(
            vec!["i".into(), "m".into(), "f".into()],
            vec!["bot".into(), "A".into()],
            bot,
            vec![
                ApsRule {
                    src: q(0),
                    pop: bot,
                    branches: vec![(q(1), vec![a, bot])],
                },
                ApsRule {
                    src: q(1),
                    pop: a,
                    branches: vec![(q(2), vec![]), (q(2), vec![])],
                },
            ],
            q(0),
            q(2),
        )
        .unwrap();
        let c = bounded_compressed_run_search(&aps, 2, &Bounds::default()).unwrap().yes().unwrap();
        assert_eq!(c.shape().to_string(), "S(C(L,L))");
        assert!(!bounded_compressed_run_search(&aps, 1, &Bounds::default()).unwrap().is_yes());
    }

    #[test]
    fn brute_prestar_basics() {
        let nps = Nps::new(2, 2, Sym(0), vec![]).unwrap();
        let t = BTreeSet::from([(q(1), vec![Sym(0)])]);
        assert_eq!(brute_prestar(&nps, &t, &Bounds::default()).unwrap(), t);
        // one rule (0, bot) -> (1, bot) adds exactly (0, bot)
        let nps = Nps::new(2, 2, Sym(0), vec![(q(0), Sym(0), q(1), vec![Sym(0)])]).unwrap();
        let got = brute_prestar(&nps, &t, &Bounds::default()).unwrap();
        assert_eq!(got, BTreeSet::from([(q(0), vec![Sym(0)]), (q(1), vec![Sym(0)])]));
    }

    #[test]
    fn all_configs_count() {
        // 2 states, stack letters {A, B} over bot, height 3: 1 + 2 + 4 words
        assert_eq!(all_configs(2, 3, Sym(2), 3).len(), 14);
    }

    #[test]
    fn aeps_fixtures() {
        let b = Bounds::default();
        let two = crate::fixtures::aeps("two_vars");
        assert!(bounded_aeps_run_search(&two, &b).unwrap().is_yes());
        let no = crate::fixtures::aeps("contradiction");
        assert!(!bounded_aeps_run_search(&no, &b).unwrap().is_yes());
        let one = crate::fixtures::aeps("one_step");
        assert_eq!(bounded_aeps_run_search(&one, &b).unwrap().yes().unwrap().depth(), 2);
    }
}
