//! Variable-free alternating pushdown systems.
//!
//! Besides the model itself this module holds
//! * [`build_aps`], the subset construction `A_P` whose accepting runs are
//!   exactly the super-synchronisers of a PDA,
//! * [`aps_emptiness`], alternating pre* saturation with provenance,
//! * [`extract_run`], which turns that provenance back into a run tree.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{SolveError, ValidationError};
use crate::pda::{check_push_discipline, check_stack_discipline, Letter, Pda, PseudoConfig, StateId, StateSet, Sym, Word};
use crate::sparse::nps::{Nps, NpsRule};
use crate::witness::{Node, StrategyTree};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ApsRule {
    pub src: StateId,
    pub pop: Sym,
    pub branches: Vec<(StateId, Word)>,
}

#[derive(Clone, Debug)]
pub struct Aps {
    states: Vec<String>,
    stack: Vec<String>,
    bottom: Sym,
    rules: Vec<ApsRule>,
    init: StateId,
    fin: StateId,
    by_head: HashMap<(StateId, Sym), Vec<usize>>,
    state_index: HashMap<String, StateId>,
    sym_index: HashMap<String, Sym>,
}

impl PartialEq for Aps {
    fn eq(&self, o: &Self) -> bool {
        self.states == o.states && self.stack == o.stack && self.bottom == o.bottom && self.rules == o.rules && self.init == o.init && self.fin == o.fin
    }
}

impl Eq for Aps {}

fn index_names<T: Copy>(names: &[String], what: &str, mk: impl Fn(usize) -> T) -> Result<HashMap<String, T>, ValidationError> {
    let mut m = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if m.insert(n.clone(), mk(i)).is_some() {
            return Err(ValidationError::DuplicateName(format!("{what} `{n}`")));
        }
    }
    Ok(m)
}

impl Aps {
    /// Validates and builds an APS. Identical rules are merged.
    pub fn new(states: Vec<String>, stack: Vec<String>, bottom: Sym, rules: Vec<ApsRule>, init: StateId, fin: StateId) -> Result<Self, ValidationError> {
        if states.is_empty() {
            return Err(ValidationError::Empty("state set"));
        }
        if bottom.index() >= stack.len() {
            return Err(ValidationError::UnknownId("bottom symbol".into()));
        }
        if init.index() >= states.len() || fin.index() >= states.len() {
            return Err(ValidationError::UnknownId("init/fin state".into()));
        }
        let state_index = index_names(&states, "state", StateId::from_index)?;
        let sym_index = index_names(&stack, "stack symbol", Sym::from_index)?;
        let mut aps = Aps {
            states,
            stack,
            bottom,
            rules: Vec::new(),
            init,
            fin,
            by_head: HashMap::new(),
            state_index,
            sym_index,
        };
        let mut seen = HashSet::new();
        for r in rules {
            aps.check_rule(&r)?;
            if seen.insert(r.clone()) {
                aps.by_head.entry((r.src, r.pop)).or_default().push(aps.rules.len());
                aps.rules.push(r);
            }
        }
        Ok(aps)
    }

    fn check_rule(&self, r: &ApsRule) -> Result<(), ValidationError> {
        let n = self.states.len();
        let g = self.stack.len();
        if r.branches.is_empty() {
            return Err(ValidationError::Other("APS rule without branches".into()));
        }
        if r.src.index() >= n || r.branches.iter().any(|(q, _)| q.index() >= n) {
            return Err(ValidationError::UnknownId("state in APS rule".into()));
        }
        if r.pop.index() >= g || r.branches.iter().any(|(_, w)| w.iter().any(|s| s.index() >= g)) {
            return Err(ValidationError::UnknownId("stack symbol in APS rule".into()));
        }
        for (_, w) in &r.branches {
            check_push_discipline(self.bottom, r.pop, w).map_err(|reason| ValidationError::BottomDiscipline {
                rule: self.show_rule(r),
                reason,
            })?;
        }
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn num_syms(&self) -> usize {
        self.stack.len()
    }
    pub fn bottom(&self) -> Sym {
        self.bottom
    }
    pub fn init(&self) -> StateId {
        self.init
    }
    pub fn fin(&self) -> StateId {
        self.fin
    }
    pub fn rules(&self) -> &[ApsRule] {
        &self.rules
    }
    pub fn state_names(&self) -> &[String] {
        &self.states
    }
    pub fn sym_names(&self) -> &[String] {
        &self.stack
    }
    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }
    pub fn sym_name(&self, s: Sym) -> &str {
        &self.stack[s.index()]
    }
    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }
    pub fn sym_id(&self, name: &str) -> Option<Sym> {
        self.sym_index.get(name).copied()
    }

    pub fn rules_at(&self, q: StateId, pop: Sym) -> &[usize] {
        self.by_head.get(&(q, pop)).map_or(&[], Vec::as_slice)
    }

    pub fn check_stack(&self, w: &[Sym]) -> Result<(), ValidationError> {
        check_stack_discipline(self.bottom, w)
    }

    pub fn show_word(&self, w: &[Sym]) -> String {
        if w.is_empty() {
            "eps".into()
        } else {
            w.iter().map(|s| self.sym_name(*s)).collect::<Vec<_>>().join(" ")
        }
    }

    pub fn show_rule(&self, r: &ApsRule) -> String {
        let name = |v: &[String], i: usize| v.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
        let word = |w: &[Sym]| {
            if w.is_empty() {
                "eps".to_string()
            } else {
                w.iter().map(|s| name(&self.stack, s.index())).collect::<Vec<_>>().join(" ")
            }
        };
        let branches: Vec<String> = r
            .branches
            .iter()
            .map(|(q, w)| format!("({}, {})", name(&self.states, q.index()), word(w)))
            .collect();
        format!(
            "{} {} -> {}",
            name(&self.states, r.src.index()),
            name(&self.stack, r.pop.index()),
            branches.join(" ; ")
        )
    }
}

/// One vertex of a run: a configuration, the rule applied there (internal
/// vertices only) and the children it forks into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunNode {
    pub state: StateId,
    pub stack: Word,
    pub rule: Option<usize>,
    pub children: Vec<RunNode>,
}

impl RunNode {
    pub fn leaf(state: StateId, stack: Word) -> Self {
        RunNode {
            state,
            stack,
            rule: None,
            children: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApsRun {
    pub root: RunNode,
}

impl ApsRun {
    fn walk(&self) -> Vec<&RunNode> {
        let mut out = Vec::new();
        let mut st = vec![&self.root];
        while let Some(n) = st.pop() {
            out.push(n);
            st.extend(n.children.iter().rev());
        }
        out
    }

    pub fn leaf_count(&self) -> usize {
        self.walk().iter().filter(|n| n.children.is_empty()).count()
    }

    pub fn node_count(&self) -> usize {
        self.walk().len()
    }

    pub fn max_stack(&self) -> usize {
        self.walk().iter().map(|n| n.stack.len()).max().unwrap_or(0)
    }

    /// Checks that this is an accepting run of `aps` from `(state, stack)`.
    pub fn validate(&self, aps: &Aps, state: StateId, stack: &[Sym]) -> Result<(), String> {
        if self.root.state != state || self.root.stack != stack {
            return Err("root label differs from the start configuration".into());
        }
        for n in self.walk() {
            match n.rule {
                None => {
                    if !n.children.is_empty() {
                        return Err("children without a rule".into());
                    }
                    if n.state != aps.fin() || n.stack != [aps.bottom()] {
                        return Err(format!("leaf ({}, {}) is not (fin, bot)", aps.state_name(n.state), aps.show_word(&n.stack)));
                    }
                }
                Some(ri) => {
                    let r = aps.rules().get(ri).ok_or("rule index out of range")?;
                    let (top, rest) = n.stack.split_first().ok_or("empty stack")?;
                    if r.src != n.state || r.pop != *top {
                        return Err(format!(
                            "rule {ri} not applicable at ({}, {})",
                            aps.state_name(n.state),
                            aps.show_word(&n.stack)
                        ));
                    }
                    if r.branches.len() != n.children.len() {
                        return Err(format!("rule {ri} has {} branches, node has {} children", r.branches.len(), n.children.len()));
                    }
                    for ((q, w), c) in r.branches.iter().zip(&n.children) {
                        let mut expect = w.clone();
                        expect.extend_from_slice(rest);
                        if c.state != *q || c.stack != expect {
                            return Err(format!("child does not match rule {ri}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `A_P` together with what is needed to read its runs as strategy trees.
#[derive(Clone, Debug)]
pub struct SubsetAps {
    pub aps: Aps,
    /// APS state `i` stands for `subsets[i]`.
    pub subsets: Vec<StateSet>,
    /// The input letter that produced each APS rule.
    pub rule_letters: Vec<Letter>,
    /// The completed PDA the construction was run on.
    pub pda: Pda,
}

impl SubsetAps {
    pub fn state_of(&self, s: &StateSet) -> Option<StateId> {
        self.subsets.iter().position(|x| x == s).map(StateId::from_index)
    }
}

/// Builds `A_P` for `(pda, init, target)`.
///
/// Subset states come from a forward closure over observation-class targets
/// starting at `init`, ignoring stack contents. With `size_cap`, rules that
/// would need a subset larger than the cap are dropped. `state_budget`
/// bounds the number of subset states.
pub fn build_aps(pda: &Pda, init: &StateSet, target: StateId, size_cap: Option<usize>, state_budget: Option<usize>) -> Result<SubsetAps, SolveError> {
    if init.is_empty() {
        return Err(ValidationError::EmptyStateSet.into());
    }
    if target.index() >= pda.num_states() || init.iter().any(|q| q.index() >= pda.num_states()) {
        return Err(ValidationError::UnknownId("state".into()).into());
    }
    let pda = pda.complete();
    let mut subsets: Vec<StateSet> = vec![init.clone()];
    let mut index: HashMap<StateSet, usize> = HashMap::from([(init.clone(), 0)]);
    let mut rules = Vec::new();
    let mut letters = Vec::new();
    let mut seen: HashSet<ApsRule> = HashSet::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let s = subsets[i].clone();
        for a in pda.letters() {
            for top in pda.syms() {
                let classes = pda.obs_classes(&s, a, top);
                if classes.is_empty() {
                    continue;
                }
                if let Some(cap) = size_cap {
                    if classes.iter().any(|c| c.targets.len() > cap) {
                        continue;
                    }
                }
                let mut branches = Vec::with_capacity(classes.len());
                for c in classes {
                    let j = match index.get(&c.targets) {
                        Some(&j) => j,
                        None => {
                            if let Some(b) = state_budget {
                                if subsets.len() >= b {
                                    return Err(SolveError::CapExceeded {
                                        limit: b,
                                        what: "subset states of A_P",
                                    });
                                }
                            }
                            let j = subsets.len();
                            subsets.push(c.targets.clone());
                            index.insert(c.targets.clone(), j);
                            queue.push_back(j);
                            j
                        }
                    };
                    branches.push((StateId::from_index(j), c.push));
                }
                let rule = ApsRule {
                    src: StateId::from_index(i),
                    pop: top,
                    branches,
                };
                if seen.insert(rule.clone()) {
                    rules.push(rule);
                    letters.push(a);
                }
            }
        }
    }
    let fin_set = StateSet::singleton(target);
    let fin = match index.get(&fin_set) {
        Some(&j) => j,
        None => {
            subsets.push(fin_set);
            subsets.len() - 1
        }
    };
    let names = subsets.iter().map(|s| pda.show_set(s)).collect();
    let aps = Aps::new(names, pda.sym_names().to_vec(), pda.bottom(), rules, StateId(0), StateId::from_index(fin))?;
    Ok(SubsetAps {
        aps,
        subsets,
        rule_letters: letters,
        pda,
    })
}

/// Reads an accepting run of `A_P` as a super-synchroniser.
pub fn run_to_supersync(sa: &SubsetAps, run: &ApsRun) -> Result<StrategyTree, SolveError> {
    fn conv(sa: &SubsetAps, n: &RunNode) -> Result<Node, SolveError> {
        let states = sa
            .subsets
            .get(n.state.index())
            .ok_or_else(|| SolveError::NotAnApsRun("state outside A_P".into()))?
            .clone();
        let label = PseudoConfig {
            states,
            stack: n.stack.clone(),
        };
        let Some(ri) = n.rule else {
            if !n.children.is_empty() {
                return Err(SolveError::NotAnApsRun("children without a rule".into()));
            }
            return Ok(Node::leaf(label));
        };
        let a = *sa
            .rule_letters
            .get(ri)
            .ok_or_else(|| SolveError::NotAnApsRun(format!("rule {ri} is not an A_P rule")))?;
        let succ = sa.pda.succ(&label, a);
        if succ.len() != n.children.len() {
            return Err(SolveError::NotAnApsRun(format!("rule {ri}: child count differs from Succ")));
        }
        let mut children = Vec::with_capacity(succ.len());
        for (expect, c) in succ.iter().zip(&n.children) {
            let child = conv(sa, c)?;
            if &child.label != expect {
                return Err(SolveError::NotAnApsRun(format!("rule {ri}: child label differs from Succ")));
            }
            children.push(child);
        }
        Ok(Node {
            label,
            letter: Some(a),
            children,
        })
    }
    Ok(StrategyTree::new(conv(sa, &run.root)?))
}

/// Keeps the single-branch rules; each NPS rule remembers its APS rule.
pub fn derive_nps(aps: &Aps) -> Nps {
    let rules = aps
        .rules()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.branches.len() == 1)
        .map(|(i, r)| NpsRule {
            src: r.src,
            pop: r.pop,
            dst: r.branches[0].0,
            push: r.branches[0].1.clone(),
            origin: i,
        })
        .collect();
    Nps {
        num_states: aps.num_states(),
        num_syms: aps.num_syms(),
        bottom: aps.bottom(),
        rules,
    }
}

// ---------------------------------------------------------------------------
// Alternating saturation

/// How the alternating automaton read a word from one state: either it
/// stopped at `End(state)`, or it took transition `trans` and continued from
/// every target (in target order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReadTree {
    End(u32),
    Step { trans: usize, kids: Vec<ReadTree> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AmaOrigin {
    /// The initial transition `fin --bot--> {f}`.
    Base,
    /// Added for APS rule `rule`; `reads[i]` reads branch `i`'s push word
    /// from its target state.
    Rule { rule: usize, reads: Vec<ReadTree> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmaTransition {
    pub src: u32,
    pub sym: Sym,
    /// Sorted, duplicate-free.
    pub targets: Vec<u32>,
    pub round: usize,
    pub origin: AmaOrigin,
}

/// Result of saturation: the alternating multi-automaton for
/// `pre*({(fin, bot)})` over APS states plus the final state `f`.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub transitions: Vec<AmaTransition>,
    pub final_state: u32,
    pub rounds: usize,
    pub accepted: bool,
    by_head: HashMap<(u32, Sym), Vec<usize>>,
}

impl Saturation {
    fn add(&mut self, t: AmaTransition) {
        self.by_head.entry((t.src, t.sym)).or_default().push(self.transitions.len());
        self.transitions.push(t);
    }

    fn subsumed(&self, src: u32, sym: Sym, targets: &[u32]) -> bool {
        self.by_head
            .get(&(src, sym))
            .is_some_and(|ids| ids.iter().any(|&i| is_subset(&self.transitions[i].targets, targets)))
    }

    /// ⊆-minimal target sets reachable by reading `word` from `state` using
    /// transitions with id below `limit`, each with the read that achieves it.
    pub fn read_from(&self, state: u32, word: &[Sym], limit: usize) -> Vec<(Vec<u32>, ReadTree)> {
        let mut memo = HashMap::new();
        self.read_rec(state, word, 0, limit, &mut memo)
    }

    fn read_rec(
        &self,
        state: u32,
        word: &[Sym],
        pos: usize,
        limit: usize,
        memo: &mut HashMap<(u32, usize), Vec<(Vec<u32>, ReadTree)>>,
    ) -> Vec<(Vec<u32>, ReadTree)> {
        if pos == word.len() {
            return vec![(vec![state], ReadTree::End(state))];
        }
        if let Some(r) = memo.get(&(state, pos)) {
            return r.clone();
        }
        let mut out: Vec<(Vec<u32>, ReadTree)> = Vec::new();
        let ids = self.by_head.get(&(state, word[pos])).cloned().unwrap_or_default();
        for t in ids.into_iter().filter(|&t| t < limit) {
            let targets = self.transitions[t].targets.clone();
            let mut partial: Vec<(Vec<u32>, Vec<ReadTree>)> = vec![(Vec::new(), Vec::new())];
            for &s in &targets {
                let opts = self.read_rec(s, word, pos + 1, limit, memo);
                if opts.is_empty() {
                    partial.clear();
                    break;
                }
                let mut next = Vec::with_capacity(partial.len() * opts.len());
                for (set, kids) in &partial {
                    for (oset, otree) in &opts {
                        let mut k = kids.clone();
                        k.push(otree.clone());
                        next.push((union(set, oset), k));
                    }
                }
                partial = minimise(next);
            }
            for (set, kids) in partial {
                out.push((set, ReadTree::Step { trans: t, kids }));
            }
        }
        let out = minimise(out);
        memo.insert((state, pos), out.clone());
        out
    }
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let s: BTreeSet<u32> = a.iter().chain(b).copied().collect();
    s.into_iter().collect()
}

/// Drops every entry whose set strictly contains, or duplicates, an earlier one.
fn minimise<T>(mut v: Vec<(Vec<u32>, T)>) -> Vec<(Vec<u32>, T)> {
    v.sort_by_key(|a| a.0.len());
    let mut out: Vec<(Vec<u32>, T)> = Vec::new();
    for (s, t) in v {
        if !out.iter().any(|(o, _)| is_subset(o, &s)) {
            out.push((s, t));
        }
    }
    out
}

/// Decides whether `aps` has an accepting run from `(init, bot)` by
/// saturating an alternating multi-automaton. Rounds read from a snapshot of
/// the transitions present when the round began, so every transition is
/// justified by strictly older ones. Stops after the round in which the
/// initial configuration becomes accepted, or at the fixpoint.
pub fn aps_emptiness(aps: &Aps) -> Saturation {
    let f = aps.num_states() as u32;
    let mut sat = Saturation {
        transitions: Vec::new(),
        final_state: f,
        rounds: 0,
        accepted: false,
        by_head: HashMap::new(),
    };
    sat.add(AmaTransition {
        src: aps.fin().0,
        sym: aps.bottom(),
        targets: vec![f],
        round: 0,
        origin: AmaOrigin::Base,
    });
    let accepted = |sat: &Saturation| sat.subsumed(aps.init().0, aps.bottom(), &[f]);
    sat.accepted = accepted(&sat);
    let mut round = 0;
    while !sat.accepted {
        round += 1;
        let limit = sat.transitions.len();
        let mut added = false;
        for (ri, rule) in aps.rules().iter().enumerate() {
            let mut per_branch = Vec::with_capacity(rule.branches.len());
            for (q, w) in &rule.branches {
                let opts = sat.read_from(q.0, w, limit);
                if opts.is_empty() {
                    break;
                }
                per_branch.push(opts);
            }
            if per_branch.len() < rule.branches.len() {
                continue;
            }
            let mut combos: Vec<(Vec<u32>, Vec<ReadTree>)> = vec![(Vec::new(), Vec::new())];
            for opts in &per_branch {
                let mut next = Vec::new();
                for (set, reads) in &combos {
                    for (oset, otree) in opts {
                        let mut r = reads.clone();
                        r.push(otree.clone());
                        next.push((union(set, oset), r));
                    }
                }
                combos = minimise(next);
            }
            for (targets, reads) in combos {
                if sat.subsumed(rule.src.0, rule.pop, &targets) {
                    continue;
                }
                sat.add(AmaTransition {
                    src: rule.src.0,
                    sym: rule.pop,
                    targets,
                    round,
                    origin: AmaOrigin::Rule { rule: ri, reads },
                });
                added = true;
            }
        }
        sat.accepted = accepted(&sat);
        if !added {
            break;
        }
    }
    sat.rounds = round;
    sat
}

/// Rebuilds an accepting run from saturation provenance. Each step replaces
/// the transition at the head of an acceptance tree by strictly older ones,
/// so the recursion terminates.
pub fn extract_run(aps: &Aps, sat: &Saturation) -> Option<ApsRun> {
    let f = sat.final_state;
    let t0 = sat
        .by_head
        .get(&(aps.init().0, aps.bottom()))?
        .iter()
        .copied()
        .find(|&i| sat.transitions[i].targets == [f])?;
    let acc = ReadTree::Step {
        trans: t0,
        kids: vec![ReadTree::End(f)],
    };
    Some(ApsRun {
        root: build_node(aps, sat, aps.init(), vec![aps.bottom()], &acc),
    })
}

fn build_node(aps: &Aps, sat: &Saturation, state: StateId, stack: Word, acc: &ReadTree) -> RunNode {
    let ReadTree::Step { trans, kids } = acc else {
        unreachable!("acceptance trees of nonempty words start with a step");
    };
    let t = &sat.transitions[*trans];
    match &t.origin {
        AmaOrigin::Base => RunNode::leaf(state, stack),
        AmaOrigin::Rule { rule, reads } => {
            let r = &aps.rules()[*rule];
            let below: HashMap<u32, &ReadTree> = t.targets.iter().copied().zip(kids.iter()).collect();
            let rest = &stack[1..];
            let children = r
                .branches
                .iter()
                .zip(reads)
                .map(|((q, w), read)| {
                    let mut child_stack = w.clone();
                    child_stack.extend_from_slice(rest);
                    build_node(aps, sat, *q, child_stack, &graft(read, &below))
                })
                .collect();
            RunNode {
                state,
                stack,
                rule: Some(*rule),
                children,
            }
        }
    }
}

fn graft(read: &ReadTree, below: &HashMap<u32, &ReadTree>) -> ReadTree {
    match read {
        ReadTree::End(s) => below[s].clone(),
        ReadTree::Step { trans, kids } => ReadTree::Step {
            trans: *trans,
            kids: kids.iter().map(|k| graft(k, below)).collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::run4;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn a_p_of_run4_has_the_root_rule() {
        let p = run4().complete();
        let s4 = p.state_id("4").unwrap();
        let sa = build_aps(&p, &p.all_states(), s4, None, None).unwrap();
        let root = sa.aps.init();
        let bot = p.bottom();
        let blue = p.sym_id("blue").unwrap();
        let red = p.sym_id("red").unwrap();
        let want = ApsRule {
            src: root,
            pop: bot,
            branches: vec![
                (sa.state_of(&[2, 3].into_iter().map(StateId).collect()).unwrap(), vec![blue, bot]),
                (sa.state_of(&[0, 1].into_iter().map(StateId).collect()).unwrap(), vec![red, bot]),
            ],
        };
        assert!(sa.aps.rules().contains(&want));
        assert!(sa.subsets.iter().all(|s| s.len() <= 4));
        assert_eq!(sa.rule_letters.len(), sa.aps.rules().len());
    }

    #[test]
    fn singleton_init_gives_singleton_subsets() {
        let p = run4().complete();
        let sa = build_aps(&p, &StateSet::singleton(StateId(0)), StateId(3), None, None).unwrap();
        assert!(sa.subsets.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn budget_is_enforced() {
        let p = run4().complete();
        let e = build_aps(&p, &p.all_states(), StateId(3), None, Some(2)).unwrap_err();
        assert!(matches!(e, SolveError::CapExceeded { limit: 2, .. }));
    }

    #[test]
    fn run4_emptiness_and_extraction() {
        let p = run4().complete();
        let s4 = p.state_id("4").unwrap();
        let sa = build_aps(&p, &p.all_states(), s4, Some(4), None).unwrap();
        let sat = aps_emptiness(&sa.aps);
        assert!(sat.accepted);
        let run = extract_run(&sa.aps, &sat).unwrap();
        run.validate(&sa.aps, sa.aps.init(), &[p.bottom()]).unwrap();
        assert!(run.leaf_count() <= 4);
        let tree = run_to_supersync(&sa, &run).unwrap();
        let root = PseudoConfig::new(&p, p.all_states(), vec![p.bottom()]).unwrap();
        crate::witness::check_witness(&p, &root, crate::witness::WitnessKind::SuperSynchroniser(s4), &tree).unwrap();
    }

    #[test]
    fn trivial_systems() {
        let aps = Aps::new(names(&["q"]), names(&["bot"]), Sym(0), vec![], StateId(0), StateId(0)).unwrap();
        let sat = aps_emptiness(&aps);
        assert!(sat.accepted);
        let run = extract_run(&aps, &sat).unwrap();
        assert_eq!(run.node_count(), 1);

        let aps = Aps::new(names(&["i", "f"]), names(&["bot"]), Sym(0), vec![], StateId(0), StateId(1)).unwrap();
        let sat = aps_emptiness(&aps);
        assert!(!sat.accepted);
        assert!(extract_run(&aps, &sat).is_none());
    }

    #[test]
    fn alternation_needs_both_branches() {
        // i --A--> {(f, eps), (g, eps)} where g can pop A only on a second rule.
        let st = names(&["i", "f", "g"]);
        let sy = names(&["A", "bot"]);
        let (i, f, g) = (StateId(0), StateId(1), StateId(2));
        let (a, bot) = (Sym(0), Sym(1));
        let push = ApsRule {
            src: i,
            pop: bot,
            branches: vec![(i, vec![a, bot])],
        };
        let fork = ApsRule {
            src: i,
            pop: a,
            branches: vec![(f, vec![]), (g, vec![])],
        };
        let aps = Aps::new(st.clone(), sy.clone(), bot, vec![push.clone(), fork.clone()], i, f).unwrap();
        assert!(!aps_emptiness(&aps).accepted);

        let fix = ApsRule {
            src: g,
            pop: bot,
            branches: vec![(f, vec![bot])],
        };
        let aps = Aps::new(st, sy, bot, vec![push, fork, fix], i, f).unwrap();
        let sat = aps_emptiness(&aps);
        assert!(sat.accepted);
        let run = extract_run(&aps, &sat).unwrap();
        run.validate(&aps, i, &[bot]).unwrap();
        assert_eq!(run.leaf_count(), 2);
    }

    #[test]
    fn derive_nps_keeps_single_branches() {
        let st = names(&["i", "f"]);
        let sy = names(&["bot"]);
        let one = |d| ApsRule {
            src: StateId(0),
            pop: Sym(0),
            branches: vec![(StateId(d), vec![Sym(0)])],
        };
        let two = ApsRule {
            src: StateId(0),
            pop: Sym(0),
            branches: vec![(StateId(0), vec![Sym(0)]), (StateId(1), vec![Sym(0)])],
        };
        let only_alt = Aps::new(st.clone(), sy.clone(), Sym(0), vec![two.clone()], StateId(0), StateId(1)).unwrap();
        assert!(derive_nps(&only_alt).rules.is_empty());
        let mixed = Aps::new(st, sy, Sym(0), vec![one(0), two, one(1)], StateId(0), StateId(1)).unwrap();
        let n = derive_nps(&mixed);
        assert_eq!(n.rules.len(), 2);
        assert_eq!(n.rules.iter().map(|r| r.origin).collect::<Vec<_>>(), vec![0, 2]);
    }
}
