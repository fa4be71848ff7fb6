//! Finite automata over the stack alphabet that store sets of pushdown
//! configurations: `(q, w)` is stored iff `w` is accepted from `q`'s entry
//! state.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::aps::Aps;
use crate::error::SolveError;
use crate::pda::{StateId, Sym};
use crate::sparse::nps::Nps;
use crate::sparse::structured::for_each_product;

/// Why a transition exists; used to rebuild runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransOrigin {
    Base,
    /// Added by pre* for NPS rule `rule`; `path` reads the rule's push word
    /// from the target's entry state and ends at this transition's target.
    Prestar {
        rule: usize,
        path: Vec<u32>,
    },
    /// Entry transition of a complex vertex for APS rule `rule`; `paths[i]`
    /// reads branch `i`'s push word in child automaton `i`.
    Entry {
        rule: usize,
        paths: Vec<Vec<u32>>,
    },
    Product,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NTrans {
    pub from: u32,
    pub sym: Sym,
    pub to: u32,
    pub origin: TransOrigin,
}

#[derive(Clone, Debug)]
pub struct NAutomaton {
    entries: Vec<u32>,
    accepting: Vec<bool>,
    trans: Vec<NTrans>,
    out: Vec<Vec<usize>>,
    index: HashMap<(u32, Sym, u32), usize>,
    /// Component states for product states of a complex vertex.
    tuples: Vec<Option<Box<[u32]>>>,
}

impl NAutomaton {
    /// An automaton with `num_states` states, no transitions, and
    /// `entries[q]` as the entry state for system state `q`.
    pub fn new(num_states: usize, entries: Vec<u32>, accepting: Vec<bool>) -> Self {
        assert_eq!(accepting.len(), num_states);
        assert!(entries.iter().all(|&e| (e as usize) < num_states));
        NAutomaton {
            entries,
            accepting,
            trans: Vec::new(),
            out: vec![Vec::new(); num_states],
            index: HashMap::new(),
            tuples: vec![None; num_states],
        }
    }

    /// Stores exactly `{(fin, bot)}` over `num_sys` system states.
    pub fn leaf(num_sys: usize, fin: StateId, bottom: Sym) -> Self {
        let mut acc = vec![false; num_sys + 1];
        acc[num_sys] = true;
        let mut m = NAutomaton::new(num_sys + 1, (0..num_sys as u32).collect(), acc);
        m.add(fin.0, bottom, num_sys as u32, TransOrigin::Base);
        m
    }

    /// Stores exactly the given configurations (a trie below fresh entries).
    pub fn from_configs(num_sys: usize, configs: &[(StateId, Vec<Sym>)]) -> Self {
        let mut m = NAutomaton::new(num_sys, (0..num_sys as u32).collect(), vec![false; num_sys]);
        for (q, w) in configs {
            let mut cur = m.entries[q.index()];
            for &s in w {
                let nxt = m.out[cur as usize].iter().map(|&t| &m.trans[t]).find(|t| t.sym == s).map(|t| t.to);
                cur = match nxt {
                    Some(n) => n,
                    None => {
                        let n = m.add_state(false);
                        m.add(cur, s, n, TransOrigin::Base);
                        n
                    }
                };
            }
            m.accepting[cur as usize] = true;
        }
        m
    }

    pub fn add_state(&mut self, accepting: bool) -> u32 {
        self.accepting.push(accepting);
        self.out.push(Vec::new());
        self.tuples.push(None);
        (self.accepting.len() - 1) as u32
    }

    pub(crate) fn add_tuple_state(&mut self, tuple: Box<[u32]>, accepting: bool) -> u32 {
        let id = self.add_state(accepting);
        self.tuples[id as usize] = Some(tuple);
        id
    }

    /// Adds a transition unless it is already present; returns whether it was new.
    pub fn add(&mut self, from: u32, sym: Sym, to: u32, origin: TransOrigin) -> bool {
        if self.index.contains_key(&(from, sym, to)) {
            return false;
        }
        let id = self.trans.len();
        self.index.insert((from, sym, to), id);
        self.out[from as usize].push(id);
        self.trans.push(NTrans { from, sym, to, origin });
        true
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.len()
    }

    pub fn entry(&self, q: StateId) -> u32 {
        self.entries[q.index()]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_accepting(&self, s: u32) -> bool {
        self.accepting[s as usize]
    }

    pub fn transitions(&self) -> &[NTrans] {
        &self.trans
    }

    pub fn transition(&self, from: u32, sym: Sym, to: u32) -> Option<&NTrans> {
        self.index.get(&(from, sym, to)).map(|&i| &self.trans[i])
    }

    pub fn tuple(&self, s: u32) -> Option<&[u32]> {
        self.tuples[s as usize].as_deref()
    }

    pub fn step(&self, s: u32, sym: Sym) -> impl Iterator<Item = u32> + '_ {
        self.out[s as usize].iter().map(|&t| &self.trans[t]).filter(move |t| t.sym == sym).map(|t| t.to)
    }

    /// Every state reachable by reading `word` from `from`, each with one
    /// path (states visited, `word.len() + 1` long). Sorted by end state.
    pub fn read_paths(&self, from: u32, word: &[Sym]) -> Vec<(u32, Vec<u32>)> {
        // layer[i]: state -> predecessor at layer i-1
        let mut layers: Vec<HashMap<u32, u32>> = vec![HashMap::from([(from, u32::MAX)])];
        for &sym in word {
            let mut next = HashMap::new();
            let mut cur: Vec<u32> = layers.last().unwrap().keys().copied().collect();
            cur.sort_unstable();
            for s in cur {
                for t in self.step(s, sym) {
                    next.entry(t).or_insert(s);
                }
            }
            if next.is_empty() {
                return Vec::new();
            }
            layers.push(next);
        }
        let mut ends: Vec<u32> = layers.last().unwrap().keys().copied().collect();
        ends.sort_unstable();
        ends.into_iter()
            .map(|end| {
                let mut path = vec![end];
                let mut cur = end;
                for layer in layers.iter().skip(1).rev() {
                    cur = layer[&cur];
                    path.push(cur);
                }
                path.reverse();
                (end, path)
            })
            .collect()
    }

    pub fn read(&self, from: u32, word: &[Sym]) -> Vec<u32> {
        let mut cur = vec![from];
        for &sym in word {
            let mut next: Vec<u32> = cur.iter().flat_map(|&s| self.step(s, sym)).collect();
            next.sort_unstable();
            next.dedup();
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        cur
    }

    pub fn accepting_path(&self, q: StateId, word: &[Sym]) -> Option<Vec<u32>> {
        self.read_paths(self.entry(q), word)
            .into_iter()
            .find(|(end, _)| self.is_accepting(*end))
            .map(|(_, p)| p)
    }

    pub fn stores(&self, q: StateId, word: &[Sym]) -> bool {
        self.read(self.entry(q), word).into_iter().any(|s| self.is_accepting(s))
    }

    /// True iff no configuration at all is stored.
    pub fn is_empty(&self) -> bool {
        let mut seen = vec![false; self.num_states()];
        let mut queue: VecDeque<u32> = self.entries.iter().copied().collect();
        for &e in &self.entries {
            seen[e as usize] = true;
        }
        while let Some(s) = queue.pop_front() {
            if self.accepting[s as usize] {
                return false;
            }
            for &t in &self.out[s as usize] {
                let to = self.trans[t].to;
                if !seen[to as usize] {
                    seen[to as usize] = true;
                    queue.push_back(to);
                }
            }
        }
        true
    }

    /// Drops states that are neither entries nor able to reach an accepting
    /// state, renumbering the rest. Only safe before any transition origin
    /// refers to this automaton's own state ids.
    pub(crate) fn trim(self) -> NAutomaton {
        let n = self.num_states();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for t in &self.trans {
            rev[t.to as usize].push(t.from);
        }
        let mut live = self.accepting.clone();
        let mut queue: VecDeque<u32> = (0..n as u32).filter(|&s| live[s as usize]).collect();
        while let Some(s) = queue.pop_front() {
            for &p in &rev[s as usize] {
                if !live[p as usize] {
                    live[p as usize] = true;
                    queue.push_back(p);
                }
            }
        }
        for &e in &self.entries {
            live[e as usize] = true;
        }
        let mut map = vec![u32::MAX; n];
        let mut next = 0u32;
        for s in 0..n {
            if live[s] {
                map[s] = next;
                next += 1;
            }
        }
        let entries = self.entries.iter().map(|&e| map[e as usize]).collect();
        let accepting = (0..n).filter(|&s| live[s]).map(|s| self.accepting[s]).collect();
        let mut m = NAutomaton::new(next as usize, entries, accepting);
        for (s, t) in self.tuples.into_iter().enumerate() {
            if live[s] {
                m.tuples[map[s] as usize] = t;
            }
        }
        for t in self.trans {
            let (f, to) = (map[t.from as usize], map[t.to as usize]);
            if f != u32::MAX && to != u32::MAX {
                m.add(f, t.sym, to, t.origin);
            }
        }
        m
    }
}

/// pre* by saturation: same states as `m`, plus transitions
/// `entry(p) --A--> s` whenever `(p, A) -> (q, w)` is a rule and `s` is
/// reachable from `entry(q)` by reading `w`. Requires that `m` has no
/// transitions into entry states.
pub fn prestar(nps: &Nps, m: &NAutomaton) -> NAutomaton {
    let mut out = m.clone();
    loop {
        let mut changed = false;
        for (ri, r) in nps.rules.iter().enumerate() {
            let from = out.entry(r.src);
            for (s, path) in out.read_paths(out.entry(r.dst), &r.push) {
                changed |= out.add(from, r.pop, s, TransOrigin::Prestar { rule: ri, path });
            }
        }
        if !changed {
            return out;
        }
    }
}

/// The automaton of a complex vertex whose children carry `children`.
///
/// States: fresh entries, then product tuples of child states. For every
/// APS rule with exactly `children.len()` branches, `entry(p) --A-->` every
/// tuple of states the children reach by reading the branch push words from
/// the branch targets' entries. Product states move in lock-step and accept
/// when every component does. States that cannot reach acceptance are
/// trimmed.
pub fn complex(aps: &Aps, children: &[&NAutomaton], state_budget: Option<usize>) -> Result<NAutomaton, SolveError> {
    let n = aps.num_states();
    let l = children.len();
    let mut m = NAutomaton::new(n, (0..n as u32).collect(), vec![false; n]);
    let mut interned: HashMap<Box<[u32]>, u32> = HashMap::new();
    let mut queue: VecDeque<u32> = VecDeque::new();
    let mut intern = |m: &mut NAutomaton, queue: &mut VecDeque<u32>, tuple: Box<[u32]>| -> Result<u32, SolveError> {
        if let Some(&s) = interned.get(&tuple) {
            return Ok(s);
        }
        if let Some(b) = state_budget {
            if m.num_states() >= b {
                return Err(SolveError::CapExceeded {
                    limit: b,
                    what: "product states of an N-automaton",
                });
            }
        }
        let acc = tuple.iter().zip(children).all(|(&s, c)| c.is_accepting(s));
        let s = m.add_tuple_state(tuple.clone(), acc);
        interned.insert(tuple, s);
        queue.push_back(s);
        Ok(s)
    };

    for (ri, r) in aps.rules().iter().enumerate() {
        if r.branches.len() != l {
            continue;
        }
        let reads: Vec<Vec<(u32, Vec<u32>)>> = r.branches.iter().zip(children).map(|((q, w), c)| c.read_paths(c.entry(*q), w)).collect();
        let lens: Vec<usize> = reads.iter().map(|r| r.len()).collect();
        let mut err = None;
        for_each_product(&lens, |idx| {
            let tuple: Box<[u32]> = idx.iter().zip(&reads).map(|(&i, r)| r[i].0).collect();
            match intern(&mut m, &mut queue, tuple) {
                Ok(t) => {
                    let paths = idx.iter().zip(&reads).map(|(&i, r)| r[i].1.clone()).collect();
                    m.add(r.src.0, r.pop, t, TransOrigin::Entry { rule: ri, paths });
                    true
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }

    let num_syms = aps.num_syms();
    while let Some(s) = queue.pop_front() {
        let tuple: Box<[u32]> = m.tuple(s).expect("product state").into();
        for sym in (0..num_syms).map(Sym::from_index) {
            let succs: Vec<Vec<u32>> = tuple.iter().zip(children).map(|(&x, c)| c.step(x, sym).collect()).collect();
            let lens: Vec<usize> = succs.iter().map(|v| v.len()).collect();
            let mut err = None;
            for_each_product(&lens, |idx| {
                let t: Box<[u32]> = idx.iter().zip(&succs).map(|(&i, v)| v[i]).collect();
                match intern(&mut m, &mut queue, t) {
                    Ok(t) => {
                        m.add(s, sym, t, TransOrigin::Product);
                        true
                    }
                    Err(e) => {
                        err = Some(e);
                        false
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(m.trim())
}

/// Whether `m` has a transition into one of its entry states.
pub fn has_entry_targets(m: &NAutomaton) -> bool {
    let entries: HashSet<u32> = m.entries().iter().copied().collect();
    m.transitions().iter().any(|t| entries.contains(&t.to))
}
