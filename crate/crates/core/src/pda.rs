//! Pushdown automata with an observable stack and the observer-knowledge
//! successor semantics.
//!
//! Stack words are stored top-first: `[A, B, bot]` is the stack with `A` on
//! top. Every well-formed stack ends with the bottom symbol, which occurs
//! nowhere else.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::ValidationError;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }

            pub fn from_index(i: usize) -> Self {
                $name(i as u32)
            }
        }
    };
}

id_type!(
    /// Control state of a [`Pda`].
    StateId
);
id_type!(
    /// Input letter.
    Letter
);
id_type!(
    /// Stack symbol.
    Sym
);

/// A stack word, top first.
pub type Word = Vec<Sym>;

/// A sorted, duplicate-free set of states.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(Vec<StateId>);

impl StateSet {
    pub fn new() -> Self {
        StateSet(Vec::new())
    }

    pub fn singleton(q: StateId) -> Self {
        StateSet(vec![q])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    pub fn insert(&mut self, q: StateId) {
        if let Err(pos) = self.0.binary_search(&q) {
            self.0.insert(pos, q);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.0
    }

    pub fn first(&self) -> Option<StateId> {
        self.0.first().copied()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.iter().all(|q| other.contains(q))
    }

    pub fn single(&self) -> Option<StateId> {
        match self.0.as_slice() {
            [q] => Some(*q),
            _ => None,
        }
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let mut v: Vec<StateId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }
}

/// One transition `(src, pop) --letter--> (dst, push)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub src: StateId,
    pub letter: Letter,
    pub pop: Sym,
    pub dst: StateId,
    pub push: Word,
}

/// A concrete configuration `(q, γ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub state: StateId,
    pub stack: Word,
}

/// The observer's knowledge: a nonempty set of possible states together with
/// the (fully visible) stack.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PseudoConfig {
    pub states: StateSet,
    pub stack: Word,
}

impl PseudoConfig {
    /// Builds a pseudo-configuration, rejecting empty state sets and stacks
    /// that break the bottom discipline.
    pub fn new(pda: &Pda, states: StateSet, stack: Word) -> Result<Self, ValidationError> {
        if states.is_empty() {
            return Err(ValidationError::EmptyStateSet);
        }
        if let Some(q) = states.iter().find(|q| q.index() >= pda.num_states()) {
            return Err(ValidationError::UnknownId(format!("state #{}", q.0)));
        }
        pda.check_stack(&stack)?;
        Ok(PseudoConfig { states, stack })
    }

    pub fn top(&self) -> Sym {
        self.stack[0]
    }
}

/// Transitions of `T^a_{S,A}` that push the same word, i.e. that the observer
/// cannot tell apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObsClass {
    pub push: Word,
    pub targets: StateSet,
    /// Indices into [`Pda::rules`].
    pub members: Vec<usize>,
}

/// A pushdown automaton `(Q, Σ, Γ, δ)` with a distinguished bottom symbol.
#[derive(Clone, Debug)]
pub struct Pda {
    states: Vec<String>,
    inputs: Vec<String>,
    stack: Vec<String>,
    bottom: Sym,
    rules: Vec<Rule>,
    by_triple: HashMap<(StateId, Letter, Sym), Vec<usize>>,
    state_names: HashMap<String, StateId>,
    input_names: HashMap<String, Letter>,
    stack_names: HashMap<String, Sym>,
}

impl PartialEq for Pda {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states && self.inputs == other.inputs && self.stack == other.stack && self.bottom == other.bottom && self.rules == other.rules
    }
}

impl Eq for Pda {}

fn name_index<T: Copy>(names: &[String], what: &str, mk: impl Fn(usize) -> T) -> Result<HashMap<String, T>, ValidationError> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), mk(i)).is_some() {
            return Err(ValidationError::DuplicateName(format!("{what} `{n}`")));
        }
    }
    Ok(map)
}

impl Pda {
    /// Validates and builds a PDA. Duplicate rules are merged (the transition
    /// relation is a set); the first occurrence fixes the order.
    pub fn new(states: Vec<String>, inputs: Vec<String>, stack: Vec<String>, bottom: Sym, rules: Vec<Rule>) -> Result<Self, ValidationError> {
        if states.is_empty() {
            return Err(ValidationError::Empty("state set"));
        }
        if inputs.is_empty() {
            return Err(ValidationError::Empty("input alphabet"));
        }
        if bottom.index() >= stack.len() {
            return Err(ValidationError::UnknownId("bottom symbol".into()));
        }
        let state_names = name_index(&states, "state", StateId::from_index)?;
        let input_names = name_index(&inputs, "input", Letter::from_index)?;
        let stack_names = name_index(&stack, "stack symbol", Sym::from_index)?;

        let mut pda = Pda {
            states,
            inputs,
            stack,
            bottom,
            rules: Vec::with_capacity(rules.len()),
            by_triple: HashMap::new(),
            state_names,
            input_names,
            stack_names,
        };
        let mut seen = std::collections::HashSet::new();
        for r in rules {
            pda.check_rule(&r)?;
            if seen.insert(r.clone()) {
                let i = pda.rules.len();
                pda.by_triple.entry((r.src, r.letter, r.pop)).or_default().push(i);
                pda.rules.push(r);
            }
        }
        Ok(pda)
    }

    fn check_rule(&self, r: &Rule) -> Result<(), ValidationError> {
        let bad = |what: &str| ValidationError::UnknownId(format!("{what} in rule {}", self.show_rule(r)));
        if r.src.index() >= self.num_states() || r.dst.index() >= self.num_states() {
            return Err(bad("state"));
        }
        if r.letter.index() >= self.num_inputs() {
            return Err(bad("input letter"));
        }
        if r.pop.index() >= self.num_syms() || r.push.iter().any(|s| s.index() >= self.num_syms()) {
            return Err(bad("stack symbol"));
        }
        check_push_discipline(self.bottom, r.pop, &r.push).map_err(|reason| ValidationError::BottomDiscipline {
            rule: self.show_rule(r),
            reason,
        })
    }

    pub fn check_stack(&self, stack: &[Sym]) -> Result<(), ValidationError> {
        if stack.iter().any(|s| s.index() >= self.num_syms()) {
            return Err(ValidationError::UnknownId("stack symbol".into()));
        }
        check_stack_discipline(self.bottom, stack)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_syms(&self) -> usize {
        self.stack.len()
    }

    pub fn bottom(&self) -> Sym {
        self.bottom
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states()).map(StateId::from_index)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.num_inputs()).map(Letter::from_index)
    }

    pub fn syms(&self) -> impl Iterator<Item = Sym> {
        (0..self.num_syms()).map(Sym::from_index)
    }

    pub fn all_states(&self) -> StateSet {
        self.states().collect()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn input_name(&self, a: Letter) -> &str {
        &self.inputs[a.index()]
    }

    pub fn sym_name(&self, s: Sym) -> &str {
        &self.stack[s.index()]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn input_names(&self) -> &[String] {
        &self.inputs
    }

    pub fn sym_names(&self) -> &[String] {
        &self.stack
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_names.get(name).copied()
    }

    pub fn letter_id(&self, name: &str) -> Option<Letter> {
        self.input_names.get(name).copied()
    }

    pub fn sym_id(&self, name: &str) -> Option<Sym> {
        self.stack_names.get(name).copied()
    }

    pub fn show_word(&self, w: &[Sym]) -> String {
        if w.is_empty() {
            return "eps".into();
        }
        w.iter().map(|s| self.sym_name(*s)).collect::<Vec<_>>().join(" ")
    }

    pub fn show_set(&self, s: &StateSet) -> String {
        let names: Vec<&str> = s.iter().map(|q| self.state_name(q)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn show_rule(&self, r: &Rule) -> String {
        let name = |v: &[String], i: usize| v.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
        let push = if r.push.is_empty() {
            "eps".to_string()
        } else {
            r.push.iter().map(|s| name(&self.stack, s.index())).collect::<Vec<_>>().join(" ")
        };
        format!(
            "{} {} {} -> {} {}",
            name(&self.states, r.src.index()),
            name(&self.inputs, r.letter.index()),
            name(&self.stack, r.pop.index()),
            name(&self.states, r.dst.index()),
            push
        )
    }

    pub fn show_pseudo(&self, pc: &PseudoConfig) -> String {
        format!("({}, {})", self.show_set(&pc.states), self.show_word(&pc.stack))
    }

    /// Fills every `(q, a, A)` without a rule with the self-loop
    /// `(q, A) --a--> (q, A)`. Idempotent.
    pub fn complete(&self) -> Pda {
        let mut extra = Vec::new();
        for q in self.states() {
            for a in self.letters() {
                for s in self.syms() {
                    if !self.by_triple.contains_key(&(q, a, s)) {
                        extra.push(Rule {
                            src: q,
                            letter: a,
                            pop: s,
                            dst: q,
                            push: vec![s],
                        });
                    }
                }
            }
        }
        if extra.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        for r in extra {
            let i = out.rules.len();
            out.by_triple.entry((r.src, r.letter, r.pop)).or_default().push(i);
            out.rules.push(r);
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.states()
            .all(|q| self.letters().all(|a| self.syms().all(|s| self.by_triple.contains_key(&(q, a, s)))))
    }

    /// True iff every `(q, a, A)` has exactly one rule.
    pub fn is_deterministic(&self) -> bool {
        self.states().all(|q| {
            self.letters()
                .all(|a| self.syms().all(|s| self.by_triple.get(&(q, a, s)).map_or(0, Vec::len) == 1))
        })
    }

    /// Rule indices for one `(q, a, A)` triple.
    pub fn rules_at(&self, q: StateId, a: Letter, pop: Sym) -> &[usize] {
        self.by_triple.get(&(q, a, pop)).map_or(&[], Vec::as_slice)
    }

    /// `T^a_{S,A}`: every rule leaving a state of `states` on `a` with `pop` on top.
    pub fn transitions_from(&self, states: &StateSet, a: Letter, pop: Sym) -> Vec<&Rule> {
        let mut idx: Vec<usize> = states.iter().flat_map(|q| self.rules_at(q, a, pop).iter().copied()).collect();
        idx.sort_unstable();
        idx.into_iter().map(|i| &self.rules[i]).collect()
    }

    /// Partitions `T^a_{S,A}` by pushed word. Classes come back sorted by push
    /// word (symbols compared by declaration order).
    pub fn obs_classes(&self, states: &StateSet, a: Letter, pop: Sym) -> Vec<ObsClass> {
        let mut groups: BTreeMap<&[Sym], (StateSet, Vec<usize>)> = BTreeMap::new();
        for q in states.iter() {
            for &i in self.rules_at(q, a, pop) {
                let r = &self.rules[i];
                let e = groups.entry(r.push.as_slice()).or_default();
                e.0.insert(r.dst);
                e.1.push(i);
            }
        }
        groups
            .into_iter()
            .map(|(push, (targets, mut members))| {
                members.sort_unstable();
                ObsClass {
                    push: push.to_vec(),
                    targets,
                    members,
                }
            })
            .collect()
    }

    /// `Succ(S, Aγ, a)` in canonical class order.
    pub fn succ(&self, pc: &PseudoConfig, a: Letter) -> Vec<PseudoConfig> {
        let (top, rest) = pc.stack.split_first().expect("stack is never empty");
        self.obs_classes(&pc.states, a, *top)
            .into_iter()
            .map(|c| {
                let mut stack = c.push;
                stack.extend_from_slice(rest);
                PseudoConfig { states: c.targets, stack }
            })
            .collect()
    }
}

impl fmt::Display for Pda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::print_pda(self, None))
    }
}

/// Pushes must keep the bottom symbol at the very bottom: a rule popping the
/// bottom pushes a word ending in it, and no other position ever holds it.
pub(crate) fn check_push_discipline(bottom: Sym, pop: Sym, push: &[Sym]) -> Result<(), String> {
    if pop == bottom {
        match push.split_last() {
            Some((last, rest)) if *last == bottom => {
                if rest.contains(&bottom) {
                    return Err("bottom symbol pushed above the bottom".into());
                }
            }
            _ => return Err("rule popping the bottom must push it back last".into()),
        }
    } else if push.contains(&bottom) {
        return Err("bottom symbol pushed by a rule that did not pop it".into());
    }
    Ok(())
}

pub(crate) fn check_stack_discipline(bottom: Sym, stack: &[Sym]) -> Result<(), ValidationError> {
    match stack.split_last() {
        Some((last, rest)) if *last == bottom && !rest.contains(&bottom) => Ok(()),
        _ => Err(ValidationError::BadStack),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::run4;

    fn set(pda: &Pda, names: &[&str]) -> StateSet {
        names.iter().map(|n| pda.state_id(n).unwrap()).collect()
    }

    fn word(pda: &Pda, names: &[&str]) -> Word {
        names.iter().map(|n| pda.sym_id(n).unwrap()).collect()
    }

    #[test]
    fn completion_adds_diamond_bottom_loops() {
        let raw = run4();
        assert_eq!(raw.rules().len(), 20);
        let full = raw.complete();
        assert_eq!(full.rules().len(), 24);
        let dia = raw.letter_id("dia").unwrap();
        let bot = raw.bottom();
        for r in &full.rules()[20..] {
            assert_eq!((r.letter, r.pop, r.dst, r.push.clone()), (dia, bot, r.src, vec![bot]));
        }
        assert_eq!(full.complete(), full);
    }

    #[test]
    fn completion_of_empty_pda() {
        let p = Pda::new(vec!["q".into()], vec!["a".into()], vec!["bot".into()], Sym(0), vec![]).unwrap();
        let c = p.complete();
        assert_eq!(c.rules().len(), 1);
        assert!(c.is_deterministic());
    }

    #[test]
    fn determinism() {
        let full = run4().complete();
        assert!(full.is_deterministic());
        let mut rules = full.rules().to_vec();
        rules.push(Rule {
            src: full.state_id("1").unwrap(),
            letter: full.letter_id("box").unwrap(),
            pop: full.bottom(),
            dst: full.state_id("3").unwrap(),
            push: word(&full, &["blue", "bot"]),
        });
        let nd = Pda::new(
            full.state_names().to_vec(),
            full.input_names().to_vec(),
            full.sym_names().to_vec(),
            full.bottom(),
            rules,
        )
        .unwrap();
        assert!(!nd.is_deterministic());
    }

    #[test]
    fn transitions_from_run4() {
        let p = run4().complete();
        let s = set(&p, &["3", "4"]);
        let dia = p.letter_id("dia").unwrap();
        let blue = p.sym_id("blue").unwrap();
        let ts: Vec<String> = p.transitions_from(&s, dia, blue).iter().map(|r| p.show_rule(r)).collect();
        // rule order, as listed in the fixture
        assert_eq!(ts, vec!["4 dia blue -> 3 red blue", "3 dia blue -> 4 blue blue"]);
        assert!(p.transitions_from(&StateSet::new(), dia, blue).is_empty());
        assert_eq!(p.transitions_from(&p.all_states(), dia, blue).len(), 4);
    }

    #[test]
    fn obs_classes_follow_next_definition() {
        let p = run4().complete();
        let dia = p.letter_id("dia").unwrap();
        let blue = p.sym_id("blue").unwrap();
        let cls = p.obs_classes(&set(&p, &["3", "4"]), dia, blue);
        assert_eq!(cls.len(), 2);
        assert_eq!(cls[0].push, word(&p, &["blue", "blue"]));
        assert_eq!(cls[0].targets, set(&p, &["4"]));
        assert_eq!(cls[1].push, word(&p, &["red", "blue"]));
        assert_eq!(cls[1].targets, set(&p, &["3"]));

        let bx = p.letter_id("box").unwrap();
        let cls = p.obs_classes(&p.all_states(), bx, p.bottom());
        assert_eq!(cls.len(), 2);
        assert_eq!(cls[0].push, word(&p, &["blue", "bot"]));
        assert_eq!(cls[0].targets, set(&p, &["3", "4"]));
        assert_eq!(cls[1].push, word(&p, &["red", "bot"]));
        assert_eq!(cls[1].targets, set(&p, &["1", "2"]));

        let one = p.obs_classes(&set(&p, &["2"]), bx, blue);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].members.len(), 1);
    }

    #[test]
    fn succ_examples() {
        let p = run4().complete();
        let bx = p.letter_id("box").unwrap();
        let root = PseudoConfig::new(&p, p.all_states(), vec![p.bottom()]).unwrap();
        let out = p.succ(&root, bx);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], PseudoConfig::new(&p, set(&p, &["3", "4"]), word(&p, &["blue", "bot"])).unwrap());
        assert_eq!(out[1], PseudoConfig::new(&p, set(&p, &["1", "2"]), word(&p, &["red", "bot"])).unwrap());

        let out = p.succ(&out[0], bx);
        assert_eq!(out, vec![PseudoConfig::new(&p, set(&p, &["3", "4"]), vec![p.bottom()]).unwrap()]);
    }

    #[test]
    fn self_loop_succ() {
        let p = Pda::new(vec!["q".into()], vec!["a".into()], vec!["bot".into()], Sym(0), vec![])
            .unwrap()
            .complete();
        let pc = PseudoConfig::new(&p, StateSet::singleton(StateId(0)), vec![Sym(0)]).unwrap();
        assert_eq!(p.succ(&pc, Letter(0)), vec![pc.clone()]);
    }

    #[test]
    fn rejects_bad_discipline_and_empty_sets() {
        let mk = |push: Vec<Sym>, pop: Sym| {
            Pda::new(
                vec!["q".into()],
                vec!["a".into()],
                vec!["A".into(), "bot".into()],
                Sym(1),
                vec![Rule {
                    src: StateId(0),
                    letter: Letter(0),
                    pop,
                    dst: StateId(0),
                    push,
                }],
            )
        };
        assert!(matches!(mk(vec![Sym(0)], Sym(1)), Err(ValidationError::BottomDiscipline { .. })));
        assert!(matches!(mk(vec![], Sym(1)), Err(ValidationError::BottomDiscipline { .. })));
        assert!(matches!(mk(vec![Sym(1), Sym(1)], Sym(1)), Err(ValidationError::BottomDiscipline { .. })));
        assert!(matches!(mk(vec![Sym(0), Sym(1)], Sym(0)), Err(ValidationError::BottomDiscipline { .. })));
        assert!(mk(vec![Sym(0), Sym(1)], Sym(1)).is_ok());
        assert!(mk(vec![], Sym(0)).is_ok());

        let p = mk(vec![], Sym(0)).unwrap();
        assert!(matches!(
            PseudoConfig::new(&p, StateSet::new(), vec![Sym(1)]),
            Err(ValidationError::EmptyStateSet)
        ));
        assert!(PseudoConfig::new(&p, StateSet::singleton(StateId(0)), vec![Sym(0)]).is_err());
    }
}
