//! Problem variants and the gadget reductions between them.
//!
//! Every reduction completes its input, builds a new (complete) PDA around a
//! copy of it, and records what each new state, letter and stack symbol
//! stands for. [`pull_back`] uses those roles to turn a witness for the
//! reduced instance back into one for the source instance.
//!
//! Gadget names live in a `g:` namespace (`g:acc`, `g:decide:q`, ...);
//! a name that already exists gets primes appended until it is fresh.

use std::collections::HashSet;
use std::fmt;

use crate::error::{ReductionError, ValidationError};
use crate::pda::{Letter, Pda, PseudoConfig, Rule, StateId, StateSet, Sym, Word};
use crate::witness::{check_witness, Node, StrategyTree, WitnessKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Is there some `s` with a synchroniser from `(Q, γ)` to `s`?
    Ada,
    /// Is there some `s` with a synchroniser from `(I, γ)` to `s`?
    SubsetAda(StateSet),
    /// Synchroniser from `(I, γ)` to `s`.
    Given(StateSet, StateId),
    /// Super-synchroniser from `(I, γ)` to `s`.
    Super(StateSet, StateId),
    /// Super-synchroniser from `(I, bot)` to `s`.
    Special(StateSet, StateId),
    /// Homing word from `(Q, γ)`.
    Homing,
    /// Homing word from `(I, γ)`.
    SubsetHoming(StateSet),
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Ada => "ada",
            Variant::SubsetAda(_) => "subset-ada",
            Variant::Given(..) => "given",
            Variant::Super(..) => "super",
            Variant::Special(..) => "special",
            Variant::Homing => "homing",
            Variant::SubsetHoming(_) => "subset-homing",
        }
    }

    pub const NAMES: [&'static str; 7] = ["ada", "subset-ada", "given", "super", "special", "homing", "subset-homing"];

    /// Builds the variant called `name` from optional `I` and `s`; `I`
    /// defaults to every state of a PDA with `num_states` states.
    pub fn from_parts(name: &str, init: Option<StateSet>, target: Option<StateId>, num_states: usize) -> Result<Variant, ValidationError> {
        let all = || (0..num_states).map(StateId::from_index).collect::<StateSet>();
        let i = init.unwrap_or_else(all);
        let s = || target.ok_or_else(|| ValidationError::Other(format!("variant `{name}` needs a target state s")));
        Ok(match name {
            "ada" => Variant::Ada,
            "subset-ada" => Variant::SubsetAda(i),
            "given" => Variant::Given(i, s()?),
            "super" => Variant::Super(i, s()?),
            "special" => Variant::Special(i, s()?),
            "homing" => Variant::Homing,
            "subset-homing" => Variant::SubsetHoming(i),
            other => return Err(ValidationError::Other(format!("unknown variant `{other}`"))),
        })
    }

    pub fn init(&self) -> Option<&StateSet> {
        match self {
            Variant::SubsetAda(i) | Variant::Given(i, _) | Variant::Super(i, _) | Variant::Special(i, _) | Variant::SubsetHoming(i) => Some(i),
            Variant::Ada | Variant::Homing => None,
        }
    }

    pub fn target(&self) -> Option<StateId> {
        match self {
            Variant::Given(_, s) | Variant::Super(_, s) | Variant::Special(_, s) => Some(*s),
            _ => None,
        }
    }
}

/// A PDA, a problem variant, and the start stack `γ` (top first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    pub pda: Pda,
    pub variant: Variant,
    pub stack: Word,
}

impl ProblemInstance {
    pub fn new(pda: Pda, variant: Variant, stack: Word) -> Result<Self, ValidationError> {
        pda.check_stack(&stack)?;
        let n = pda.num_states();
        if let Some(i) = variant.init() {
            if i.is_empty() {
                return Err(ValidationError::EmptyStateSet);
            }
            if i.iter().any(|q| q.index() >= n) {
                return Err(ValidationError::UnknownId("state in I".into()));
            }
        }
        if variant.target().is_some_and(|s| s.index() >= n) {
            return Err(ValidationError::UnknownId("target state".into()));
        }
        if matches!(variant, Variant::Special(..)) && stack != [pda.bottom()] {
            return Err(ValidationError::Other("special instances start from the bottom symbol alone".into()));
        }
        Ok(ProblemInstance { pda, variant, stack })
    }

    /// The states the observer starts out unsure about.
    pub fn init_set(&self) -> StateSet {
        self.variant.init().cloned().unwrap_or_else(|| self.pda.all_states())
    }

    pub fn root(&self) -> PseudoConfig {
        PseudoConfig {
            states: self.init_set(),
            stack: self.stack.clone(),
        }
    }

    /// The witness kind this instance asks for. For the two `ada` variants
    /// the target is whatever state the witness ends in, so `tree` is used
    /// to read it off.
    pub fn witness_kind(&self, tree: Option<&StrategyTree>) -> Option<WitnessKind> {
        Some(match &self.variant {
            Variant::Given(_, s) => WitnessKind::Synchroniser(*s),
            Variant::Super(_, s) | Variant::Special(_, s) => WitnessKind::SuperSynchroniser(*s),
            Variant::Homing | Variant::SubsetHoming(_) => WitnessKind::HomingWord,
            Variant::Ada | Variant::SubsetAda(_) => {
                let leaf = tree?.nodes().find(|n| n.is_leaf())?;
                WitnessKind::Synchroniser(leaf.label.states.first()?)
            }
        })
    }

    /// Checks `tree` as a witness for this instance.
    pub fn check(&self, tree: &StrategyTree) -> Result<(), crate::witness::Violation> {
        let kind = self.witness_kind(Some(tree)).ok_or(crate::witness::Violation {
            path: vec![],
            kind: crate::witness::ViolationKind::MalformedTree("tree has no leaf".into()),
        })?;
        check_witness(&self.pda, &self.root(), kind, tree)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionTag {
    SubsetToAda,
    SubsetToGiven,
    GivenToSubset,
    GivenToSubsetHoming,
    GivenToSuper,
    SuperToGiven,
    SuperToSpecial,
    HomingToGiven,
    SubsetHomingToHoming,
}

impl ReductionTag {
    pub const ALL: [ReductionTag; 9] = [
        ReductionTag::SubsetToAda,
        ReductionTag::SubsetToGiven,
        ReductionTag::GivenToSubset,
        ReductionTag::GivenToSubsetHoming,
        ReductionTag::GivenToSuper,
        ReductionTag::SuperToGiven,
        ReductionTag::SuperToSpecial,
        ReductionTag::HomingToGiven,
        ReductionTag::SubsetHomingToHoming,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionTag::SubsetToAda => "subset-to-ada",
            ReductionTag::SubsetToGiven => "subset-to-given",
            ReductionTag::GivenToSubset => "given-to-subset",
            ReductionTag::GivenToSubsetHoming => "given-to-subset-homing",
            ReductionTag::GivenToSuper => "given-to-super",
            ReductionTag::SuperToGiven => "super-to-given",
            ReductionTag::SuperToSpecial => "super-to-special",
            ReductionTag::HomingToGiven => "homing-to-given",
            ReductionTag::SubsetHomingToHoming => "subset-homing-to-homing",
        }
    }

    /// The variant a gadget takes as input.
    pub fn source_variant(self) -> &'static str {
        match self {
            ReductionTag::SubsetToAda | ReductionTag::SubsetToGiven => "subset-ada",
            ReductionTag::GivenToSubset | ReductionTag::GivenToSubsetHoming | ReductionTag::GivenToSuper => "given",
            ReductionTag::SuperToGiven | ReductionTag::SuperToSpecial => "super",
            ReductionTag::HomingToGiven => "homing",
            ReductionTag::SubsetHomingToHoming => "subset-homing",
        }
    }

    /// The gadget turning a `from` instance into a `to` instance, if any.
    pub fn between(from: &str, to: &str) -> Option<ReductionTag> {
        Some(match (from, to) {
            ("ada" | "subset-ada", "ada") => ReductionTag::SubsetToAda,
            ("ada" | "subset-ada", "given") => ReductionTag::SubsetToGiven,
            ("given", "subset-ada") => ReductionTag::GivenToSubset,
            ("given", "subset-homing") => ReductionTag::GivenToSubsetHoming,
            ("given", "super") => ReductionTag::GivenToSuper,
            ("super" | "special", "given") => ReductionTag::SuperToGiven,
            ("super", "special") => ReductionTag::SuperToSpecial,
            ("homing", "given") => ReductionTag::HomingToGiven,
            ("homing" | "subset-homing", "homing") => ReductionTag::SubsetHomingToHoming,
            _ => return None,
        })
    }
}

impl fmt::Display for ReductionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateRole {
    Orig(StateId),
    /// `(p, q)`: simulating `p` after committing to `q`.
    Pair(StateId, StateId),
    /// `(p, ☺)`: simulating `p`, not yet committed.
    Smile(StateId),
    Copy(StateId, u8),
    Acc,
    Rej,
    RejCopy(u8),
    /// Fresh start state that pushes the start stack and moves to the state.
    Prime(StateId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LetterRole {
    Orig(Letter),
    Decide(StateId),
    Done(StateId),
    End,
    Pop,
    Home(StateId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymRole {
    Orig(Sym),
    Hash,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roles {
    pub states: Vec<StateRole>,
    pub letters: Vec<LetterRole>,
    pub syms: Vec<SymRole>,
}

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub instance: ProblemInstance,
    pub tag: ReductionTag,
    /// The source instance, with its PDA completed.
    pub source: ProblemInstance,
    pub roles: Roles,
}

impl ReductionOutput {
    /// One line per new state, letter and symbol: `<kind> <name> <role>`.
    pub fn name_map(&self) -> String {
        let src = &self.source.pda;
        let dst = &self.instance.pda;
        let st = |q: StateId| src.state_name(q).to_string();
        let mut out = format!("# {}\n", self.tag);
        for (i, r) in self.roles.states.iter().enumerate() {
            let role = match *r {
                StateRole::Orig(q) => format!("orig {}", st(q)),
                StateRole::Pair(p, q) => format!("pair {} {}", st(p), st(q)),
                StateRole::Smile(p) => format!("undecided {}", st(p)),
                StateRole::Copy(q, b) => format!("copy {} {b}", st(q)),
                StateRole::Acc => "accept".into(),
                StateRole::Rej => "reject".into(),
                StateRole::RejCopy(b) => format!("reject {b}"),
                StateRole::Prime(q) => format!("start {}", st(q)),
            };
            out.push_str(&format!("state {} {role}\n", dst.state_name(StateId::from_index(i))));
        }
        for (i, r) in self.roles.letters.iter().enumerate() {
            let role = match *r {
                LetterRole::Orig(a) => format!("orig {}", src.input_name(a)),
                LetterRole::Decide(q) => format!("decide {}", st(q)),
                LetterRole::Done(q) => format!("done {}", st(q)),
                LetterRole::End => "end".into(),
                LetterRole::Pop => "pop".into(),
                LetterRole::Home(q) => format!("home {}", st(q)),
            };
            out.push_str(&format!("input {} {role}\n", dst.input_name(Letter::from_index(i))));
        }
        for (i, r) in self.roles.syms.iter().enumerate() {
            let role = match *r {
                SymRole::Orig(s) => format!("orig {}", src.sym_name(s)),
                SymRole::Hash => "marker".into(),
            };
            out.push_str(&format!("stack {} {role}\n", dst.sym_name(Sym::from_index(i))));
        }
        out
    }
}

struct Builder<'a> {
    src: &'a Pda,
    states: Vec<String>,
    inputs: Vec<String>,
    stack: Vec<String>,
    taken: [HashSet<String>; 3],
    rules: Vec<Rule>,
    roles: Roles,
}

impl<'a> Builder<'a> {
    /// Starts with the source's stack alphabet and no states or letters.
    fn new(src: &'a Pda) -> Self {
        let mut b = Builder {
            src,
            states: Vec::new(),
            inputs: Vec::new(),
            stack: Vec::new(),
            taken: Default::default(),
            rules: Vec::new(),
            roles: Roles {
                states: Vec::new(),
                letters: Vec::new(),
                syms: Vec::new(),
            },
        };
        for s in src.syms() {
            b.sym(src.sym_name(s).to_string(), SymRole::Orig(s));
        }
        b
    }

    fn fresh(taken: &mut HashSet<String>, base: String) -> String {
        let mut n = base;
        while taken.contains(&n) {
            n.push('\'');
        }
        taken.insert(n.clone());
        n
    }

    fn state(&mut self, name: String, role: StateRole) -> StateId {
        let n = Self::fresh(&mut self.taken[0], name);
        self.states.push(n);
        self.roles.states.push(role);
        StateId::from_index(self.states.len() - 1)
    }

    fn letter(&mut self, name: String, role: LetterRole) -> Letter {
        let n = Self::fresh(&mut self.taken[1], name);
        self.inputs.push(n);
        self.roles.letters.push(role);
        Letter::from_index(self.inputs.len() - 1)
    }

    fn sym(&mut self, name: String, role: SymRole) -> Sym {
        let n = Self::fresh(&mut self.taken[2], name);
        self.stack.push(n);
        self.roles.syms.push(role);
        Sym::from_index(self.stack.len() - 1)
    }

    /// The source's states, in order, as `Orig`.
    fn orig_states(&mut self) {
        for q in self.src.states() {
            self.state(self.src.state_name(q).to_string(), StateRole::Orig(q));
        }
    }

    fn orig_letters(&mut self) {
        for a in self.src.letters() {
            self.letter(self.src.input_name(a).to_string(), LetterRole::Orig(a));
        }
    }

    fn rule(&mut self, src: StateId, letter: Letter, pop: Sym, dst: StateId, push: Word) {
        self.rules.push(Rule { src, letter, pop, dst, push });
    }

    /// `(src, A) --letter--> (dst, A)` for every stack symbol `A`.
    fn keep_top(&mut self, src: StateId, letter: Letter, dst: StateId) {
        for s in 0..self.stack.len() {
            let s = Sym::from_index(s);
            self.rule(src, letter, s, dst, vec![s]);
        }
    }

    fn finish(self) -> Result<(Pda, Roles), ValidationError> {
        let bottom = self.src.bottom();
        let pda = Pda::new(self.states, self.inputs, self.stack, bottom, self.rules)?.complete();
        Ok((pda, self.roles))
    }
}

fn prepare(inst: &ProblemInstance) -> ProblemInstance {
    ProblemInstance {
        pda: inst.pda.complete(),
        ..inst.clone()
    }
}

fn wrong(tag: ReductionTag, inst: &ProblemInstance) -> ReductionError {
    ReductionError::WrongVariant(format!("{tag} does not apply to a {} instance", inst.variant.name()))
}

fn output(tag: ReductionTag, source: ProblemInstance, pda: Pda, roles: Roles, variant: Variant, stack: Word) -> Result<ReductionOutput, ReductionError> {
    let instance = ProblemInstance::new(pda, variant, stack)?;
    Ok(ReductionOutput { instance, tag, source, roles })
}

/// Subset-Ada-Sync to Ada-Sync (or Subset-Homing to Homing, see
/// [`subset_homing_to_homing`]): a fresh marker `#` on top of the stack is
/// popped on the first letter, sending every state outside `I` into `I`.
pub fn subset_to_ada(inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    marker_gadget(inst, ReductionTag::SubsetToAda)
}

pub fn subset_homing_to_homing(inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    marker_gadget(inst, ReductionTag::SubsetHomingToHoming)
}

fn marker_gadget(inst: &ProblemInstance, tag: ReductionTag) -> Result<ReductionOutput, ReductionError> {
    let homing = tag == ReductionTag::SubsetHomingToHoming;
    let ok = match &inst.variant {
        Variant::Ada | Variant::SubsetAda(_) => !homing,
        Variant::Homing | Variant::SubsetHoming(_) => homing,
        _ => false,
    };
    if !ok {
        return Err(wrong(tag, inst));
    }
    let src = prepare(inst);
    let init = src.init_set();
    let q_i = init.first().ok_or(ReductionError::InvalidSubset)?;
    let mut b = Builder::new(&src.pda);
    b.orig_states();
    b.orig_letters();
    let hash = b.sym("g:#".into(), SymRole::Hash);
    for r in src.pda.rules() {
        b.rule(r.src, r.letter, r.pop, r.dst, r.push.clone());
    }
    for a in src.pda.letters() {
        for q in src.pda.states() {
            let dst = if init.contains(q) { q } else { q_i };
            b.rule(q, a, hash, dst, vec![]);
        }
    }
    let (pda, roles) = b.finish()?;
    let mut stack = vec![hash];
    stack.extend_from_slice(&src.stack);
    let variant = if homing { Variant::Homing } else { Variant::Ada };
    output(tag, src, pda, roles, variant, stack)
}

/// Subset-Ada-Sync to Given-Sync: the observer first announces, with
/// `decide_q`, the state `q` it will synchronise to; `done_q` then accepts
/// exactly from `(q, q)`.
pub fn subset_to_given(inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    let tag = ReductionTag::SubsetToGiven;
    if !matches!(inst.variant, Variant::Ada | Variant::SubsetAda(_)) {
        return Err(wrong(tag, inst));
    }
    let src = prepare(inst);
    let p = &src.pda;
    let n = p.num_states();
    let init = src.init_set();
    if init.is_empty() {
        return Err(ReductionError::InvalidSubset);
    }
    let mut b = Builder::new(p);
    for x in p.states() {
        for y in p.states() {
            b.state(format!("{}/{}", p.state_name(x), p.state_name(y)), StateRole::Pair(x, y));
        }
    }
    for x in p.states() {
        b.state(format!("{}/g:smile", p.state_name(x)), StateRole::Smile(x));
    }
    let acc = b.state("g:acc".into(), StateRole::Acc);
    let rej = b.state("g:rej".into(), StateRole::Rej);
    let pair = |x: StateId, y: StateId| StateId::from_index(x.index() * n + y.index());
    let smile = |x: StateId| StateId::from_index(n * n + x.index());
    b.orig_letters();
    let decide: Vec<Letter> = p
        .states()
        .map(|q| b.letter(format!("g:decide:{}", p.state_name(q)), LetterRole::Decide(q)))
        .collect();
    let done: Vec<Letter> = p
        .states()
        .map(|q| b.letter(format!("g:done:{}", p.state_name(q)), LetterRole::Done(q)))
        .collect();
    for r in p.rules() {
        for y in p.states() {
            b.rule(pair(r.src, y), r.letter, r.pop, pair(r.dst, y), r.push.clone());
        }
    }
    for x in p.states() {
        for q in p.states() {
            b.keep_top(smile(x), decide[q.index()], pair(x, q));
        }
    }
    let all: Vec<StateId> = (0..b.states.len()).map(StateId::from_index).collect();
    for q in p.states() {
        for &x in &all {
            let dst = if x == acc || x == pair(q, q) { acc } else { rej };
            b.keep_top(x, done[q.index()], dst);
        }
    }
    let (pda, roles) = b.finish()?;
    let i2: StateSet = init.iter().map(smile).collect();
    let stack = src.stack.clone();
    output(tag, src, pda, roles, Variant::Given(i2, acc), stack)
}

/// Given-Sync to Subset-Ada-Sync: two disjoint copies of the PDA; `end`
/// merges both copies of `s` into an accepting sink and sends everything
/// else to its copy's rejecting sink.
pub fn given_to_subset(inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    two_copies(inst, ReductionTag::GivenToSubset)
}

/// Given-Sync to Subset-Homing: the same two-copy construction, asking for
/// a homing word instead.
pub fn given_to_subset_homing(inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    two_copies(inst, ReductionTag::GivenToSubsetHoming)
}

fn two_copies(inst: &ProblemInstance, tag: ReductionTag) -> Result<ReductionOutput, ReductionError> {
    let Variant::Given(init, s) = &inst.variant else {
        return Err(wrong(tag, inst));
    };
    let (init, s) = (init.clone(), *s);
    let src = prepare(inst);
    let p = &src.pda;
    let n = p.num_states();
    let mut b = Builder::new(p);
    for c in 0..2u8 {
        for q in p.states() {
            b.state(format!("{}/{c}", p.state_name(q)), StateRole::Copy(q, c));
        }
    }
    let copy = |q: StateId, c: u8| StateId::from_index(c as usize * n + q.index());
    let acc = b.state("g:acc".into(), StateRole::Acc);
    let rej = [
        b.state("g:rej/0".into(), StateRole::RejCopy(0)),
        b.state("g:rej/1".into(), StateRole::RejCopy(1)),
    ];
    b.orig_letters();
    let end = b.letter("g:end".into(), LetterRole::End);
    for r in p.rules() {
        for c in 0..2 {
            b.rule(copy(r.src, c), r.letter, r.pop, copy(r.dst, c), r.push.clone());
        }
    }
    for c in 0..2u8 {
        for q in p.states() {
            let dst = if q == s { acc } else { rej[c as usize] };
            b.keep_top(copy(q, c), end, dst);
        }
        b.keep_top(rej[c as usize], end, rej[c as usize]);
    }
    b.keep_top(acc, end, acc);
    let (pda, roles) = b.finish()?;
    let i2: StateSet = init.iter().flat_map(|q| [copy(q, 0), copy(q, 1)]).collect();
    let variant = if tag == ReductionTag::GivenToSubsetHoming {
        Variant::SubsetHoming(i2)
    } else {
        Variant::SubsetAda(i2)
    };
    let stack = src.stack.clone();
    output(tag, src, pda, roles, variant, stack)
}

/// Given-Sync to Super-Sync: `end` moves `s` to an accepting state that
/// can empty the stack with `pop`; every other use of the new letters
/// rejects.
pub fn given_to_super(inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    let tag = ReductionTag::GivenToSuper;
    let Variant::Given(init, s) = &inst.variant else {
        return Err(wrong(tag, inst));
    };
    let (init, s) = (init.clone(), *s);
    let src = prepare(inst);
    let p = &src.pda;
    let mut b = Builder::new(p);
    b.orig_states();
    let acc = b.state("g:acc".into(), StateRole::Acc);
    let rej = b.state("g:rej".into(), StateRole::Rej);
    b.orig_letters();
    let end = b.letter("g:end".into(), LetterRole::End);
    let pop = b.letter("g:pop".into(), LetterRole::Pop);
    for r in p.rules() {
        b.rule(r.src, r.letter, r.pop, r.dst, r.push.clone());
    }
    for q in p.states().chain([rej]) {
        b.keep_top(q, end, if q == s { acc } else { rej });
        b.keep_top(q, pop, rej);
    }
    b.keep_top(acc, end, acc);
    for a in p.syms() {
        let push = if a == p.bottom() { vec![a] } else { vec![] };
        b.rule(acc, pop, a, acc, push);
    }
    let (pda, roles) = b.finish()?;
    let stack = src.stack.clone();
    output(tag, src, pda, roles, Variant::Super(init, acc), stack)
}

/// Super-Sync to Given-Sync: `end` accepts only from `s` with nothing but
/// the bottom symbol on the stack.
pub fn super_to_given(inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    let tag = ReductionTag::SuperToGiven;
    let (init, s) = match &inst.variant {
        Variant::Super(i, s) | Variant::Special(i, s) => (i.clone(), *s),
        _ => return Err(wrong(tag, inst)),
    };
    let src = prepare(inst);
    let p = &src.pda;
    let mut b = Builder::new(p);
    b.orig_states();
    let acc = b.state("g:acc".into(), StateRole::Acc);
    let rej = b.state("g:rej".into(), StateRole::Rej);
    b.orig_letters();
    let end = b.letter("g:end".into(), LetterRole::End);
    for r in p.rules() {
        b.rule(r.src, r.letter, r.pop, r.dst, r.push.clone());
    }
    for q in p.states().chain([rej]) {
        for a in p.syms() {
            let dst = if q == s && a == p.bottom() { acc } else { rej };
            b.rule(q, end, a, dst, vec![a]);
        }
    }
    b.keep_top(acc, end, acc);
    let (pda, roles) = b.finish()?;
    let stack = src.stack.clone();
    output(tag, src, pda, roles, Variant::Given(init, acc), stack)
}

/// Super-Sync to Special-Sync: fresh copies `q'` of the states in `I`
/// push the start stack on any letter and move to `q`.
pub fn super_to_special(inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    let tag = ReductionTag::SuperToSpecial;
    let Variant::Super(init, s) = &inst.variant else {
        return Err(wrong(tag, inst));
    };
    let (init, s) = (init.clone(), *s);
    let src = prepare(inst);
    let p = &src.pda;
    let mut b = Builder::new(p);
    b.orig_states();
    let primes: Vec<(StateId, StateId)> = init
        .iter()
        .map(|q| (q, b.state(format!("{}'", p.state_name(q)), StateRole::Prime(q))))
        .collect();
    b.orig_letters();
    for r in p.rules() {
        b.rule(r.src, r.letter, r.pop, r.dst, r.push.clone());
    }
    for &(q, qp) in &primes {
        for a in p.letters() {
            b.rule(qp, a, p.bottom(), q, src.stack.clone());
        }
    }
    let (pda, roles) = b.finish()?;
    let i2: StateSet = primes.iter().map(|&(_, qp)| qp).collect();
    let bottom = vec![p.bottom()];
    output(tag, src, pda, roles, Variant::Special(i2, s), bottom)
}

/// Homing to Given-Sync: a letter `a_q` per state accepts from `q` and
/// rejects from every other state.
pub fn homing_to_given(inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    let tag = ReductionTag::HomingToGiven;
    if inst.variant != Variant::Homing {
        return Err(wrong(tag, inst));
    }
    let src = prepare(inst);
    let p = &src.pda;
    let mut b = Builder::new(p);
    b.orig_states();
    let acc = b.state("g:acc".into(), StateRole::Acc);
    let rej = b.state("g:rej".into(), StateRole::Rej);
    b.orig_letters();
    let home: Vec<Letter> = p
        .states()
        .map(|q| b.letter(format!("g:home:{}", p.state_name(q)), LetterRole::Home(q)))
        .collect();
    for r in p.rules() {
        b.rule(r.src, r.letter, r.pop, r.dst, r.push.clone());
    }
    for q in p.states() {
        for x in p.states() {
            b.keep_top(x, home[q.index()], if x == q { acc } else { rej });
        }
    }
    let (pda, roles) = b.finish()?;
    let stack = src.stack.clone();
    let all = p.all_states();
    output(tag, src, pda, roles, Variant::Given(all, acc), stack)
}

pub fn reduce(tag: ReductionTag, inst: &ProblemInstance) -> Result<ReductionOutput, ReductionError> {
    match tag {
        ReductionTag::SubsetToAda => subset_to_ada(inst),
        ReductionTag::SubsetToGiven => subset_to_given(inst),
        ReductionTag::GivenToSubset => given_to_subset(inst),
        ReductionTag::GivenToSubsetHoming => given_to_subset_homing(inst),
        ReductionTag::GivenToSuper => given_to_super(inst),
        ReductionTag::SuperToGiven => super_to_given(inst),
        ReductionTag::SuperToSpecial => super_to_special(inst),
        ReductionTag::HomingToGiven => homing_to_given(inst),
        ReductionTag::SubsetHomingToHoming => subset_homing_to_homing(inst),
    }
}

// ---------------------------------------------------------------------------
// Witness pull-back

/// Reads labels of the reduced PDA as labels of the source PDA.
struct Projection {
    states: Vec<Option<StateId>>,
    syms: Vec<Option<Sym>>,
    letters: Vec<Option<Letter>>,
}

fn fail(msg: impl Into<String>) -> ReductionError {
    ReductionError::PullBackFailure(msg.into())
}

impl Projection {
    fn new(roles: &Roles, state: impl Fn(StateRole) -> Option<StateId>) -> Self {
        Projection {
            states: roles.states.iter().map(|&r| state(r)).collect(),
            syms: roles
                .syms
                .iter()
                .map(|r| match r {
                    SymRole::Orig(s) => Some(*s),
                    SymRole::Hash => None,
                })
                .collect(),
            letters: roles
                .letters
                .iter()
                .map(|r| match r {
                    LetterRole::Orig(a) => Some(*a),
                    _ => None,
                })
                .collect(),
        }
    }

    fn label(&self, pc: &PseudoConfig) -> Result<PseudoConfig, ReductionError> {
        let states = pc
            .states
            .iter()
            .map(|q| self.states[q.index()].ok_or_else(|| fail("a gadget state shows up before the source witness ends")))
            .collect::<Result<StateSet, _>>()?;
        let stack = pc
            .stack
            .iter()
            .map(|s| self.syms[s.index()].ok_or_else(|| fail("a gadget stack symbol shows up inside the witness")))
            .collect::<Result<Word, _>>()?;
        Ok(PseudoConfig { states, stack })
    }

    /// Rebuilds `node` over the source PDA, stopping at the first label
    /// accepted by `is_leaf`. Gadget letters are only allowed where they do
    /// nothing (one child with the same label), and are then skipped.
    fn transform(&self, node: &Node, is_leaf: &dyn Fn(&PseudoConfig) -> bool) -> Result<Node, ReductionError> {
        let label = self.label(&node.label)?;
        if is_leaf(&label) {
            return Ok(Node::leaf(label));
        }
        let Some(a) = node.letter else {
            return Err(fail("a leaf of the reduced witness is not a leaf of the source witness"));
        };
        match self.letters[a.index()] {
            Some(b) => {
                let children = node.children.iter().map(|c| self.transform(c, is_leaf)).collect::<Result<_, _>>()?;
                Ok(Node {
                    label,
                    letter: Some(b),
                    children,
                })
            }
            None => match node.children.as_slice() {
                [c] if self.label(&c.label).as_ref() == Ok(&label) => self.transform(c, is_leaf),
                _ => Err(fail("a gadget letter is used where it changes the configuration")),
            },
        }
    }
}

/// Turns a witness for `out.instance` into one for `out.source`. The
/// result is checked before it is returned.
pub fn pull_back(out: &ReductionOutput, tree: &StrategyTree) -> Result<StrategyTree, ReductionError> {
    out.instance
        .check(tree)
        .map_err(|v| fail(format!("the given tree is not a witness for the reduced instance: {v}")))?;
    let src = &out.source;
    let kind = src.witness_kind(None);
    let root = &tree.root;
    let orig = |r: StateRole| match r {
        StateRole::Orig(q) => Some(q),
        _ => None,
    };
    let result = match out.tag {
        ReductionTag::SubsetToAda | ReductionTag::SubsetHomingToHoming => {
            let proj = Projection::new(&out.roles, orig);
            if root.is_leaf() {
                // only possible with a single state
                Node::leaf(src.root())
            } else {
                let [child] = root.children.as_slice() else {
                    return Err(fail("the marker step must have exactly one successor"));
                };
                let homing = out.tag == ReductionTag::SubsetHomingToHoming;
                let leaf_state = tree.nodes().find(|n| n.is_leaf()).and_then(|n| n.label.states.first());
                let is_leaf = move |pc: &PseudoConfig| {
                    if homing {
                        pc.states.len() == 1
                    } else {
                        leaf_state.is_some_and(|s| pc.states.single() == Some(s))
                    }
                };
                proj.transform(child, &is_leaf)?
            }
        }
        ReductionTag::SubsetToGiven => {
            let mut node = root;
            let s = loop {
                if !node.label.states.iter().all(|q| matches!(out.roles.states[q.index()], StateRole::Smile(_))) {
                    return Err(fail("the witness leaves the undecided states without deciding"));
                }
                let Some(a) = node.letter else {
                    return Err(fail("the witness stops before deciding"));
                };
                let [child] = node.children.as_slice() else {
                    return Err(fail("an undecided step must have one successor"));
                };
                match out.roles.letters[a.index()] {
                    LetterRole::Decide(s) => {
                        node = child;
                        break s;
                    }
                    LetterRole::Orig(_) if child.label.states == node.label.states => node = child,
                    _ => return Err(fail("only decide letters make progress before deciding")),
                }
            };
            let proj = Projection::new(&out.roles, |r| match r {
                StateRole::Pair(p, q) if q == s => Some(p),
                _ => None,
            });
            proj.transform(node, &|pc: &PseudoConfig| pc.states.single() == Some(s))?
        }
        ReductionTag::GivenToSubset | ReductionTag::GivenToSubsetHoming => {
            let Some(WitnessKind::Synchroniser(s)) = kind else { unreachable!() };
            let proj = Projection::new(&out.roles, |r| match r {
                StateRole::Copy(q, _) => Some(q),
                _ => None,
            });
            proj.transform(root, &|pc: &PseudoConfig| pc.states.single() == Some(s))?
        }
        ReductionTag::GivenToSuper => {
            let Some(WitnessKind::Synchroniser(s)) = kind else { unreachable!() };
            let proj = Projection::new(&out.roles, orig);
            proj.transform(root, &|pc: &PseudoConfig| pc.states.single() == Some(s))?
        }
        ReductionTag::SuperToGiven => {
            let Some(WitnessKind::SuperSynchroniser(s)) = kind else { unreachable!() };
            let bottom = src.pda.bottom();
            let proj = Projection::new(&out.roles, orig);
            proj.transform(root, &|pc: &PseudoConfig| pc.states.single() == Some(s) && pc.stack == [bottom])?
        }
        ReductionTag::SuperToSpecial => {
            let Some(WitnessKind::SuperSynchroniser(s)) = kind else { unreachable!() };
            let [child] = root.children.as_slice() else {
                return Err(fail("the start step must have exactly one successor"));
            };
            let bottom = src.pda.bottom();
            let proj = Projection::new(&out.roles, orig);
            proj.transform(child, &|pc: &PseudoConfig| pc.states.single() == Some(s) && pc.stack == [bottom])?
        }
        ReductionTag::HomingToGiven => {
            let proj = Projection::new(&out.roles, orig);
            proj.transform(root, &|pc: &PseudoConfig| pc.states.len() == 1)?
        }
    };
    let result = StrategyTree::new(result);
    src.check(&result).map_err(|v| fail(format!("the pulled-back tree is not a witness: {v}")))?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::run4;

    fn run4_inst(variant: Variant) -> ProblemInstance {
        let p = run4();
        let bot = p.bottom();
        ProblemInstance::new(p, variant, vec![bot]).unwrap()
    }

    fn st(p: &Pda, names: &[&str]) -> StateSet {
        names.iter().map(|n| p.state_id(n).unwrap()).collect()
    }

    #[test]
    fn subset_to_ada_shape() {
        let p = run4();
        let inst = run4_inst(Variant::SubsetAda(st(&p, &["3", "4"])));
        let out = subset_to_ada(&inst).unwrap();
        let q = &out.instance.pda;
        assert_eq!(q.num_states(), 4);
        assert_eq!(q.num_syms(), 4);
        assert!(q.is_deterministic());
        assert_eq!(out.instance.variant, Variant::Ada);
        assert_eq!(q.show_word(&out.instance.stack), "g:# bot");
        let hash = q.sym_id("g:#").unwrap();
        let box_ = q.letter_id("box").unwrap();
        let r = &q.rules()[q.rules_at(q.state_id("1").unwrap(), box_, hash)[0]];
        assert_eq!(q.state_name(r.dst), "3");
        assert!(r.push.is_empty());
    }

    #[test]
    fn subset_to_given_counts() {
        let p = run4();
        let inst = run4_inst(Variant::SubsetAda(p.all_states()));
        let out = subset_to_given(&inst).unwrap();
        assert_eq!(out.instance.pda.num_states(), 16 + 4 + 2);
        assert_eq!(out.instance.pda.num_inputs(), 2 + 8);
        assert!(out.instance.pda.is_deterministic());
        assert_eq!(out.name_map().lines().filter(|l| l.starts_with("state")).count(), 22);
    }

    #[test]
    fn two_copy_counts() {
        let p = run4();
        let s = p.state_id("4").unwrap();
        let inst = run4_inst(Variant::Given(p.all_states(), s));
        for out in [given_to_subset(&inst).unwrap(), given_to_subset_homing(&inst).unwrap()] {
            assert_eq!(out.instance.pda.num_states(), 2 * 4 + 3);
            assert_eq!(out.instance.pda.num_inputs(), 3);
            assert_eq!(out.instance.init_set().len(), 8);
            assert!(out.instance.pda.is_deterministic());
        }
    }

    #[test]
    fn super_to_special_primes() {
        let p = run4();
        let s = p.state_id("4").unwrap();
        let red = p.sym_id("red").unwrap();
        let inst = ProblemInstance::new(p.clone(), Variant::Super(p.all_states(), s), vec![red, p.bottom()]).unwrap();
        let out = super_to_special(&inst).unwrap();
        assert_eq!(out.instance.pda.num_states(), 8);
        assert_eq!(out.instance.init_set().len(), 4);
        assert_eq!(out.instance.stack, vec![out.instance.pda.bottom()]);
        assert!(out.instance.pda.state_id("1'").is_some());
    }

    #[test]
    fn names_stay_fresh() {
        let p = Pda::new(vec!["g:acc".into()], vec!["a".into()], vec!["bot".into()], Sym(0), vec![]).unwrap();
        let inst = ProblemInstance::new(p, Variant::Given(StateSet::singleton(StateId(0)), StateId(0)), vec![Sym(0)]).unwrap();
        let out = given_to_super(&inst).unwrap();
        assert_eq!(out.instance.pda.state_names(), ["g:acc", "g:acc'", "g:rej"]);
    }

    #[test]
    fn wrong_variant_is_rejected() {
        let inst = run4_inst(Variant::Homing);
        assert!(matches!(given_to_super(&inst), Err(ReductionError::WrongVariant(_))));
        assert!(ReductionTag::between("special", "homing").is_none());
        assert_eq!(ReductionTag::between("given", "super"), Some(ReductionTag::GivenToSuper));
    }

    #[test]
    fn single_leaf_through_super_to_special() {
        // I = {s} with gamma = bot: the reduced witness is one start step.
        let p = run4();
        let s = p.state_id("4").unwrap();
        let inst = run4_inst(Variant::Super(StateSet::singleton(s), s));
        let out = super_to_special(&inst).unwrap();
        let q = &out.instance.pda;
        let root = out.instance.root();
        let node = Node::expand(q, root, Letter(0), Node::leaf);
        let tree = StrategyTree::new(node);
        out.instance.check(&tree).unwrap();
        let back = pull_back(&out, &tree).unwrap();
        assert_eq!(back.node_count(), 1);
    }

    #[test]
    fn malformed_witness_fails() {
        let p = run4();
        let s = p.state_id("4").unwrap();
        let inst = run4_inst(Variant::Super(p.all_states(), s));
        let out = super_to_special(&inst).unwrap();
        let tree = StrategyTree::new(Node::leaf(out.instance.root()));
        assert!(matches!(pull_back(&out, &tree), Err(ReductionError::PullBackFailure(_))));
    }
}
