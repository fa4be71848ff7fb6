//! Alternating extended pushdown systems: pushdown systems with Boolean
//! variables, guards, commands and forking rules, and their translation to
//! a Special-Sync instance.

use std::collections::{BTreeMap, HashSet};

use crate::error::{AepsError, ValidationError};
use crate::pda::{check_push_discipline, check_stack_discipline, Letter, Pda, PseudoConfig, Rule, StateId, StateSet, Sym, Word};
use crate::reductions::{ProblemInstance, Variant};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AepsBranch {
    pub dst: StateId,
    pub push: Word,
    /// Partial assignment `variable -> bit`; a map, so never inconsistent.
    pub cmd: BTreeMap<usize, bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AepsRule {
    pub src: StateId,
    pub pop: Sym,
    /// Tests `v ?= b`. Contradictory guards are allowed; they never hold.
    pub guard: Vec<(usize, bool)>,
    pub branches: Vec<AepsBranch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aeps {
    pub states: Vec<String>,
    pub vars: Vec<String>,
    pub stack: Vec<String>,
    pub bottom: Sym,
    pub rules: Vec<AepsRule>,
    pub init: StateId,
    pub fin: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AepsConfig {
    pub state: StateId,
    pub stack: Word,
    pub vals: Vec<bool>,
}

impl Aeps {
    pub fn new(
        states: Vec<String>,
        vars: Vec<String>,
        stack: Vec<String>,
        bottom: Sym,
        rules: Vec<AepsRule>,
        init: StateId,
        fin: StateId,
    ) -> Result<Self, ValidationError> {
        if states.is_empty() {
            return Err(ValidationError::Empty("state set"));
        }
        if bottom.index() >= stack.len() {
            return Err(ValidationError::UnknownId("bottom symbol".into()));
        }
        for (what, names) in [("state", &states), ("variable", &vars), ("stack symbol", &stack)] {
            let mut seen = HashSet::new();
            if let Some(n) = names.iter().find(|n| !seen.insert(n.as_str())) {
                return Err(ValidationError::DuplicateName(format!("{what} `{n}`")));
            }
        }
        let (ns, nv, ng) = (states.len(), vars.len(), stack.len());
        if init.index() >= ns || fin.index() >= ns {
            return Err(ValidationError::UnknownId("init/fin state".into()));
        }
        for (i, r) in rules.iter().enumerate() {
            let bad = |what: &str| ValidationError::UnknownId(format!("{what} in AEPS rule {i}"));
            if r.branches.is_empty() {
                return Err(ValidationError::Other(format!("AEPS rule {i} has no branches")));
            }
            if r.src.index() >= ns || r.branches.iter().any(|b| b.dst.index() >= ns) {
                return Err(bad("state"));
            }
            if r.pop.index() >= ng || r.branches.iter().any(|b| b.push.iter().any(|s| s.index() >= ng)) {
                return Err(bad("stack symbol"));
            }
            if r.guard.iter().any(|&(v, _)| v >= nv) || r.branches.iter().any(|b| b.cmd.keys().any(|&v| v >= nv)) {
                return Err(bad("variable"));
            }
            for b in &r.branches {
                check_push_discipline(bottom, r.pop, &b.push).map_err(|reason| ValidationError::BottomDiscipline {
                    rule: format!("AEPS rule {i}"),
                    reason,
                })?;
            }
        }
        Ok(Aeps {
            states,
            vars,
            stack,
            bottom,
            rules,
            init,
            fin,
        })
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId::from_index)
    }

    pub fn var_id(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|n| n == name)
    }

    pub fn sym_id(&self, name: &str) -> Option<Sym> {
        self.stack.iter().position(|n| n == name).map(Sym::from_index)
    }

    /// Every rule has exactly one branch.
    pub fn is_neps(&self) -> bool {
        self.rules.iter().all(|r| r.branches.len() == 1)
    }

    /// No rule has two branches pushing the same word.
    pub fn has_distinct_pushes(&self) -> bool {
        self.rules.iter().all(|r| {
            let mut seen = HashSet::new();
            r.branches.iter().all(|b| seen.insert(&b.push))
        })
    }

    pub fn initial_config(&self) -> AepsConfig {
        AepsConfig {
            state: self.init,
            stack: vec![self.bottom],
            vals: vec![false; self.vars.len()],
        }
    }

    pub fn is_accepting(&self, c: &AepsConfig) -> bool {
        c.state == self.fin && c.stack == [self.bottom] && c.vals.iter().all(|v| !v)
    }

    pub fn check_config(&self, c: &AepsConfig) -> Result<(), ValidationError> {
        if c.vals.len() != self.vars.len() {
            return Err(ValidationError::Other("valuation has the wrong number of variables".into()));
        }
        check_stack_discipline(self.bottom, &c.stack)
    }
}

pub fn enabled(rule: &AepsRule, c: &AepsConfig) -> bool {
    rule.src == c.state && c.stack.first() == Some(&rule.pop) && rule.guard.iter().all(|&(v, b)| c.vals.get(v) == Some(&b))
}

/// The configurations `rule` forks `c` into, one per branch.
pub fn fork(rule: &AepsRule, c: &AepsConfig) -> Result<Vec<AepsConfig>, AepsError> {
    if !enabled(rule, c) {
        return Err(AepsError::NotEnabled);
    }
    let rest = &c.stack[1..];
    Ok(rule
        .branches
        .iter()
        .map(|b| {
            let mut stack = b.push.clone();
            stack.extend_from_slice(rest);
            let mut vals = c.vals.clone();
            for (&v, &bit) in &b.cmd {
                vals[v] = bit;
            }
            AepsConfig { state: b.dst, stack, vals }
        })
        .collect())
}

fn fresh(taken: &mut HashSet<String>, base: String) -> String {
    let mut n = base;
    while taken.contains(&n) {
        n.push('\'');
    }
    taken.insert(n.clone());
    n
}

/// Makes the push words of every rule pairwise distinct. A branch `j` of
/// rule `i` that repeats an earlier branch's word is redirected through a
/// fresh state `g:mid:i:j` with a fresh symbol `#t:i:j` on top; a new rule
/// pops that symbol and moves on to the branch's original target.
pub fn normalize_distinct_pushes(aeps: &Aeps) -> Aeps {
    let mut out = aeps.clone();
    let mut state_names: HashSet<String> = out.states.iter().cloned().collect();
    let mut sym_names: HashSet<String> = out.stack.iter().cloned().collect();
    let mut extra = Vec::new();
    for (i, rule) in out.rules.iter_mut().enumerate() {
        let mut seen: HashSet<Word> = HashSet::new();
        for (j, b) in rule.branches.iter_mut().enumerate() {
            if seen.insert(b.push.clone()) {
                continue;
            }
            let mid = fresh(&mut state_names, format!("g:mid:{i}:{j}"));
            out.states.push(mid);
            let mid = StateId::from_index(out.states.len() - 1);
            let hash = fresh(&mut sym_names, format!("#t:{i}:{j}"));
            out.stack.push(hash);
            let hash = Sym::from_index(out.stack.len() - 1);
            let target = b.dst;
            b.dst = mid;
            b.push.insert(0, hash);
            seen.insert(b.push.clone());
            extra.push(AepsRule {
                src: mid,
                pop: hash,
                guard: vec![],
                branches: vec![AepsBranch {
                    dst: target,
                    push: vec![],
                    cmd: BTreeMap::new(),
                }],
            });
        }
    }
    out.rules.extend(extra);
    out
}

/// The Special-Sync instance an AEPS translates to, with the names of its
/// parts.
#[derive(Clone, Debug)]
pub struct AepsReduction {
    pub instance: ProblemInstance,
    pub acc: StateId,
    pub rej: StateId,
    /// `(v, b)` lives at `var_states[v][b]`.
    pub var_states: Vec<[StateId; 2]>,
    /// `in(t)` for each AEPS rule `t`.
    pub rule_letters: Vec<Letter>,
    pub end: Letter,
}

impl AepsReduction {
    /// The pseudo-configuration `({q} ∪ {(v, F(v))}, γ)` standing for `c`.
    pub fn encode(&self, c: &AepsConfig) -> PseudoConfig {
        let mut states: StateSet = c.vals.iter().enumerate().map(|(v, &b)| self.var_states[v][b as usize]).collect();
        states.insert(c.state);
        PseudoConfig {
            states,
            stack: c.stack.clone(),
        }
    }
}

/// Builds the PDA whose super-synchronisers from `({init} ∪ V×{0}, bot)` to
/// `acc` correspond to accepting runs of `aeps`. Needs distinct pushes
/// within each rule (see [`normalize_distinct_pushes`]).
pub fn aeps_to_pda(aeps: &Aeps) -> Result<AepsReduction, AepsError> {
    if let Some(i) = aeps.rules.iter().position(|r| {
        let mut seen = HashSet::new();
        !r.branches.iter().all(|b| seen.insert(&b.push))
    }) {
        return Err(AepsError::NotNormalized(i));
    }
    let nq = aeps.states.len();
    let mut names: HashSet<String> = aeps.states.iter().cloned().collect();
    let mut states = aeps.states.clone();
    let mut var_states = Vec::new();
    for v in &aeps.vars {
        let mut pair = [StateId(0); 2];
        for (b, slot) in pair.iter_mut().enumerate() {
            states.push(fresh(&mut names, format!("g:{v}={b}")));
            *slot = StateId::from_index(states.len() - 1);
        }
        var_states.push(pair);
    }
    states.push(fresh(&mut names, "g:acc".into()));
    let acc = StateId::from_index(states.len() - 1);
    states.push(fresh(&mut names, "g:rej".into()));
    let rej = StateId::from_index(states.len() - 1);

    let mut letter_names = HashSet::new();
    let mut inputs: Vec<String> = (0..aeps.rules.len()).map(|i| fresh(&mut letter_names, format!("g:in:{i}"))).collect();
    inputs.push(fresh(&mut letter_names, "g:end".into()));
    let rule_letters: Vec<Letter> = (0..aeps.rules.len()).map(Letter::from_index).collect();
    let end = Letter::from_index(aeps.rules.len());
    let syms: Vec<Sym> = (0..aeps.stack.len()).map(Sym::from_index).collect();

    let mut rules = Vec::new();
    let to_rej = |rules: &mut Vec<Rule>, src: StateId, letter: Letter, top: Sym| {
        rules.push(Rule {
            src,
            letter,
            pop: top,
            dst: rej,
            push: vec![top],
        })
    };
    for (t, r) in aeps.rules.iter().enumerate() {
        let a = rule_letters[t];
        for p in (0..nq).map(StateId::from_index) {
            for &top in &syms {
                if p != r.src || top != r.pop {
                    to_rej(&mut rules, p, a, top);
                } else {
                    for b in &r.branches {
                        rules.push(Rule {
                            src: p,
                            letter: a,
                            pop: top,
                            dst: b.dst,
                            push: b.push.clone(),
                        });
                    }
                }
            }
        }
        for (v, pair) in var_states.iter().enumerate() {
            for (bit, &vs) in pair.iter().enumerate() {
                let refuted = r.guard.contains(&(v, bit == 0));
                for &top in &syms {
                    if refuted || top != r.pop {
                        to_rej(&mut rules, vs, a, top);
                    } else {
                        for b in &r.branches {
                            let nb = b.cmd.get(&v).map_or(bit, |&x| x as usize);
                            rules.push(Rule {
                                src: vs,
                                letter: a,
                                pop: top,
                                dst: pair[nb],
                                push: b.push.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    for q in (0..nq).map(StateId::from_index).chain(var_states.iter().flat_map(|p| p.iter().copied())) {
        let good = q == aeps.fin || var_states.iter().any(|p| p[0] == q);
        for &top in &syms {
            rules.push(Rule {
                src: q,
                letter: end,
                pop: top,
                dst: if good { acc } else { rej },
                push: vec![top],
            });
        }
    }
    let pda = Pda::new(states, inputs, aeps.stack.clone(), aeps.bottom, rules)?.complete();
    let mut root: StateSet = var_states.iter().map(|p| p[0]).collect();
    root.insert(aeps.init);
    Ok(AepsReduction {
        instance: ProblemInstance::new(pda, Variant::Special(root, acc), vec![aeps.bottom])?,
        acc,
        rej,
        var_states,
        rule_letters,
        end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> (Aeps, AepsRule) {
        // states q1 q2 q3, vars v1 v2 v3, stack A B bot
        let (a, b) = (Sym(0), Sym(1));
        let t = AepsRule {
            src: StateId(0),
            pop: a,
            guard: vec![(0, false), (2, true)],
            branches: vec![
                AepsBranch {
                    dst: StateId(1),
                    push: vec![a, b],
                    cmd: BTreeMap::from([(0, true), (1, false)]),
                },
                AepsBranch {
                    dst: StateId(2),
                    push: vec![],
                    cmd: BTreeMap::from([(1, false)]),
                },
            ],
        };
        let aeps = Aeps::new(
            vec!["q1".into(), "q2".into(), "q3".into()],
            vec!["v1".into(), "v2".into(), "v3".into()],
            vec!["A".into(), "B".into(), "bot".into()],
            Sym(2),
            vec![t.clone()],
            StateId(0),
            StateId(2),
        )
        .unwrap();
        (aeps, t)
    }

    #[test]
    fn fig3_fork() {
        let (_, t) = fig3();
        let (a, b, bot) = (Sym(0), Sym(1), Sym(2));
        let c1 = AepsConfig {
            state: StateId(0),
            stack: vec![a, b, a, bot],
            vals: vec![false, true, true],
        };
        let kids = fork(&t, &c1).unwrap();
        assert_eq!(
            kids,
            vec![
                AepsConfig {
                    state: StateId(1),
                    stack: vec![a, b, b, a, bot],
                    vals: vec![true, false, true]
                },
                AepsConfig {
                    state: StateId(2),
                    stack: vec![b, a, bot],
                    vals: vec![false, false, true]
                },
            ]
        );
        let mut c = c1.clone();
        c.vals[2] = false;
        assert!(!enabled(&t, &c));
        assert_eq!(fork(&t, &c), Err(AepsError::NotEnabled));
    }

    #[test]
    fn fig3_simulated_by_pda() {
        let (aeps, t) = fig3();
        let red = aeps_to_pda(&aeps).unwrap();
        let (a, b, bot) = (Sym(0), Sym(1), Sym(2));
        let c1 = AepsConfig {
            state: StateId(0),
            stack: vec![a, b, a, bot],
            vals: vec![false, true, true],
        };
        let mut succ = red.instance.pda.succ(&red.encode(&c1), red.rule_letters[0]);
        let mut expect: Vec<PseudoConfig> = fork(&t, &c1).unwrap().iter().map(|c| red.encode(c)).collect();
        succ.sort_by(|a, b| a.stack.cmp(&b.stack));
        expect.sort_by(|a, b| a.stack.cmp(&b.stack));
        assert_eq!(succ, expect);
    }

    #[test]
    fn contradictory_guard_never_enabled() {
        let r = AepsRule {
            src: StateId(0),
            pop: Sym(0),
            guard: vec![(0, false), (0, true)],
            branches: vec![AepsBranch {
                dst: StateId(0),
                push: vec![Sym(0)],
                cmd: BTreeMap::new(),
            }],
        };
        for v in [false, true] {
            let c = AepsConfig {
                state: StateId(0),
                stack: vec![Sym(0)],
                vals: vec![v],
            };
            assert!(!enabled(&r, &c));
        }
    }

    #[test]
    fn normalisation_shape() {
        let (bot, a) = (Sym(0), Sym(1));
        let br = |dst: u32| AepsBranch {
            dst: StateId(dst),
            push: vec![a, bot],
            cmd: BTreeMap::new(),
        };
        let aeps = Aeps::new(
            vec!["p".into(), "q".into()],
            vec![],
            vec!["bot".into(), "A".into()],
            bot,
            vec![AepsRule {
                src: StateId(0),
                pop: bot,
                guard: vec![],
                branches: vec![br(0), br(1)],
            }],
            StateId(0),
            StateId(1),
        )
        .unwrap();
        assert!(matches!(aeps_to_pda(&aeps), Err(AepsError::NotNormalized(0))));
        let n = normalize_distinct_pushes(&aeps);
        assert!(n.has_distinct_pushes());
        assert_eq!(n.rules.len(), 2);
        assert_eq!(n.states[2], "g:mid:0:1");
        assert_eq!(n.stack[2], "#t:0:1");
        assert_eq!(n.rules[0].branches[1].push, vec![Sym(2), a, bot]);
        assert_eq!(n.rules[1].branches[0].dst, StateId(1));
        assert_eq!(normalize_distinct_pushes(&n), n);
    }

    #[test]
    fn neps_gives_deterministic_pda() {
        let aeps = Aeps::new(
            vec!["i".into(), "f".into()],
            vec!["x".into()],
            vec!["bot".into()],
            Sym(0),
            vec![AepsRule {
                src: StateId(0),
                pop: Sym(0),
                guard: vec![(0, false)],
                branches: vec![AepsBranch {
                    dst: StateId(1),
                    push: vec![Sym(0)],
                    cmd: BTreeMap::new(),
                }],
            }],
            StateId(0),
            StateId(1),
        )
        .unwrap();
        let red = aeps_to_pda(&aeps).unwrap();
        assert!(red.instance.pda.is_deterministic());
        assert_eq!(red.instance.pda.num_states(), 2 + 2 + 2);
        assert_eq!(red.instance.init_set().len(), 2);
    }
}
