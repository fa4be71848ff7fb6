//! Seeded generators for small random instances. The same seed always
//! yields the same instance.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aeps::{Aeps, AepsBranch, AepsRule};
use crate::aps::{Aps, ApsRule};
use crate::pda::{Pda, Rule, StateId, StateSet, Sym, Word};
use crate::sparse::nps::Nps;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Stack alphabet `A1 .. A{n-1} bot`; the bottom symbol is the last one.
fn stack_names(n: usize) -> Vec<String> {
    let mut v = names("A", n - 1);
    v.push("bot".into());
    v
}

/// A push word for popping `pop`, at most `max_len` symbols above the
/// bottom, respecting the bottom discipline.
pub fn push_word(rng: &mut impl Rng, num_syms: usize, bottom: Sym, pop: Sym, max_len: usize) -> Word {
    let others: Vec<Sym> = (0..num_syms).map(Sym::from_index).filter(|&s| s != bottom).collect();
    let len = if others.is_empty() { 0 } else { rng.gen_range(0..=max_len) };
    let mut w: Word = (0..len).map(|_| *others.choose(rng).unwrap()).collect();
    if pop == bottom {
        w.push(bottom);
    }
    w
}

/// A bottom-terminated stack with at most `max_len` symbols above `bottom`.
pub fn stack(rng: &mut impl Rng, num_syms: usize, bottom: Sym, max_len: usize) -> Word {
    push_word(rng, num_syms, bottom, bottom, max_len)
}

/// A random PDA with up to the given sizes (at least one of each). With
/// `deterministic`, each `(q, a, A)` gets at most one rule.
pub fn random_pda(rng: &mut impl Rng, max_states: usize, max_inputs: usize, max_syms: usize, deterministic: bool) -> Pda {
    let n = rng.gen_range(1..=max_states.max(1));
    let m = rng.gen_range(1..=max_inputs.max(1));
    let g = rng.gen_range(1..=max_syms.max(1));
    let bottom = Sym::from_index(g - 1);
    let mut rules = Vec::new();
    for q in 0..n {
        for a in 0..m {
            for s in 0..g {
                let count = if deterministic { rng.gen_range(0..=1) } else { rng.gen_range(0..=2) };
                for _ in 0..count {
                    let pop = Sym::from_index(s);
                    rules.push(Rule {
                        src: StateId::from_index(q),
                        letter: crate::pda::Letter::from_index(a),
                        pop,
                        dst: StateId::from_index(rng.gen_range(0..n)),
                        push: push_word(rng, g, bottom, pop, 2),
                    });
                }
            }
        }
    }
    rules.sort_by_key(|r| (r.src, r.letter, r.pop, r.dst, r.push.clone()));
    rules.dedup();
    Pda::new(names("q", n), names("a", m), stack_names(g), bottom, rules).expect("generated PDA is valid")
}

/// A non-empty random subset of the states of `pda`.
pub fn random_subset(rng: &mut impl Rng, num_states: usize) -> StateSet {
    let mut s: StateSet = (0..num_states).filter(|_| rng.gen_bool(0.5)).map(StateId::from_index).collect();
    if s.is_empty() {
        s.insert(StateId::from_index(rng.gen_range(0..num_states)));
    }
    s
}

pub fn random_nps(rng: &mut impl Rng, max_states: usize, max_syms: usize, max_rules: usize) -> Nps {
    let n = rng.gen_range(1..=max_states.max(1));
    let g = rng.gen_range(1..=max_syms.max(1));
    let bottom = Sym::from_index(g - 1);
    let r = rng.gen_range(0..=max_rules);
    let rules = (0..r)
        .map(|_| {
            let pop = Sym::from_index(rng.gen_range(0..g));
            (
                StateId::from_index(rng.gen_range(0..n)),
                pop,
                StateId::from_index(rng.gen_range(0..n)),
                push_word(rng, g, bottom, pop, 2),
            )
        })
        .collect();
    Nps::new(n, g, bottom, rules).expect("generated NPS is valid")
}

/// A few random target configurations for `nps`.
pub fn random_targets(rng: &mut impl Rng, nps: &Nps, max_count: usize, max_len: usize) -> BTreeSet<(StateId, Word)> {
    let c = rng.gen_range(1..=max_count.max(1));
    (0..c)
        .map(|_| {
            (
                StateId::from_index(rng.gen_range(0..nps.num_states)),
                stack(rng, nps.num_syms, nps.bottom, max_len),
            )
        })
        .collect()
}

/// A random APS; `max_branches` bounds the width of each rule.
pub fn random_aps(rng: &mut impl Rng, max_states: usize, max_syms: usize, max_rules: usize, max_branches: usize) -> Aps {
    let n = rng.gen_range(1..=max_states.max(1));
    let g = rng.gen_range(1..=max_syms.max(1));
    let bottom = Sym::from_index(g - 1);
    let r = rng.gen_range(1..=max_rules.max(1));
    let rules = (0..r)
        .map(|_| {
            let pop = Sym::from_index(rng.gen_range(0..g));
            let b = rng.gen_range(1..=max_branches.max(1));
            ApsRule {
                src: StateId::from_index(rng.gen_range(0..n)),
                pop,
                branches: (0..b)
                    .map(|_| (StateId::from_index(rng.gen_range(0..n)), push_word(rng, g, bottom, pop, 1)))
                    .collect(),
            }
        })
        .collect();
    let init = StateId::from_index(rng.gen_range(0..n));
    let fin = StateId::from_index(rng.gen_range(0..n));
    Aps::new(names("p", n), stack_names(g), bottom, rules, init, fin).expect("generated APS is valid")
}

/// A random AEPS. Branches of one rule push pairwise distinct words only
/// when `distinct` is set.
pub fn random_aeps(rng: &mut impl Rng, max_states: usize, max_vars: usize, max_syms: usize, max_rules: usize, distinct: bool) -> Aeps {
    let n = rng.gen_range(1..=max_states.max(1));
    let v = rng.gen_range(0..=max_vars);
    let g = rng.gen_range(1..=max_syms.max(1));
    let bottom = Sym::from_index(g - 1);
    let r = rng.gen_range(1..=max_rules.max(1));
    let bit = |rng: &mut dyn rand::RngCore| rng.gen_bool(0.5);
    let mut rules = Vec::new();
    for _ in 0..r {
        let pop = Sym::from_index(rng.gen_range(0..g));
        let guard: Vec<(usize, bool)> = if v == 0 {
            vec![]
        } else {
            (0..rng.gen_range(0..=2)).map(|_| (rng.gen_range(0..v), bit(rng))).collect()
        };
        let mut branches: Vec<AepsBranch> = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let push = push_word(rng, g, bottom, pop, 1);
            if distinct && branches.iter().any(|b| b.push == push) {
                continue;
            }
            let cmd: BTreeMap<usize, bool> = if v == 0 {
                BTreeMap::new()
            } else {
                (0..rng.gen_range(0..=2)).map(|_| (rng.gen_range(0..v), bit(rng))).collect()
            };
            branches.push(AepsBranch {
                dst: StateId::from_index(rng.gen_range(0..n)),
                push,
                cmd,
            });
        }
        rules.push(AepsRule {
            src: StateId::from_index(rng.gen_range(0..n)),
            pop,
            guard,
            branches,
        });
    }
    let init = StateId::from_index(rng.gen_range(0..n));
    let fin = StateId::from_index(rng.gen_range(0..n));
    Aeps::new(names("s", n), names("v", v), stack_names(g), bottom, rules, init, fin).expect("generated AEPS is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let a = random_pda(&mut rng(7), 5, 3, 3, true);
        let b = random_pda(&mut rng(7), 5, 3, 3, true);
        assert_eq!(a, b);
        assert_eq!(random_aps(&mut rng(3), 4, 3, 6, 3), random_aps(&mut rng(3), 4, 3, 6, 3));
    }

    #[test]
    fn deterministic_flag_holds() {
        let mut r = rng(1);
        for _ in 0..100 {
            assert!(random_pda(&mut r, 5, 2, 3, true).complete().is_deterministic());
        }
    }

    #[test]
    fn distinct_aeps() {
        let mut r = rng(2);
        for _ in 0..100 {
            assert!(random_aeps(&mut r, 4, 2, 3, 4, true).has_distinct_pushes());
        }
    }
}
