//! Non-alternating pushdown systems.

use crate::error::ValidationError;
use crate::pda::{check_push_discipline, StateId, Sym, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NpsRule {
    pub src: StateId,
    pub pop: Sym,
    pub dst: StateId,
    pub push: Word,
    /// Index of the rule this one was derived from (the APS rule for
    /// [`crate::aps::derive_nps`], its own index otherwise).
    pub origin: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nps {
    pub num_states: usize,
    pub num_syms: usize,
    pub bottom: Sym,
    pub rules: Vec<NpsRule>,
}

impl Nps {
    /// Builds an NPS from `(src, pop, dst, push)` tuples.
    pub fn new(num_states: usize, num_syms: usize, bottom: Sym, rules: Vec<(StateId, Sym, StateId, Word)>) -> Result<Self, ValidationError> {
        if bottom.index() >= num_syms {
            return Err(ValidationError::UnknownId("bottom symbol".into()));
        }
        let mut out = Vec::with_capacity(rules.len());
        for (i, (src, pop, dst, push)) in rules.into_iter().enumerate() {
            if src.index() >= num_states || dst.index() >= num_states {
                return Err(ValidationError::UnknownId(format!("state in NPS rule {i}")));
            }
            if pop.index() >= num_syms || push.iter().any(|s| s.index() >= num_syms) {
                return Err(ValidationError::UnknownId(format!("stack symbol in NPS rule {i}")));
            }
            check_push_discipline(bottom, pop, &push).map_err(|reason| ValidationError::BottomDiscipline {
                rule: format!("NPS rule {i}"),
                reason,
            })?;
            out.push(NpsRule {
                src,
                pop,
                dst,
                push,
                origin: i,
            });
        }
        Ok(Nps {
            num_states,
            num_syms,
            bottom,
            rules: out,
        })
    }

    /// One-step successors of `(q, stack)` as `(rule index, state, stack)`.
    pub fn successors(&self, q: StateId, stack: &[Sym]) -> Vec<(usize, StateId, Word)> {
        let Some((top, rest)) = stack.split_first() else {
            return Vec::new();
        };
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.src == q && r.pop == *top)
            .map(|(i, r)| {
                let mut w = r.push.clone();
                w.extend_from_slice(rest);
                (i, r.dst, w)
            })
            .collect()
    }
}
