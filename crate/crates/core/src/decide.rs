//! End-to-end decision: lower any variant to Special-Sync, solve it, and
//! pull the witness back to the original instance.

use crate::aps::{aps_emptiness, build_aps, extract_run, run_to_supersync};
use crate::error::{Error, ReductionError, SolveError};
use crate::pda::{Pda, PseudoConfig, StateId, StateSet};
use crate::reductions::{pull_back, reduce, ProblemInstance, ReductionOutput, ReductionTag, Variant};
use crate::sparse::{det_special_sync, SparseOptions};
use crate::witness::{check_witness, StrategyTree, WitnessKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Solver {
    /// Sparse search for deterministic PDAs with a small `I`, saturation
    /// otherwise.
    #[default]
    Auto,
    Sparse,
    Saturation,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Auto => "auto",
            Solver::Sparse => "sparse",
            Solver::Saturation => "saturation",
        }
    }
}

/// Largest `|I|` for which [`Solver::Auto`] picks the sparse search. Its
/// cost grows with the number of structured trees, which explodes in `k`.
pub const AUTO_SPARSE_MAX_K: usize = 6;

#[derive(Clone, Debug, Default)]
pub struct DecideOptions {
    pub solver: Solver,
    /// Leaf bound for the sparse search (default `|I|`).
    pub k: Option<usize>,
    /// Bound on subset states and on product automaton states.
    pub state_budget: Option<usize>,
}

/// One gadget application on the way to Special-Sync, with the size of the
/// PDA it produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub tag: ReductionTag,
    pub to: &'static str,
    pub states: usize,
    pub inputs: usize,
    pub syms: usize,
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub answer: bool,
    /// A checked witness for the original instance, when the answer is YES
    /// and pull-back succeeded.
    pub witness: Option<StrategyTree>,
    /// Why a YES answer has no witness.
    pub pull_back_error: Option<ReductionError>,
    pub trace: Vec<TraceStep>,
    /// The solver that actually ran.
    pub solver: Solver,
    /// Subset states of the APS that was solved.
    pub aps_states: usize,
    /// The Special-Sync instance that was solved.
    pub special: ProblemInstance,
}

/// The gadget chain from `inst` down to Special-Sync, and the final
/// instance. A Super-Sync instance whose start stack is already the bottom
/// symbol is a Special-Sync instance as it stands, and is relabelled
/// without a gadget.
pub fn lower(inst: &ProblemInstance) -> Result<(Vec<ReductionOutput>, ProblemInstance), ReductionError> {
    let mut chain: Vec<ReductionOutput> = Vec::new();
    let mut cur = inst.clone();
    loop {
        let tag = match &cur.variant {
            Variant::Special(..) => break,
            Variant::Super(i, s) if cur.stack == [cur.pda.bottom()] => {
                cur = ProblemInstance::new(cur.pda.complete(), Variant::Special(i.clone(), *s), cur.stack.clone())?;
                break;
            }
            Variant::Super(..) => ReductionTag::SuperToSpecial,
            Variant::Given(..) => ReductionTag::GivenToSuper,
            Variant::Ada | Variant::SubsetAda(_) => ReductionTag::SubsetToGiven,
            Variant::Homing => ReductionTag::HomingToGiven,
            Variant::SubsetHoming(_) => ReductionTag::SubsetHomingToHoming,
        };
        let out = reduce(tag, &cur)?;
        cur = out.instance.clone();
        chain.push(out);
    }
    Ok((chain, cur))
}

#[derive(Clone, Debug)]
pub struct SpecialAnswer {
    pub answer: bool,
    pub witness: Option<StrategyTree>,
    pub solver: Solver,
    pub aps_states: usize,
}

/// Is there a super-synchroniser from `(init, bot)` to `target`?
pub fn solve_special(pda: &Pda, init: &StateSet, target: StateId, opts: &DecideOptions) -> Result<SpecialAnswer, SolveError> {
    let pda = pda.complete();
    let det = pda.is_deterministic();
    let solver = match opts.solver {
        Solver::Auto if det && init.len() <= AUTO_SPARSE_MAX_K => Solver::Sparse,
        Solver::Auto => Solver::Saturation,
        Solver::Sparse if !det => return Err(SolveError::NotDeterministic),
        s => s,
    };
    if solver == Solver::Sparse {
        let r = det_special_sync(
            &pda,
            init,
            target,
            &SparseOptions {
                state_budget: opts.state_budget,
                k: opts.k,
            },
        )?;
        return Ok(SpecialAnswer {
            answer: r.accepted,
            witness: r.witness,
            solver,
            aps_states: r.aps_states,
        });
    }
    let cap = det.then_some(init.len());
    let sa = build_aps(&pda, init, target, cap, opts.state_budget)?;
    let sat = aps_emptiness(&sa.aps);
    let witness = if sat.accepted {
        let run = extract_run(&sa.aps, &sat).ok_or_else(|| SolveError::NotAnApsRun("no run could be extracted".into()))?;
        let tree = run_to_supersync(&sa, &run)?;
        let root = PseudoConfig::new(&pda, init.clone(), vec![pda.bottom()])?;
        check_witness(&pda, &root, WitnessKind::SuperSynchroniser(target), &tree).map_err(|v| SolveError::NotAnApsRun(v.to_string()))?;
        Some(tree)
    } else {
        None
    };
    Ok(SpecialAnswer {
        answer: sat.accepted,
        witness,
        solver,
        aps_states: sa.aps.num_states(),
    })
}

pub fn decide(inst: &ProblemInstance, opts: &DecideOptions) -> Result<Decision, Error> {
    let (chain, special) = lower(inst)?;
    let (Some(init), Some(target)) = (special.variant.init(), special.variant.target()) else {
        unreachable!("lowering ends in a special instance");
    };
    let ans = solve_special(&special.pda, init, target, opts)?;
    let trace = chain
        .iter()
        .map(|o| TraceStep {
            tag: o.tag,
            to: o.instance.variant.name(),
            states: o.instance.pda.num_states(),
            inputs: o.instance.pda.num_inputs(),
            syms: o.instance.pda.num_syms(),
        })
        .collect();
    let mut witness = ans.witness;
    let mut pull_back_error = None;
    if let Some(mut w) = witness.take() {
        let mut ok = true;
        for out in chain.iter().rev() {
            match pull_back(out, &w) {
                Ok(t) => w = t,
                Err(e) => {
                    pull_back_error = Some(e);
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            inst.check(&w)?;
            witness = Some(w);
        }
    }
    Ok(Decision {
        answer: ans.answer,
        witness,
        pull_back_error,
        trace,
        solver: ans.solver,
        aps_states: ans.aps_states,
        special,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{corpus, run4_document};

    #[test]
    fn run4_special_yes_with_witness() {
        let inst = run4_document().instance(None).unwrap();
        let d = decide(&inst, &DecideOptions::default()).unwrap();
        assert!(d.answer);
        assert!(d.trace.is_empty());
        assert_eq!(d.solver, Solver::Sparse);
        assert_eq!(inst.check(d.witness.as_ref().unwrap()), Ok(()));
    }

    #[test]
    fn solvers_agree_on_run4() {
        let inst = run4_document().instance(None).unwrap();
        for solver in [Solver::Sparse, Solver::Saturation] {
            let d = decide(&inst, &DecideOptions { solver, ..Default::default() }).unwrap();
            assert!(d.answer, "{solver:?}");
            assert!(d.witness.is_some());
        }
    }

    #[test]
    fn sparse_refuses_nondeterminism() {
        let (_, doc) = corpus().into_iter().find(|(n, _)| *n == "nondet").unwrap();
        let inst = doc.instance(None).unwrap();
        let e = decide(
            &inst,
            &DecideOptions {
                solver: Solver::Sparse,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert_eq!(e, Error::Solve(SolveError::NotDeterministic));
    }

    #[test]
    fn lowering_paths() {
        let doc = run4_document();
        let tags = |v: &str| lower(&doc.instance(Some(v)).unwrap()).unwrap().0.iter().map(|o| o.tag).collect::<Vec<_>>();
        assert_eq!(tags("special"), vec![]);
        assert_eq!(tags("super"), vec![]);
        assert_eq!(tags("given"), vec![ReductionTag::GivenToSuper]);
        assert_eq!(tags("ada"), vec![ReductionTag::SubsetToGiven, ReductionTag::GivenToSuper]);
        assert_eq!(tags("homing"), vec![ReductionTag::HomingToGiven, ReductionTag::GivenToSuper]);
        assert_eq!(
            tags("subset-homing"),
            // the marker stays on the stack, so the last step needs a gadget
            vec![
                ReductionTag::SubsetHomingToHoming,
                ReductionTag::HomingToGiven,
                ReductionTag::GivenToSuper,
                ReductionTag::SuperToSpecial
            ]
        );
    }
}
