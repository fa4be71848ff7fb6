//! Instances shipped in the repository's `fixtures/` directory.

use crate::aeps::Aeps;
use crate::format::{parse_aeps, parse_pda, PdaDocument};
use crate::pda::{Pda, StateId};
use crate::reductions::{ProblemInstance, Variant};

pub const RUN4_TEXT: &str = include_str!("../../../fixtures/run4.pda");

/// `(name, text)` of every curated PDA instance, RUN4 first.
pub const CORPUS: [(&str, &str); 9] = [
    ("run4", RUN4_TEXT),
    ("swap", include_str!("../../../fixtures/corpus/swap.pda")),
    ("nondet", include_str!("../../../fixtures/corpus/nondet.pda")),
    ("nondet_no", include_str!("../../../fixtures/corpus/nondet_no.pda")),
    ("drain", include_str!("../../../fixtures/corpus/drain.pda")),
    ("split", include_str!("../../../fixtures/corpus/split.pda")),
    ("funnel", include_str!("../../../fixtures/corpus/funnel.pda")),
    ("partial_homing", include_str!("../../../fixtures/corpus/partial_homing.pda")),
    ("stack_sync", include_str!("../../../fixtures/corpus/stack_sync.pda")),
];

pub const AEPS: [(&str, &str); 4] = [
    ("neps_counter", include_str!("../../../fixtures/aeps/neps_counter.aeps")),
    ("two_vars", include_str!("../../../fixtures/aeps/two_vars.aeps")),
    ("contradiction", include_str!("../../../fixtures/aeps/contradiction.aeps")),
    ("one_step", include_str!("../../../fixtures/aeps/one_step.aeps")),
];

/// The running example as drawn, before completion.
pub fn run4() -> Pda {
    run4_document().pda
}

pub fn run4_document() -> PdaDocument {
    parse_pda(RUN4_TEXT).expect("RUN4 fixture parses")
}

pub fn corpus() -> Vec<(&'static str, PdaDocument)> {
    CORPUS
        .iter()
        .map(|&(n, t)| (n, parse_pda(t).unwrap_or_else(|e| panic!("fixture {n}: {e}"))))
        .collect()
}

/// `doc` posed as a `variant` instance, keeping the header's `I`, `s` and
/// `gamma` where they apply. A missing `s` becomes the last state; special
/// instances always start from the bottom symbol.
pub fn recast(doc: &PdaDocument, variant: &str) -> ProblemInstance {
    let h = doc.problem.as_ref();
    let n = doc.pda.num_states();
    let target = h.and_then(|h| h.target).unwrap_or(StateId::from_index(n - 1));
    let v = Variant::from_parts(variant, h.and_then(|h| h.init.clone()), Some(target), n).expect("known variant");
    let gamma = match (&v, h.and_then(|h| h.gamma.clone())) {
        (Variant::Special(..), _) | (_, None) => vec![doc.pda.bottom()],
        (_, Some(g)) => g,
    };
    ProblemInstance::new(doc.pda.clone(), v, gamma).expect("fixture instance is valid")
}

pub fn aeps(name: &str) -> Aeps {
    let (_, t) = AEPS.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no AEPS fixture `{name}`"));
    parse_aeps(t).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}
