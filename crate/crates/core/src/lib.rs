//! Adaptive synchronisation for pushdown automata whose stack the observer
//! can see.
//!
//! The pipeline lowers every problem variant to Special-Sync through the
//! gadgets in [`reductions`], builds the subset APS of [`aps`], and decides
//! it either by alternating saturation or, for deterministic PDAs, by the
//! sparse search of [`sparse`]. Witnesses are strategy trees
//! ([`witness`]) and are pulled back through every gadget.

pub mod aeps;
pub mod aps;
pub mod decide;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod oracle;
pub mod pda;
pub mod random;
pub mod reductions;
pub mod sparse;
pub mod witness;

pub use decide::{decide, DecideOptions, Decision, Solver};
pub use error::{AepsError, Error, ParseError, ReductionError, SolveError, ValidationError};
pub use format::{parse_document, Document, PdaDocument};
pub use pda::{Letter, Pda, PseudoConfig, Rule, StateId, StateSet, Sym, Word};
pub use reductions::{ProblemInstance, Variant};
pub use witness::{check_witness, StrategyTree, WitnessKind};
