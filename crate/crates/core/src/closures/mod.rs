//! Closure constructions: Boolean combinations of grammars, classical DPDAs,
//! concatenation of a DPDA language with a machine language, and regular
//! compositions of DPDA languages.

mod boolean;
mod concat;
mod dfa;
mod dpda;
mod embed;
mod regclosure;
mod text;

pub use boolean::{pel_complement, pel_intersection, pel_union};
pub use concat::{left_concat_dcfl, ConcatError};
pub use dfa::{parse_dfa_text, DfaError, LabeledDfa};
pub use dpda::{dpda_accepts, dpda_budget, dpda_run, parse_dpda_text, Dpda, DpdaError, DpdaMove, DpdaOutcome};
pub use regclosure::{brute_force_membership, parse_composition, reg_closure_machine, CompositionError, CompositionSpec};
pub use text::TextError;
