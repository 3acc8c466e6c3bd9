//! Translations between grammars in normal form and machines, in both
//! directions.

mod compile;
mod extract;
mod roundtrip;

pub use compile::{compile, peg_to_dppda, AuxSlot, PegStateName, Sign};
pub use extract::{dppda_to_peg, ExtractError, ExtractedNonterminal};
pub use roundtrip::{roundtrip_check, Disagreement, RoundtripReport};
