//! Parsing expression grammars, deterministic pointer pushdown automata, and
//! the translations and simulations connecting them.

pub mod peg;
pub mod pppda;
pub mod translate;
pub mod closures;
pub mod cooksim;
pub mod gen;
pub mod words;

pub use closures::{CompositionSpec, Dpda, LabeledDfa};
pub use peg::{CnfGrammar, Expression, Grammar};
pub use pppda::{Configuration, Letter, Machine, RunOutcome};

/// `base`, primed until `taken` rejects it no longer.
pub(crate) fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    name
}

#[cfg(test)]
pub(crate) mod testing {
    use crate::cooksim::run_linear_table;
    use crate::pppda::{run_table, Machine, Table};

    /// A machine with its table built once, for running many words.
    pub(crate) struct Prepared(Table);

    impl Prepared {
        pub(crate) fn new(m: &Machine) -> Self {
            Prepared(Table::new(m).unwrap())
        }

        /// Direct run; words with letters outside the alphabet are rejected.
        pub(crate) fn direct(&self, w: &[char]) -> bool {
            self.0
                .encode(w)
                .is_ok_and(|tape| run_table(&self.0, tape, 10_000_000).outcome.accepted())
        }

        pub(crate) fn linear(&self, w: &[char]) -> bool {
            self.0
                .encode(w)
                .is_ok_and(|tape| run_linear_table(&self.0, &tape).outcome.accepted())
        }
    }
}
