//! Parsing expression grammars: syntax, desugaring, well-formedness,
//! normal form, and two recognizers.

mod ast;
mod cnf;
mod desugar;
mod interp;
mod text;
mod wf;

pub use ast::{valid_letter, valid_name, Expression, Grammar, GrammarError, Node, NodeId, NtId};
pub use cnf::{to_cnf, CnfError, CnfGrammar, CnfRule};
pub use desugar::desugar;
pub use interp::{
    accepts, accepts_prefix_mode, convert_acceptance, interpret_naive, interpret_packrat, naive_counted,
    AcceptanceMode, Packrat, ParseOutcome, DEFAULT_BUDGET,
};
pub use text::{parse_grammar_text, GrammarTextError};
pub use wf::{check_well_formed, OutcomeTable, Outcomes, WfReport};
