use crate::peg::{accepts, CnfGrammar};
use crate::pppda::{default_step_limit, desugar_hat_moves, normalize, run_table, Table};

use super::{dppda_to_peg, peg_to_dppda, ExtractError};

/// A word on which the three engines of a round trip disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub word: String,
    pub grammar: bool,
    pub machine: bool,
    pub extracted: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundtripReport {
    pub words_checked: usize,
    pub disagreements: Vec<Disagreement>,
}

impl RoundtripReport {
    pub fn is_clean(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compiles `g`, normalizes the machine, extracts a grammar from it and
/// compares membership of every word under the grammar, the compiled
/// machine and the extracted grammar.
pub fn roundtrip_check<'w>(
    g: &CnfGrammar,
    words: impl IntoIterator<Item = &'w [char]>,
) -> Result<RoundtripReport, ExtractError> {
    let machine = desugar_hat_moves(&peg_to_dppda(g));
    let extracted = dppda_to_peg(&normalize(&machine))?;
    let table = Table::new(&machine).expect("hat moves expanded");
    let mut report = RoundtripReport::default();
    for w in words {
        report.words_checked += 1;
        let limit = default_step_limit(&machine, w.len());
        let by_grammar = accepts(g, w);
        let tape = table.encode(w).expect("words over the grammar's alphabet");
        let by_machine = run_table(&table, tape, limit).outcome.accepted();
        let by_extracted = accepts(&extracted, w);
        if by_grammar != by_machine || by_machine != by_extracted {
            report.disagreements.push(Disagreement {
                word: w.iter().collect(),
                grammar: by_grammar,
                machine: by_machine,
                extracted: by_extracted,
            });
        }
    }
    Ok(report)
}
