use std::io::Write;
use std::path::Path;

use anyhow::{bail, Result};
use pegmachine_core::closures::{dpda_budget, dpda_run, reg_closure_machine, DpdaOutcome};
use pegmachine_core::cooksim::{run_linear_table, work_bound, LinearOutcome};
use pegmachine_core::peg::{check_well_formed, naive_counted, Grammar, Packrat, ParseOutcome, DEFAULT_BUDGET};
use pegmachine_core::pppda::{
    default_step_limit, desugar_hat_moves, run_table, run_traced, EventKind, Machine, RunOutcome, Table,
};
use pegmachine_core::translate::compile;

use crate::args::{EngineChoice, RunArgs};
use crate::load::{load, read, Loaded};
use crate::transform::extract_machine;
use crate::{Cli, EXIT_ACCEPT, EXIT_BUDGET, EXIT_REJECT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
    Budget,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Accept => EXIT_ACCEPT,
            Verdict::Reject => EXIT_REJECT,
            Verdict::Budget => EXIT_BUDGET,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::Budget => "budget-exhausted",
        }
    }
}

/// Verdict plus `key=value` counters.
pub struct Outcome {
    pub verdict: Verdict,
    pub stats: Vec<(String, String)>,
    pub trace: Vec<String>,
}

impl Outcome {
    fn new(verdict: Verdict) -> Self {
        Outcome {
            verdict,
            stats: Vec::new(),
            trace: Vec::new(),
        }
    }

    fn stat(&mut self, key: &str, value: impl ToString) {
        self.stats.push((key.to_string(), value.to_string()));
    }
}

fn read_word(r: &RunArgs) -> Result<Vec<char>> {
    let text = match (&r.word, &r.input_file) {
        (Some(w), _) => w.clone(),
        (None, Some(p)) => {
            let mut t = read(p)?;
            if t.ends_with('\n') {
                t.pop();
                if t.ends_with('\r') {
                    t.pop();
                }
            }
            t
        }
        (None, None) => String::new(),
    };
    Ok(text.chars().collect())
}

fn check_letters(alphabet: &[char], word: &[char]) -> Result<()> {
    if let Some(c) = word.iter().find(|c| !alphabet.contains(c)) {
        bail!("letter {c:?} is not in the input alphabet");
    }
    Ok(())
}

fn well_formed(g: &Grammar) -> Result<()> {
    let r = check_well_formed(g);
    if !r.well_formed {
        match r.offending_cycle {
            Some(c) => bail!("grammar is not well-formed: left-recursive cycle {}", c.join(" -> ")),
            None => bail!("grammar is not well-formed"),
        }
    }
    Ok(())
}

pub fn run(cli: &Cli, r: &RunArgs, trace: bool, out: &mut dyn Write) -> Result<i32> {
    let word = read_word(r)?;
    let o = decide(cli, &r.path, &word, trace)?;
    writeln!(out, "{}", o.verdict.label())?;
    for line in &o.trace {
        writeln!(out, "{line}")?;
    }
    if r.stats {
        writeln!(out, "---")?;
        for (k, v) in &o.stats {
            writeln!(out, "{k}={v}")?;
        }
    }
    Ok(o.verdict.exit_code())
}

/// Loads `path` and decides `word` with the engine selected on `cli`.
/// Grammars are compiled for machine engines and machines extracted for
/// grammar engines; tracing needs a machine engine.
pub fn decide(cli: &Cli, path: &Path, word: &[char], trace: bool) -> Result<Outcome> {
    let machine = match load(path)? {
        Loaded::Grammar(g) => {
            well_formed(&g)?;
            check_letters(g.alphabet(), word)?;
            match cli.engine {
                Some(EngineChoice::Direct) | Some(EngineChoice::Cook) => compile(&g)?,
                None if trace => compile(&g)?,
                engine => {
                    if trace {
                        bail!("tracing needs a machine engine");
                    }
                    return Ok(on_grammar(&g, word, engine.unwrap_or(EngineChoice::Packrat), cli.budget));
                }
            }
        }
        Loaded::Machine(m) => m,
        Loaded::Composition(spec) => reg_closure_machine(&spec)?,
        Loaded::Dpda(d) => {
            if trace {
                bail!("tracing is not available for DPDA files");
            }
            check_letters(d.alphabet(), word)?;
            let limit = cli.step_limit.unwrap_or_else(|| dpda_budget(word));
            let mut o = Outcome::new(match dpda_run(&d, word, limit) {
                DpdaOutcome::Accept => Verdict::Accept,
                DpdaOutcome::Reject => Verdict::Reject,
                DpdaOutcome::BudgetExhausted => Verdict::Budget,
            });
            o.stat("engine", "dpda");
            o.stat("n", word.len());
            o.stat("step_limit", limit);
            return Ok(o);
        }
        Loaded::Dfa(_) => bail!("a labeled DFA has no input alphabet to run on"),
    };
    check_letters(machine.alphabet(), word)?;
    let machine = desugar_hat_moves(&machine);
    match cli.engine {
        Some(e @ (EngineChoice::Naive | EngineChoice::Packrat)) => {
            if trace {
                bail!("tracing needs a machine engine");
            }
            let g = extract_machine(&machine)?;
            Ok(on_grammar(&g, word, e, cli.budget))
        }
        Some(EngineChoice::Cook) if !trace => on_machine_linear(&machine, word),
        _ => on_machine_direct(&machine, word, cli.step_limit, trace),
    }
}

fn on_grammar(g: &Grammar, word: &[char], engine: EngineChoice, budget: Option<u64>) -> Outcome {
    let root = g.rule(g.axiom());
    let mut o;
    match engine {
        EngineChoice::Naive => {
            let budget = budget.unwrap_or(DEFAULT_BUDGET);
            let (p, calls) = naive_counted(g, root, word, 0, budget);
            o = Outcome::new(grammar_verdict(p, word.len()));
            o.stat("engine", "naive");
            o.stat("n", word.len());
            o.stat("naive.calls", calls);
            o.stat("naive.budget", budget);
        }
        _ => {
            let mut p = Packrat::new(g, word);
            let r = p.eval(root, 0);
            o = Outcome::new(grammar_verdict(r, word.len()));
            o.stat("engine", "packrat");
            o.stat("n", word.len());
            o.stat("packrat.computations", p.computations);
            o.stat("packrat.lookups", p.lookups);
        }
    }
    o
}

fn grammar_verdict(p: ParseOutcome, n: usize) -> Verdict {
    match p {
        ParseOutcome::Consumed(k) if k == n => Verdict::Accept,
        ParseOutcome::Diverged => Verdict::Budget,
        _ => Verdict::Reject,
    }
}

fn machine_stats(o: &mut Outcome, m: &Machine, engine: &str, n: usize) {
    o.stat("engine", engine);
    o.stat("n", n);
    o.stat("states", m.state_count());
    o.stat("symbols", m.symbol_count());
}

fn linear_stats(o: &mut Outcome, m: &Machine, table: &Table, tape: &[usize], n: usize) -> LinearOutcome {
    let r = run_linear_table(table, tape);
    o.stat("cook.ops", r.ops);
    o.stat("cook.entries", r.entries);
    o.stat("cook.bound", work_bound(m, n));
    r.outcome
}

fn on_machine_linear(m: &Machine, word: &[char]) -> Result<Outcome> {
    let table = Table::new(m)?;
    let tape = table.encode(word).expect("letters checked");
    let mut o = Outcome::new(Verdict::Reject);
    machine_stats(&mut o, m, "cook", word.len());
    let outcome = linear_stats(&mut o, m, &table, &tape, word.len());
    match outcome {
        LinearOutcome::Accept => o.verdict = Verdict::Accept,
        LinearOutcome::Reject(why) => o.stat("reason", format!("{why:?}").to_lowercase()),
    }
    Ok(o)
}

fn on_machine_direct(m: &Machine, word: &[char], step_limit: Option<u64>, trace: bool) -> Result<Outcome> {
    let table = Table::new(m)?;
    let tape = table.encode(word).expect("letters checked");
    let limit = step_limit.unwrap_or_else(|| default_step_limit(m, word.len()));
    let mut o = Outcome::new(Verdict::Reject);
    let (report, events) = if trace {
        run_traced(m, word, limit)?
    } else {
        (run_table(&table, tape.clone(), limit), Vec::new())
    };
    for e in &events {
        let kind = match e.kind {
            EventKind::Push => "push",
            EventKind::Pop => "pop",
        };
        let popped = match (e.popped, e.pop_direction) {
            (Some((z, i)), Some(d)) => format!("{}@{i}:{}", m.symbol_name(z), d.keyword()),
            _ => "-".to_string(),
        };
        o.trace.push(format!(
            "{}\t{kind}\t{}\t{}\t{}\t{popped}\t{}",
            e.step,
            m.state_name(e.after.state),
            e.after.head,
            e.after.stack.len(),
            e.after.display(m)
        ));
    }
    machine_stats(&mut o, m, "direct", word.len());
    o.stat("direct.steps", report.steps);
    o.stat("step_limit", limit);
    match report.outcome {
        RunOutcome::Accept => o.verdict = Verdict::Accept,
        RunOutcome::BudgetExhausted => o.verdict = Verdict::Budget,
        RunOutcome::Reject(why) => o.stat("reason", format!("{why:?}").to_lowercase()),
    }
    linear_stats(&mut o, m, &table, &tape, word.len());
    Ok(o)
}
