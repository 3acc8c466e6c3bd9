use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use anyhow::Result;
use pegmachine_core::cooksim::run_linear_table;
use pegmachine_core::gen::{random_cnf_grammar, random_word, rng, GenConfig};
use pegmachine_core::peg::{check_well_formed, interpret_naive, Expression, Grammar, Node, ParseOutcome, DEFAULT_BUDGET};
use pegmachine_core::pppda::{default_step_limit, run_table, Machine, RunOutcome, Table};
use pegmachine_core::translate::compile;
use rayon::prelude::*;

use crate::args::{FuzzArgs, FuzzEngine};
use crate::transform::extract_machine;
use crate::{Cli, EXIT_ACCEPT, EXIT_DIVERGENCE};

pub const ENGINES: [FuzzEngine; 5] = [
    FuzzEngine::Naive,
    FuzzEngine::Packrat,
    FuzzEngine::Direct,
    FuzzEngine::Cook,
    FuzzEngine::Extracted,
];

fn engine_name(e: FuzzEngine) -> &'static str {
    match e {
        FuzzEngine::Naive => "naive",
        FuzzEngine::Packrat => "packrat",
        FuzzEngine::Direct => "direct",
        FuzzEngine::Cook => "cook",
        FuzzEngine::Extracted => "extracted",
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub cases: usize,
    pub words: usize,
    pub max_len: usize,
    pub gen: GenConfig,
    /// Clause budget of the naive recognizer.
    pub budget: u64,
    /// Move limit of the direct engine; scaled to the machine when absent.
    pub step_limit: Option<u64>,
    /// Engine whose answers are flipped on odd-length words.
    pub corrupt: Option<FuzzEngine>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 1,
            cases: 200,
            words: 16,
            max_len: 8,
            gen: GenConfig::default(),
            budget: DEFAULT_BUDGET,
            step_limit: None,
            corrupt: None,
        }
    }
}

impl FuzzConfig {
    pub fn from_args(cli: &Cli, f: &FuzzArgs) -> Self {
        FuzzConfig {
            seed: cli.seed,
            cases: f.cases,
            words: f.words,
            max_len: f.max_len,
            gen: GenConfig {
                max_nonterminals: f.max_nonterminals.max(1),
                alphabet_size: f.alphabet_size,
                ..GenConfig::default()
            },
            budget: cli.budget.unwrap_or(DEFAULT_BUDGET),
            step_limit: cli.step_limit,
            corrupt: f.corrupt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub index: usize,
    pub grammar: Grammar,
    pub words: Vec<Vec<char>>,
}

/// The case sequence for a seed, drawn from one generator in order.
pub fn generate(cfg: &FuzzConfig) -> Vec<Case> {
    let mut r = rng(cfg.seed);
    let alphabet = cfg.gen.alphabet();
    (0..cfg.cases)
        .map(|index| {
            let grammar = random_cnf_grammar(&mut r, &cfg.gen).into_grammar();
            let words = (0..cfg.words).map(|_| random_word(&mut r, &alphabet, cfg.max_len)).collect();
            Case { index, grammar, words }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Accept,
    Reject,
    Budget,
    Error(String),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Accept => f.write_str("accept"),
            Answer::Reject => f.write_str("reject"),
            Answer::Budget => f.write_str("budget"),
            Answer::Error(e) => write!(f, "error({e})"),
        }
    }
}

/// One grammar made ready for all five engines.
struct Engines<'g> {
    grammar: &'g Grammar,
    machine: Result<(Machine, Table), String>,
    extracted: Result<Grammar, String>,
}

impl<'g> Engines<'g> {
    fn new(grammar: &'g Grammar) -> Self {
        let compiled = compile(grammar).map_err(|e| e.to_string());
        let extracted = compiled
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|m| extract_machine(m).map_err(|e| format!("{e:#}")));
        let machine = compiled.and_then(|m| Table::new(&m).map(|t| (m, t)).map_err(|e| e.to_string()));
        Engines {
            grammar,
            machine,
            extracted,
        }
    }

    fn answers(&self, cfg: &FuzzConfig, word: &[char]) -> [Answer; 5] {
        let n = word.len();
        let parse = |g: &Grammar, budget| match interpret_naive(g, g.rule(g.axiom()), word, 0, budget) {
            ParseOutcome::Consumed(k) if k == n => Answer::Accept,
            ParseOutcome::Diverged => Answer::Budget,
            _ => Answer::Reject,
        };
        let packrat = |g: &Grammar| {
            if pegmachine_core::peg::accepts(g, word) {
                Answer::Accept
            } else {
                Answer::Reject
            }
        };
        let (direct, cook) = match &self.machine {
            Ok((m, t)) => {
                let tape = t.encode(word).expect("generated letters");
                let limit = cfg.step_limit.unwrap_or_else(|| default_step_limit(m, n));
                let direct = match run_table(t, tape.clone(), limit).outcome {
                    RunOutcome::Accept => Answer::Accept,
                    RunOutcome::Reject(_) => Answer::Reject,
                    RunOutcome::BudgetExhausted => Answer::Budget,
                };
                let cook = if run_linear_table(t, &tape).outcome.accepted() {
                    Answer::Accept
                } else {
                    Answer::Reject
                };
                (direct, cook)
            }
            Err(e) => (Answer::Error(e.clone()), Answer::Error(e.clone())),
        };
        let extracted = match &self.extracted {
            Ok(g) => packrat(g),
            Err(e) => Answer::Error(e.clone()),
        };
        let mut answers = [parse(self.grammar, cfg.budget), packrat(self.grammar), direct, cook, extracted];
        if let Some(bad) = cfg.corrupt.filter(|_| n % 2 == 1) {
            let i = ENGINES.iter().position(|&e| e == bad).expect("listed");
            answers[i] = match answers[i] {
                Answer::Accept => Answer::Reject,
                Answer::Reject => Answer::Accept,
                ref other => other.clone(),
            };
        }
        answers
    }
}

fn disagree(answers: &[Answer; 5]) -> bool {
    answers.iter().any(|a| *a != answers[0])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub case: usize,
    pub grammar: Grammar,
    pub word: Vec<char>,
    pub answers: [Answer; 5],
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word: String = self.word.iter().collect();
        writeln!(f, "case {} word {word:?}", self.case)?;
        let cols: Vec<String> = ENGINES
            .iter()
            .zip(&self.answers)
            .map(|(&e, a)| format!("{}={a}", engine_name(e)))
            .collect();
        writeln!(f, "{}", cols.join(" "))?;
        write!(f, "{}", self.grammar)
    }
}

/// The first word of the case on which the engines disagree.
pub fn check_case(cfg: &FuzzConfig, case: &Case) -> Option<Divergence> {
    let engines = Engines::new(&case.grammar);
    case.words.iter().find_map(|w| {
        let answers = engines.answers(cfg, w);
        disagree(&answers).then(|| Divergence {
            case: case.index,
            grammar: case.grammar.clone(),
            word: w.clone(),
            answers,
        })
    })
}

fn diverges(cfg: &FuzzConfig, g: &Grammar, word: &[char]) -> Option<[Answer; 5]> {
    let answers = Engines::new(g).answers(cfg, word);
    disagree(&answers).then_some(answers)
}

/// Rules reachable from the axiom.
fn reachable(g: &Grammar) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut work = vec![g.axiom()];
    while let Some(nt) = work.pop() {
        if !seen.insert(g.name(nt).to_string()) {
            continue;
        }
        let mut nodes = vec![g.rule(nt)];
        while let Some(id) = nodes.pop() {
            match *g.node(id) {
                Node::Nonterminal(m) => work.push(m),
                Node::Sequence(a, b) | Node::Choice(a, b) => nodes.extend([a, b]),
                Node::Not(a) | Node::Star(a) | Node::Plus(a) | Node::Optional(a) | Node::And(a) => nodes.push(a),
                _ => {}
            }
        }
    }
    seen
}

/// `g` with the rule for `name` replaced by `""` and unreachable rules
/// dropped, if that is still a well-formed grammar.
fn without_rule(g: &Grammar, name: &str) -> Option<Grammar> {
    let rules: Vec<(String, Expression)> = g
        .rules()
        .into_iter()
        .map(|(n, e)| if n == name { (n, Expression::Empty) } else { (n, e) })
        .collect();
    let emptied = Grammar::new(rules, g.axiom_name(), g.alphabet().iter().copied()).ok()?;
    let keep = reachable(&emptied);
    let rules = emptied.rules().into_iter().filter(|(n, _)| keep.contains(n)).collect();
    let pruned = Grammar::new(rules, g.axiom_name(), g.alphabet().iter().copied()).ok()?;
    check_well_formed(&pruned).well_formed.then_some(pruned)
}

/// Greedily shortens the word (prefixes first, then single-letter
/// deletions), then empties rules, keeping
/// each change under which the engines still disagree.
pub fn shrink(cfg: &FuzzConfig, d: &Divergence) -> Divergence {
    let mut d = d.clone();
    'word: loop {
        let n = d.word.len();
        let prefixes = (0..n).map(|k| d.word[..k].to_vec());
        let deletions = (0..n).map(|i| [&d.word[..i], &d.word[i + 1..]].concat());
        for w in prefixes.chain(deletions).collect::<Vec<_>>() {
            if let Some(answers) = diverges(cfg, &d.grammar, &w) {
                d.word = w;
                d.answers = answers;
                continue 'word;
            }
        }
        break;
    }
    'rules: loop {
        for (name, body) in d.grammar.rules() {
            if body == Expression::Empty {
                continue;
            }
            let Some(g) = without_rule(&d.grammar, &name) else { continue };
            if let Some(answers) = diverges(cfg, &g, &d.word) {
                d.grammar = g;
                d.answers = answers;
                continue 'rules;
            }
        }
        break;
    }
    d
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport {
    pub cases: usize,
    pub words: usize,
    /// First divergence of each divergent case, by case index.
    pub divergences: Vec<Divergence>,
}

/// Generates the cases in order and checks them in parallel.
pub fn run_fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let cases = generate(cfg);
    let divergences: Vec<Divergence> = cases.par_iter().filter_map(|c| check_case(cfg, c)).collect();
    FuzzReport {
        cases: cases.len(),
        words: cases.iter().map(|c| c.words.len()).sum(),
        divergences,
    }
}

pub fn fuzz(cfg: &FuzzConfig, out: &mut dyn Write) -> Result<i32> {
    let report = run_fuzz(cfg);
    writeln!(
        out,
        "seed={} cases={} words={} divergent-cases={}",
        cfg.seed,
        report.cases,
        report.words,
        report.divergences.len()
    )?;
    let Some(first) = report.divergences.first() else {
        return Ok(EXIT_ACCEPT);
    };
    writeln!(out, "divergence")?;
    writeln!(out, "{first}")?;
    writeln!(out, "shrunk")?;
    writeln!(out, "{}", shrink(cfg, first))?;
    Ok(EXIT_DIVERGENCE)
}
