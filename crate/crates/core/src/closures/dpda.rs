use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::text::{one_arg, syntax, tokens, TextError};
use crate::pppda::{parse_alphabet, valid_machine_name};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpdaError {
    #[error("duplicate transition for ({0}, {1}, {2})")]
    Duplicate(String, String, String),
    #[error("state `{0}` has both an ε-move and a letter move on `{1}`")]
    Nondeterministic(String, String),
    #[error("letter `{0}` is outside the alphabet")]
    UnknownLetter(char),
    #[error("invalid name `{0}`")]
    InvalidName(String),
}

/// A transition target: the next state and the string replacing the top
/// symbol, new top first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpdaMove {
    pub target: usize,
    pub push: Vec<usize>,
}

/// A classical deterministic pushdown automaton with ε-moves, accepting by
/// final state once the input is read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dpda {
    states: Vec<String>,
    symbols: Vec<String>,
    alphabet: Vec<char>,
    finals: BTreeSet<usize>,
    initial: usize,
    bottom: usize,
    delta: BTreeMap<(usize, Option<char>, usize), DpdaMove>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpdaOutcome {
    Accept,
    Reject,
    BudgetExhausted,
}

impl Dpda {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn symbol_name(&self, z: usize) -> &str {
        &self.symbols[z]
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.finals.contains(&s)
    }

    pub fn delta(&self) -> &BTreeMap<(usize, Option<char>, usize), DpdaMove> {
        &self.delta
    }

    pub fn get(&self, s: usize, a: Option<char>, z: usize) -> Option<&DpdaMove> {
        self.delta.get(&(s, a, z))
    }

    /// A machine for the same language minus the empty word.
    pub fn without_empty_word(&self) -> Dpda {
        let n = self.states.len();
        let mut b = DpdaBuilder::new(self.alphabet.iter().copied());
        for name in &self.states {
            b.state(&format!("{name}:0"));
        }
        for name in &self.states {
            b.state(&format!("{name}:1"));
        }
        for name in &self.symbols {
            b.symbol(name);
        }
        b.initial = Some(self.initial);
        b.bottom = Some(self.bottom);
        b.finals = self.finals.iter().map(|&f| f + n).collect();
        for (&(s, a, z), mv) in &self.delta {
            for read in [0, 1] {
                let after = if a.is_some() { 1 } else { read };
                let mv = DpdaMove {
                    target: mv.target + after * n,
                    push: mv.push.clone(),
                };
                b.delta.insert((s + read * n, a, z), mv);
            }
        }
        b.build().expect("product of a valid automaton")
    }
}

/// Runs `d` on `word`; every move counts against `step_limit`.
pub fn dpda_run(d: &Dpda, word: &[char], step_limit: u64) -> DpdaOutcome {
    let mut state = d.initial;
    let mut stack = vec![d.bottom];
    let mut pos = 0;
    let mut steps = 0u64;
    loop {
        if pos == word.len() && d.is_final(state) {
            return DpdaOutcome::Accept;
        }
        let Some(&top) = stack.last() else { return DpdaOutcome::Reject };
        let (mv, consumed) = match d.get(state, None, top) {
            Some(mv) => (mv, false),
            None => match word.get(pos).and_then(|&c| d.get(state, Some(c), top)) {
                Some(mv) => (mv, true),
                None => return DpdaOutcome::Reject,
            },
        };
        if steps >= step_limit {
            return DpdaOutcome::BudgetExhausted;
        }
        steps += 1;
        stack.pop();
        stack.extend(mv.push.iter().rev());
        state = mv.target;
        pos += consumed as usize;
    }
}

/// The ε-move budget for a word: 64 moves per input position and end.
pub fn dpda_budget(word: &[char]) -> u64 {
    64 * (word.len() as u64 + 1) + word.len() as u64
}

/// `dpda_run` under [`dpda_budget`], with exhaustion read as rejection.
pub fn dpda_accepts(d: &Dpda, word: &[char]) -> bool {
    dpda_run(d, word, dpda_budget(word)) == DpdaOutcome::Accept
}

#[derive(Clone, Debug)]
struct DpdaBuilder {
    states: Vec<String>,
    state_index: HashMap<String, usize>,
    symbols: Vec<String>,
    symbol_index: HashMap<String, usize>,
    alphabet: Vec<char>,
    finals: BTreeSet<usize>,
    initial: Option<usize>,
    bottom: Option<usize>,
    delta: BTreeMap<(usize, Option<char>, usize), DpdaMove>,
}

impl DpdaBuilder {
    fn new(alphabet: impl IntoIterator<Item = char>) -> Self {
        let alphabet: BTreeSet<char> = alphabet.into_iter().collect();
        DpdaBuilder {
            states: Vec::new(),
            state_index: HashMap::new(),
            symbols: Vec::new(),
            symbol_index: HashMap::new(),
            alphabet: alphabet.into_iter().collect(),
            finals: BTreeSet::new(),
            initial: None,
            bottom: None,
            delta: BTreeMap::new(),
        }
    }

    fn state(&mut self, name: &str) -> usize {
        intern(&mut self.states, &mut self.state_index, name)
    }

    fn symbol(&mut self, name: &str) -> usize {
        intern(&mut self.symbols, &mut self.symbol_index, name)
    }

    fn build(self) -> Result<Dpda, DpdaError> {
        for name in self.states.iter().chain(&self.symbols) {
            if !valid_machine_name(name) {
                return Err(DpdaError::InvalidName(name.clone()));
            }
        }
        for &(s, a, z) in self.delta.keys() {
            if let Some(c) = a {
                if self.alphabet.binary_search(&c).is_err() {
                    return Err(DpdaError::UnknownLetter(c));
                }
                if self.delta.contains_key(&(s, None, z)) {
                    return Err(DpdaError::Nondeterministic(
                        self.states[s].clone(),
                        self.symbols[z].clone(),
                    ));
                }
            }
        }
        Ok(Dpda {
            states: self.states,
            symbols: self.symbols,
            alphabet: self.alphabet,
            finals: self.finals,
            initial: self.initial.unwrap_or(0),
            bottom: self.bottom.unwrap_or(0),
            delta: self.delta,
        })
    }
}

fn intern(names: &mut Vec<String>, index: &mut HashMap<String, usize>, name: &str) -> usize {
    if let Some(&i) = index.get(name) {
        return i;
    }
    names.push(name.to_string());
    index.insert(name.to_string(), names.len() - 1);
    names.len() - 1
}

/// Parses the DPDA text format.
///
/// Header directives: `@kind dpda`, `@states`, `@initial`, `@final`,
/// `@bottom`, `@alphabet "ab"`. Each further line is a transition
/// `state letter symbol -> state push`, where the letter is `"a"` or `eps`
/// and the push string replaces the top symbol, new top first,
/// comma-separated, or `-` to pop.
pub fn parse_dpda_text(text: &str) -> Result<Dpda, TextError> {
    let mut states: Option<Vec<String>> = None;
    let mut initial = None;
    let mut finals = Vec::new();
    let mut bottom = None;
    let mut alphabet = Vec::new();
    let mut kind = false;
    let mut transitions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some(&first) = toks.first() else { continue };
        if let Some(directive) = first.strip_prefix('@') {
            let args = &toks[1..];
            match directive {
                "kind" => {
                    if one_arg(directive, args, line)? != "dpda" {
                        return Err(syntax(line, "expected `@kind dpda`"));
                    }
                    kind = true;
                }
                "states" => states = Some(args.iter().map(|s| s.to_string()).collect()),
                "initial" => initial = Some(one_arg(directive, args, line)?),
                "final" => finals.extend(args.iter().map(|s| s.to_string())),
                "bottom" => bottom = Some(one_arg(directive, args, line)?),
                "alphabet" => {
                    alphabet = parse_alphabet(&one_arg(directive, args, line)?)
                        .ok_or_else(|| syntax(line, "expected a string literal of letters"))?;
                }
                _ => return Err(syntax(line, format!("unknown directive `@{directive}`"))),
            }
            continue;
        }
        transitions.push((line, toks));
    }
    if !kind {
        return Err(syntax(1, "missing `@kind dpda`"));
    }
    let states = states.ok_or_else(|| syntax(1, "missing `@states`"))?;
    let mut b = DpdaBuilder::new(alphabet);
    for s in &states {
        b.state(s);
    }
    let state = |b: &mut DpdaBuilder, name: &str, line: usize| {
        if states.iter().any(|s| s == name) {
            Ok(b.state(name))
        } else {
            Err(syntax(line, format!("unknown state `{name}`")))
        }
    };
    let initial = initial.ok_or_else(|| syntax(1, "missing `@initial`"))?;
    b.initial = Some(state(&mut b, &initial, 1)?);
    for f in &finals {
        let s = state(&mut b, f, 1)?;
        b.finals.insert(s);
    }
    let bottom = bottom.ok_or_else(|| syntax(1, "missing `@bottom`"))?;
    b.bottom = Some(b.symbol(&bottom));

    for (line, toks) in transitions {
        let [s, a, z, arrow, t, push] = toks.as_slice() else {
            return Err(syntax(line, "expected `state letter symbol -> state push`"));
        };
        if *arrow != "->" {
            return Err(syntax(line, "expected `->`"));
        }
        let s = state(&mut b, s, line)?;
        let a = match *a {
            "eps" => None,
            tok => match parse_alphabet(tok).as_deref() {
                Some(&[c]) => Some(c),
                _ => return Err(syntax(line, format!("invalid letter `{tok}`"))),
            },
        };
        let z = b.symbol(z);
        let target = state(&mut b, t, line)?;
        let push = if *push == "-" {
            Vec::new()
        } else {
            push.split(',').map(|x| b.symbol(x)).collect()
        };
        if b.delta.insert((s, a, z), DpdaMove { target, push }).is_some() {
            let a = a.map_or("eps".to_string(), |c| format!("\"{c}\""));
            return Err(DpdaError::Duplicate(b.states[s].clone(), a, b.symbols[z].clone()).into());
        }
    }
    Ok(b.build()?)
}

impl fmt::Display for Dpda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "@kind dpda")?;
        writeln!(f, "@states {}", self.states.join(" "))?;
        writeln!(f, "@initial {}", self.states[self.initial])?;
        let finals: Vec<&str> = self.finals.iter().map(|&s| self.states[s].as_str()).collect();
        writeln!(f, "@final {}", finals.join(" "))?;
        writeln!(f, "@bottom {}", self.symbols[self.bottom])?;
        writeln!(f, "@alphabet \"{}\"", self.alphabet.iter().collect::<String>())?;
        for (&(s, a, z), mv) in &self.delta {
            let a = a.map_or("eps".to_string(), |c| format!("\"{c}\""));
            let push = if mv.push.is_empty() {
                "-".to_string()
            } else {
                let names: Vec<&str> = mv.push.iter().map(|&x| self.symbols[x].as_str()).collect();
                names.join(",")
            };
            writeln!(
                f,
                "{} {} {} -> {} {}",
                self.states[s], a, self.symbols[z], self.states[mv.target], push
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::words::all_words;

    pub(crate) const ANBN: &str = "\
@kind dpda
@states p q f
@initial p
@final f
@bottom Z
@alphabet \"ab\"
p \"a\" Z -> p A,Z
p \"a\" A -> p A,A
p \"b\" A -> q -
q \"b\" A -> q -
q eps Z -> f Z
";

    pub(crate) fn anbn() -> Dpda {
        parse_dpda_text(ANBN).unwrap()
    }

    pub(crate) fn is_anbn(w: &[char]) -> bool {
        let k = w.len() / 2;
        k >= 1 && w.len() == 2 * k && w[..k].iter().all(|&c| c == 'a') && w[k..].iter().all(|&c| c == 'b')
    }

    #[test]
    fn anbn_by_enumeration() {
        let d = anbn();
        assert_eq!(dpda_run(&d, &['a', 'a', 'b', 'b'], 100), DpdaOutcome::Accept);
        assert_eq!(dpda_run(&d, &['a', 'b', 'b'], 100), DpdaOutcome::Reject);
        for w in all_words(&['a', 'b'], 8) {
            assert_eq!(dpda_accepts(&d, &w), is_anbn(&w), "{w:?}");
        }
    }

    #[test]
    fn empty_input_without_moves_rejects() {
        let src = "@kind dpda\n@states s\n@initial s\n@bottom Z\n@alphabet \"a\"\ns \"a\" Z -> s Z\n";
        let d = parse_dpda_text(src).unwrap();
        assert_eq!(dpda_run(&d, &[], 10), DpdaOutcome::Reject);
    }

    #[test]
    fn epsilon_loops_exhaust_the_budget() {
        let src = "@kind dpda\n@states s\n@initial s\n@bottom Z\n@alphabet \"a\"\ns eps Z -> s Z\n";
        let d = parse_dpda_text(src).unwrap();
        assert_eq!(dpda_run(&d, &['a'], 50), DpdaOutcome::BudgetExhausted);
        assert!(!dpda_accepts(&d, &['a']));
    }

    #[test]
    fn nondeterminism_is_rejected() {
        let src = "@kind dpda\n@states s\n@initial s\n@bottom Z\n@alphabet \"a\"\ns eps Z -> s Z\ns \"a\" Z -> s -\n";
        assert!(matches!(
            parse_dpda_text(src),
            Err(TextError::Dpda(DpdaError::Nondeterministic(..)))
        ));
    }

    #[test]
    fn text_round_trip() {
        let d = anbn();
        assert_eq!(parse_dpda_text(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn removing_the_empty_word() {
        let src = "@kind dpda\n@states s\n@initial s\n@final s\n@bottom Z\n@alphabet \"a\"\ns \"a\" Z -> s Z\n";
        let d = parse_dpda_text(src).unwrap();
        let e = d.without_empty_word();
        assert!(dpda_accepts(&d, &[]));
        assert!(!dpda_accepts(&e, &[]));
        for w in all_words(&['a'], 5).into_iter().filter(|w| !w.is_empty()) {
            assert!(dpda_accepts(&e, &w));
        }
    }
}
