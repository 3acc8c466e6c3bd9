use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::dfa::{parse_dfa_text, LabeledDfa};
use super::dpda::{dpda_accepts, parse_dpda_text, Dpda};
use super::embed::{emit_dpda, inner_letters, Embedding};
use super::text::{one_arg, syntax, tokens, TextError};
use crate::pppda::{desugar_hat_moves, Direction, HatDirection, Letter, Machine, MachineBuilder, MachineError, Move, StateId, SymbolId};

#[derive(Debug, Error)]
pub enum CompositionError {
    #[error("label `{0}` has no binding")]
    UnboundLabel(String),
    #[error("`{0}` is not a label of the automaton")]
    UnknownLabel(String),
    #[error("label `{0}` is bound twice")]
    DuplicateBinding(String),
    #[error("the language bound to `{0}` contains the empty word")]
    EmptyWordInBinding(String),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// A regular expression over labels, given by its automaton, with a DPDA
/// language substituted for each label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionSpec {
    pub dfa: LabeledDfa,
    /// Indexed like the automaton's labels.
    pub bindings: Vec<Dpda>,
}

impl CompositionSpec {
    pub fn new(dfa: LabeledDfa, mut named: HashMap<String, Dpda>) -> Result<Self, CompositionError> {
        if let Some(extra) = named.keys().find(|k| dfa.label(k).is_none()) {
            return Err(CompositionError::UnknownLabel(extra.clone()));
        }
        let bindings = dfa
            .labels()
            .iter()
            .map(|l| named.remove(l).ok_or_else(|| CompositionError::UnboundLabel(l.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CompositionSpec { dfa, bindings })
    }

    /// Reads a composition file: `@dfa <path>` and one `@bind <label>
    /// <path>` per label, with paths relative to the file.
    pub fn load(path: &Path) -> Result<Self, CompositionError> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        parse_composition(&text, base)
    }

    /// Fails on the first label whose language contains the empty word.
    pub fn check_empty_word_free(&self) -> Result<(), CompositionError> {
        for (l, d) in self.dfa.labels().iter().zip(&self.bindings) {
            if dpda_accepts(d, &[]) {
                return Err(CompositionError::EmptyWordInBinding(l.clone()));
            }
        }
        Ok(())
    }

    /// An equivalent composition whose bound languages exclude the empty word.
    pub fn without_empty_words(&self) -> CompositionSpec {
        let nullable: Vec<usize> = (0..self.bindings.len())
            .filter(|&j| dpda_accepts(&self.bindings[j], &[]))
            .collect();
        if nullable.is_empty() {
            return self.clone();
        }
        let bindings = self
            .bindings
            .iter()
            .enumerate()
            .map(|(j, d)| if nullable.contains(&j) { d.without_empty_word() } else { d.clone() })
            .collect();
        CompositionSpec {
            dfa: self.dfa.with_empty_blocks(&nullable),
            bindings,
        }
    }

    pub fn alphabet(&self) -> Vec<char> {
        let mut letters: Vec<char> = self.bindings.iter().flat_map(|d| d.alphabet().iter().copied()).collect();
        letters.sort_unstable();
        letters.dedup();
        letters
    }
}

fn read(path: &Path) -> Result<String, TextError> {
    std::fs::read_to_string(path).map_err(|source| TextError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn nested<T>(path: &Path, r: Result<T, TextError>) -> Result<T, TextError> {
    r.map_err(|e| TextError::Nested {
        path: path.to_path_buf(),
        source: Box::new(e),
    })
}

/// Parses composition text, resolving paths against `base`.
pub fn parse_composition(text: &str, base: &Path) -> Result<CompositionSpec, CompositionError> {
    let mut dfa: Option<PathBuf> = None;
    let mut binds: Vec<(String, PathBuf)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        match toks.as_slice() {
            [] => {}
            ["@dfa", args @ ..] => dfa = Some(base.join(one_arg("dfa", args, line)?)),
            ["@bind", label, path] => binds.push((label.to_string(), base.join(path))),
            ["@bind", ..] => return Err(syntax(line, "expected `@bind <label> <path>`").into()),
            _ => return Err(syntax(line, "expected `@dfa` or `@bind`").into()),
        }
    }
    let dfa = dfa.ok_or_else(|| syntax(1, "missing `@dfa`"))?;
    let dfa = nested(&dfa, read(&dfa).and_then(|t| parse_dfa_text(&t)))?;
    let mut named = HashMap::new();
    for (label, path) in binds {
        let d = nested(&path, read(&path).and_then(|t| parse_dpda_text(&t)))?;
        if named.insert(label.clone(), d).is_some() {
            return Err(CompositionError::DuplicateBinding(label));
        }
    }
    CompositionSpec::new(dfa, named)
}

/// Keys of the constructed machine's states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Control {
    /// Simulating the DPDA of label `j`, started from DFA state `q`.
    Sim(usize, usize, usize),
    /// The same, on entering final state `s`.
    Arrive(usize, usize, usize),
    /// Popping the DPDA's symbols down to the marker `(q, j)`.
    Rollback(usize, usize),
    /// About to try label `j` from `q`.
    Next(usize, usize),
}

/// Keys of the constructed machine's stack symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Stack {
    /// Trying label `j` from DFA state `q`.
    Marker(usize, usize),
    /// The DPDA of label `j`, started from `q`, was suspended in final state `s`.
    Checkpoint(usize, usize, usize),
    /// Symbol `z` of the DPDA for label `j`.
    Inner(usize, usize),
}

struct Builder<'s> {
    spec: &'s CompositionSpec,
    b: MachineBuilder,
    states: HashMap<Control, StateId>,
    symbols: HashMap<Stack, SymbolId>,
}

impl Builder<'_> {
    fn state(&mut self, c: Control) -> StateId {
        if let Some(&q) = self.states.get(&c) {
            return q;
        }
        let (dfa, b) = (&self.spec.dfa, &self.spec.bindings);
        let label = |j: usize| dfa.labels()[j].as_str();
        let name = match c {
            Control::Sim(q, j, s) => format!("{}:{}:{}", dfa.state_name(q), label(j), b[j].state_name(s)),
            Control::Arrive(q, j, s) => format!("{}:{}:{}!", dfa.state_name(q), label(j), b[j].state_name(s)),
            Control::Rollback(q, j) => format!("rollback:{}:{}", dfa.state_name(q), label(j)),
            Control::Next(q, j) => format!("next:{}:{}", dfa.state_name(q), label(j)),
        };
        let id = self.b.fresh_state(&name);
        self.states.insert(c, id);
        id
    }

    fn symbol(&mut self, k: Stack) -> SymbolId {
        if let Some(&z) = self.symbols.get(&k) {
            return z;
        }
        let (dfa, b) = (&self.spec.dfa, &self.spec.bindings);
        let label = |j: usize| dfa.labels()[j].as_str();
        let name = match k {
            Stack::Marker(q, j) => format!("try:{}:{}", dfa.state_name(q), label(j)),
            Stack::Checkpoint(q, j, s) => format!("ck:{}:{}:{}", dfa.state_name(q), label(j), b[j].state_name(s)),
            Stack::Inner(j, z) => format!("{}:{}", label(j), b[j].symbol_name(z)),
        };
        let id = self.b.fresh_symbol(&name);
        self.symbols.insert(k, id);
        id
    }

    /// The state a DPDA move into `s` enters.
    fn enter(&mut self, q: usize, j: usize, s: usize) -> StateId {
        if self.spec.bindings[j].is_final(s) {
            self.state(Control::Arrive(q, j, s))
        } else {
            self.state(Control::Sim(q, j, s))
        }
    }

    /// The push opening a try of label `j` from `q`, above `extra`.
    fn open(&mut self, q: usize, j: usize, extra: Option<SymbolId>) -> Move {
        let d = &self.spec.bindings[j];
        let (s0, z0) = (d.initial(), d.bottom());
        let mut push = vec![self.symbol(Stack::Inner(j, z0)), self.symbol(Stack::Marker(q, j))];
        push.extend(extra);
        Move::push(self.enter(q, j, s0), push, Direction::Down)
    }
}

/// A one-way machine for the language of `spec`: the concatenations of
/// words from the bound languages along label strings the automaton
/// accepts. Bound languages must exclude the empty word (see
/// [`CompositionSpec::without_empty_words`]).
///
/// The machine searches depth first. A marker `(q, a_j)` on the stack means
/// the current block is being matched by the DPDA of `a_j` from automaton
/// state `q`; that DPDA runs on the stack above the marker. When it enters a
/// final state the machine pushes a checkpoint recording where it stopped
/// and opens a new block at `(δ(q, a_j), a_1)`; at `⊲` with `δ(q, a_j)` final
/// it accepts instead. When a DPDA gets stuck, its symbols are popped to the
/// marker, whose `Up` pop returns the head to the block start, and the
/// block is retried with the next label. After the last label the
/// checkpoint below is popped and the suspended DPDA resumes. Reaching the
/// bottom symbol this way rejects.
pub fn reg_closure_machine(spec: &CompositionSpec) -> Result<Machine, CompositionError> {
    spec.check_empty_word_free()?;
    let mut x = Builder {
        spec,
        b: MachineBuilder::new(spec.alphabet(), false),
        states: HashMap::new(),
        symbols: HashMap::new(),
    };
    let dfa = &spec.dfa;
    let m = spec.bindings.len();
    let start = x.b.state("init");
    x.b.set_initial(start);
    let bottom = x.b.symbol("bottom");
    x.b.set_bottom(bottom);
    let first = x.b.fresh_state("first");
    let resume = x.b.fresh_state("resume");
    let drain = x.b.fresh_state("drain");
    let accept = x.b.fresh_state("accept");
    x.b.add_final(accept);

    for q in 0..dfa.state_count() {
        for (j, d) in spec.bindings.iter().enumerate() {
            x.symbol(Stack::Marker(q, j));
            for s in (0..d.state_count()).filter(|&s| d.is_final(s)) {
                x.symbol(Stack::Checkpoint(q, j, s));
            }
        }
    }
    for (j, d) in spec.bindings.iter().enumerate() {
        for z in 0..d.symbol_count() {
            x.symbol(Stack::Inner(j, z));
        }
    }
    let all: Vec<SymbolId> = x.b.symbol_ids().collect();
    let letters = inner_letters(&x.b);

    x.b.add(start, Letter::LeftEnd, bottom, Move::hat(first, HatDirection::Right))?;
    for &a in &letters {
        if a == Letter::RightEnd {
            if dfa.is_final(dfa.initial()) {
                x.b.add(first, a, bottom, Move::pop(accept, Direction::Down))?;
            }
        } else if m > 0 {
            let mv = x.open(dfa.initial(), 0, None);
            x.b.add(first, a, bottom, mv)?;
        }
    }

    for q in 0..dfa.state_count() {
        for (j, d) in spec.bindings.iter().enumerate() {
            let marker = x.symbol(Stack::Marker(q, j));
            // Leaving the marker returns the head to the block start.
            let retry = if j + 1 < m {
                Move::pop(x.state(Control::Next(q, j + 1)), Direction::Up)
            } else {
                Move::pop(resume, Direction::Up)
            };
            let rollback = x.state(Control::Rollback(q, j));
            let inner: Vec<SymbolId> = (0..d.symbol_count()).map(|z| x.symbol(Stack::Inner(j, z))).collect();

            let sim: Vec<StateId> = (0..d.state_count()).map(|s| x.state(Control::Sim(q, j, s))).collect();
            let enter: Vec<StateId> = (0..d.state_count()).map(|s| x.enter(q, j, s)).collect();
            let e = Embedding {
                sim,
                enter,
                symbols: inner.clone(),
            };
            let stuck = |_: Letter, y: SymbolId| {
                if y == marker {
                    Some(retry.clone())
                } else if inner.contains(&y) {
                    Some(Move::pop(rollback, Direction::Down))
                } else {
                    None
                }
            };
            emit_dpda(&mut x.b, d, &e, &letters, &all, "", stuck)?;

            for &a in &letters {
                for &z in &inner {
                    x.b.add(rollback, a, z, Move::pop(rollback, Direction::Down))?;
                }
                x.b.add(rollback, a, marker, retry.clone())?;
            }

            if j > 0 {
                let next = x.state(Control::Next(q, j));
                let mv = x.open(q, j, None);
                for &a in &letters {
                    for &z in &all {
                        x.b.add(next, a, z, mv.clone())?;
                    }
                }
            }

            let after = dfa.next(q, j);
            for s in (0..d.state_count()).filter(|&s| d.is_final(s)) {
                let arrive = x.state(Control::Arrive(q, j, s));
                let checkpoint = x.symbol(Stack::Checkpoint(q, j, s));
                let sim = x.state(Control::Sim(q, j, s));
                for &a in &letters {
                    x.b.add(resume, a, checkpoint, Move::pop(sim, Direction::Up))?;
                    let mv = if a == Letter::RightEnd && dfa.is_final(after) {
                        Move::pop(drain, Direction::Down)
                    } else {
                        x.open(after, 0, Some(checkpoint))
                    };
                    for &z in &all {
                        x.b.add(arrive, a, z, mv.clone())?;
                    }
                }
            }
        }
    }
    for &z in &all {
        let target = if z == bottom { accept } else { drain };
        x.b.add(drain, Letter::RightEnd, z, Move::pop(target, Direction::Down))?;
    }
    Ok(desugar_hat_moves(&x.b.build()?))
}

/// Whether `word` splits into nonempty blocks `w_1 … w_k` such that the
/// automaton accepts some `a_{i_1} … a_{i_k}` with each `w_t` accepted by the
/// DPDA bound to `a_{i_t}`. Exhaustive; meant for words of length at most 10.
pub fn brute_force_membership(spec: &CompositionSpec, word: &[char]) -> bool {
    fn from(spec: &CompositionSpec, q: usize, rest: &[char], memo: &mut HashMap<(usize, usize), bool>) -> bool {
        if rest.is_empty() {
            return spec.dfa.is_final(q);
        }
        if let Some(&r) = memo.get(&(q, rest.len())) {
            return r;
        }
        let mut found = false;
        'search: for end in 1..=rest.len() {
            for (j, d) in spec.bindings.iter().enumerate() {
                if dpda_accepts(d, &rest[..end]) && from(spec, spec.dfa.next(q, j), &rest[end..], memo) {
                    found = true;
                    break 'search;
                }
            }
        }
        memo.insert((q, rest.len()), found);
        found
    }
    from(spec, spec.dfa.initial(), word, &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closures::dfa::tests::PAIRS;
    use crate::closures::dpda::tests::{anbn, is_anbn, ANBN};
    use crate::testing::Prepared;
    use crate::words::all_words;

    const CSTAR_D: &str = "\
@kind dpda
@states s f
@initial s
@final f
@bottom Z
@alphabet \"cd\"
s \"c\" Z -> s Z
s \"d\" Z -> f Z
";

    fn pairs_spec() -> CompositionSpec {
        let named = HashMap::from([
            ("a1".to_string(), anbn()),
            ("a2".to_string(), parse_dpda_text(CSTAR_D).unwrap()),
        ]);
        CompositionSpec::new(parse_dfa_text(PAIRS).unwrap(), named).unwrap()
    }

    fn single_spec(d: Dpda) -> CompositionSpec {
        let dfa = "@kind dfa\n@states q r dead\n@initial q\n@final r\n@labels a1\nq a1 -> r\nr a1 -> dead\ndead a1 -> dead\n";
        CompositionSpec::new(parse_dfa_text(dfa).unwrap(), HashMap::from([("a1".to_string(), d)])).unwrap()
    }

    fn accepted(m: &Machine, w: &[char]) -> bool {
        Prepared::new(m).direct(w)
    }

    fn agrees(spec: &CompositionSpec, max_len: usize) -> Machine {
        let m = reg_closure_machine(spec).unwrap();
        let p = Prepared::new(&m);
        for w in all_words(&spec.alphabet(), max_len) {
            let expected = brute_force_membership(spec, &w);
            assert_eq!(p.direct(&w), expected, "{:?}", w.iter().collect::<String>());
            assert_eq!(p.linear(&w), expected);
        }
        m
    }

    fn word(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn pairs_of_blocks() {
        let spec = pairs_spec();
        assert!(brute_force_membership(&spec, &word("abcd")));
        assert!(!brute_force_membership(&spec, &word("abab")));
        assert!(brute_force_membership(&spec, &[]));
        let m = agrees(&spec, 8);
        assert!(accepted(&m, &word("abcd")));
        assert!(accepted(&m, &word("aabbdabccd")));
        assert!(!accepted(&m, &word("abab")));
    }

    #[test]
    fn empty_word_only() {
        let dfa = "@kind dfa\n@states q dead\n@initial q\n@final q\n@labels a1\nq a1 -> dead\ndead a1 -> dead\n";
        let spec = CompositionSpec::new(
            parse_dfa_text(dfa).unwrap(),
            HashMap::from([("a1".to_string(), anbn())]),
        )
        .unwrap();
        let m = agrees(&spec, 6);
        let words: Vec<Vec<char>> = all_words(&['a', 'b'], 6).into_iter().filter(|w| accepted(&m, w)).collect();
        assert_eq!(words, [Vec::<char>::new()]);
    }

    #[test]
    fn single_label_is_the_bound_language() {
        let spec = single_spec(anbn());
        let m = agrees(&spec, 8);
        for w in all_words(&['a', 'b'], 8) {
            assert_eq!(accepted(&m, &w), is_anbn(&w));
        }
    }

    #[test]
    fn empty_word_in_a_binding_is_refused() {
        let src = ANBN.replace("@final f", "@final p f");
        let spec = single_spec(parse_dpda_text(&src).unwrap());
        assert!(matches!(
            reg_closure_machine(&spec),
            Err(CompositionError::EmptyWordInBinding(l)) if l == "a1"
        ));
        let repaired = spec.without_empty_words();
        let m = agrees(&repaired, 6);
        for w in all_words(&['a', 'b'], 6) {
            // `p` is final too, so runs of `a` are accepted.
            assert_eq!(accepted(&m, &w), w.iter().all(|&c| c == 'a') || is_anbn(&w));
        }
    }

    #[test]
    fn unbound_and_unknown_labels() {
        let dfa = parse_dfa_text(PAIRS).unwrap();
        let one = HashMap::from([("a1".to_string(), anbn())]);
        assert!(matches!(
            CompositionSpec::new(dfa.clone(), one),
            Err(CompositionError::UnboundLabel(l)) if l == "a2"
        ));
        let extra = HashMap::from([
            ("a1".to_string(), anbn()),
            ("a2".to_string(), anbn()),
            ("a3".to_string(), anbn()),
        ]);
        assert!(matches!(
            CompositionSpec::new(dfa, extra),
            Err(CompositionError::UnknownLabel(l)) if l == "a3"
        ));
    }

    #[test]
    fn loading_from_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("pairs.dfa"), PAIRS).unwrap();
        std::fs::write(dir.path().join("anbn.dpda"), ANBN).unwrap();
        std::fs::write(dir.path().join("cd.dpda"), CSTAR_D).unwrap();
        let spec_path = dir.path().join("pairs.comp");
        std::fs::write(&spec_path, "@dfa pairs.dfa\n@bind a1 anbn.dpda\n@bind a2 cd.dpda\n").unwrap();
        assert_eq!(CompositionSpec::load(&spec_path).unwrap(), pairs_spec());
    }
}
