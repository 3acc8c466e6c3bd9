use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::peg::{Expression, Grammar, GrammarError};
use crate::pppda::{check_normal_form, Action, Direction, Letter, Machine, NormalFormViolation, StateId, SymbolId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("machine is not in normal form: {0}")]
    NotNormal(#[from] NormalFormViolation),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// Nonterminals of an extracted grammar. `(q, Z, p)`: started in `q` with
/// `Z` on top, the machine pops that `Z` entering `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtractedNonterminal {
    /// The pop moves `Down`; consumes the input read up to the pop.
    PopDown(StateId, SymbolId, StateId),
    /// The pop moves `Up`; consumes nothing.
    PopUp(StateId, SymbolId, StateId),
    /// The pop moves `Up`; consumes the input read before the pop.
    Bar(StateId, SymbolId, StateId),
    /// `PopDown / PopUp`.
    Either(StateId, SymbolId, StateId),
    Axiom,
}

impl ExtractedNonterminal {
    pub fn base_name(self, m: &Machine) -> String {
        let parts = |q: StateId, z: SymbolId, p: StateId, tag: &str| {
            let raw = format!("[{}|{}|{}|{}]", m.state_name(q), m.symbol_name(z), m.state_name(p), tag);
            raw.replace('`', "'")
        };
        match self {
            ExtractedNonterminal::PopDown(q, z, p) => parts(q, z, p, "↓"),
            ExtractedNonterminal::PopUp(q, z, p) => parts(q, z, p, "↑"),
            ExtractedNonterminal::Bar(q, z, p) => parts(q, z, p, "bar"),
            ExtractedNonterminal::Either(q, z, p) => parts(q, z, p, "↕"),
            ExtractedNonterminal::Axiom => "S".into(),
        }
    }
}

/// For each `(q, Z)`, the `(state, direction)` pairs a pop of that `Z` can
/// end in, over-approximated by ignoring the input.
fn pop_outcomes(m: &Machine) -> HashMap<(StateId, SymbolId), BTreeSet<(StateId, Direction)>> {
    let mut out: HashMap<(StateId, SymbolId), BTreeSet<(StateId, Direction)>> = HashMap::new();
    let mut changed = true;
    while changed {
        changed = false;
        for (&(q, _, z), mv) in m.delta() {
            let Action::Core { push, direction } = &mv.action else { continue };
            let add: Vec<(StateId, Direction)> = match push.first() {
                None => vec![(mv.target, *direction)],
                Some(&x) => {
                    let after: Vec<StateId> = out
                        .get(&(mv.target, x))
                        .map(|s| s.iter().map(|&(s, _)| s).collect())
                        .unwrap_or_default();
                    after
                        .into_iter()
                        .flat_map(|s| out.get(&(s, z)).cloned().unwrap_or_default())
                        .collect()
                }
            };
            let entry = out.entry((q, z)).or_default();
            for pd in add {
                changed |= entry.insert(pd);
            }
        }
    }
    out
}

struct Extractor<'m> {
    m: &'m Machine,
    pops: HashMap<(StateId, SymbolId), BTreeSet<(StateId, Direction)>>,
    names: BTreeMap<ExtractedNonterminal, String>,
    taken: BTreeSet<String>,
    queue: VecDeque<ExtractedNonterminal>,
}

impl Extractor<'_> {
    fn can_pop(&self, q: StateId, z: SymbolId, p: StateId, d: Direction) -> bool {
        self.pops.get(&(q, z)).is_some_and(|s| s.contains(&(p, d)))
    }

    fn possible(&self, n: ExtractedNonterminal) -> bool {
        use ExtractedNonterminal::*;
        match n {
            PopDown(q, z, p) => self.can_pop(q, z, p, Direction::Down),
            PopUp(q, z, p) | Bar(q, z, p) => self.can_pop(q, z, p, Direction::Up),
            Either(q, z, p) => self.can_pop(q, z, p, Direction::Down) || self.can_pop(q, z, p, Direction::Up),
            Axiom => true,
        }
    }

    fn reference(&mut self, n: ExtractedNonterminal) -> Expression {
        if let Some(name) = self.names.get(&n) {
            return Expression::nt(name.clone());
        }
        let name = crate::fresh_name(&n.base_name(self.m), |s| self.taken.contains(s));
        self.taken.insert(name.clone());
        self.names.insert(n, name.clone());
        self.queue.push_back(n);
        Expression::nt(name)
    }

    /// States `s` in which the pop of `x` pushed in state `r` can end.
    fn returns(&self, r: StateId, x: SymbolId) -> Vec<StateId> {
        let set: BTreeSet<StateId> = self
            .pops
            .get(&(r, x))
            .map(|s| s.iter().map(|&(s, _)| s).collect())
            .unwrap_or_default();
        set.into_iter().collect()
    }

    fn body(&mut self, n: ExtractedNonterminal) -> Expression {
        use ExtractedNonterminal::*;
        let (q, z, p) = match n {
            Axiom => {
                let (n0, bottom) = (self.m.initial(), self.m.bottom());
                let finals: Vec<StateId> = self.m.finals().iter().copied().collect();
                let mut alts = Vec::new();
                for f in finals {
                    if self.possible(PopDown(n0, bottom, f)) {
                        alts.push(self.reference(PopDown(n0, bottom, f)));
                    }
                }
                return Expression::choice_all(alts);
            }
            Either(q, z, p) => {
                let mut alts = Vec::new();
                for alt in [PopDown(q, z, p), PopUp(q, z, p)] {
                    if self.possible(alt) {
                        alts.push(self.reference(alt));
                    }
                }
                return Expression::choice_all(alts);
            }
            PopDown(q, z, p) | PopUp(q, z, p) | Bar(q, z, p) => (q, z, p),
        };
        let entries: Vec<(Letter, StateId, Vec<SymbolId>, Direction)> = self
            .m
            .delta()
            .range((q, Letter::LeftEnd, SymbolId(0))..)
            .take_while(|(k, _)| k.0 == q)
            .filter(|(k, _)| k.2 == z)
            .map(|(k, mv)| match &mv.action {
                Action::Core { push, direction } => (k.1, mv.target, push.clone(), *direction),
                Action::Hat(_) => unreachable!("normal form has no hat moves"),
            })
            .collect();
        let mut alts = Vec::new();
        for (a, r, push, dir) in entries {
            // `consume` reads the letter, `look` only checks it.
            let (consume, look) = match a {
                Letter::LeftEnd => (Expression::Empty, Expression::Empty),
                Letter::Char(c) => (Expression::t(c), Expression::and(Expression::t(c))),
                Letter::RightEnd => (Expression::Fail, Expression::not(Expression::AnyChar)),
            };
            if let Some(&x) = push.first() {
                let prefix = if dir == Direction::Right { consume } else { look };
                for s in self.returns(r, x) {
                    let tail = match n {
                        PopDown(..) => PopDown(s, z, p),
                        _ => Bar(s, z, p),
                    };
                    if !self.possible(tail) {
                        continue;
                    }
                    let inner = self.reference(Either(r, x, s));
                    let tail = self.reference(tail);
                    alts.push(match (n, dir) {
                        (PopUp(..), Direction::Right) => Expression::and(Expression::seq_all([prefix.clone(), inner, tail])),
                        (PopUp(..), _) => Expression::seq(prefix.clone(), Expression::and(Expression::seq(inner, tail))),
                        _ => Expression::seq_all([prefix.clone(), inner, tail]),
                    });
                }
            } else if r == p {
                let matches = matches!(
                    (n, dir),
                    (PopDown(..), Direction::Down) | (PopUp(..) | Bar(..), Direction::Up)
                );
                if matches {
                    alts.push(look);
                }
            }
        }
        Expression::choice_all(alts)
    }
}

/// Builds a grammar for the language of a one-way machine in normal form
/// (see [`crate::pppda::normalize`]).
///
/// Nonterminals describe how the machine gets from pushing a symbol to
/// popping it. Only nonterminals reachable from the axiom are emitted, and
/// alternatives the machine cannot realize (by a pop-outcome analysis that
/// ignores the input) are dropped. The result uses `&`, `.` and `!""` and
/// may contain left-recursive cycles for machines that loop; the packrat
/// interpreter reports those as divergence.
pub fn dppda_to_peg(m: &Machine) -> Result<Grammar, ExtractError> {
    check_normal_form(m)?;
    let mut x = Extractor {
        m,
        pops: pop_outcomes(m),
        names: BTreeMap::new(),
        taken: BTreeSet::new(),
        queue: VecDeque::new(),
    };
    x.reference(ExtractedNonterminal::Axiom);
    let mut rules = Vec::new();
    while let Some(n) = x.queue.pop_front() {
        let body = x.body(n);
        rules.push((x.names[&n].clone(), body));
    }
    Ok(Grammar::new(rules, "S", m.alphabet().iter().copied())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peg::{accepts, Packrat, ParseOutcome};
    use crate::pppda::{builtin_anbncn, normalize, parse_machine_text, run_direct};
    use crate::words::all_words;

    fn agrees(m: &Machine, max_len: usize) -> Grammar {
        let n = normalize(m);
        let g = dppda_to_peg(&n).unwrap();
        for w in all_words(m.alphabet(), max_len) {
            let expected = run_direct(&n, &w, 1_000_000).unwrap().outcome.accepted();
            assert_eq!(accepts(&g, &w), expected, "{:?}", w.iter().collect::<String>());
        }
        g
    }

    #[test]
    fn example_machine() {
        let g = agrees(&builtin_anbncn(), 9);
        let shaped: Vec<String> = all_words(&['a', 'b', 'c'], 9)
            .into_iter()
            .filter(|w| w.windows(2).all(|p| p[0] <= p[1]) && accepts(&g, w))
            .map(|w| w.into_iter().collect())
            .collect();
        assert_eq!(shaped, ["abc", "aabbcc", "aaabbbccc"]);
    }

    #[test]
    fn empty_word_only() {
        let src = "@states q f\n@initial q\n@final f\n@bottom Z\n@alphabet \"a\"\nq < Z -> q X right\nq > X -> f - down\nf > Z -> f - down\n";
        let m = parse_machine_text(src).unwrap();
        let g = agrees(&m, 3);
        assert!(accepts(&g, &[]));
        assert!(!accepts(&g, &['a']));
    }

    #[test]
    fn up_nonterminals_never_consume() {
        let n = normalize(&builtin_anbncn());
        let g = dppda_to_peg(&n).unwrap();
        for w in all_words(&['a', 'b', 'c'], 5) {
            for nt in g.nonterminals() {
                if !g.name(nt).ends_with("|↑]") {
                    continue;
                }
                let mut p = Packrat::new(&g, &w);
                for pos in 0..=w.len() {
                    let o = p.eval(g.rule(nt), pos);
                    assert!(matches!(o, ParseOutcome::Consumed(x) if x == pos) || o == ParseOutcome::Failure);
                }
            }
        }
    }

    #[test]
    fn rejects_machines_not_in_normal_form() {
        assert!(matches!(dppda_to_peg(&builtin_anbncn()), Err(ExtractError::NotNormal(_))));
    }

    #[test]
    fn looping_machine_extracts_to_a_rejecting_grammar() {
        let m = crate::pppda::looping_machine(['a']);
        let n = normalize(&m);
        let g = dppda_to_peg(&n).unwrap();
        for w in all_words(&['a'], 3) {
            assert!(!accepts(&g, &w));
        }
    }
}
