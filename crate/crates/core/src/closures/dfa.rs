use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::text::{one_arg, syntax, tokens, TextError};
use crate::pppda::valid_machine_name;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfaError {
    #[error("no transition from `{0}` on `{1}`")]
    Incomplete(String, String),
    #[error("duplicate transition from `{0}` on `{1}`")]
    Duplicate(String, String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
}

/// A complete DFA over an alphabet of labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDfa {
    states: Vec<String>,
    labels: Vec<String>,
    initial: usize,
    finals: BTreeSet<usize>,
    /// `delta[q][j]`.
    delta: Vec<Vec<usize>>,
}

impl LabeledDfa {
    /// Builds a DFA from a full transition table indexed by state, then label.
    pub fn new(
        states: Vec<String>,
        labels: Vec<String>,
        initial: usize,
        finals: BTreeSet<usize>,
        delta: Vec<Vec<usize>>,
    ) -> Result<Self, DfaError> {
        for name in states.iter().chain(&labels) {
            if !valid_machine_name(name) {
                return Err(DfaError::InvalidName(name.clone()));
            }
        }
        let n = states.len();
        if initial >= n {
            return Err(DfaError::UnknownState(initial.to_string()));
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != labels.len() {
                let j = row.len().min(labels.len().saturating_sub(1));
                return Err(DfaError::Incomplete(states[q].clone(), labels[j].clone()));
            }
            if let Some(&p) = row.iter().find(|&&p| p >= n) {
                return Err(DfaError::UnknownState(p.to_string()));
            }
        }
        if delta.len() != n {
            let q = delta.len().min(n - 1);
            return Err(DfaError::Incomplete(states[q].clone(), labels.first().cloned().unwrap_or_default()));
        }
        Ok(LabeledDfa {
            states,
            labels,
            initial,
            finals,
            delta,
        })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    pub fn next(&self, q: usize, label: usize) -> usize {
        self.delta[q][label]
    }

    pub fn accepts(&self, labels: &[usize]) -> bool {
        self.is_final(labels.iter().fold(self.initial, |q, &j| self.next(q, j)))
    }

    /// The DFA that also accepts every label string obtained by deleting
    /// occurrences of the `nullable` labels, built by subset construction
    /// over ε-edges `q → next(q, a)` for each nullable `a`.
    ///
    /// Binding a nullable label to its language minus the empty word then
    /// denotes the same language as before.
    pub fn with_empty_blocks(&self, nullable: &[usize]) -> LabeledDfa {
        let closure = |set: BTreeSet<usize>| {
            let mut out = set;
            let mut work: Vec<usize> = out.iter().copied().collect();
            while let Some(q) = work.pop() {
                for &j in nullable {
                    let p = self.next(q, j);
                    if out.insert(p) {
                        work.push(p);
                    }
                }
            }
            out
        };
        let start = closure(BTreeSet::from([self.initial]));
        let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::from([(start.clone(), 0)]);
        let mut sets = vec![start];
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = Vec::with_capacity(self.labels.len());
            for j in 0..self.labels.len() {
                let step = closure(sets[i].iter().map(|&q| self.next(q, j)).collect());
                let next = sets.len();
                let id = *index.entry(step.clone()).or_insert(next);
                if id == next {
                    sets.push(step);
                }
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let names = sets
            .iter()
            .map(|s| {
                let parts: Vec<&str> = s.iter().map(|&q| self.states[q].as_str()).collect();
                parts.join("+")
            })
            .collect();
        let finals = sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|&q| self.is_final(q)))
            .map(|(i, _)| i)
            .collect();
        LabeledDfa::new(names, self.labels.clone(), 0, finals, delta).expect("subset construction is complete")
    }
}

/// Parses the DFA text format.
///
/// Header directives: `@kind dfa`, `@states`, `@initial`, `@final`,
/// `@labels`. Each further line is a transition `state label -> state`;
/// every state needs one per label.
pub fn parse_dfa_text(text: &str) -> Result<LabeledDfa, TextError> {
    let mut states: Option<Vec<String>> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut initial = None;
    let mut finals = Vec::new();
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
                    if one_arg(directive, args, line)? != "dfa" {
                        return Err(syntax(line, "expected `@kind dfa`"));
                    }
                    kind = true;
                }
                "states" => states = Some(args.iter().map(|s| s.to_string()).collect()),
                "labels" => labels.extend(args.iter().map(|s| s.to_string())),
                "initial" => initial = Some(one_arg(directive, args, line)?),
                "final" => finals.extend(args.iter().map(|s| s.to_string())),
                _ => return Err(syntax(line, format!("unknown directive `@{directive}`"))),
            }
            continue;
        }
        transitions.push((line, toks));
    }
    if !kind {
        return Err(syntax(1, "missing `@kind dfa`"));
    }
    let states = states.ok_or_else(|| syntax(1, "missing `@states`"))?;
    let state = |name: &str| {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| DfaError::UnknownState(name.to_string()))
    };
    let initial = state(&initial.ok_or_else(|| syntax(1, "missing `@initial`"))?)?;
    let finals = finals.iter().map(|f| state(f)).collect::<Result<BTreeSet<_>, _>>()?;
    let mut delta = vec![vec![None; labels.len()]; states.len()];
    for (line, toks) in transitions {
        let [q, a, arrow, p] = toks.as_slice() else {
            return Err(syntax(line, "expected `state label -> state`"));
        };
        if *arrow != "->" {
            return Err(syntax(line, "expected `->`"));
        }
        let q = state(q)?;
        let j = labels
            .iter()
            .position(|l| l == a)
            .ok_or_else(|| DfaError::UnknownLabel(a.to_string()))?;
        if delta[q][j].replace(state(p)?).is_some() {
            return Err(DfaError::Duplicate(states[q].clone(), labels[j].clone()).into());
        }
    }
    let mut table = Vec::with_capacity(states.len());
    for (q, row) in delta.into_iter().enumerate() {
        let row = row
            .into_iter()
            .enumerate()
            .map(|(j, p)| p.ok_or_else(|| DfaError::Incomplete(states[q].clone(), labels[j].clone())))
            .collect::<Result<Vec<_>, _>>()?;
        table.push(row);
    }
    Ok(LabeledDfa::new(states, labels, initial, finals, table)?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// `(a1 a2)*`.
    pub(crate) const PAIRS: &str = "\
@kind dfa
@states even odd dead
@initial even
@final even
@labels a1 a2
even a1 -> odd
even a2 -> dead
odd a1 -> dead
odd a2 -> even
dead a1 -> dead
dead a2 -> dead
";

    fn all_label_strings(m: usize, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w: &Vec<usize>| {
                    (0..m).map(move |j| {
                        let mut v = w.clone();
                        v.push(j);
                        v
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    #[test]
    fn pairs_language() {
        let d = parse_dfa_text(PAIRS).unwrap();
        assert!(d.accepts(&[]));
        assert!(d.accepts(&[0, 1, 0, 1]));
        assert!(!d.accepts(&[0, 1, 0]));
        assert!(!d.accepts(&[1, 0]));
    }

    #[test]
    fn missing_transitions_are_reported() {
        let src = "@kind dfa\n@states q\n@initial q\n@labels a b\nq a -> q\n";
        assert!(matches!(
            parse_dfa_text(src),
            Err(TextError::Dfa(DfaError::Incomplete(q, b))) if q == "q" && b == "b"
        ));
    }

    #[test]
    fn empty_blocks_accept_deleted_labels() {
        let d = parse_dfa_text(PAIRS).unwrap();
        let e = d.with_empty_blocks(&[1]);
        for s in all_label_strings(2, 6) {
            // Deleting a2s from (a1 a2)* leaves every remaining a2 right after an a1.
            let expected = s.iter().enumerate().all(|(i, &j)| j == 0 || (i > 0 && s[i - 1] == 0));
            assert_eq!(e.accepts(&s), expected, "{s:?}");
        }
    }
}
