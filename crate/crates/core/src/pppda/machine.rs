use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A tape cell: the left end-marker, an input letter, or the right end-marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    LeftEnd,
    Char(char),
    RightEnd,
}

impl Letter {
    /// The cell at `head` of the tape `⊳ w ⊲`.
    pub fn at(word: &[char], head: usize) -> Letter {
        if head == 0 {
            Letter::LeftEnd
        } else if head <= word.len() {
            Letter::Char(word[head - 1])
        } else {
            Letter::RightEnd
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::LeftEnd => f.write_str("<"),
            Letter::Char(c) => write!(f, "\"{c}\""),
            Letter::RightEnd => f.write_str(">"),
        }
    }
}

/// Head movement of a move. `Up` is only allowed on pops and sends the head
/// back to the position at which the popped symbol was pushed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Left,
    Down,
    Up,
    Right,
}

impl Direction {
    pub fn keyword(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Down => "down",
            Direction::Up => "up",
            Direction::Right => "right",
        }
    }

    pub fn arrow(self) -> char {
        match self {
            Direction::Left => '←',
            Direction::Down => '↓',
            Direction::Up => '↑',
            Direction::Right => '→',
        }
    }
}

/// Shorthand for "push a fresh symbol moving in this direction, then pop it
/// with `Down` into the target state".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HatDirection {
    Left,
    Down,
    Right,
}

impl HatDirection {
    pub fn keyword(self) -> &'static str {
        match self {
            HatDirection::Left => "hatleft",
            HatDirection::Down => "hatdown",
            HatDirection::Right => "hatright",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            HatDirection::Left => Direction::Left,
            HatDirection::Down => Direction::Down,
            HatDirection::Right => Direction::Right,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    /// Push `push` (first element ends on top) or, when empty, pop the top.
    Core { push: Vec<SymbolId>, direction: Direction },
    Hat(HatDirection),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub target: StateId,
    pub action: Action,
}

impl Move {
    pub fn push(target: StateId, push: Vec<SymbolId>, direction: Direction) -> Self {
        Move {
            target,
            action: Action::Core { push, direction },
        }
    }

    pub fn pop(target: StateId, direction: Direction) -> Self {
        Move::push(target, Vec::new(), direction)
    }

    pub fn hat(target: StateId, direction: HatDirection) -> Self {
        Move {
            target,
            action: Action::Hat(direction),
        }
    }

    pub fn is_pop(&self) -> bool {
        matches!(&self.action, Action::Core { push, .. } if push.is_empty())
    }
}

pub type Key = (StateId, Letter, SymbolId);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("duplicate transition for ({0}, {1}, {2})")]
    Duplicate(String, String, String),
    #[error("transition ({0}, {1}, {2}) moves up while pushing")]
    UpWithPush(String, String, String),
    #[error("transition ({0}, {1}, {2}) moves off the tape")]
    OffTape(String, String, String),
    #[error("transition ({0}, {1}, {2}) moves left in a one-way machine")]
    LeftInOneWay(String, String, String),
    #[error("transition ({0}, {1}, {2}) reads a letter outside the alphabet")]
    UnknownLetter(String, String, String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("no initial state")]
    NoInitial,
    #[error("no bottom symbol")]
    NoBottom,
}

/// Names usable as machine states and stack symbols.
pub fn valid_machine_name(name: &str) -> bool {
    !name.is_empty()
        && name != "-"
        && name != "->"
        && !name.starts_with(['@', '#', '"'])
        && name.chars().all(|c| !c.is_whitespace() && !c.is_control() && c != ',')
}

/// A deterministic pointer pushdown automaton, one-way or two-way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    states: Vec<String>,
    symbols: Vec<String>,
    alphabet: Vec<char>,
    finals: BTreeSet<StateId>,
    initial: StateId,
    bottom: SymbolId,
    two_way: bool,
    delta: BTreeMap<Key, Move>,
}

impl Machine {
    pub fn states(&self) -> impl ExactSizeIterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn symbols(&self) -> impl ExactSizeIterator<Item = SymbolId> {
        (0..self.symbols.len() as u32).map(SymbolId)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn symbol_name(&self, z: SymbolId) -> &str {
        &self.symbols[z.index()]
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| StateId(i as u32))
    }

    pub fn symbol(&self, name: &str) -> Option<SymbolId> {
        self.symbols.iter().position(|s| s == name).map(|i| SymbolId(i as u32))
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    /// `⊳`, the letters of Σ in order, then `⊲`.
    pub fn letters(&self) -> Vec<Letter> {
        let mut v = vec![Letter::LeftEnd];
        v.extend(self.alphabet.iter().map(|&c| Letter::Char(c)));
        v.push(Letter::RightEnd);
        v
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals.contains(&q)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn bottom(&self) -> SymbolId {
        self.bottom
    }

    pub fn two_way(&self) -> bool {
        self.two_way
    }

    pub fn delta(&self) -> &BTreeMap<Key, Move> {
        &self.delta
    }

    pub fn get(&self, q: StateId, a: Letter, z: SymbolId) -> Option<&Move> {
        self.delta.get(&(q, a, z))
    }

    pub fn has_hat_moves(&self) -> bool {
        self.delta.values().any(|m| matches!(m.action, Action::Hat(_)))
    }

    /// Longest push string.
    pub fn max_push(&self) -> usize {
        self.delta
            .values()
            .map(|m| match &m.action {
                Action::Core { push, .. } => push.len(),
                Action::Hat(_) => 1,
            })
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn describe(&self, key: &Key) -> (String, String, String) {
        (
            self.state_name(key.0).to_string(),
            key.1.to_string(),
            self.symbol_name(key.2).to_string(),
        )
    }

    /// Rebuilds the machine through a builder, e.g. to add entries.
    pub fn to_builder(&self) -> MachineBuilder {
        let mut b = MachineBuilder::new(self.alphabet.iter().copied(), self.two_way);
        for q in self.states() {
            b.state(self.state_name(q));
        }
        for z in self.symbols() {
            b.symbol(self.symbol_name(z));
        }
        b.initial = Some(self.initial);
        b.bottom = Some(self.bottom);
        b.finals = self.finals.clone();
        b.delta = self.delta.clone();
        b
    }
}

/// Incremental construction of a [`Machine`] by name.
#[derive(Clone, Debug)]
pub struct MachineBuilder {
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    symbols: Vec<String>,
    symbol_index: HashMap<String, SymbolId>,
    alphabet: BTreeSet<char>,
    finals: BTreeSet<StateId>,
    initial: Option<StateId>,
    bottom: Option<SymbolId>,
    two_way: bool,
    delta: BTreeMap<Key, Move>,
}

impl MachineBuilder {
    pub fn new(alphabet: impl IntoIterator<Item = char>, two_way: bool) -> Self {
        MachineBuilder {
            states: Vec::new(),
            state_index: HashMap::new(),
            symbols: Vec::new(),
            symbol_index: HashMap::new(),
            alphabet: alphabet.into_iter().collect(),
            finals: BTreeSet::new(),
            initial: None,
            bottom: None,
            two_way,
            delta: BTreeMap::new(),
        }
    }

    /// Interns a state name.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.state_index.get(name) {
            return id;
        }
        let id = StateId(self.states.len() as u32);
        self.states.push(name.to_string());
        self.state_index.insert(name.to_string(), id);
        id
    }

    /// Interns a stack symbol name.
    pub fn symbol(&mut self, name: &str) -> SymbolId {
        if let Some(&id) = self.symbol_index.get(name) {
            return id;
        }
        let id = SymbolId(self.symbols.len() as u32);
        self.symbols.push(name.to_string());
        self.symbol_index.insert(name.to_string(), id);
        id
    }

    /// A state whose name (derived from `base`) is not yet in use.
    pub fn fresh_state(&mut self, base: &str) -> StateId {
        let name = crate::fresh_name(base, |n| self.state_index.contains_key(n));
        self.state(&name)
    }

    /// A stack symbol whose name (derived from `base`) is not yet in use.
    pub fn fresh_symbol(&mut self, base: &str) -> SymbolId {
        let name = crate::fresh_name(base, |n| self.symbol_index.contains_key(n));
        self.symbol(&name)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn symbol_name(&self, z: SymbolId) -> &str {
        &self.symbols[z.index()]
    }

    pub fn symbol_ids(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.symbols.len() as u32).map(SymbolId)
    }

    pub fn set_initial(&mut self, q: StateId) {
        self.initial = Some(q);
    }

    pub fn set_bottom(&mut self, z: SymbolId) {
        self.bottom = Some(z);
    }

    pub fn add_final(&mut self, q: StateId) {
        self.finals.insert(q);
    }

    pub fn add_letter(&mut self, c: char) {
        self.alphabet.insert(c);
    }

    /// `⊳`, the letters in order, then `⊲`.
    pub fn letters(&self) -> Vec<Letter> {
        let mut v = vec![Letter::LeftEnd];
        v.extend(self.alphabet.iter().map(|&c| Letter::Char(c)));
        v.push(Letter::RightEnd);
        v
    }

    pub fn contains(&self, q: StateId, a: Letter, z: SymbolId) -> bool {
        self.delta.contains_key(&(q, a, z))
    }

    fn describe(&self, key: &Key) -> (String, String, String) {
        (
            self.state_name(key.0).to_string(),
            key.1.to_string(),
            self.symbol_name(key.2).to_string(),
        )
    }

    /// Adds a transition; a second entry for the same key is an error.
    pub fn add(&mut self, q: StateId, a: Letter, z: SymbolId, m: Move) -> Result<(), MachineError> {
        let key = (q, a, z);
        if self.delta.contains_key(&key) {
            let (q, a, z) = self.describe(&key);
            return Err(MachineError::Duplicate(q, a, z));
        }
        self.delta.insert(key, m);
        Ok(())
    }

    /// Adds or overwrites a transition.
    pub fn replace(&mut self, q: StateId, a: Letter, z: SymbolId, m: Move) {
        self.delta.insert((q, a, z), m);
    }

    /// Validates and freezes the machine.
    pub fn build(self) -> Result<Machine, MachineError> {
        for name in self.states.iter().chain(&self.symbols) {
            if !valid_machine_name(name) {
                return Err(MachineError::InvalidName(name.clone()));
            }
        }
        let initial = self.initial.ok_or(MachineError::NoInitial)?;
        let bottom = self.bottom.ok_or(MachineError::NoBottom)?;
        for (key, m) in &self.delta {
            let (q, a, z) = self.describe(key);
            let letter = key.1;
            if let Letter::Char(c) = letter {
                if !self.alphabet.contains(&c) {
                    return Err(MachineError::UnknownLetter(q, a, z));
                }
            }
            let dir = match &m.action {
                Action::Core { push, direction } => {
                    if *direction == Direction::Up && !push.is_empty() {
                        return Err(MachineError::UpWithPush(q, a, z));
                    }
                    *direction
                }
                Action::Hat(h) => h.direction(),
            };
            if (dir == Direction::Left && letter == Letter::LeftEnd)
                || (dir == Direction::Right && letter == Letter::RightEnd)
            {
                return Err(MachineError::OffTape(q, a, z));
            }
            if dir == Direction::Left && !self.two_way {
                return Err(MachineError::LeftInOneWay(q, a, z));
            }
        }
        Ok(Machine {
            states: self.states,
            symbols: self.symbols,
            alphabet: self.alphabet.into_iter().collect(),
            finals: self.finals,
            initial,
            bottom,
            two_way: self.two_way,
            delta: self.delta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn up_with_push_is_rejected() {
        let mut b = MachineBuilder::new(['a'], false);
        let q = b.state("q");
        let z = b.symbol("Z");
        b.set_initial(q);
        b.set_bottom(z);
        b.add(q, Letter::Char('a'), z, Move::push(q, vec![z], Direction::Up)).unwrap();
        assert!(matches!(b.build(), Err(MachineError::UpWithPush(..))));
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let mut b = MachineBuilder::new(['a'], false);
        let q = b.state("q");
        let z = b.symbol("Z");
        b.add(q, Letter::Char('a'), z, Move::pop(q, Direction::Down)).unwrap();
        let err = b.add(q, Letter::Char('a'), z, Move::pop(q, Direction::Up));
        assert!(matches!(err, Err(MachineError::Duplicate(..))));
    }

    #[test]
    fn moving_off_the_tape_is_rejected() {
        let mut b = MachineBuilder::new([], true);
        let q = b.state("q");
        let z = b.symbol("Z");
        b.set_initial(q);
        b.set_bottom(z);
        b.add(q, Letter::RightEnd, z, Move::hat(q, HatDirection::Right)).unwrap();
        assert!(matches!(b.build(), Err(MachineError::OffTape(..))));
    }

    #[test]
    fn left_needs_two_way() {
        let mut b = MachineBuilder::new(['a'], false);
        let q = b.state("q");
        let z = b.symbol("Z");
        b.set_initial(q);
        b.set_bottom(z);
        b.add(q, Letter::Char('a'), z, Move::push(q, vec![z], Direction::Left)).unwrap();
        assert!(matches!(b.build(), Err(MachineError::LeftInOneWay(..))));
    }
}
