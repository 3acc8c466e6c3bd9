use std::fmt;

use thiserror::Error;

use super::machine::{Action, Direction, Letter, Machine, StateId, SymbolId};

/// State, stack and head position. The stack is stored bottom first; each
/// entry carries the head position at which it was pushed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub stack: Vec<(SymbolId, usize)>,
    pub head: usize,
}

impl Configuration {
    pub fn initial(m: &Machine) -> Self {
        Configuration {
            state: m.initial(),
            stack: vec![(m.bottom(), 0)],
            head: 0,
        }
    }

    pub fn top(&self) -> Option<(SymbolId, usize)> {
        self.stack.last().copied()
    }

    /// Renders as `(q, XY×2:1, 3)` with the top first; an empty stack is `()`.
    pub fn display<'a>(&'a self, m: &'a Machine) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Configuration, &'a Machine);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let (c, m) = (self.0, self.1);
                write!(f, "({}, ", m.state_name(c.state))?;
                if c.stack.is_empty() {
                    f.write_str("()")?;
                } else {
                    for &(z, _) in c.stack.iter().rev() {
                        f.write_str(m.symbol_name(z))?;
                    }
                    f.write_str("×")?;
                    let origins: Vec<String> = c.stack.iter().rev().map(|&(_, i)| i.to_string()).collect();
                    f.write_str(&origins.join(":"))?;
                }
                write!(f, ", {})", c.head)
            }
        }
        D(self, m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Error)]
pub enum Halt {
    #[error("no transition")]
    NoTransition,
    #[error("empty stack")]
    EmptyStack,
    #[error("hat move must be expanded first")]
    HatMove,
}

/// One application of the move relation.
pub fn step(m: &Machine, c: &Configuration, word: &[char]) -> Result<Configuration, Halt> {
    let (z, origin) = c.top().ok_or(Halt::EmptyStack)?;
    let mv = m.get(c.state, Letter::at(word, c.head), z).ok_or(Halt::NoTransition)?;
    let Action::Core { push, direction } = &mv.action else {
        return Err(Halt::HatMove);
    };
    let mut next = c.clone();
    next.state = mv.target;
    next.head = moved(c.head, *direction, origin);
    if push.is_empty() {
        next.stack.pop();
    } else {
        next.stack.extend(push.iter().rev().map(|&x| (x, next.head)));
    }
    Ok(next)
}

pub(crate) fn moved(head: usize, d: Direction, origin: usize) -> usize {
    match d {
        Direction::Left => head - 1,
        Direction::Down => head,
        Direction::Up => origin,
        Direction::Right => head + 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreMove {
    pub target: StateId,
    /// New top first.
    pub push: Vec<SymbolId>,
    pub direction: Direction,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("machine has hat moves; expand them first")]
pub struct HatMovesPresent;

/// Dense transition table of a hat-free machine, indexed by state, tape
/// cell class and stack symbol. Cell classes: 0 is `⊳`, `1..=k` the letters in
/// alphabet order, `k + 1` is `⊲`.
#[derive(Clone, Debug)]
pub struct Table {
    letters: usize,
    symbols: usize,
    moves: Vec<Option<CoreMove>>,
    alphabet: Vec<char>,
    finals: Vec<bool>,
    initial: StateId,
    bottom: SymbolId,
}

impl Table {
    pub fn new(m: &Machine) -> Result<Self, HatMovesPresent> {
        let letters = m.alphabet().len() + 2;
        let symbols = m.symbol_count();
        let mut t = Table {
            letters,
            symbols,
            moves: vec![None; m.state_count() * letters * symbols],
            alphabet: m.alphabet().to_vec(),
            finals: m.states().map(|q| m.is_final(q)).collect(),
            initial: m.initial(),
            bottom: m.bottom(),
        };
        for (&(q, a, z), mv) in m.delta() {
            let Action::Core { push, direction } = &mv.action else {
                return Err(HatMovesPresent);
            };
            let i = t.slot(q, t.letter_class(a), z);
            t.moves[i] = Some(CoreMove {
                target: mv.target,
                push: push.clone(),
                direction: *direction,
            });
        }
        Ok(t)
    }

    fn slot(&self, q: StateId, class: usize, z: SymbolId) -> usize {
        (q.index() * self.letters + class) * self.symbols + z.index()
    }

    pub fn letter_class(&self, a: Letter) -> usize {
        match a {
            Letter::LeftEnd => 0,
            Letter::Char(c) => 1 + self.alphabet.binary_search(&c).expect("letter in alphabet"),
            Letter::RightEnd => self.letters - 1,
        }
    }

    /// Cell classes of `⊳ word ⊲`; fails on the first letter outside Σ.
    pub fn encode(&self, word: &[char]) -> Result<Vec<usize>, char> {
        let mut tape = Vec::with_capacity(word.len() + 2);
        tape.push(0);
        for &c in word {
            tape.push(1 + self.alphabet.binary_search(&c).map_err(|_| c)?);
        }
        tape.push(self.letters - 1);
        Ok(tape)
    }

    pub fn get(&self, q: StateId, class: usize, z: SymbolId) -> Option<&CoreMove> {
        self.moves[self.slot(q, class, z)].as_ref()
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q.index()]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn bottom(&self) -> SymbolId {
        self.bottom
    }

    pub fn state_count(&self) -> usize {
        self.finals.len()
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// No transition applies and the stack is not empty.
    NoTransition,
    /// The stack emptied in a non-final state.
    NonFinalHalt,
    /// The stack emptied in a final state away from the right end-marker.
    NotAtRightEnd,
    /// Stuck in a final state at the right end-marker with symbols left.
    StackNotEmpty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RunOutcome {
    Accept,
    Reject(RejectReason),
    BudgetExhausted,
}

impl RunOutcome {
    pub fn accepted(self) -> bool {
        self == RunOutcome::Accept
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub steps: u64,
}

/// `1000 × (n + 2) × |Q| × |Γ|`, saturating.
pub fn default_step_limit(m: &Machine, word_len: usize) -> u64 {
    1000u64
        .saturating_mul(word_len as u64 + 2)
        .saturating_mul(m.state_count() as u64)
        .saturating_mul(m.symbol_count() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Push,
    Pop,
}

/// What a single move did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveEffect {
    pub kind: EventKind,
    /// For pops: the removed entry and the move's direction.
    pub popped: Option<(SymbolId, usize)>,
    pub pop_direction: Option<Direction>,
}

/// Step-by-step execution over a [`Table`].
#[derive(Clone, Debug)]
pub struct Runner<'t> {
    table: &'t Table,
    tape: Vec<usize>,
    config: Configuration,
    steps: u64,
}

impl<'t> Runner<'t> {
    pub fn new(table: &'t Table, tape: Vec<usize>) -> Self {
        Runner {
            table,
            tape,
            config: Configuration {
                state: table.initial(),
                stack: vec![(table.bottom(), 0)],
                head: 0,
            },
            steps: 0,
        }
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn step(&mut self) -> Result<MoveEffect, Halt> {
        let c = &mut self.config;
        let (z, origin) = c.top().ok_or(Halt::EmptyStack)?;
        let mv = self
            .table
            .get(c.state, self.tape[c.head], z)
            .ok_or(Halt::NoTransition)?;
        c.state = mv.target;
        c.head = moved(c.head, mv.direction, origin);
        self.steps += 1;
        if mv.push.is_empty() {
            let popped = c.stack.pop();
            Ok(MoveEffect {
                kind: EventKind::Pop,
                popped,
                pop_direction: Some(mv.direction),
            })
        } else {
            let head = c.head;
            c.stack.extend(mv.push.iter().rev().map(|&x| (x, head)));
            Ok(MoveEffect {
                kind: EventKind::Push,
                popped: None,
                pop_direction: None,
            })
        }
    }

    /// Classifies a halted configuration.
    pub fn verdict(&self, halt: Halt) -> RunOutcome {
        let c = &self.config;
        let at_end = c.head == self.tape.len() - 1;
        let fin = self.table.is_final(c.state);
        match halt {
            Halt::EmptyStack if fin && at_end => RunOutcome::Accept,
            Halt::EmptyStack if fin => RunOutcome::Reject(RejectReason::NotAtRightEnd),
            Halt::EmptyStack => RunOutcome::Reject(RejectReason::NonFinalHalt),
            _ if fin && at_end => RunOutcome::Reject(RejectReason::StackNotEmpty),
            _ => RunOutcome::Reject(RejectReason::NoTransition),
        }
    }

    /// Runs until halt or until `limit` moves have been made.
    pub fn run(&mut self, limit: u64) -> RunOutcome {
        loop {
            if self.steps >= limit && !self.config.stack.is_empty() {
                return RunOutcome::BudgetExhausted;
            }
            if let Err(h) = self.step() {
                return self.verdict(h);
            }
        }
    }
}

/// Runs `table` on a word already encoded with [`Table::encode`].
pub fn run_table(table: &Table, tape: Vec<usize>, limit: u64) -> RunReport {
    let mut r = Runner::new(table, tape);
    let outcome = r.run(limit);
    RunReport {
        outcome,
        steps: r.steps(),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error(transparent)]
    Hat(#[from] HatMovesPresent),
    #[error("letter {0:?} is not in the input alphabet")]
    Letter(char),
}

/// Runs the machine from `(q0, Z0×0, 0)` for at most `step_limit` moves.
pub fn run_direct(m: &Machine, word: &[char], step_limit: u64) -> Result<RunReport, RunError> {
    let t = Table::new(m)?;
    let tape = t.encode(word).map_err(RunError::Letter)?;
    Ok(run_table(&t, tape, step_limit))
}

/// A move with the configurations around it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: u64,
    pub kind: EventKind,
    pub before: Configuration,
    pub after: Configuration,
    pub popped: Option<(SymbolId, usize)>,
    pub pop_direction: Option<Direction>,
}

/// Like [`run_direct`], also recording every move.
pub fn run_traced(m: &Machine, word: &[char], step_limit: u64) -> Result<(RunReport, Vec<TraceEvent>), RunError> {
    let t = Table::new(m)?;
    let tape = t.encode(word).map_err(RunError::Letter)?;
    let mut r = Runner::new(&t, tape);
    let mut events = Vec::new();
    let outcome = loop {
        if r.steps() >= step_limit && !r.config().stack.is_empty() {
            break RunOutcome::BudgetExhausted;
        }
        let before = r.config().clone();
        match r.step() {
            Ok(e) => events.push(TraceEvent {
                step: r.steps(),
                kind: e.kind,
                before,
                after: r.config().clone(),
                popped: e.popped,
                pop_direction: e.pop_direction,
            }),
            Err(h) => break r.verdict(h),
        }
    };
    Ok((
        RunReport {
            outcome,
            steps: r.steps(),
        },
        events,
    ))
}
