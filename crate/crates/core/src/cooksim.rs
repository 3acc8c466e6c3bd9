//! Linear-time simulation of pointer pushdown machines (one-way or two-way)
//! by memoizing, for each surface configuration, the configuration in which
//! its top symbol is popped.

use std::collections::HashMap;

use crate::pppda::{moved, Machine, RunError, StateId, SymbolId, Table};

/// State, top symbol, head position and the origin of the top symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceConfig {
    pub state: StateId,
    pub symbol: SymbolId,
    pub head: usize,
    pub origin: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entry {
    Unvisited,
    InProgress,
    /// The configuration from which the top symbol is popped.
    Done(SurfaceConfig),
    /// The machine gets stuck before popping the top symbol.
    DoneNoTerminator,
}

/// Memo of terminators for one word.
#[derive(Clone, Debug, Default)]
pub struct TerminatorTable {
    entries: HashMap<SurfaceConfig, Entry>,
    /// Lookups plus writes.
    pub ops: u64,
}

impl TerminatorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, c: &SurfaceConfig) -> Entry {
        self.entries.get(c).copied().unwrap_or(Entry::Unvisited)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn lookup(&mut self, c: &SurfaceConfig) -> Entry {
        self.ops += 1;
        self.get(c)
    }

    fn write(&mut self, c: SurfaceConfig, e: Entry) {
        self.ops += 1;
        let old = self.entries.insert(c, e);
        debug_assert!(
            !matches!(old, Some(Entry::Done(_) | Entry::DoneNoTerminator)),
            "memo entries are written once"
        );
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminator {
    Done(SurfaceConfig),
    NoTerminator,
    /// A surface configuration recurred while its terminator was being
    /// computed, so the machine runs forever.
    LoopDetected(SurfaceConfig),
}

/// Computing the terminator shared by `chain`, currently waiting for the
/// terminator of a pushed symbol.
struct Frame {
    chain: Vec<SurfaceConfig>,
    /// Symbols pushed by the current move that lie below the one being
    /// chased, deepest first.
    below: Vec<SymbolId>,
    /// Origin of the symbols pushed by the current move.
    origin: usize,
}

enum Step {
    /// Look at the move from the last configuration of the newest chain.
    Advance,
    /// Find the terminator of a pushed symbol.
    Query(SurfaceConfig),
    /// A pushed symbol of the newest frame has been chased; `None` means
    /// the machine got stuck.
    Resume(Option<SurfaceConfig>),
    /// The newest frame's terminator is known.
    Finish(Option<SurfaceConfig>),
}

/// The configuration in which the top symbol of `c` is first popped, with
/// every surface configuration met along the way memoized in `memo`.
/// Iterative; `tape` is the word encoded by [`Table::encode`].
pub fn terminator(table: &Table, tape: &[usize], c: SurfaceConfig, memo: &mut TerminatorTable) -> Terminator {
    let mut frames: Vec<Frame> = Vec::new();
    let mut step = Step::Query(c);
    loop {
        step = match step {
            Step::Query(c) => match memo.lookup(&c) {
                Entry::InProgress => return Terminator::LoopDetected(c),
                Entry::Done(d) if frames.is_empty() => return Terminator::Done(d),
                Entry::DoneNoTerminator if frames.is_empty() => return Terminator::NoTerminator,
                Entry::Done(d) => Step::Resume(Some(d)),
                Entry::DoneNoTerminator => Step::Resume(None),
                Entry::Unvisited => {
                    memo.write(c, Entry::InProgress);
                    frames.push(Frame {
                        chain: vec![c],
                        below: Vec::new(),
                        origin: 0,
                    });
                    Step::Advance
                }
            },
            Step::Advance => {
                let frame = frames.last_mut().expect("a frame to advance");
                let cur = *frame.chain.last().expect("chains are nonempty");
                match table.get(cur.state, tape[cur.head], cur.symbol) {
                    None => Step::Finish(None),
                    Some(mv) if mv.push.is_empty() => Step::Finish(Some(cur)),
                    Some(mv) => {
                        let head = moved(cur.head, mv.direction, cur.origin);
                        frame.below = mv.push[1..].iter().rev().copied().collect();
                        frame.origin = head;
                        Step::Query(SurfaceConfig {
                            state: mv.target,
                            symbol: mv.push[0],
                            head,
                            origin: head,
                        })
                    }
                }
            }
            Step::Resume(None) => Step::Finish(None),
            Step::Resume(Some(d)) => {
                let mv = table
                    .get(d.state, tape[d.head], d.symbol)
                    .expect("terminators are pop configurations");
                let head = moved(d.head, mv.direction, d.origin);
                let frame = frames.last_mut().expect("a frame to resume");
                if let Some(x) = frame.below.pop() {
                    Step::Query(SurfaceConfig {
                        state: mv.target,
                        symbol: x,
                        head,
                        origin: frame.origin,
                    })
                } else {
                    let base = *frame.chain.last().expect("chains are nonempty");
                    let next = SurfaceConfig {
                        state: mv.target,
                        symbol: base.symbol,
                        head,
                        origin: base.origin,
                    };
                    match memo.lookup(&next) {
                        Entry::Done(t) => Step::Finish(Some(t)),
                        Entry::DoneNoTerminator => Step::Finish(None),
                        Entry::InProgress => return Terminator::LoopDetected(next),
                        Entry::Unvisited => {
                            memo.write(next, Entry::InProgress);
                            frame.chain.push(next);
                            Step::Advance
                        }
                    }
                }
            }
            Step::Finish(result) => {
                let frame = frames.pop().expect("a finished frame");
                let entry = result.map_or(Entry::DoneNoTerminator, Entry::Done);
                for c in frame.chain {
                    memo.write(c, entry);
                }
                if frames.is_empty() {
                    return result.map_or(Terminator::NoTerminator, Terminator::Done);
                }
                Step::Resume(result)
            }
        };
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearReject {
    Loop(SurfaceConfig),
    Stuck,
    /// The last pop does not end in a final state.
    NonFinal,
    /// The last pop ends in a final state away from `⊲`.
    NotAtRightEnd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearOutcome {
    Accept,
    Reject(LinearReject),
}

impl LinearOutcome {
    pub fn accepted(self) -> bool {
        self == LinearOutcome::Accept
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearReport {
    pub outcome: LinearOutcome,
    /// Table lookups and writes.
    pub ops: u64,
    /// Surface configurations memoized.
    pub entries: usize,
}

/// Decides membership by computing the terminator of the initial surface
/// configuration and applying its pop: accepted iff that empties the stack
/// in a final state with the head on `⊲`.
pub fn run_linear(m: &Machine, word: &[char]) -> Result<LinearReport, RunError> {
    let table = Table::new(m)?;
    let tape = table.encode(word).map_err(RunError::Letter)?;
    Ok(run_linear_table(&table, &tape))
}

pub fn run_linear_table(table: &Table, tape: &[usize]) -> LinearReport {
    let mut memo = TerminatorTable::new();
    let start = SurfaceConfig {
        state: table.initial(),
        symbol: table.bottom(),
        head: 0,
        origin: 0,
    };
    let outcome = match terminator(table, tape, start, &mut memo) {
        Terminator::LoopDetected(c) => LinearOutcome::Reject(LinearReject::Loop(c)),
        Terminator::NoTerminator => LinearOutcome::Reject(LinearReject::Stuck),
        Terminator::Done(d) => {
            let mv = table.get(d.state, tape[d.head], d.symbol).expect("pop configuration");
            let head = moved(d.head, mv.direction, d.origin);
            if !table.is_final(mv.target) {
                LinearOutcome::Reject(LinearReject::NonFinal)
            } else if head != tape.len() - 1 {
                LinearOutcome::Reject(LinearReject::NotAtRightEnd)
            } else {
                LinearOutcome::Accept
            }
        }
    };
    LinearReport {
        outcome,
        ops: memo.ops,
        entries: memo.len(),
    }
}

/// `2 × |Q| × |Γ| × (n + 2) × 4`.
pub fn work_bound(m: &Machine, word_len: usize) -> u64 {
    2 * m.state_count() as u64 * m.symbol_count() as u64 * (word_len as u64 + 2) * 4
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkReport {
    pub ops: u64,
    pub bound: u64,
}

impl WorkReport {
    pub fn within_bound(&self) -> bool {
        self.ops <= self.bound
    }
}

/// Runs the linear simulation and compares its table operations with
/// [`work_bound`].
pub fn work_bound_check(m: &Machine, word: &[char]) -> Result<WorkReport, RunError> {
    let r = run_linear(m, word)?;
    Ok(WorkReport {
        ops: r.ops,
        bound: work_bound(m, word.len()),
    })
}
