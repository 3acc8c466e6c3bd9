//! Deterministic pointer pushdown automata: representation, text format,
//! direct execution, hat-move expansion and normalization.

mod builtin;
mod exec;
mod hat;
mod machine;
mod normal;
mod text;

pub use builtin::{builtin_anbncn, looping_machine};
pub(crate) use exec::moved;
pub(crate) use text::parse_alphabet;
pub use exec::{
    default_step_limit, run_direct, run_table, run_traced, step, Configuration, CoreMove, EventKind, Halt,
    HatMovesPresent, MoveEffect, RejectReason, RunError, RunOutcome, RunReport, Runner, Table, TraceEvent,
};
pub use hat::desugar_hat_moves;
pub use machine::{
    valid_machine_name, Action, Direction, HatDirection, Key, Letter, Machine, MachineBuilder, MachineError, Move,
    StateId, SymbolId,
};
pub use normal::{check_normal_form, normalize, NormalFormViolation};
pub use text::{parse_machine_text, MachineTextError};
