use std::collections::HashMap;

use thiserror::Error;

use super::dpda::Dpda;
use super::embed::{emit_dpda, inner_letters, Embedding};
use crate::pppda::{
    check_normal_form, desugar_hat_moves, normalize, Action, Direction, Letter, Machine, MachineBuilder, MachineError,
    Move, NormalFormViolation, StateId, SymbolId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConcatError {
    #[error("the right factor must be a one-way machine")]
    TwoWay,
    #[error("normalizing the right factor: {0}")]
    NotNormal(#[from] NormalFormViolation),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// A one-way machine for `X·Y`, where `x` recognizes `X` and `y` is a
/// one-way machine for `Y`.
///
/// The machine runs `x`. Whenever `x` enters a final state it pushes a
/// checkpoint naming that state, then runs (the normal form of) `y` from the
/// current cell as if that cell followed `⊳`. If `y` pops its bottom symbol
/// at `⊲` the machine empties its stack and accepts. If `y` gets stuck, its
/// symbols are popped down to the checkpoint, whose `Up` pop restores the
/// head, and `x` resumes from the recorded state.
pub fn left_concat_dcfl(x: &Dpda, y: &Machine) -> Result<Machine, ConcatError> {
    if y.two_way() {
        return Err(ConcatError::TwoWay);
    }
    let y = normalize(y);
    check_normal_form(&y)?;
    let (y_start, y_first) = match y.get(y.initial(), Letter::LeftEnd, y.bottom()).map(|mv| (&mv.action, mv.target)) {
        Some((Action::Core { push, .. }, r)) => (push[0], r),
        _ => return Err(NormalFormViolation::BadInitialMove.into()),
    };

    let mut b = MachineBuilder::new(x.alphabet().iter().chain(y.alphabet()).copied(), false);
    let q0 = b.state("init");
    b.set_initial(q0);
    let bottom = b.symbol("bottom");
    b.set_bottom(bottom);
    let drain = b.fresh_state("drain");
    let accept = b.fresh_state("accept");
    b.add_final(accept);
    let rollback = b.fresh_state("rollback");

    let sim: Vec<StateId> = (0..x.state_count())
        .map(|s| b.fresh_state(&format!("x:{}", x.state_name(s))))
        .collect();
    let mut checkpoints: HashMap<SymbolId, usize> = HashMap::new();
    let mut enter = sim.clone();
    let mut arrive = Vec::new();
    for s in (0..x.state_count()).filter(|&s| x.is_final(s)) {
        let q = b.fresh_state(&format!("x:{}!", x.state_name(s)));
        let k = b.fresh_symbol(&format!("ck:{}", x.state_name(s)));
        enter[s] = q;
        arrive.push((q, k));
        checkpoints.insert(k, s);
    }
    let x_symbols: Vec<SymbolId> = (0..x.symbol_count())
        .map(|z| b.fresh_symbol(&format!("x:{}", x.symbol_name(z))))
        .collect();
    let y_states: Vec<StateId> = y.states().map(|q| b.fresh_state(&format!("y:{}", y.state_name(q)))).collect();
    let y_symbols: Vec<SymbolId> = y.symbols().map(|z| b.fresh_symbol(&format!("y:{}", y.symbol_name(z)))).collect();
    let all: Vec<SymbolId> = b.symbol_ids().collect();
    let letters = inner_letters(&b);

    b.add(
        q0,
        Letter::LeftEnd,
        bottom,
        Move::push(enter[x.initial()], vec![x_symbols[x.bottom()]], Direction::Right),
    )?;
    let e = Embedding {
        sim: sim.clone(),
        enter,
        symbols: x_symbols,
    };
    emit_dpda(&mut b, x, &e, &letters, &all, "x:", |_, _| None)?;

    // Start `y` above a checkpoint; its first move stays on the current cell.
    let y_entry = vec![y_symbols[y_start.index()], y_symbols[y.bottom().index()]];
    for &(q, k) in &arrive {
        for &a in &letters {
            for &z in &all {
                let mut push = y_entry.clone();
                push.push(k);
                b.add(q, a, z, Move::push(y_states[y_first.index()], push, Direction::Down))?;
            }
        }
    }

    for q in y.states() {
        if q == y.initial() {
            continue;
        }
        let yq = y_states[q.index()];
        for &a in &letters {
            for z in y.symbols() {
                let yz = y_symbols[z.index()];
                let mv = match y.get(q, a, z) {
                    Some(mv) => match &mv.action {
                        Action::Core { push, direction } => Move::push(
                            y_states[mv.target.index()],
                            push.iter().map(|p| y_symbols[p.index()]).collect(),
                            *direction,
                        ),
                        Action::Hat(_) => unreachable!("normal form has no hat moves"),
                    },
                    None => Move::pop(rollback, Direction::Down),
                };
                b.add(yq, a, yz, mv)?;
            }
            for (&k, &s) in &checkpoints {
                let mv = if y.is_final(q) && a == Letter::RightEnd {
                    Move::pop(drain, Direction::Down)
                } else {
                    Move::pop(sim[s], Direction::Up)
                };
                b.add(yq, a, k, mv)?;
            }
        }
    }

    for &a in &letters {
        for &z in &y_symbols {
            b.add(rollback, a, z, Move::pop(rollback, Direction::Down))?;
        }
        for (&k, &s) in &checkpoints {
            b.add(rollback, a, k, Move::pop(sim[s], Direction::Up))?;
        }
    }
    for &z in &all {
        let target = if z == bottom { accept } else { drain };
        b.add(drain, Letter::RightEnd, z, Move::pop(target, Direction::Down))?;
    }
    Ok(desugar_hat_moves(&b.build()?))
}
