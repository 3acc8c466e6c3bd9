use std::collections::HashMap;

use super::dpda::Dpda;
use crate::pppda::{Direction, HatDirection, Letter, MachineBuilder, MachineError, Move, StateId, SymbolId};

/// A copy of a DPDA's finite control and stack alphabet inside a machine.
pub(crate) struct Embedding {
    /// The state simulating each DPDA state.
    pub sim: Vec<StateId>,
    /// The state entered when a move targets each DPDA state; differs from
    /// `sim` where the caller wants to act on arrival.
    pub enter: Vec<StateId>,
    /// The machine symbol for each DPDA stack symbol.
    pub symbols: Vec<SymbolId>,
}

/// Cells the embedded simulation can read: the letters and `⊲`.
pub(crate) fn inner_letters(b: &MachineBuilder) -> Vec<Letter> {
    b.letters().into_iter().filter(|&a| a != Letter::LeftEnd).collect()
}

/// Emits the moves of `d` for every cell in `letters` and every machine
/// symbol in `all`. A DPDA move `(s, a, Z) → (t, γ)` becomes a pop when
/// `γ = ε`, a hat move when `γ = Z`, a push of the part above `Z` when `γ`
/// ends in `Z`, and otherwise a pop into a shared state that pushes `γ`.
/// Letter moves go right, ε-moves stay. Wherever `d` has no move, including
/// on symbols not its own, `stuck` decides.
pub(crate) fn emit_dpda(
    b: &mut MachineBuilder,
    d: &Dpda,
    e: &Embedding,
    letters: &[Letter],
    all: &[SymbolId],
    prefix: &str,
    mut stuck: impl FnMut(Letter, SymbolId) -> Option<Move>,
) -> Result<(), MachineError> {
    let own: HashMap<SymbolId, usize> = e.symbols.iter().enumerate().map(|(z, &x)| (x, z)).collect();
    let mut setters: HashMap<(StateId, Vec<SymbolId>), StateId> = HashMap::new();
    for s in 0..d.state_count() {
        for &a in letters {
            for &y in all {
                let found = own.get(&y).and_then(|&z| match d.get(s, None, z) {
                    Some(mv) => Some((mv, z, Direction::Down)),
                    None => match a {
                        Letter::Char(c) => d.get(s, Some(c), z).map(|mv| (mv, z, Direction::Right)),
                        _ => None,
                    },
                });
                let Some((mv, z, dir)) = found else {
                    if let Some(m) = stuck(a, y) {
                        b.add(e.sim[s], a, y, m)?;
                    }
                    continue;
                };
                let target = e.enter[mv.target];
                let push: Vec<SymbolId> = mv.push.iter().map(|&x| e.symbols[x]).collect();
                let m = if push.is_empty() {
                    Move::pop(target, dir)
                } else if mv.push == [z] {
                    let hat = if dir == Direction::Right { HatDirection::Right } else { HatDirection::Down };
                    Move::hat(target, hat)
                } else if mv.push.last() == Some(&z) {
                    Move::push(target, push[..push.len() - 1].to_vec(), dir)
                } else {
                    let key = (target, push.clone());
                    let setter = match setters.get(&key) {
                        Some(&q) => q,
                        None => {
                            let name = format!("{prefix}set:{}", b.state_name(target));
                            let q = b.fresh_state(&name);
                            for &a2 in letters {
                                for &y2 in all {
                                    b.add(q, a2, y2, Move::push(target, push.clone(), Direction::Down))?;
                                }
                            }
                            setters.insert(key, q);
                            q
                        }
                    };
                    Move::pop(setter, dir)
                };
                b.add(e.sim[s], a, y, m)?;
            }
        }
    }
    Ok(())
}
