use super::machine::{Direction, HatDirection, Letter, Machine, MachineBuilder, Move};

/// The three-state machine recognizing `{aⁿbⁿcⁿ | n ≥ 1}`.
///
/// In `q0` it pushes `Y` at position 1, an `X` per `a` and pops one per `b`;
/// reading `c` with `Y` on top jumps back to position 1 in `q1`, which skips
/// the `a`s and compares the `b`s against the `c`s.
pub fn builtin_anbncn() -> Machine {
    let mut b = MachineBuilder::new(['a', 'b', 'c'], false);
    let q0 = b.state("q0");
    let q1 = b.state("q1");
    let qf = b.state("qf");
    let z0 = b.symbol("Z0");
    let y = b.symbol("Y");
    let x = b.symbol("X");
    b.set_initial(q0);
    b.set_bottom(z0);
    b.add_final(qf);
    let (a, bb, c) = (Letter::Char('a'), Letter::Char('b'), Letter::Char('c'));
    let entries = [
        (q0, Letter::LeftEnd, z0, Move::push(q0, vec![y], Direction::Right)),
        (q0, a, y, Move::push(q0, vec![x], Direction::Right)),
        (q0, a, x, Move::push(q0, vec![x], Direction::Right)),
        (q0, bb, x, Move::pop(q0, Direction::Right)),
        (q0, c, y, Move::pop(q1, Direction::Up)),
        (q1, a, z0, Move::hat(q1, HatDirection::Right)),
        (q1, bb, z0, Move::push(q1, vec![x], Direction::Right)),
        (q1, bb, x, Move::push(q1, vec![x], Direction::Right)),
        (q1, c, x, Move::pop(q1, Direction::Right)),
        (q1, Letter::RightEnd, z0, Move::pop(qf, Direction::Down)),
    ];
    for (q, l, z, m) in entries {
        b.add(q, l, z, m).expect("distinct keys");
    }
    b.build().expect("valid machine")
}

/// One state `q`, symbols `Z` (bottom) and `Z'`: on every cell `Z` pushes
/// `Z'` without moving and `Z'` is popped upwards, returning to the same
/// surface configuration forever.
pub fn looping_machine(alphabet: impl IntoIterator<Item = char>) -> Machine {
    let mut b = MachineBuilder::new(alphabet, false);
    let q = b.state("q");
    let z = b.symbol("Z");
    let z1 = b.symbol("Z'");
    b.set_initial(q);
    b.set_bottom(z);
    for sigma in b.letters() {
        b.add(q, sigma, z, Move::push(q, vec![z1], Direction::Down)).expect("fresh key");
        b.add(q, sigma, z1, Move::pop(q, Direction::Up)).expect("fresh key");
    }
    b.build().expect("valid machine")
}
