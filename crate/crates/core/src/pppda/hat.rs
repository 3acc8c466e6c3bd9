use super::machine::{Action, Direction, Letter, Machine, Move};

/// Replaces every hat move `δ(q, a, Z) = (p, ^d)` by a push of a fresh
/// symbol `H` moving in direction `d` into `p`, plus `δ(p, σ, H) = (p, ε, ↓)`
/// for every cell `σ`. Fresh symbols are named `hat:<state>:<letter>:<symbol>`.
pub fn desugar_hat_moves(m: &Machine) -> Machine {
    if !m.has_hat_moves() {
        return m.clone();
    }
    let mut b = m.to_builder();
    let letters = m.letters();
    for (&(q, a, z), mv) in m.delta() {
        let Action::Hat(h) = mv.action else { continue };
        let letter = match a {
            Letter::LeftEnd => "<".to_string(),
            Letter::Char(c) => c.to_string(),
            Letter::RightEnd => ">".to_string(),
        };
        let base = format!("hat:{}:{}:{}", m.state_name(q), letter, m.symbol_name(z));
        let hat = b.fresh_symbol(&base);
        b.replace(q, a, z, Move::push(mv.target, vec![hat], h.direction()));
        for &sigma in &letters {
            b.add(mv.target, sigma, hat, Move::pop(mv.target, Direction::Down))
                .expect("fresh symbol has no transitions");
        }
    }
    b.build().expect("expansion preserves validity")
}
