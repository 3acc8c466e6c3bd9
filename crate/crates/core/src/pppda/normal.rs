use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::hat::desugar_hat_moves;
use super::machine::{Action, Direction, Letter, Machine, MachineBuilder, Move, StateId, SymbolId};

struct Normalizer<'m> {
    m: &'m Machine,
    b: MachineBuilder,
    virt: HashMap<StateId, StateId>,
    wrapped: HashMap<SymbolId, SymbolId>,
    pending: BTreeMap<(StateId, Direction), StateId>,
    hats: BTreeSet<SymbolId>,
    letters: Vec<Letter>,
}

impl Normalizer<'_> {
    /// State simulating `q` while the simulated head is on `⊳` and the real
    /// head is on cell 1.
    fn virt(&mut self, q: StateId) -> StateId {
        if let Some(&v) = self.virt.get(&q) {
            return v;
        }
        let v = self.b.fresh_state(&format!("virt:{}", self.m.state_name(q)));
        self.virt.insert(q, v);
        v
    }

    /// Stand-in for a symbol pushed while the simulated head is on `⊳`.
    fn wrap(&mut self, z: SymbolId) -> SymbolId {
        if let Some(&w) = self.wrapped.get(&z) {
            return w;
        }
        let w = self.b.fresh_symbol(&format!("wrap:{}", self.m.symbol_name(z)));
        self.wrapped.insert(z, w);
        w
    }

    /// State that pops whatever is on top with `Down` and enters `p`, after a
    /// hat symbol pushed in `dir` has been removed.
    fn pending(&mut self, p: StateId, dir: Direction) -> StateId {
        if let Some(&s) = self.pending.get(&(p, dir)) {
            return s;
        }
        let s = self
            .b
            .fresh_state(&format!("pop{}:{}", dir.keyword(), self.m.state_name(p)));
        self.pending.insert((p, dir), s);
        s
    }

    fn key_name(&self, q: StateId, a: Letter, top: SymbolId) -> String {
        format!("{}:{}:{}", self.b.state_name(q), letter_tag(a), self.b.symbol_name(top))
    }

    /// Entries for `(q, a, top)` performing the push of `symbols` (new top
    /// first) one symbol per move: the deepest with `dir`, the rest with
    /// `Down`, ending in `target`.
    fn push_chain(&mut self, q: StateId, letters: &[Letter], top: SymbolId, symbols: &[SymbolId], dir: Direction, target: StateId) {
        let k = symbols.len();
        let base = format!("push:{}", self.key_name(q, letters[0], top));
        let mut chain: Vec<StateId> = (1..k).map(|i| self.b.fresh_state(&format!("{base}:{i}"))).collect();
        chain.push(target);
        // chain[0] is entered after the deepest symbol is pushed.
        let first = if k == 1 { target } else { chain[0] };
        for &a in letters {
            self.b
                .add(q, a, top, Move::push(first, vec![symbols[k - 1]], dir))
                .expect("fresh key");
        }
        for i in 1..k {
            let sym_on_top = symbols[k - i];
            let next = if i + 1 == k { target } else { chain[i] };
            for &a in &self.letters.clone() {
                self.b
                    .add(chain[i - 1], a, sym_on_top, Move::push(next, vec![symbols[k - 1 - i]], Direction::Down))
                    .expect("fresh chain state");
            }
        }
    }

    /// A pop moving `dir` (left or right) as a hat push in `dir` followed by
    /// a `Down` pop.
    fn pop_sideways(&mut self, q: StateId, letters: &[Letter], top: SymbolId, dir: Direction, target: StateId) {
        let hat = self.b.fresh_symbol(&format!("hat:{}", self.key_name(q, letters[0], top)));
        self.hats.insert(hat);
        let pend = self.pending(target, dir);
        for &a in letters {
            self.b.add(q, a, top, Move::push(pend, vec![hat], dir)).expect("fresh key");
        }
        for &a in &self.letters.clone() {
            self.b.add(pend, a, hat, Move::pop(pend, Direction::Down)).expect("fresh hat symbol");
        }
    }

    /// Entry of the original machine applied while the simulated head is
    /// where the real head is.
    #[allow(clippy::too_many_arguments)]
    fn real(&mut self, q: StateId, a: Letter, top: SymbolId, wrapped: bool, push: &[SymbolId], dir: Direction, p: StateId) {
        if !push.is_empty() {
            self.push_chain(q, &[a], top, push, dir, p);
            return;
        }
        match dir {
            Direction::Down => self.b.add(q, a, top, Move::pop(p, Direction::Down)).expect("fresh key"),
            Direction::Up => {
                let target = if wrapped { self.virt(p) } else { p };
                self.b.add(q, a, top, Move::pop(target, Direction::Up)).expect("fresh key");
            }
            Direction::Left | Direction::Right => self.pop_sideways(q, &[a], top, dir, p),
        }
    }

    /// Entry reading `⊳` in the original machine, applied in a virtual state
    /// on every cell the real head can see at position 1.
    fn virtual_entry(&mut self, q: StateId, z: SymbolId, push: &[SymbolId], dir: Direction, p: StateId) {
        let vq = self.virt(q);
        let top = self.wrap(z);
        let cells: Vec<Letter> = self.letters.iter().copied().filter(|&l| l != Letter::LeftEnd).collect();
        match (push.is_empty(), dir) {
            (false, Direction::Right) => self.push_chain(vq, &cells, top, push, Direction::Down, p),
            (false, _) => {
                let wrapped: Vec<SymbolId> = push.iter().map(|&x| self.wrap(x)).collect();
                let vp = self.virt(p);
                self.push_chain(vq, &cells, top, &wrapped, Direction::Down, vp);
            }
            (true, Direction::Right) => {
                for a in cells {
                    self.b.add(vq, a, top, Move::pop(p, Direction::Down)).expect("fresh key");
                }
            }
            (true, _) => {
                let vp = self.virt(p);
                for a in cells {
                    self.b.add(vq, a, top, Move::pop(vp, Direction::Down)).expect("fresh key");
                }
            }
        }
    }
}

fn letter_tag(a: Letter) -> String {
    match a {
        Letter::LeftEnd => "<".into(),
        Letter::Char(c) => c.to_string(),
        Letter::RightEnd => ">".into(),
    }
}

/// Transforms a machine into the restricted form needed for extraction:
///
/// 1. pops move only `Down` or `Up` (sideways pops become a hat push in that
///    direction followed by a `Down` pop);
/// 2. every push adds one symbol (longer pushes become chains of `Down`
///    pushes through fresh states);
/// 3. a fresh bottom symbol stays below the original one and is popped with
///    `Down` on `⊲` only, from states that were final, into the single new
///    final state;
/// 4. for one-way machines, the only move reading `⊳` is the initial one,
///    which moves to cell 1. Afterwards, time the original machine spends on
///    `⊳` is simulated from cell 1 by `virt:` states, and symbols it pushes
///    there are replaced by `wrap:` symbols whose `Up` pop re-enters a
///    `virt:` state;
/// 5. consequently the last pop moves `Down`.
///
/// Hat moves are expanded first. Two-way machines get properties 1–3 and 5.
pub fn normalize(m: &Machine) -> Machine {
    let m = &desugar_hat_moves(m);
    let mut b = MachineBuilder::new(m.alphabet().iter().copied(), m.two_way());
    for q in m.states() {
        b.state(m.state_name(q));
    }
    for z in m.symbols() {
        b.symbol(m.symbol_name(z));
    }
    let init = b.fresh_state("init");
    let accept = b.fresh_state("accept");
    let bottom = b.fresh_symbol("bottom");
    b.set_initial(init);
    b.set_bottom(bottom);
    b.add_final(accept);
    let one_way = !m.two_way();
    // One-way normalized machines never see `⊳` after the initial move.
    let letters: Vec<Letter> = m
        .letters()
        .into_iter()
        .filter(|&a| !(one_way && a == Letter::LeftEnd))
        .collect();
    let mut n = Normalizer {
        m,
        b,
        virt: HashMap::new(),
        wrapped: HashMap::new(),
        pending: BTreeMap::new(),
        hats: BTreeSet::new(),
        letters: letters.clone(),
    };

    if one_way {
        let vq0 = n.virt(m.initial());
        let wz0 = n.wrap(m.bottom());
        n.b.add(init, Letter::LeftEnd, bottom, Move::push(vq0, vec![wz0], Direction::Right))
            .expect("fresh key");
    } else {
        n.b.add(init, Letter::LeftEnd, bottom, Move::push(m.initial(), vec![m.bottom()], Direction::Down))
            .expect("fresh key");
    }

    // Ids of original states and symbols are unchanged in the builder.
    for (&(q, a, z), mv) in m.delta() {
        let Action::Core { push, direction } = &mv.action else {
            unreachable!("hat moves expanded")
        };
        let p = mv.target;
        if one_way && a == Letter::LeftEnd {
            n.virtual_entry(q, z, push, *direction, p);
            continue;
        }
        n.real(q, a, z, false, push, *direction, p);
        if one_way {
            let wz = n.wrap(z);
            n.real(q, a, wz, true, push, *direction, p);
        }
    }

    // Pending states pop the symbol the hat was pushed on.
    let poppable: Vec<SymbolId> = n
        .b
        .symbol_ids()
        .filter(|z| *z != bottom && !n.hats.contains(z))
        .collect();
    for (&(p, _), &pend) in &n.pending.clone() {
        for &a in &letters {
            for &z in &poppable {
                n.b.add(pend, a, z, Move::pop(p, Direction::Down)).expect("fresh key");
            }
        }
    }

    for &f in m.finals() {
        n.b.add(f, Letter::RightEnd, bottom, Move::pop(accept, Direction::Down))
            .expect("fresh key");
    }
    n.b.build().expect("normalization preserves validity")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalFormViolation {
    #[error("machine is two-way")]
    TwoWay,
    #[error("machine has hat moves")]
    HatMoves,
    #[error("transition ({0}, {1}, {2}) pops sideways")]
    SidewaysPop(String, String, String),
    #[error("transition ({0}, {1}, {2}) pushes more than one symbol")]
    MultiPush(String, String, String),
    #[error("transition ({0}, {1}, {2}) reads the left end-marker")]
    ReadsLeftEnd(String, String, String),
    #[error("initial transition must push one symbol moving right")]
    BadInitialMove,
    #[error("transition ({0}, {1}, {2}) pushes the bottom symbol or enters the initial state")]
    BottomOrInitialReused(String, String, String),
    #[error("transition ({0}, {1}, {2}) pops the bottom symbol other than downwards on `>` into a final state")]
    BadBottomPop(String, String, String),
}

/// Checks the structural properties produced by [`normalize`] for one-way
/// machines.
pub fn check_normal_form(m: &Machine) -> Result<(), NormalFormViolation> {
    use NormalFormViolation::*;
    if m.two_way() {
        return Err(TwoWay);
    }
    if m.has_hat_moves() {
        return Err(HatMoves);
    }
    let q0 = m.initial();
    let z0 = m.bottom();
    match m.get(q0, Letter::LeftEnd, z0).map(|mv| &mv.action) {
        Some(Action::Core { push, direction }) if push.len() == 1 && *direction == Direction::Right => {}
        _ => return Err(BadInitialMove),
    }
    for (key, mv) in m.delta() {
        let (q, a, z) = *key;
        let named = || m.describe(key);
        let Action::Core { push, direction } = &mv.action else {
            unreachable!("checked above")
        };
        if (q, a, z) != (q0, Letter::LeftEnd, z0) {
            if a == Letter::LeftEnd || q == q0 {
                let (x, y, w) = named();
                return Err(ReadsLeftEnd(x, y, w));
            }
            if mv.target == q0 || push.contains(&z0) {
                let (x, y, w) = named();
                return Err(BottomOrInitialReused(x, y, w));
            }
        }
        if push.len() > 1 {
            let (x, y, w) = named();
            return Err(MultiPush(x, y, w));
        }
        if push.is_empty() {
            if !matches!(direction, Direction::Down | Direction::Up) {
                let (x, y, w) = named();
                return Err(SidewaysPop(x, y, w));
            }
            if z == z0 && (a != Letter::RightEnd || *direction != Direction::Down || !m.is_final(mv.target)) {
                let (x, y, w) = named();
                return Err(BadBottomPop(x, y, w));
            }
        }
    }
    Ok(())
}
