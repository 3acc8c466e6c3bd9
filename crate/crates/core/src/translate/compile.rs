use crate::peg::{desugar, to_cnf, CnfError, CnfGrammar, CnfRule, Grammar, NtId};
use crate::pppda::{desugar_hat_moves, Direction, HatDirection, Letter, Machine, MachineBuilder, Move, StateId, SymbolId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AuxSlot {
    /// Second half of a rule has started (`q_{A₂}`).
    Second,
    /// Second half of a sequence failed (`q_{A₂−}`).
    SecondFailed,
}

/// Roles of the states of a compiled machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PegStateName {
    Initial,
    /// Expands the nonterminal on top of the stack.
    MainWork,
    Final,
    /// The nonterminal has just succeeded or failed.
    Signed(NtId, Sign),
    Aux(NtId, AuxSlot),
}

impl PegStateName {
    pub fn base_name(self, g: &Grammar) -> String {
        match self {
            PegStateName::Initial => "peg:q0".into(),
            PegStateName::MainWork => "peg:q".into(),
            PegStateName::Final => "peg:qf".into(),
            PegStateName::Signed(a, Sign::Plus) => format!("peg:{}+", machine_safe(g.name(a))),
            PegStateName::Signed(a, Sign::Minus) => format!("peg:{}-", machine_safe(g.name(a))),
            PegStateName::Aux(a, AuxSlot::Second) => format!("peg:{}:2", machine_safe(g.name(a))),
            PegStateName::Aux(a, AuxSlot::SecondFailed) => format!("peg:{}:2-", machine_safe(g.name(a))),
        }
    }
}

/// Grammar names may contain characters that machine names cannot.
fn machine_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_whitespace() || c.is_control() || c == ',' { '_' } else { c })
        .collect()
}

struct Compiler<'g> {
    g: &'g CnfGrammar,
    b: MachineBuilder,
    letters: Vec<Letter>,
    plus: Vec<StateId>,
    minus: Vec<StateId>,
    sym: Vec<SymbolId>,
}

impl Compiler<'_> {
    fn state(&mut self, role: PegStateName) -> StateId {
        let name = role.base_name(self.g);
        self.b.fresh_state(&name)
    }

    fn symbol(&mut self, base: String) -> SymbolId {
        self.b.fresh_symbol(&base)
    }

    fn add(&mut self, q: StateId, a: Letter, z: SymbolId, m: Move) {
        self.b.add(q, a, z, m).expect("compiled entries have distinct keys");
    }

    fn every_letter(&mut self, q: StateId, z: SymbolId, m: Move) {
        for a in self.letters.clone() {
            self.add(q, a, z, m.clone());
        }
    }
}

/// Builds a one-way machine recognizing `L(g)`.
///
/// The machine keeps the nonterminal being parsed on the stack with its
/// start position as origin. `peg:q` expands the top nonterminal; `peg:A+`
/// and `peg:A-` report success or failure of `A` to the rule that called it.
/// A success leaves the head after the parsed part; a failure returns the
/// head to the start position with an `Up` pop. Rules `a` and `""` use hat
/// moves; see [`compile`] for a hat-free result.
pub fn peg_to_dppda(g: &CnfGrammar) -> Machine {
    let mut b = MachineBuilder::new(g.alphabet().iter().copied(), false);
    let letters = b.letters();
    let q0 = b.state("peg:q0");
    let main = b.state("peg:q");
    let qf = b.state("peg:qf");
    let z0 = b.symbol("sym:Z0");
    b.set_initial(q0);
    b.set_bottom(z0);
    b.add_final(qf);
    let mut c = Compiler {
        g,
        b,
        letters,
        plus: Vec::new(),
        minus: Vec::new(),
        sym: Vec::new(),
    };
    for a in g.nonterminals() {
        let p = c.state(PegStateName::Signed(a, Sign::Plus));
        let m = c.state(PegStateName::Signed(a, Sign::Minus));
        let s = c.symbol(format!("sym:{}", machine_safe(g.name(a))));
        c.plus.push(p);
        c.minus.push(m);
        c.sym.push(s);
    }
    // Per-rule stack symbols and states.
    let mut first = vec![None; g.nonterminal_count()];
    let mut second = vec![None; g.nonterminal_count()];
    let mut aux = vec![None; g.nonterminal_count()];
    let mut aux_failed = vec![None; g.nonterminal_count()];
    for a in g.nonterminals() {
        let name = machine_safe(g.name(a));
        match g.shape(a) {
            CnfRule::Sequence(..) | CnfRule::Choice(..) => {
                first[a.index()] = Some(c.symbol(format!("sym:{name}:1")));
                second[a.index()] = Some(c.symbol(format!("sym:{name}:2")));
                aux[a.index()] = Some(c.state(PegStateName::Aux(a, AuxSlot::Second)));
                if matches!(g.shape(a), CnfRule::Sequence(..)) {
                    aux_failed[a.index()] = Some(c.state(PegStateName::Aux(a, AuxSlot::SecondFailed)));
                }
            }
            CnfRule::Not(_) => first[a.index()] = Some(c.symbol(format!("sym:{name}:1"))),
            CnfRule::Terminal(_) | CnfRule::Empty => {}
        }
    }
    let gamma: Vec<SymbolId> = c.b.symbol_ids().collect();

    let s = g.axiom();
    c.add(q0, Letter::LeftEnd, z0, Move::push(main, vec![c.sym[s.index()]], Direction::Right));
    c.add(c.plus[s.index()], Letter::RightEnd, z0, Move::pop(qf, Direction::Down));
    for a in g.nonterminals() {
        let (i, sym) = (a.index(), c.sym[a.index()]);
        c.every_letter(c.plus[i], sym, Move::pop(c.plus[i], Direction::Down));
        c.every_letter(c.minus[i], sym, Move::pop(c.minus[i], Direction::Down));
        let (plus, minus) = (c.plus[i], c.minus[i]);
        match g.shape(a) {
            CnfRule::Sequence(bn, cn) => {
                let (a1, a2) = (first[i].unwrap(), second[i].unwrap());
                let (q2, q2m) = (aux[i].unwrap(), aux_failed[i].unwrap());
                let (bs, cs) = (c.sym[bn.index()], c.sym[cn.index()]);
                c.every_letter(main, sym, Move::push(main, vec![bs, a1], Direction::Down));
                c.every_letter(c.plus[bn.index()], a1, Move::push(main, vec![cs, a2], Direction::Down));
                c.every_letter(c.minus[bn.index()], a1, Move::pop(minus, Direction::Up));
                c.every_letter(c.plus[cn.index()], a2, Move::pop(q2, Direction::Down));
                c.every_letter(q2, a1, Move::pop(plus, Direction::Down));
                c.every_letter(c.minus[cn.index()], a2, Move::pop(q2m, Direction::Up));
                c.every_letter(q2m, a1, Move::pop(minus, Direction::Up));
            }
            CnfRule::Choice(bn, cn) => {
                let (a1, a2) = (first[i].unwrap(), second[i].unwrap());
                let q2 = aux[i].unwrap();
                let (bs, cs) = (c.sym[bn.index()], c.sym[cn.index()]);
                c.every_letter(main, sym, Move::push(main, vec![bs, a1], Direction::Down));
                c.every_letter(c.plus[bn.index()], a1, Move::pop(plus, Direction::Down));
                c.every_letter(c.minus[bn.index()], a1, Move::pop(q2, Direction::Up));
                for &z in &gamma {
                    c.every_letter(q2, z, Move::push(main, vec![cs, a2], Direction::Down));
                }
                c.every_letter(c.plus[cn.index()], a2, Move::pop(plus, Direction::Down));
                c.every_letter(c.minus[cn.index()], a2, Move::pop(minus, Direction::Up));
            }
            CnfRule::Not(bn) => {
                let a1 = first[i].unwrap();
                let bs = c.sym[bn.index()];
                c.every_letter(main, sym, Move::push(main, vec![bs, a1], Direction::Down));
                c.every_letter(c.plus[bn.index()], a1, Move::pop(minus, Direction::Up));
                c.every_letter(c.minus[bn.index()], a1, Move::pop(plus, Direction::Up));
            }
            CnfRule::Terminal(t) => {
                for l in c.letters.clone() {
                    let m = if l == Letter::Char(t) {
                        Move::hat(plus, HatDirection::Right)
                    } else {
                        Move::hat(minus, HatDirection::Down)
                    };
                    c.add(main, l, sym, m);
                }
            }
            CnfRule::Empty => c.every_letter(main, sym, Move::hat(plus, HatDirection::Down)),
        }
    }
    c.b.build().expect("compiled machine is valid")
}

/// Desugars, converts to normal form, builds the machine and expands its
/// hat moves.
pub fn compile(g: &Grammar) -> Result<Machine, CnfError> {
    let cnf = to_cnf(&desugar(g))?;
    Ok(desugar_hat_moves(&peg_to_dppda(&cnf)))
}
