use std::collections::{HashMap, HashSet};

use super::ast::{fresh_name_in, Expression, Grammar, Node, NodeId};

struct Lowering<'g> {
    g: &'g Grammar,
    taken: HashSet<String>,
    repetition: HashMap<NodeId, String>,
    extra: Vec<(String, Expression)>,
}

impl Lowering<'_> {
    fn fresh(&mut self, id: NodeId) -> String {
        let taken = &self.taken;
        let name = fresh_name_in(&format!("#{}", id.0), |n| taken.contains(n));
        self.taken.insert(name.clone());
        name
    }

    /// Nonterminal `X` with `X <- e X / ""` for the repetition rooted at `id`.
    fn repetition(&mut self, id: NodeId, body: NodeId) -> String {
        if let Some(name) = self.repetition.get(&id) {
            return name.clone();
        }
        let name = self.fresh(id);
        self.repetition.insert(id, name.clone());
        let inner = self.lower(body);
        let rule = Expression::choice(
            Expression::seq(inner, Expression::Nonterminal(name.clone())),
            Expression::Empty,
        );
        self.extra.push((name.clone(), rule));
        name
    }

    fn lower(&mut self, id: NodeId) -> Expression {
        match *self.g.node(id) {
            Node::Empty => Expression::Empty,
            Node::Terminal(c) => Expression::Terminal(c),
            Node::Nonterminal(n) => Expression::Nonterminal(self.g.name(n).to_string()),
            Node::Sequence(a, b) => Expression::seq(self.lower(a), self.lower(b)),
            Node::Choice(a, b) => Expression::choice(self.lower(a), self.lower(b)),
            Node::Not(e) => Expression::not(self.lower(e)),
            Node::Star(e) => Expression::Nonterminal(self.repetition(id, e)),
            Node::Plus(e) => {
                let first = self.lower(e);
                Expression::seq(first, Expression::Nonterminal(self.repetition(id, e)))
            }
            Node::Optional(e) => Expression::choice(self.lower(e), Expression::Empty),
            Node::And(e) => Expression::not(Expression::not(self.lower(e))),
            Node::AnyChar => Expression::choice_all(self.g.alphabet().iter().map(|&c| Expression::Terminal(c)))
                .or_fail(),
            Node::Fail => Expression::not(Expression::Empty),
        }
    }
}

impl Expression {
    fn or_fail(self) -> Expression {
        match self {
            Expression::Fail => Expression::not(Expression::Empty),
            e => e,
        }
    }
}

/// Rewrites every sugar form into the core operators.
///
/// `e*` becomes a fresh `X <- e X / ""`, `e+` becomes `e X` with the same
/// kind of `X`, `e?` becomes `e / ""`, `&e` becomes `!!e`, `.` becomes the
/// ordered choice of all letters and the failure expression becomes `!""`.
/// Fresh nonterminals are named `#k` where `k` is the id of the repetition
/// node, primed if that name is already in use.
pub fn desugar(g: &Grammar) -> Grammar {
    if g.is_core() {
        return g.clone();
    }
    let mut low = Lowering {
        g,
        taken: g.nonterminals().map(|n| g.name(n).to_string()).collect(),
        repetition: HashMap::new(),
        extra: Vec::new(),
    };
    let mut rules = Vec::with_capacity(g.nonterminal_count());
    for nt in g.nonterminals() {
        let body = low.lower(g.rule(nt));
        rules.push((g.name(nt).to_string(), body));
    }
    rules.append(&mut low.extra);
    Grammar::new(rules, g.axiom_name(), g.alphabet().iter().copied())
        .expect("desugaring keeps names and references consistent")
}
