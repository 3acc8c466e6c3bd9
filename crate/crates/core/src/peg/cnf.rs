use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

use super::ast::{fresh_name_in, Expression, Grammar, Node, NodeId, NtId};
use super::wf::check_well_formed;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("grammar contains sugar forms; desugar it first")]
    NotCore,
    #[error("grammar is not well-formed: left-recursive cycle {}", .0.join(" -> "))]
    IllFormed(Vec<String>),
    #[error("rule for `{0}` is not in normal form")]
    BadShape(String),
    #[error("axiom `{0}` occurs on a right-hand side")]
    AxiomOnRightSide(String),
}

/// A grammar whose rules all have one of the shapes `B / C`, `B C`, `!B`,
/// `a` or `""` (with `B`, `C` nonterminals) and whose axiom is never
/// referenced by a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfGrammar(Grammar);

impl CnfGrammar {
    /// Checks the shape restriction.
    pub fn new(g: Grammar) -> Result<Self, CnfError> {
        for nt in g.nonterminals() {
            let ok = match *g.node(g.rule(nt)) {
                Node::Empty | Node::Terminal(_) => true,
                Node::Choice(a, b) | Node::Sequence(a, b) => is_nt(&g, a) && is_nt(&g, b),
                Node::Not(a) => is_nt(&g, a),
                _ => false,
            };
            if !ok {
                return Err(CnfError::BadShape(g.name(nt).to_string()));
            }
        }
        let axiom = g.axiom();
        if g.nodes().contains(&Node::Nonterminal(axiom)) {
            return Err(CnfError::AxiomOnRightSide(g.axiom_name().to_string()));
        }
        Ok(CnfGrammar(g))
    }

    pub fn grammar(&self) -> &Grammar {
        &self.0
    }

    pub fn into_grammar(self) -> Grammar {
        self.0
    }

    /// The body of a rule by shape.
    pub fn shape(&self, nt: NtId) -> CnfRule {
        let g = &self.0;
        let nt_of = |id: NodeId| match *g.node(id) {
            Node::Nonterminal(n) => n,
            _ => unreachable!("checked at construction"),
        };
        match *g.node(g.rule(nt)) {
            Node::Empty => CnfRule::Empty,
            Node::Terminal(c) => CnfRule::Terminal(c),
            Node::Choice(a, b) => CnfRule::Choice(nt_of(a), nt_of(b)),
            Node::Sequence(a, b) => CnfRule::Sequence(nt_of(a), nt_of(b)),
            Node::Not(a) => CnfRule::Not(nt_of(a)),
            _ => unreachable!("checked at construction"),
        }
    }
}

fn is_nt(g: &Grammar, id: NodeId) -> bool {
    matches!(g.node(id), Node::Nonterminal(_))
}

impl Deref for CnfGrammar {
    type Target = Grammar;

    fn deref(&self) -> &Grammar {
        &self.0
    }
}

impl fmt::Display for CnfGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CnfRule {
    Choice(NtId, NtId),
    Sequence(NtId, NtId),
    Not(NtId),
    Terminal(char),
    Empty,
}

struct Builder<'g> {
    g: &'g Grammar,
    bodies: HashMap<String, Expression>,
    order: Vec<String>,
}

impl Builder<'_> {
    /// Compact structural rendering used for fresh names.
    fn render(&self, id: NodeId) -> String {
        let g = self.g;
        let atom = |x: NodeId| matches!(g.node(x), Node::Nonterminal(_) | Node::Terminal(_) | Node::Empty | Node::Not(_));
        let wrap = |x: NodeId, ok: bool| {
            if ok {
                self.render(x)
            } else {
                format!("({})", self.render(x))
            }
        };
        match *g.node(id) {
            Node::Nonterminal(n) => g.name(n).to_string(),
            Node::Terminal(c) => format!("\"{c}\""),
            Node::Empty => "\"\"".to_string(),
            Node::Not(e) => format!("!{}", wrap(e, atom(e))),
            Node::Sequence(a, b) => format!(
                "{}.{}",
                wrap(a, atom(a)),
                wrap(b, atom(b) || matches!(g.node(b), Node::Sequence(..)))
            ),
            Node::Choice(a, b) => format!(
                "{}/{}",
                wrap(a, atom(a) || matches!(g.node(a), Node::Sequence(..))),
                self.render(b)
            ),
            _ => unreachable!("core grammar"),
        }
    }

    /// Registers `body` under a name derived from `base`, reusing an existing
    /// rule with the same body.
    fn define(&mut self, base: String, body: Expression) -> String {
        let g = self.g;
        let bodies = &self.bodies;
        let name = fresh_name_in(&base, |n| {
            g.lookup(n).is_some() || bodies.get(n).is_some_and(|b| *b != body)
        });
        if !self.bodies.contains_key(&name) {
            self.bodies.insert(name.clone(), body);
            self.order.push(name.clone());
        }
        name
    }

    /// A nonterminal standing for the expression at `id`.
    fn name_of(&mut self, id: NodeId) -> String {
        if let Node::Nonterminal(n) = *self.g.node(id) {
            return self.g.name(n).to_string();
        }
        let base = format!("[{}]", self.render(id));
        let body = self.shape(id);
        self.define(base, body)
    }

    /// A body in normal form equivalent to the expression at `id`.
    fn shape(&mut self, id: NodeId) -> Expression {
        match *self.g.node(id) {
            Node::Empty => Expression::Empty,
            Node::Terminal(c) => Expression::Terminal(c),
            Node::Nonterminal(n) => {
                let eps = self.define("[\"\"]".to_string(), Expression::Empty);
                Expression::seq(Expression::nt(self.g.name(n)), Expression::Nonterminal(eps))
            }
            Node::Not(e) => Expression::not(Expression::Nonterminal(self.name_of(e))),
            Node::Sequence(a, b) => {
                let a = self.name_of(a);
                Expression::seq(Expression::Nonterminal(a), Expression::Nonterminal(self.name_of(b)))
            }
            Node::Choice(a, b) => {
                let a = self.name_of(a);
                Expression::choice(Expression::Nonterminal(a), Expression::Nonterminal(self.name_of(b)))
            }
            _ => unreachable!("core grammar"),
        }
    }
}

/// Converts a well-formed core grammar to normal form.
///
/// Composite subexpressions get bracket nonterminals named after their
/// structure, so `S <- A B C` yields `S <- A [B.C]` and `[B.C] <- B C`;
/// terminals, `""` and negations inside composite bodies are lifted the same
/// way (`["a"] <- "a"`). A rule that is a bare nonterminal `A <- B` becomes
/// `A <- B [""]`. If the axiom is referenced by some rule, a fresh axiom
/// `S' <- S [""]` is added. Identical subexpressions share one nonterminal.
pub fn to_cnf(g: &Grammar) -> Result<CnfGrammar, CnfError> {
    if !g.is_core() {
        return Err(CnfError::NotCore);
    }
    let wf = check_well_formed(g);
    if let Some(cycle) = wf.offending_cycle {
        return Err(CnfError::IllFormed(cycle));
    }
    let mut b = Builder {
        g,
        bodies: HashMap::new(),
        order: Vec::new(),
    };
    let mut rules: Vec<(String, Expression)> = Vec::new();
    for nt in g.nonterminals() {
        let body = b.shape(g.rule(nt));
        rules.push((g.name(nt).to_string(), body));
    }
    let axiom = g.axiom_name().to_string();
    let referenced = g.nodes().iter().any(|n| *n == Node::Nonterminal(g.axiom()));
    let mut axiom_rule = None;
    if referenced {
        let eps = b.define("[\"\"]".to_string(), Expression::Empty);
        let bodies = &b.bodies;
        let name = fresh_name_in(&format!("{axiom}'"), |n| g.lookup(n).is_some() || bodies.contains_key(n));
        axiom_rule = Some((name, Expression::seq(Expression::nt(&axiom), Expression::Nonterminal(eps))));
    }
    let start = axiom_rule.as_ref().map_or(axiom.clone(), |(n, _)| n.clone());
    let mut all = Vec::with_capacity(rules.len() + b.order.len() + 1);
    all.extend(axiom_rule);
    all.extend(rules);
    for name in b.order {
        let body = b.bodies.remove(&name).expect("registered");
        all.push((name, body));
    }
    let out = Grammar::new(all, &start, g.alphabet().iter().copied()).expect("consistent by construction");
    CnfGrammar::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peg::parse_grammar_text;

    fn cnf(src: &str) -> CnfGrammar {
        to_cnf(&parse_grammar_text(src).unwrap()).unwrap()
    }

    #[test]
    fn long_sequence_is_right_folded() {
        let c = cnf("S <- A B C\nA <- \"a\"\nB <- \"b\"\nC <- \"c\"");
        let rules = c.rules();
        assert_eq!(rules[0], ("S".into(), Expression::seq(Expression::nt("A"), Expression::nt("[B.C]"))));
        assert!(rules.contains(&("[B.C]".into(), Expression::seq(Expression::nt("B"), Expression::nt("C")))));
    }

    #[test]
    fn normal_form_is_unchanged() {
        let src = "S <- A B\nA <- \"a\"\nB <- !A";
        let g = parse_grammar_text(src).unwrap();
        assert_eq!(to_cnf(&g).unwrap().grammar(), &g);
    }

    #[test]
    fn axiom_on_right_side_gets_fresh_axiom() {
        let c = cnf("S <- \"a\" S / \"\"");
        assert_eq!(c.axiom_name(), "S'");
        assert!(matches!(c.shape(c.axiom()), CnfRule::Sequence(..)));
    }

    #[test]
    fn terminals_inside_bodies_are_lifted() {
        let c = cnf("S <- \"a\" \"b\" / !\"c\"");
        for nt in c.nonterminals() {
            let _ = c.shape(nt);
        }
        assert!(c.lookup("[\"a\"]").is_some());
        assert!(c.lookup("[\"a\".\"b\"]").is_some());
    }

    #[test]
    fn unit_rule_gets_empty_partner() {
        let c = cnf("S <- A\nA <- \"a\"");
        assert_eq!(
            c.shape(c.axiom()),
            CnfRule::Sequence(c.lookup("A").unwrap(), c.lookup("[\"\"]").unwrap())
        );
    }

    #[test]
    fn ill_formed_is_rejected() {
        let g = parse_grammar_text("A <- A \"a\" / \"a\"").unwrap();
        assert_eq!(to_cnf(&g), Err(CnfError::IllFormed(vec!["A".into()])));
    }

    #[test]
    fn sugar_is_rejected() {
        let g = parse_grammar_text("A <- \"a\"*").unwrap();
        assert_eq!(to_cnf(&g), Err(CnfError::NotCore));
    }

    #[test]
    fn user_bracket_names_do_not_capture() {
        let c = cnf("S <- A B C\n`[B.C]` <- \"x\"\nA <- \"a\"\nB <- \"b\"\nC <- \"c\"");
        assert!(c.lookup("[B.C]'").is_some());
    }
}
