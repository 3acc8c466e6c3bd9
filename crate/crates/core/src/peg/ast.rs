use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Index of an expression node inside a [`Grammar`]'s arena.
///
/// Ids are dense: a grammar with `n` nodes uses exactly `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a nonterminal inside a [`Grammar`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NtId(pub u32);

impl NtId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Arena node. Children are referenced by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Empty,
    Terminal(char),
    Nonterminal(NtId),
    Sequence(NodeId, NodeId),
    Choice(NodeId, NodeId),
    Not(NodeId),
    Star(NodeId),
    Plus(NodeId),
    Optional(NodeId),
    And(NodeId),
    AnyChar,
    Fail,
}

impl Node {
    pub fn is_sugar(&self) -> bool {
        matches!(
            self,
            Node::Star(_) | Node::Plus(_) | Node::Optional(_) | Node::And(_) | Node::AnyChar | Node::Fail
        )
    }
}

/// Owned expression tree, used to build grammars and to move expressions
/// between grammars. Nonterminals are referenced by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expression {
    Empty,
    Terminal(char),
    Nonterminal(String),
    Sequence(Box<Expression>, Box<Expression>),
    Choice(Box<Expression>, Box<Expression>),
    Not(Box<Expression>),
    Star(Box<Expression>),
    Plus(Box<Expression>),
    Optional(Box<Expression>),
    And(Box<Expression>),
    AnyChar,
    Fail,
}

impl Expression {
    pub fn nt(name: impl Into<String>) -> Self {
        Expression::Nonterminal(name.into())
    }

    pub fn t(c: char) -> Self {
        Expression::Terminal(c)
    }

    pub fn seq(a: Expression, b: Expression) -> Self {
        Expression::Sequence(Box::new(a), Box::new(b))
    }

    pub fn choice(a: Expression, b: Expression) -> Self {
        Expression::Choice(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expression) -> Self {
        Expression::Not(Box::new(e))
    }

    pub fn and(e: Expression) -> Self {
        Expression::And(Box::new(e))
    }

    pub fn star(e: Expression) -> Self {
        Expression::Star(Box::new(e))
    }

    pub fn plus(e: Expression) -> Self {
        Expression::Plus(Box::new(e))
    }

    pub fn optional(e: Expression) -> Self {
        Expression::Optional(Box::new(e))
    }

    /// Right-folded sequence; the empty list is `Empty`.
    pub fn seq_all(items: impl IntoIterator<Item = Expression>) -> Self {
        let mut items: Vec<_> = items.into_iter().collect();
        let mut acc = match items.pop() {
            Some(last) => last,
            None => return Expression::Empty,
        };
        while let Some(prev) = items.pop() {
            acc = Expression::seq(prev, acc);
        }
        acc
    }

    /// Right-folded ordered choice; the empty list is `Fail`.
    pub fn choice_all(items: impl IntoIterator<Item = Expression>) -> Self {
        let mut items: Vec<_> = items.into_iter().collect();
        let mut acc = match items.pop() {
            Some(last) => last,
            None => return Expression::Fail,
        };
        while let Some(prev) = items.pop() {
            acc = Expression::choice(prev, acc);
        }
        acc
    }

    /// A word as a sequence of terminals.
    pub fn word(s: &str) -> Self {
        Expression::seq_all(s.chars().map(Expression::Terminal))
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expression)) {
        f(self);
        match self {
            Expression::Sequence(a, b) | Expression::Choice(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expression::Not(e)
            | Expression::Star(e)
            | Expression::Plus(e)
            | Expression::Optional(e)
            | Expression::And(e) => e.visit(f),
            _ => {}
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("duplicate rule for nonterminal `{0}`")]
    DuplicateRule(String),
    #[error("undefined nonterminal `{name}` referenced in rule for `{rule}`")]
    UndefinedNonterminal { name: String, rule: String },
    #[error("axiom `{0}` has no rule")]
    MissingAxiom(String),
    #[error("grammar has no rules")]
    NoRules,
    #[error("nonterminal `{0}` clashes with an input letter")]
    NameClash(String),
    #[error("invalid nonterminal name `{0}`")]
    InvalidName(String),
    #[error("invalid input letter {0:?}")]
    InvalidLetter(char),
}

/// Nonterminal names may not contain whitespace, commas, or backticks; the
/// machine file format and the quoted-name syntax rely on this.
pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !c.is_control() && c != ',' && c != '`')
}

/// Input letters: printable, no whitespace, and none of the characters the
/// text formats reserve.
pub fn valid_letter(c: char) -> bool {
    !c.is_whitespace() && !c.is_control() && !matches!(c, '"' | '`' | ',' | '\\')
}

/// A parsing expression grammar `(N, Σ, P, S)` stored as an expression arena.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    names: Vec<String>,
    index: HashMap<String, NtId>,
    rules: Vec<NodeId>,
    nodes: Vec<Node>,
    alphabet: Vec<char>,
    axiom: NtId,
}

impl Grammar {
    /// Builds a grammar from `(name, body)` pairs. Node ids are assigned in
    /// pre-order, rule by rule, in the given order. The alphabet is the
    /// declared letters plus every letter appearing in a rule body.
    pub fn new(
        rules: Vec<(String, Expression)>,
        axiom: &str,
        declared_alphabet: impl IntoIterator<Item = char>,
    ) -> Result<Self, GrammarError> {
        if rules.is_empty() {
            return Err(GrammarError::NoRules);
        }
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(rules.len());
        for (i, (name, _)) in rules.iter().enumerate() {
            if !valid_name(name) {
                return Err(GrammarError::InvalidName(name.clone()));
            }
            if index.insert(name.clone(), NtId(i as u32)).is_some() {
                return Err(GrammarError::DuplicateRule(name.clone()));
            }
            names.push(name.clone());
        }
        let axiom = *index
            .get(axiom)
            .ok_or_else(|| GrammarError::MissingAxiom(axiom.to_string()))?;

        let mut letters: BTreeSet<char> = declared_alphabet.into_iter().collect();
        for (rule, body) in &rules {
            let mut err = None;
            body.visit(&mut |e| match e {
                Expression::Terminal(c) => {
                    letters.insert(*c);
                }
                Expression::Nonterminal(n) if !index.contains_key(n) && err.is_none() => {
                    err = Some(GrammarError::UndefinedNonterminal {
                        name: n.clone(),
                        rule: rule.clone(),
                    });
                }
                _ => {}
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        if let Some(&c) = letters.iter().find(|c| !valid_letter(**c)) {
            return Err(GrammarError::InvalidLetter(c));
        }
        for name in &names {
            let mut cs = name.chars();
            if let (Some(c), None) = (cs.next(), cs.next()) {
                if letters.contains(&c) {
                    return Err(GrammarError::NameClash(name.clone()));
                }
            }
        }

        let mut g = Grammar {
            names,
            index,
            rules: Vec::with_capacity(rules.len()),
            nodes: Vec::new(),
            alphabet: letters.into_iter().collect(),
            axiom,
        };
        for (_, body) in &rules {
            let root = g.intern(body);
            g.rules.push(root);
        }
        Ok(g)
    }

    fn intern(&mut self, e: &Expression) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node::Empty);
        let node = match e {
            Expression::Empty => Node::Empty,
            Expression::Terminal(c) => Node::Terminal(*c),
            Expression::Nonterminal(n) => Node::Nonterminal(self.index[n]),
            Expression::Sequence(a, b) => {
                let a = self.intern(a);
                Node::Sequence(a, self.intern(b))
            }
            Expression::Choice(a, b) => {
                let a = self.intern(a);
                Node::Choice(a, self.intern(b))
            }
            Expression::Not(x) => Node::Not(self.intern(x)),
            Expression::Star(x) => Node::Star(self.intern(x)),
            Expression::Plus(x) => Node::Plus(self.intern(x)),
            Expression::Optional(x) => Node::Optional(self.intern(x)),
            Expression::And(x) => Node::And(self.intern(x)),
            Expression::AnyChar => Node::AnyChar,
            Expression::Fail => Node::Fail,
        };
        self.nodes[id.index()] = node;
        id
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nonterminals(&self) -> impl ExactSizeIterator<Item = NtId> + '_ {
        (0..self.names.len() as u32).map(NtId)
    }

    pub fn nonterminal_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, nt: NtId) -> &str {
        &self.names[nt.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<NtId> {
        self.index.get(name).copied()
    }

    pub fn rule(&self, nt: NtId) -> NodeId {
        self.rules[nt.index()]
    }

    pub fn axiom(&self) -> NtId {
        self.axiom
    }

    pub fn axiom_name(&self) -> &str {
        self.name(self.axiom)
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    /// True when no node is a sugar form.
    pub fn is_core(&self) -> bool {
        !self.nodes.iter().any(Node::is_sugar)
    }

    /// Rebuilds the owned tree rooted at `id`.
    pub fn expression(&self, id: NodeId) -> Expression {
        let b = |x: NodeId| Box::new(self.expression(x));
        match *self.node(id) {
            Node::Empty => Expression::Empty,
            Node::Terminal(c) => Expression::Terminal(c),
            Node::Nonterminal(n) => Expression::Nonterminal(self.name(n).to_string()),
            Node::Sequence(x, y) => Expression::Sequence(b(x), b(y)),
            Node::Choice(x, y) => Expression::Choice(b(x), b(y)),
            Node::Not(x) => Expression::Not(b(x)),
            Node::Star(x) => Expression::Star(b(x)),
            Node::Plus(x) => Expression::Plus(b(x)),
            Node::Optional(x) => Expression::Optional(b(x)),
            Node::And(x) => Expression::And(b(x)),
            Node::AnyChar => Expression::AnyChar,
            Node::Fail => Expression::Fail,
        }
    }

    /// All rules as owned `(name, body)` pairs in declaration order.
    pub fn rules(&self) -> Vec<(String, Expression)> {
        self.nonterminals()
            .map(|nt| (self.name(nt).to_string(), self.expression(self.rule(nt))))
            .collect()
    }

    /// A name not used by any nonterminal, derived from `base` by appending primes.
    pub fn fresh_name(&self, base: &str) -> String {
        fresh_name_in(base, |n| self.index.contains_key(n))
    }

    /// Converts a word into letters, rejecting characters outside Σ.
    pub fn check_word(&self, word: &[char]) -> Result<(), char> {
        match word.iter().find(|c| self.alphabet.binary_search(c).is_err()) {
            Some(&c) => Err(c),
            None => Ok(()),
        }
    }
}

pub(crate) use crate::fresh_name as fresh_name_in;

fn is_identifier(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn write_name(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if is_identifier(name) {
        f.write_str(name)
    } else {
        write!(f, "`{name}`")
    }
}

fn precedence(e: &Expression) -> u8 {
    match e {
        Expression::Choice(..) => 0,
        Expression::Sequence(..) => 1,
        Expression::Not(_) | Expression::And(_) | Expression::Fail => 2,
        _ => 3,
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Parenthesize a child whose operator binds looser than the parent's
        // slot; left children of the (right-folded) binary operators are
        // parenthesized at equal precedence so the text re-parses to the same tree.
        let child = |f: &mut fmt::Formatter<'_>, e: &Expression, min: u8| {
            if precedence(e) < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expression::Empty => f.write_str("\"\""),
            Expression::Terminal(c) => write!(f, "\"{c}\""),
            Expression::Nonterminal(n) => write_name(f, n),
            Expression::Sequence(a, b) => {
                child(f, a, 2)?;
                f.write_str(" ")?;
                child(f, b, 1)
            }
            Expression::Choice(a, b) => {
                child(f, a, 1)?;
                f.write_str(" / ")?;
                child(f, b, 0)
            }
            Expression::Not(e) => {
                f.write_str("!")?;
                child(f, e, 2)
            }
            Expression::And(e) => {
                f.write_str("&")?;
                child(f, e, 2)
            }
            Expression::Star(e) => {
                child(f, e, 3)?;
                f.write_str("*")
            }
            Expression::Plus(e) => {
                child(f, e, 3)?;
                f.write_str("+")
            }
            Expression::Optional(e) => {
                child(f, e, 3)?;
                f.write_str("?")
            }
            Expression::AnyChar => f.write_str("."),
            Expression::Fail => f.write_str("!\"\""),
        }
    }
}

/// Serializes the grammar in the text format accepted by
/// [`parse_grammar_text`](super::parse_grammar_text).
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("@start ")?;
        write_name(f, self.axiom_name())?;
        f.write_str("\n@alphabet \"")?;
        for c in &self.alphabet {
            write!(f, "{c}")?;
        }
        f.write_str("\"\n")?;
        for nt in self.nonterminals() {
            write_name(f, self.name(nt))?;
            writeln!(f, " <- {}", self.expression(self.rule(nt)))?;
        }
        Ok(())
    }
}
