use super::ast::{Expression, Grammar, Node, NodeId};

/// Result of matching an expression at a position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParseOutcome {
    /// Success; the unconsumed suffix starts at this offset.
    Consumed(usize),
    Failure,
    /// The step budget ran out, or left recursion was detected at runtime.
    Diverged,
}

/// Default clause budget for [`interpret_naive`].
pub const DEFAULT_BUDGET: u64 = 1_000_000;

enum Frame {
    SeqThen(NodeId),
    ChoiceElse(NodeId, usize),
    NotAt(usize),
    AndAt(usize),
    Repeat(NodeId, usize),
    PlusFirst(NodeId),
    OptionalAt(usize),
    Store(NodeId, usize),
}

enum Step {
    Eval(NodeId, usize),
    Return(ParseOutcome),
}

/// Applies one clause of the recognition function. Returns the next step and
/// may push a continuation.
fn enter(g: &Grammar, input: &[char], id: NodeId, pos: usize, stack: &mut Vec<Frame>) -> Step {
    use ParseOutcome::*;
    let ret = Step::Return;
    match *g.node(id) {
        Node::Empty => ret(Consumed(pos)),
        Node::Terminal(c) => ret(if input.get(pos) == Some(&c) { Consumed(pos + 1) } else { Failure }),
        Node::AnyChar => ret(if pos < input.len() { Consumed(pos + 1) } else { Failure }),
        Node::Fail => ret(Failure),
        Node::Nonterminal(n) => Step::Eval(g.rule(n), pos),
        Node::Sequence(a, b) => {
            stack.push(Frame::SeqThen(b));
            Step::Eval(a, pos)
        }
        Node::Choice(a, b) => {
            stack.push(Frame::ChoiceElse(b, pos));
            Step::Eval(a, pos)
        }
        Node::Not(e) => {
            stack.push(Frame::NotAt(pos));
            Step::Eval(e, pos)
        }
        Node::And(e) => {
            stack.push(Frame::AndAt(pos));
            Step::Eval(e, pos)
        }
        Node::Star(e) => {
            stack.push(Frame::Repeat(e, pos));
            Step::Eval(e, pos)
        }
        Node::Plus(e) => {
            stack.push(Frame::PlusFirst(e));
            Step::Eval(e, pos)
        }
        Node::Optional(e) => {
            stack.push(Frame::OptionalAt(pos));
            Step::Eval(e, pos)
        }
    }
}

/// Feeds an outcome to a continuation frame. `Store` frames are handled by
/// the caller.
fn resume(frame: Frame, o: ParseOutcome, stack: &mut Vec<Frame>) -> Step {
    use ParseOutcome::*;
    if o == Diverged {
        return Step::Return(Diverged);
    }
    match (frame, o) {
        (Frame::SeqThen(b), Consumed(p)) => Step::Eval(b, p),
        (Frame::SeqThen(_), _) => Step::Return(Failure),
        (Frame::ChoiceElse(_, _), Consumed(p)) => Step::Return(Consumed(p)),
        (Frame::ChoiceElse(b, pos), _) => Step::Eval(b, pos),
        (Frame::NotAt(_), Consumed(_)) => Step::Return(Failure),
        (Frame::NotAt(pos), _) => Step::Return(Consumed(pos)),
        (Frame::AndAt(pos), Consumed(_)) => Step::Return(Consumed(pos)),
        (Frame::AndAt(_), _) => Step::Return(Failure),
        (Frame::Repeat(e, p0), Consumed(p)) => {
            if p == p0 {
                // e succeeds without consuming: the repetition never ends.
                return Step::Return(Diverged);
            }
            stack.push(Frame::Repeat(e, p));
            Step::Eval(e, p)
        }
        (Frame::Repeat(_, p0), _) => Step::Return(Consumed(p0)),
        (Frame::PlusFirst(e), Consumed(p)) => {
            stack.push(Frame::Repeat(e, p));
            Step::Eval(e, p)
        }
        (Frame::PlusFirst(_), _) => Step::Return(Failure),
        (Frame::OptionalAt(_), Consumed(p)) => Step::Return(Consumed(p)),
        (Frame::OptionalAt(pos), _) => Step::Return(Consumed(pos)),
        (Frame::Store(..), _) => unreachable!("handled by caller"),
    }
}

/// Evaluates the recognition function by direct recursion over the clauses
/// (with an explicit stack). Every clause application costs one unit of
/// `budget`; running out yields [`ParseOutcome::Diverged`].
pub fn interpret_naive(g: &Grammar, id: NodeId, input: &[char], pos: usize, budget: u64) -> ParseOutcome {
    naive_counted(g, id, input, pos, budget).0
}

/// Like [`interpret_naive`], also returning the number of clause applications.
pub fn naive_counted(g: &Grammar, id: NodeId, input: &[char], pos: usize, budget: u64) -> (ParseOutcome, u64) {
    let mut stack = Vec::new();
    let mut step = Step::Eval(id, pos);
    let mut used = 0u64;
    loop {
        step = match step {
            Step::Eval(id, pos) => {
                if used == budget {
                    return (ParseOutcome::Diverged, used);
                }
                used += 1;
                enter(g, input, id, pos, &mut stack)
            }
            Step::Return(o) => match stack.pop() {
                None => return (o, used),
                Some(f) => resume(f, o, &mut stack),
            },
        };
    }
}

const UNVISITED: u32 = 0;
const IN_PROGRESS: u32 = 1;
const FAILURE: u32 = 2;
const DIVERGED: u32 = 3;
const CONSUMED: u32 = 4;

/// Memo table of the packrat recognizer, one entry per (node, position).
#[derive(Clone, Debug)]
pub struct Packrat<'g> {
    g: &'g Grammar,
    input: Vec<char>,
    memo: Vec<u32>,
    /// Entries computed (each at most once).
    pub computations: u64,
    /// Memo hits.
    pub lookups: u64,
}

impl<'g> Packrat<'g> {
    pub fn new(g: &'g Grammar, input: &[char]) -> Self {
        Packrat {
            g,
            input: input.to_vec(),
            memo: vec![UNVISITED; g.node_count() * (input.len() + 1)],
            computations: 0,
            lookups: 0,
        }
    }

    fn slot(&self, id: NodeId, pos: usize) -> usize {
        id.index() * (self.input.len() + 1) + pos
    }

    /// The memoized outcome, if that entry has been computed.
    pub fn entry(&self, id: NodeId, pos: usize) -> Option<ParseOutcome> {
        decode(self.memo[self.slot(id, pos)])
    }

    /// Outcome of the expression at `id` from `pos`. Re-entering an entry
    /// that is still being computed means left recursion and yields
    /// [`ParseOutcome::Diverged`].
    pub fn eval(&mut self, id: NodeId, pos: usize) -> ParseOutcome {
        let mut stack = Vec::new();
        let mut step = Step::Eval(id, pos);
        loop {
            step = match step {
                Step::Eval(id, pos) => {
                    let slot = self.slot(id, pos);
                    match self.memo[slot] {
                        UNVISITED => {
                            self.memo[slot] = IN_PROGRESS;
                            self.computations += 1;
                            stack.push(Frame::Store(id, pos));
                            enter(self.g, &self.input, id, pos, &mut stack)
                        }
                        IN_PROGRESS => Step::Return(ParseOutcome::Diverged),
                        v => {
                            self.lookups += 1;
                            Step::Return(decode(v).expect("computed"))
                        }
                    }
                }
                Step::Return(o) => match stack.pop() {
                    None => return o,
                    Some(Frame::Store(id, pos)) => {
                        let slot = self.slot(id, pos);
                        self.memo[slot] = encode(o);
                        Step::Return(o)
                    }
                    Some(f) => resume(f, o, &mut stack),
                },
            };
        }
    }
}

fn encode(o: ParseOutcome) -> u32 {
    match o {
        ParseOutcome::Failure => FAILURE,
        ParseOutcome::Diverged => DIVERGED,
        ParseOutcome::Consumed(p) => CONSUMED + p as u32,
    }
}

fn decode(v: u32) -> Option<ParseOutcome> {
    match v {
        UNVISITED | IN_PROGRESS => None,
        FAILURE => Some(ParseOutcome::Failure),
        DIVERGED => Some(ParseOutcome::Diverged),
        p => Some(ParseOutcome::Consumed((p - CONSUMED) as usize)),
    }
}

/// Packrat outcome of the axiom on the whole input.
pub fn interpret_packrat(g: &Grammar, input: &[char]) -> ParseOutcome {
    Packrat::new(g, input).eval(g.rule(g.axiom()), 0)
}

/// Membership in the generated language: the axiom consumes the whole input.
pub fn accepts(g: &Grammar, input: &[char]) -> bool {
    interpret_packrat(g, input) == ParseOutcome::Consumed(input.len())
}

/// Prefix acceptance: the axiom does not fail on the input.
pub fn accepts_prefix_mode(g: &Grammar, input: &[char]) -> bool {
    matches!(interpret_packrat(g, input), ParseOutcome::Consumed(_))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcceptanceMode {
    /// The input grammar accepts by prefix; produce a full-match grammar.
    ToFullMatch,
    /// The input grammar accepts by full match; produce a prefix grammar.
    ToPrefix,
}

/// Adds a new axiom converting between the two acceptance conventions:
/// `S' <- S .*` turns prefix acceptance into full-match acceptance and
/// `S' <- S !.` the other way round. The result contains sugar.
pub fn convert_acceptance(g: &Grammar, mode: AcceptanceMode) -> Grammar {
    let axiom = g.axiom_name().to_string();
    let tail = match mode {
        AcceptanceMode::ToFullMatch => Expression::star(Expression::AnyChar),
        AcceptanceMode::ToPrefix => Expression::not(Expression::AnyChar),
    };
    let name = g.fresh_name(&format!("{axiom}'"));
    let mut rules = vec![(name.clone(), Expression::seq(Expression::Nonterminal(axiom), tail))];
    rules.extend(g.rules());
    Grammar::new(rules, &name, g.alphabet().iter().copied()).expect("fresh axiom")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peg::{desugar, parse_grammar_text};
    use ParseOutcome::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn terminal_clauses() {
        let g = parse_grammar_text("S <- \"a\"\nT <- \"b\"").unwrap();
        let s = g.rule(g.axiom());
        assert_eq!(interpret_naive(&g, s, &chars("as"), 0, DEFAULT_BUDGET), Consumed(1));
        assert_eq!(interpret_naive(&g, s, &chars("bs"), 0, DEFAULT_BUDGET), Failure);
        assert_eq!(interpret_naive(&g, s, &[], 0, DEFAULT_BUDGET), Failure);
    }

    #[test]
    fn not_consumes_nothing() {
        let g = parse_grammar_text("S <- !\"a\"\n@alphabet \"b\"").unwrap();
        let s = g.rule(g.axiom());
        assert_eq!(interpret_naive(&g, s, &chars("b"), 0, DEFAULT_BUDGET), Consumed(0));
        assert_eq!(interpret_naive(&g, s, &chars("a"), 0, DEFAULT_BUDGET), Failure);
    }

    #[test]
    fn left_recursion_diverges() {
        let g = parse_grammar_text("A <- B \"x\"\nB <- A / \"y\"").unwrap();
        let a = g.rule(g.axiom());
        assert_eq!(interpret_naive(&g, a, &chars("x"), 0, 10_000), Diverged);
        assert_eq!(interpret_packrat(&g, &chars("x")), Diverged);
    }

    #[test]
    fn zero_budget_diverges() {
        let g = parse_grammar_text("S <- \"\"").unwrap();
        assert_eq!(interpret_naive(&g, g.rule(g.axiom()), &[], 0, 0), Diverged);
        assert_eq!(interpret_packrat(&g, &[]), Consumed(0));
    }

    #[test]
    fn sugar_matches_desugared() {
        let g = parse_grammar_text("S <- (\"a\" / \"b\")+ &\"c\" \"c\"? !.").unwrap();
        let d = desugar(&g);
        for w in ["", "a", "abc", "ab", "abcc", "c", "bbbc"] {
            let w = chars(w);
            assert_eq!(accepts(&g, &w), accepts(&d, &w), "{w:?}");
        }
        assert!(accepts(&g, &chars("abc")));
        assert!(!accepts(&g, &chars("abcc")));
    }

    #[test]
    fn nullable_star_diverges() {
        let g = parse_grammar_text("S <- (\"a\"?)*").unwrap();
        assert_eq!(interpret_packrat(&g, &chars("b")), Diverged);
    }

    #[test]
    fn conversion_directions() {
        let g = parse_grammar_text("@alphabet \"ab\"\nS <- \"a\"").unwrap();
        let full = convert_acceptance(&g, AcceptanceMode::ToFullMatch);
        for w in ["a", "ab", "abb", "aa"] {
            assert!(accepts(&full, &chars(w)), "{w}");
        }
        assert!(!accepts(&full, &chars("b")));
        assert!(!accepts(&full, &[]));
        let prefix = convert_acceptance(&g, AcceptanceMode::ToPrefix);
        assert!(accepts_prefix_mode(&prefix, &chars("a")));
        assert!(!accepts_prefix_mode(&prefix, &chars("ab")));
    }
}
