use std::collections::BTreeMap;

use super::ast::{Grammar, Node, NodeId, NtId};

/// Possible results of an expression: succeed without consuming, succeed
/// after consuming at least one letter, fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Outcomes {
    pub empty: bool,
    pub consuming: bool,
    pub fail: bool,
}

impl Outcomes {
    const NONE: Outcomes = Outcomes {
        empty: false,
        consuming: false,
        fail: false,
    };

    pub fn succeeds(self) -> bool {
        self.empty || self.consuming
    }

    fn join(self, o: Outcomes) -> Outcomes {
        Outcomes {
            empty: self.empty || o.empty,
            consuming: self.consuming || o.consuming,
            fail: self.fail || o.fail,
        }
    }
}

/// Least fixed point of the outcome analysis, per node.
#[derive(Clone, Debug)]
pub struct OutcomeTable {
    nodes: Vec<Outcomes>,
}

impl OutcomeTable {
    pub fn compute(g: &Grammar) -> Self {
        let mut t = OutcomeTable {
            nodes: vec![Outcomes::NONE; g.node_count()],
        };
        loop {
            let mut changed = false;
            // Children have larger ids than their parents, so a reverse sweep
            // settles everything except nonterminal back-references.
            for i in (0..g.node_count()).rev() {
                let id = NodeId(i as u32);
                let o = t.step(g, id).join(t.nodes[i]);
                if o != t.nodes[i] {
                    t.nodes[i] = o;
                    changed = true;
                }
            }
            if !changed {
                return t;
            }
        }
    }

    fn step(&self, g: &Grammar, id: NodeId) -> Outcomes {
        let at = |x: NodeId| self.nodes[x.index()];
        match *g.node(id) {
            Node::Empty => Outcomes {
                empty: true,
                ..Outcomes::NONE
            },
            Node::Terminal(_) | Node::AnyChar => Outcomes {
                consuming: true,
                fail: true,
                ..Outcomes::NONE
            },
            Node::Fail => Outcomes {
                fail: true,
                ..Outcomes::NONE
            },
            Node::Nonterminal(n) => at(g.rule(n)),
            Node::Sequence(a, b) => {
                let (a, b) = (at(a), at(b));
                Outcomes {
                    empty: a.empty && b.empty,
                    consuming: (a.consuming && b.succeeds()) || (a.empty && b.consuming),
                    fail: a.fail || (a.succeeds() && b.fail),
                }
            }
            Node::Choice(a, b) => {
                let (a, b) = (at(a), at(b));
                Outcomes {
                    empty: a.empty || (a.fail && b.empty),
                    consuming: a.consuming || (a.fail && b.consuming),
                    fail: a.fail && b.fail,
                }
            }
            Node::Not(e) => {
                let e = at(e);
                Outcomes {
                    empty: e.fail,
                    fail: e.succeeds(),
                    ..Outcomes::NONE
                }
            }
            Node::And(e) => {
                let e = at(e);
                Outcomes {
                    empty: e.succeeds(),
                    fail: e.fail,
                    ..Outcomes::NONE
                }
            }
            Node::Star(e) => {
                let e = at(e);
                Outcomes {
                    empty: e.fail,
                    consuming: e.consuming,
                    ..Outcomes::NONE
                }
            }
            Node::Plus(e) => {
                let e = at(e);
                Outcomes {
                    empty: false,
                    consuming: e.consuming,
                    fail: e.fail,
                }
            }
            Node::Optional(e) => {
                let e = at(e);
                Outcomes {
                    empty: e.empty || e.fail,
                    consuming: e.consuming,
                    fail: false,
                }
            }
        }
    }

    pub fn node(&self, id: NodeId) -> Outcomes {
        self.nodes[id.index()]
    }

    pub fn nonterminal(&self, g: &Grammar, nt: NtId) -> Outcomes {
        self.node(g.rule(nt))
    }
}

/// Result of the well-formedness analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfReport {
    pub well_formed: bool,
    /// Nonterminals `A1 … Ak` where each calls the next (and `Ak` calls `A1`)
    /// without consuming input.
    pub offending_cycle: Option<Vec<String>>,
    pub nullable: BTreeMap<String, bool>,
    pub can_fail: BTreeMap<String, bool>,
}

/// Nonterminals each rule may call at its own start position, plus whether
/// the rule repeats an expression that can succeed without consuming.
fn left_calls(g: &Grammar, table: &OutcomeTable) -> Vec<(Vec<NtId>, bool)> {
    g.nonterminals()
        .map(|nt| {
            let mut calls = Vec::new();
            let mut empty_loop = false;
            let mut work = vec![g.rule(nt)];
            while let Some(id) = work.pop() {
                match *g.node(id) {
                    Node::Nonterminal(n) => {
                        if !calls.contains(&n) {
                            calls.push(n);
                        }
                    }
                    Node::Sequence(a, b) => {
                        work.push(a);
                        if table.node(a).empty {
                            work.push(b);
                        }
                    }
                    Node::Choice(a, b) => {
                        work.push(a);
                        work.push(b);
                    }
                    Node::Not(e) | Node::And(e) | Node::Optional(e) | Node::Star(e) | Node::Plus(e) => work.push(e),
                    Node::Empty | Node::Terminal(_) | Node::AnyChar | Node::Fail => {}
                }
            }
            // Repetitions anywhere in the rule, not only at its start.
            let mut work = vec![g.rule(nt)];
            while let Some(id) = work.pop() {
                match *g.node(id) {
                    Node::Sequence(a, b) | Node::Choice(a, b) => work.extend([a, b]),
                    Node::Star(e) | Node::Plus(e) => {
                        empty_loop |= table.node(e).empty;
                        work.push(e);
                    }
                    Node::Not(e) | Node::And(e) | Node::Optional(e) => work.push(e),
                    _ => {}
                }
            }
            calls.sort();
            (calls, empty_loop)
        })
        .collect()
}

fn find_cycle(g: &Grammar, graph: &[(Vec<NtId>, bool)]) -> Option<Vec<String>> {
    if let Some(i) = graph.iter().position(|(_, l)| *l) {
        return Some(vec![g.name(NtId(i as u32)).to_string()]);
    }
    // 0 = unvisited, 1 = on the DFS path, 2 = finished
    let mut color = vec![0u8; graph.len()];
    for root in 0..graph.len() {
        if color[root] != 0 {
            continue;
        }
        let mut path: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = 1;
        while let Some(&mut (v, ref mut next)) = path.last_mut() {
            if let Some(&w) = graph[v].0.get(*next) {
                *next += 1;
                let w = w.index();
                match color[w] {
                    0 => {
                        color[w] = 1;
                        path.push((w, 0));
                    }
                    1 => {
                        let start = path.iter().position(|&(u, _)| u == w).unwrap();
                        return Some(
                            path[start..]
                                .iter()
                                .map(|&(u, _)| g.name(NtId(u as u32)).to_string())
                                .collect(),
                        );
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                path.pop();
            }
        }
    }
    None
}

/// Detects direct and mutual left recursion, and repetition of expressions
/// that can succeed without consuming (reported as a cycle on the enclosing
/// nonterminal). Sugar forms are analysed directly.
pub fn check_well_formed(g: &Grammar) -> WfReport {
    let table = OutcomeTable::compute(g);
    let graph = left_calls(g, &table);
    let offending_cycle = find_cycle(g, &graph);
    let mut nullable = BTreeMap::new();
    let mut can_fail = BTreeMap::new();
    for nt in g.nonterminals() {
        let o = table.nonterminal(g, nt);
        nullable.insert(g.name(nt).to_string(), o.empty);
        can_fail.insert(g.name(nt).to_string(), o.fail);
    }
    WfReport {
        well_formed: offending_cycle.is_none(),
        offending_cycle,
        nullable,
        can_fail,
    }
}
