//! Seeded random grammars and words for differential testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::peg::{check_well_formed, CnfGrammar, Expression, Grammar};

/// The generator behind every seeded run; stable across platforms.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Nonterminals besides the axiom, at least 1.
    pub max_nonterminals: usize,
    /// Letters `a`, `b`, … used.
    pub alphabet_size: usize,
    /// Nesting limit for rule bodies of general grammars.
    pub max_depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_nonterminals: 5,
            alphabet_size: 2,
            max_depth: 3,
        }
    }
}

impl GenConfig {
    pub fn alphabet(&self) -> Vec<char> {
        ('a'..='z').take(self.alphabet_size.clamp(1, 26)).collect()
    }
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("N{i}")).collect()
}

/// A random well-formed grammar in normal form with at most
/// `max_nonterminals + 1` rules, drawn until one is well-formed.
pub fn random_cnf_grammar(rng: &mut impl Rng, cfg: &GenConfig) -> CnfGrammar {
    let alphabet = cfg.alphabet();
    loop {
        let k = rng.gen_range(1..=cfg.max_nonterminals.max(1));
        let nts = names(k);
        let pick = |rng: &mut _| Expression::nt(nts.choose(rng).unwrap().clone());
        let mut rules = Vec::with_capacity(k + 1);
        let axiom_body = match rng.gen_range(0..3) {
            0 => Expression::choice(pick(rng), pick(rng)),
            1 => Expression::seq(pick(rng), pick(rng)),
            _ => Expression::not(pick(rng)),
        };
        rules.push(("S".to_string(), axiom_body));
        for name in &nts {
            let body = match rng.gen_range(0..10) {
                0..=1 => Expression::choice(pick(rng), pick(rng)),
                2..=3 => Expression::seq(pick(rng), pick(rng)),
                4 => Expression::not(pick(rng)),
                5..=8 => Expression::t(*alphabet.choose(rng).unwrap()),
                _ => Expression::Empty,
            };
            rules.push((name.clone(), body));
        }
        let g = Grammar::new(rules, "S", alphabet.iter().copied()).expect("generated names are valid");
        if check_well_formed(&g).well_formed {
            return CnfGrammar::new(g).expect("generated in normal form");
        }
    }
}

fn random_expression(rng: &mut impl Rng, nts: &[String], alphabet: &[char], depth: usize) -> Expression {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..8) {
            0..=3 => Expression::t(*alphabet.choose(rng).unwrap()),
            4..=5 => Expression::nt(nts.choose(rng).unwrap().clone()),
            6 => Expression::AnyChar,
            _ => Expression::Empty,
        };
    }
    let sub = |rng: &mut _| random_expression(rng, nts, alphabet, depth - 1);
    match rng.gen_range(0..9) {
        0..=2 => Expression::seq(sub(rng), sub(rng)),
        3..=4 => Expression::choice(sub(rng), sub(rng)),
        5 => Expression::not(sub(rng)),
        6 => Expression::and(sub(rng)),
        7 => Expression::star(sub(rng)),
        _ => Expression::optional(sub(rng)),
    }
}

/// A random well-formed grammar using the full expression syntax, drawn
/// until one is well-formed.
pub fn random_grammar(rng: &mut impl Rng, cfg: &GenConfig) -> Grammar {
    let alphabet = cfg.alphabet();
    loop {
        let k = rng.gen_range(1..=cfg.max_nonterminals.max(1));
        let nts = names(k);
        let rules: Vec<(String, Expression)> = nts
            .iter()
            .map(|n| (n.clone(), random_expression(rng, &nts, &alphabet, cfg.max_depth)))
            .collect();
        let g = Grammar::new(rules, &nts[0], alphabet.iter().copied()).expect("generated names are valid");
        if check_well_formed(&g).well_formed {
            return g;
        }
    }
}

/// A uniformly chosen length up to `max_len`, then uniform letters.
pub fn random_word(rng: &mut impl Rng, alphabet: &[char], max_len: usize) -> Vec<char> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| *alphabet.choose(rng).unwrap()).collect()
}
