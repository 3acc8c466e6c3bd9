//! Inputs shared by the benchmarks in `benches/`.

use pegmachine_core::peg::{parse_grammar_text, Grammar};

/// `aⁿbⁿcⁿ`.
pub fn anbncn(n: usize) -> Vec<char> {
    ['a', 'b', 'c'].iter().flat_map(|&c| std::iter::repeat_n(c, n)).collect()
}

/// A grammar for `{aⁿbⁿcⁿ | n ≥ 1}` using an and-predicate.
pub fn anbncn_grammar() -> Grammar {
    parse_grammar_text("S <- &(A \"c\") B C\nA <- \"a\" A \"b\" / \"\"\nB <- \"a\" B / \"a\"\nC <- \"b\" C \"c\" / \"\"\n")
        .expect("valid grammar")
}

#[cfg(test)]
mod tests {
    use super::*;
    use pegmachine_core::peg::accepts;

    #[test]
    fn inputs_are_members() {
        let g = anbncn_grammar();
        for n in 1..5 {
            assert!(accepts(&g, &anbncn(n)));
        }
    }
}
