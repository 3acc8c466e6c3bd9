use crate::peg::{Expression, Grammar, GrammarError};

fn rename(e: &Expression, prefix: &str) -> Expression {
    let r = |e: &Expression| Box::new(rename(e, prefix));
    match e {
        Expression::Nonterminal(n) => Expression::Nonterminal(format!("{prefix}{n}")),
        Expression::Sequence(a, b) => Expression::Sequence(r(a), r(b)),
        Expression::Choice(a, b) => Expression::Choice(r(a), r(b)),
        Expression::Not(x) => Expression::Not(r(x)),
        Expression::Star(x) => Expression::Star(r(x)),
        Expression::Plus(x) => Expression::Plus(r(x)),
        Expression::Optional(x) => Expression::Optional(r(x)),
        Expression::And(x) => Expression::And(r(x)),
        Expression::Empty | Expression::Terminal(_) | Expression::AnyChar | Expression::Fail => e.clone(),
    }
}

fn prefixed(g: &Grammar, prefix: &str) -> Vec<(String, Expression)> {
    g.rules()
        .into_iter()
        .map(|(name, body)| (format!("{prefix}{name}"), rename(&body, prefix)))
        .collect()
}

/// `e !.`: `e` followed by the end of input.
fn whole(e: Expression) -> Expression {
    Expression::seq(e, Expression::not(Expression::AnyChar))
}

fn alphabet(g1: &Grammar, g2: &Grammar) -> Vec<char> {
    g1.alphabet().iter().chain(g2.alphabet()).copied().collect()
}

/// `S' ← !(S !.) .*`: accepts exactly the words `g` rejects.
pub fn pel_complement(g: &Grammar) -> Grammar {
    let axiom = g.fresh_name(g.axiom_name());
    let body = Expression::seq(
        Expression::not(whole(Expression::nt(g.axiom_name()))),
        Expression::star(Expression::AnyChar),
    );
    let mut rules = vec![(axiom.clone(), body)];
    rules.extend(g.rules());
    Grammar::new(rules, &axiom, g.alphabet().iter().copied()).expect("a fresh axiom over valid rules")
}

/// `S ← (L:S1 !.) / R:S2`, with the nonterminals of `g1` and `g2` prefixed
/// `L:` and `R:`.
pub fn pel_union(g1: &Grammar, g2: &Grammar) -> Result<Grammar, GrammarError> {
    let body = Expression::choice(
        whole(Expression::nt(format!("L:{}", g1.axiom_name()))),
        Expression::nt(format!("R:{}", g2.axiom_name())),
    );
    combined(g1, g2, body)
}

/// `S ← &(L:S1 !.) R:S2`, with the nonterminals of `g1` and `g2` prefixed
/// `L:` and `R:`.
pub fn pel_intersection(g1: &Grammar, g2: &Grammar) -> Result<Grammar, GrammarError> {
    let body = Expression::seq(
        Expression::and(whole(Expression::nt(format!("L:{}", g1.axiom_name())))),
        Expression::nt(format!("R:{}", g2.axiom_name())),
    );
    combined(g1, g2, body)
}

fn combined(g1: &Grammar, g2: &Grammar, body: Expression) -> Result<Grammar, GrammarError> {
    let mut rules = vec![("S".to_string(), body)];
    rules.extend(prefixed(g1, "L:"));
    rules.extend(prefixed(g2, "R:"));
    Grammar::new(rules, "S", alphabet(g1, g2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peg::{accepts, parse_grammar_text};
    use crate::words::all_words;

    fn g(src: &str) -> Grammar {
        parse_grammar_text(src).unwrap()
    }

    const ORDERED: &str = "S <- A B / B C\nA <- \"a\" A / \"a\"\nB <- \"a\" \"b\" \"b\" / \"b\"\nC <- \"c\" C / \"\"\n";
    const AB_OR_AC: &str = "S <- A !C / B\nA <- \"a\" A \"b\" / \"\"\nB <- \"a\" B \"c\" / \"\"\nC <- \"a\" / \"b\"\n";

    #[test]
    fn complement_accepts_what_the_original_rejects() {
        let base = g("S <- \"a\" S \"b\" / \"a\" \"b\" / \"a\" \"a\" \"b\" \"b\" \"c\"\n");
        let c = pel_complement(&base);
        for w in all_words(&['a', 'b', 'c'], 6) {
            assert_eq!(accepts(&c, &w), !accepts(&base, &w));
        }
    }

    #[test]
    fn complement_of_the_ordered_choice_example() {
        let base = g(ORDERED);
        let c = pel_complement(&base);
        let abbc: Vec<char> = "abbc".chars().collect();
        assert!(!accepts(&base, &abbc));
        assert!(accepts(&c, &abbc));
    }

    #[test]
    fn complement_of_everything_is_empty() {
        let all = g("S <- .*\n@alphabet \"ab\"\n");
        let c = pel_complement(&all);
        assert!(all_words(&['a', 'b'], 4).iter().all(|w| !accepts(&c, w)));
    }

    #[test]
    fn double_complement_of_anbn() {
        let base = g("S <- \"a\" S \"b\" / \"a\" \"b\"\n");
        let cc = pel_complement(&pel_complement(&base));
        for w in all_words(&['a', 'b'], 8) {
            assert_eq!(accepts(&cc, &w), accepts(&base, &w));
        }
    }

    #[test]
    fn union_of_anbn_and_ancn() {
        let x = g("S <- \"a\" S \"b\" / \"\"\n");
        let y = g("S <- \"a\" S \"c\" / \"\"\n");
        let u = pel_union(&x, &y).unwrap();
        let reference = g(AB_OR_AC);
        for w in all_words(&['a', 'b', 'c'], 8) {
            assert_eq!(accepts(&u, &w), accepts(&reference, &w), "{w:?}");
            assert_eq!(accepts(&u, &w), accepts(&x, &w) || accepts(&y, &w));
        }
    }

    #[test]
    fn intersection_with_itself() {
        let x = g(ORDERED);
        let i = pel_intersection(&x, &x).unwrap();
        for w in all_words(&['a', 'b', 'c'], 8) {
            assert_eq!(accepts(&i, &w), accepts(&x, &w));
        }
    }

    #[test]
    fn prefix_and_suffix() {
        let starts = g("S <- \"a\" .*\n@alphabet \"ab\"\n");
        let ends = g("S <- (!(\"b\" !.) .)* \"b\"\n@alphabet \"ab\"\n");
        let i = pel_intersection(&starts, &ends).unwrap();
        for w in all_words(&['a', 'b'], 6) {
            let expected = w.first() == Some(&'a') && w.last() == Some(&'b');
            assert_eq!(accepts(&i, &w), expected, "{w:?}");
        }
    }
}
