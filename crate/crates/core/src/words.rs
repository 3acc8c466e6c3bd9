//! Exhaustive word enumeration for oracles.

/// All words over `alphabet` of length at most `max_len`, shortest first and
/// in lexicographic order (by alphabet position) within a length.
pub fn all_words(alphabet: &[char], max_len: usize) -> Vec<Vec<char>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for &c in alphabet {
                let mut v: Vec<char> = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        let w = all_words(&['a', 'b'], 3);
        assert_eq!(w.len(), 1 + 2 + 4 + 8);
        assert_eq!(w[0], Vec::<char>::new());
        assert_eq!(w[3], vec!['a', 'a']);
        assert!(all_words(&[], 4) == vec![Vec::<char>::new()]);
    }
}
