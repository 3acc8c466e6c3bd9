use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pegmachine_core::closures::{parse_dfa_text, parse_dpda_text, CompositionSpec, Dpda, LabeledDfa};
use pegmachine_core::peg::{parse_grammar_text, Grammar};
use pegmachine_core::pppda::{parse_machine_text, Machine};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Grammar,
    Machine,
    Dpda,
    Dfa,
    Composition,
}

/// Classifies a file by its directives: `@kind` wins, then `@dfa`/`@bind`
/// mark a composition and `@states` a machine. Anything else is a grammar.
pub fn detect(text: &str) -> FileKind {
    let mut kind = FileKind::Grammar;
    for line in text.lines() {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("@kind") => {
                return match words.next() {
                    Some("dpda") => FileKind::Dpda,
                    Some("dfa") => FileKind::Dfa,
                    _ => FileKind::Machine,
                }
            }
            Some("@dfa") | Some("@bind") => kind = FileKind::Composition,
            Some("@states") if kind == FileKind::Grammar => kind = FileKind::Machine,
            _ => {}
        }
    }
    kind
}

#[derive(Clone, Debug)]
pub enum Loaded {
    Grammar(Grammar),
    Machine(Machine),
    Dpda(Dpda),
    Dfa(LabeledDfa),
    Composition(CompositionSpec),
}

impl Loaded {
    pub fn kind(&self) -> FileKind {
        match self {
            Loaded::Grammar(_) => FileKind::Grammar,
            Loaded::Machine(_) => FileKind::Machine,
            Loaded::Dpda(_) => FileKind::Dpda,
            Loaded::Dfa(_) => FileKind::Dfa,
            Loaded::Composition(_) => FileKind::Composition,
        }
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = read(path)?;
    let shown = path.display();
    Ok(match detect(&text) {
        FileKind::Grammar => Loaded::Grammar(parse_grammar_text(&text).with_context(|| format!("{shown}"))?),
        FileKind::Machine => Loaded::Machine(parse_machine_text(&text).with_context(|| format!("{shown}"))?),
        FileKind::Dpda => Loaded::Dpda(parse_dpda_text(&text).with_context(|| format!("{shown}"))?),
        FileKind::Dfa => Loaded::Dfa(parse_dfa_text(&text).with_context(|| format!("{shown}"))?),
        FileKind::Composition => Loaded::Composition(CompositionSpec::load(path).with_context(|| format!("{shown}"))?),
    })
}

pub fn load_grammar(path: &Path) -> Result<Grammar> {
    match load(path)? {
        Loaded::Grammar(g) => Ok(g),
        other => bail!("{}: expected a grammar, found a {:?} file", path.display(), other.kind()),
    }
}

pub fn load_machine(path: &Path) -> Result<Machine> {
    match load(path)? {
        Loaded::Machine(m) => Ok(m),
        other => bail!("{}: expected a machine, found a {:?} file", path.display(), other.kind()),
    }
}

pub fn load_dpda(path: &Path) -> Result<Dpda> {
    match load(path)? {
        Loaded::Dpda(d) => Ok(d),
        other => bail!("{}: expected a DPDA, found a {:?} file", path.display(), other.kind()),
    }
}

/// Writes `text` to `output`, or to `out` when no path is given.
pub fn emit(text: &str, output: Option<&Path>, out: &mut dyn std::io::Write) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => out.write_all(text.as_bytes()).context("writing output"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detection() {
        assert_eq!(detect("S <- \"a\"\n@alphabet \"ab\"\n"), FileKind::Grammar);
        assert_eq!(detect("@states q\n@initial q\n"), FileKind::Machine);
        assert_eq!(detect("@kind dppda\n"), FileKind::Machine);
        assert_eq!(detect("# x\n@kind dpda\n@states p\n"), FileKind::Dpda);
        assert_eq!(detect("@states a b\n@kind dfa\n"), FileKind::Dfa);
        assert_eq!(detect("@dfa x.dfa\n@bind a1 y.dpda\n"), FileKind::Composition);
    }
}
