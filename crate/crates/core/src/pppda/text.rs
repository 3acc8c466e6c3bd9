use std::fmt;

use thiserror::Error;

use super::machine::{Action, Direction, HatDirection, Letter, Machine, MachineBuilder, MachineError, Move};
use crate::peg::valid_letter;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineTextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

fn syntax(line: usize, message: impl Into<String>) -> MachineTextError {
    MachineTextError::Syntax {
        line,
        message: message.into(),
    }
}

/// Splits a line into whitespace-separated tokens, dropping a trailing
/// comment (a token starting with `#`).
fn tokens(line: &str) -> Vec<&str> {
    line.split_whitespace().take_while(|t| !t.starts_with('#')).collect()
}

pub(crate) fn parse_letter(tok: &str) -> Option<Letter> {
    match tok {
        "<" => Some(Letter::LeftEnd),
        ">" => Some(Letter::RightEnd),
        _ => {
            let inner = tok.strip_prefix('"')?.strip_suffix('"')?;
            let mut cs = inner.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) if valid_letter(c) => Some(Letter::Char(c)),
                _ => None,
            }
        }
    }
}

pub(crate) fn parse_alphabet(tok: &str) -> Option<Vec<char>> {
    let inner = tok.strip_prefix('"')?.strip_suffix('"')?;
    inner.chars().all(valid_letter).then(|| inner.chars().collect())
}

/// Parses the machine text format.
///
/// Header directives: `@states`, `@initial`, `@final`, `@bottom`,
/// `@alphabet "abc"`, `@twoway yes|no`, and optionally `@stack` (fixes the
/// order of stack symbols) and `@kind dppda`. Each further line is a
/// transition `state letter symbol -> state push direction`, where the
/// letter is `"a"`, `<` (left end-marker) or `>` (right end-marker), the push
/// string is a comma-separated list of symbols with the new top first or `-`
/// for none, and the direction is one of `left down up right hatleft
/// hatdown hatright`.
pub fn parse_machine_text(text: &str) -> Result<Machine, MachineTextError> {
    let mut states: Option<Vec<String>> = None;
    let mut initial = None;
    let mut finals = Vec::new();
    let mut bottom = None;
    let mut stack = Vec::new();
    let mut alphabet = Vec::new();
    let mut two_way = false;
    let mut transitions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some(&first) = toks.first() else { continue };
        if let Some(directive) = first.strip_prefix('@') {
            let args = &toks[1..];
            let one = || match args {
                [a] => Ok(a.to_string()),
                _ => Err(syntax(line, format!("`@{directive}` takes one argument"))),
            };
            match directive {
                "kind" => {
                    if one()? != "dppda" {
                        return Err(syntax(line, "expected `@kind dppda`"));
                    }
                }
                "states" => states = Some(args.iter().map(|s| s.to_string()).collect()),
                "initial" => initial = Some(one()?),
                "final" => finals.extend(args.iter().map(|s| s.to_string())),
                "bottom" => bottom = Some(one()?),
                "stack" => stack.extend(args.iter().map(|s| s.to_string())),
                "alphabet" => {
                    alphabet = parse_alphabet(&one()?).ok_or_else(|| syntax(line, "expected a string literal of letters"))?;
                }
                "twoway" => {
                    two_way = match one()?.as_str() {
                        "yes" => true,
                        "no" => false,
                        _ => return Err(syntax(line, "expected `yes` or `no`")),
                    }
                }
                _ => return Err(syntax(line, format!("unknown directive `@{directive}`"))),
            }
            continue;
        }
        transitions.push((line, toks));
    }

    let states = states.ok_or_else(|| syntax(1, "missing `@states`"))?;
    let mut b = MachineBuilder::new(alphabet, two_way);
    for s in &states {
        b.state(s);
    }
    let state = |b: &mut MachineBuilder, name: &str, line: usize| {
        if states.iter().any(|s| s == name) {
            Ok(b.state(name))
        } else {
            Err(syntax(line, format!("unknown state `{name}`")))
        }
    };
    let initial = initial.ok_or_else(|| syntax(1, "missing `@initial`"))?;
    let q0 = state(&mut b, &initial, 1)?;
    b.set_initial(q0);
    for f in &finals {
        let q = state(&mut b, f, 1)?;
        b.add_final(q);
    }
    let bottom = bottom.ok_or_else(|| syntax(1, "missing `@bottom`"))?;
    for z in &stack {
        b.symbol(z);
    }
    let z0 = b.symbol(&bottom);
    b.set_bottom(z0);

    for (line, toks) in transitions {
        let [q, a, z, arrow, p, push, dir] = toks.as_slice() else {
            return Err(syntax(line, "expected `state letter symbol -> state push direction`"));
        };
        if *arrow != "->" {
            return Err(syntax(line, "expected `->`"));
        }
        let q = state(&mut b, q, line)?;
        let a = parse_letter(a).ok_or_else(|| syntax(line, format!("invalid letter `{a}`")))?;
        let z = b.symbol(z);
        let p = state(&mut b, p, line)?;
        let push: Vec<_> = if *push == "-" {
            Vec::new()
        } else {
            push.split(',').map(|s| b.symbol(s)).collect()
        };
        let hat = |h| {
            if push.is_empty() {
                Ok(Move::hat(p, h))
            } else {
                Err(syntax(line, "hat moves take no push string"))
            }
        };
        let m = match *dir {
            "left" => Move::push(p, push.clone(), Direction::Left),
            "down" => Move::push(p, push.clone(), Direction::Down),
            "up" => Move::push(p, push.clone(), Direction::Up),
            "right" => Move::push(p, push.clone(), Direction::Right),
            "hatleft" => hat(HatDirection::Left)?,
            "hatdown" => hat(HatDirection::Down)?,
            "hatright" => hat(HatDirection::Right)?,
            other => return Err(syntax(line, format!("unknown direction `{other}`"))),
        };
        b.add(q, a, z, m)?;
    }
    Ok(b.build()?)
}

/// Serializes in the format read by [`parse_machine_text`].
impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |names: Vec<&str>| names.join(" ");
        writeln!(f, "@kind dppda")?;
        writeln!(f, "@states {}", join(self.states().map(|q| self.state_name(q)).collect()))?;
        writeln!(f, "@initial {}", self.state_name(self.initial()))?;
        writeln!(f, "@final {}", join(self.finals().iter().map(|&q| self.state_name(q)).collect()))?;
        writeln!(f, "@bottom {}", self.symbol_name(self.bottom()))?;
        writeln!(f, "@stack {}", join(self.symbols().map(|z| self.symbol_name(z)).collect()))?;
        writeln!(f, "@alphabet \"{}\"", self.alphabet().iter().collect::<String>())?;
        writeln!(f, "@twoway {}", if self.two_way() { "yes" } else { "no" })?;
        for (&(q, a, z), m) in self.delta() {
            let (push, dir) = match &m.action {
                Action::Core { push, direction } if push.is_empty() => ("-".to_string(), direction.keyword()),
                Action::Core { push, direction } => (
                    push.iter().map(|&x| self.symbol_name(x)).collect::<Vec<_>>().join(","),
                    direction.keyword(),
                ),
                Action::Hat(h) => ("-".to_string(), h.keyword()),
            };
            writeln!(
                f,
                "{} {} {} -> {} {} {}",
                self.state_name(q),
                a,
                self.symbol_name(z),
                self.state_name(m.target),
                push,
                dir
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pppda::builtin_anbncn;

    #[test]
    fn round_trip() {
        let m = builtin_anbncn();
        let text = m.to_string();
        assert_eq!(parse_machine_text(&text).unwrap(), m);
    }

    #[test]
    fn up_with_push_is_an_error() {
        let src = "@states q\n@initial q\n@bottom Z\n@alphabet \"a\"\nq \"a\" Z -> q X,Y up\n";
        assert!(matches!(
            parse_machine_text(src),
            Err(MachineTextError::Machine(MachineError::UpWithPush(..)))
        ));
    }

    #[test]
    fn duplicate_key_is_an_error() {
        let src = "@states q\n@initial q\n@bottom Z\n@alphabet \"a\"\nq \"a\" Z -> q - down\nq \"a\" Z -> q - up\n";
        assert!(matches!(
            parse_machine_text(src),
            Err(MachineTextError::Machine(MachineError::Duplicate(..)))
        ));
    }

    #[test]
    fn unknown_state_is_reported_with_line() {
        let src = "@states q\n@initial q\n@bottom Z\n@alphabet \"a\"\nq \"a\" Z -> p - down\n";
        assert_eq!(
            parse_machine_text(src),
            Err(MachineTextError::Syntax {
                line: 5,
                message: "unknown state `p`".into()
            })
        );
    }

    #[test]
    fn push_string_lists_top_first() {
        let src = "@states q\n@initial q\n@bottom Z\n@alphabet \"a\"\nq < Z -> q X,Y right\n";
        let m = parse_machine_text(src).unwrap();
        let mv = m.get(m.initial(), Letter::LeftEnd, m.bottom()).unwrap();
        let x = m.symbol("X").unwrap();
        let y = m.symbol("Y").unwrap();
        assert_eq!(mv.action, Action::Core { push: vec![x, y], direction: Direction::Right });
    }
}
