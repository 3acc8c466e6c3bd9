use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pegmachine_core::closures::CompositionError;
use pegmachine_core::peg::{check_well_formed, desugar as desugar_grammar, to_cnf};
use pegmachine_core::pppda::{check_normal_form, normalize as normalize_machine, Machine};
use pegmachine_core::translate::{compile as compile_grammar, dppda_to_peg};

use crate::args::Transform;
use crate::load::{emit, load, load_grammar, load_machine, Loaded};
use crate::{EXIT_ACCEPT, EXIT_REJECT};

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn names(items: impl Iterator<Item = String>) -> String {
    let v: Vec<String> = items.collect();
    if v.is_empty() {
        "-".to_string()
    } else {
        v.join(" ")
    }
}

pub fn check(path: &Path, out: &mut dyn Write) -> Result<i32> {
    match load(path)? {
        Loaded::Grammar(g) => {
            let r = check_well_formed(&g);
            if let Some(cycle) = &r.offending_cycle {
                let mut shown = cycle.clone();
                shown.push(cycle[0].clone());
                writeln!(out, "not well-formed: left-recursive cycle {}", shown.join(" -> "))?;
            } else if !r.well_formed {
                writeln!(out, "not well-formed")?;
            } else {
                writeln!(out, "well-formed")?;
            }
            writeln!(out, "nonterminals={}", g.nonterminal_count())?;
            writeln!(out, "nullable={}", names(r.nullable.iter().filter(|e| *e.1).map(|e| e.0.clone())))?;
            writeln!(out, "can-fail={}", names(r.can_fail.iter().filter(|e| *e.1).map(|e| e.0.clone())))?;
            Ok(if r.well_formed { EXIT_ACCEPT } else { EXIT_REJECT })
        }
        Loaded::Machine(m) => {
            writeln!(out, "valid machine")?;
            describe_machine(&m, out)?;
            Ok(EXIT_ACCEPT)
        }
        Loaded::Dpda(d) => {
            writeln!(out, "valid dpda")?;
            writeln!(out, "states={}", d.state_count())?;
            writeln!(out, "symbols={}", d.symbol_count())?;
            Ok(EXIT_ACCEPT)
        }
        Loaded::Dfa(d) => {
            writeln!(out, "valid dfa")?;
            writeln!(out, "states={}", d.state_count())?;
            writeln!(out, "labels={}", d.labels().join(" "))?;
            Ok(EXIT_ACCEPT)
        }
        Loaded::Composition(spec) => match spec.check_empty_word_free() {
            Ok(()) => {
                writeln!(out, "valid composition")?;
                writeln!(out, "labels={}", spec.dfa.labels().join(" "))?;
                Ok(EXIT_ACCEPT)
            }
            Err(e @ CompositionError::EmptyWordInBinding(_)) => {
                writeln!(out, "invalid composition: {e}")?;
                Ok(EXIT_REJECT)
            }
            Err(e) => Err(e.into()),
        },
    }
}

fn describe_machine(m: &Machine, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "states={}", m.state_count())?;
    writeln!(out, "symbols={}", m.symbol_count())?;
    writeln!(out, "moves={}", m.delta().len())?;
    writeln!(out, "two-way={}", yes_no(m.two_way()))?;
    match check_normal_form(m) {
        Ok(()) => writeln!(out, "normal-form=yes")?,
        Err(v) => writeln!(out, "normal-form=no ({v})")?,
    }
    Ok(())
}

pub fn desugar(t: &Transform, out: &mut dyn Write) -> Result<i32> {
    let g = load_grammar(&t.path)?;
    emit(&desugar_grammar(&g).to_string(), t.output.as_deref(), out)?;
    Ok(EXIT_ACCEPT)
}

pub fn cnf(t: &Transform, out: &mut dyn Write) -> Result<i32> {
    let g = load_grammar(&t.path)?;
    let c = to_cnf(&desugar_grammar(&g))?;
    emit(&c.to_string(), t.output.as_deref(), out)?;
    Ok(EXIT_ACCEPT)
}

pub fn normalize(t: &Transform, out: &mut dyn Write) -> Result<i32> {
    let m = load_machine(&t.path)?;
    emit(&normalize_machine(&m).to_string(), t.output.as_deref(), out)?;
    Ok(EXIT_ACCEPT)
}

pub fn compile(t: &Transform, out: &mut dyn Write) -> Result<i32> {
    let g = load_grammar(&t.path)?;
    let m = compile_grammar(&g)?;
    emit(&m.to_string(), t.output.as_deref(), out)?;
    Ok(EXIT_ACCEPT)
}

/// Normalizes first unless the machine is already in normal form.
pub fn extract_machine(m: &Machine) -> Result<pegmachine_core::peg::Grammar> {
    if m.two_way() {
        bail!("extraction needs a one-way machine");
    }
    let g = match check_normal_form(m) {
        Ok(()) => dppda_to_peg(m),
        Err(_) => dppda_to_peg(&normalize_machine(m)),
    };
    g.context("extracting a grammar")
}

pub fn extract(t: &Transform, out: &mut dyn Write) -> Result<i32> {
    let m = load_machine(&t.path)?;
    emit(&extract_machine(&m)?.to_string(), t.output.as_deref(), out)?;
    Ok(EXIT_ACCEPT)
}
