use std::io::Write;

use anyhow::{bail, Result};
use pegmachine_core::closures::{left_concat_dcfl, pel_complement, pel_intersection, pel_union, CompositionSpec};
use pegmachine_core::closures::reg_closure_machine;
use pegmachine_core::translate::compile;

use crate::args::{ComposeArgs, ComposeOp};
use crate::load::{emit, load, load_dpda, load_grammar, Loaded};
use crate::EXIT_ACCEPT;

pub fn compose(c: &ComposeArgs, out: &mut dyn Write) -> Result<i32> {
    let text = match &c.op {
        ComposeOp::Complement { grammar } => pel_complement(&load_grammar(grammar)?).to_string(),
        ComposeOp::Union { left, right } => pel_union(&load_grammar(left)?, &load_grammar(right)?)?.to_string(),
        ComposeOp::Intersect { left, right } => {
            pel_intersection(&load_grammar(left)?, &load_grammar(right)?)?.to_string()
        }
        ComposeOp::ConcatDcfl { dpda, right } => {
            let x = load_dpda(dpda)?;
            let y = match load(right)? {
                Loaded::Grammar(g) => compile(&g)?,
                Loaded::Machine(m) => m,
                _ => bail!("{}: the right factor must be a grammar or a machine", right.display()),
            };
            left_concat_dcfl(&x, &y)?.to_string()
        }
        ComposeOp::RegClosure { spec, repair_empty } => {
            let mut s = CompositionSpec::load(spec)?;
            if *repair_empty {
                s = s.without_empty_words();
            }
            reg_closure_machine(&s)?.to_string()
        }
    };
    emit(&text, c.output.as_deref(), out)?;
    Ok(EXIT_ACCEPT)
}
