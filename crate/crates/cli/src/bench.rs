use std::io::Write;

use anyhow::{bail, Context, Result};
use pegmachine_core::closures::reg_closure_machine;
use pegmachine_core::cooksim::{run_linear_table, work_bound};
use pegmachine_core::pppda::{default_step_limit, desugar_hat_moves, run_table, Machine, Table};
use pegmachine_core::translate::compile;

use crate::args::BenchArgs;
use crate::load::{load, Loaded};
use crate::{EXIT_ACCEPT, EXIT_REJECT};

/// Accepted range for the work ratio when `n` doubles.
pub const RATIO_RANGE: (f64, f64) = (1.8, 2.2);

/// A word family such as `a^n b^n c^n`: literal parts, each repeated
/// `k·n` times when written `lit^kn` (`k` defaults to 1), once otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    parts: Vec<(String, Option<usize>)>,
}

impl Family {
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for tok in text.split_whitespace() {
            let part = match tok.split_once('^') {
                None => (tok.to_string(), None),
                Some((lit, exp)) => {
                    let k = exp.strip_suffix('n').with_context(|| format!("exponent of {tok:?} must end in n"))?;
                    let k = if k.is_empty() {
                        1
                    } else {
                        k.parse().with_context(|| format!("bad multiplier in {tok:?}"))?
                    };
                    (lit.to_string(), Some(k))
                }
            };
            if part.0.is_empty() {
                bail!("empty literal in {tok:?}");
            }
            parts.push(part);
        }
        if parts.is_empty() {
            bail!("empty word family");
        }
        Ok(Family { parts })
    }

    pub fn word(&self, n: usize) -> Vec<char> {
        self.parts
            .iter()
            .flat_map(|(lit, k)| lit.repeat(k.map_or(1, |k| k * n)).chars().collect::<Vec<_>>())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub cook_ops: u64,
    pub bound: u64,
    pub direct_steps: u64,
}

/// Work counts for each size; `m` must not contain hat moves.
pub fn measure(m: &Machine, family: &Family, sizes: &[usize]) -> Result<Vec<BenchRow>> {
    let table = Table::new(m)?;
    sizes
        .iter()
        .map(|&n| {
            let w = family.word(n);
            let tape = table
                .encode(&w)
                .map_err(|c| anyhow::anyhow!("letter {c:?} is not in the input alphabet"))?;
            let cook = run_linear_table(&table, &tape);
            let direct = run_table(&table, tape, default_step_limit(m, w.len()));
            Ok(BenchRow {
                n,
                cook_ops: cook.ops,
                bound: work_bound(m, w.len()),
                direct_steps: direct.steps,
            })
        })
        .collect()
}

/// `(n, 2n, ops(2n)/ops(n))` for every doubling pair among the rows with `n > 0`.
pub fn doubling_ratios(rows: &[BenchRow]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for a in rows.iter().filter(|r| r.n > 0) {
        if let Some(b) = rows.iter().find(|r| r.n == 2 * a.n) {
            out.push((a.n, b.n, b.cook_ops as f64 / a.cook_ops.max(1) as f64));
        }
    }
    out
}

fn bench_machine(loaded: Loaded) -> Result<Machine> {
    Ok(match loaded {
        Loaded::Grammar(g) => compile(&g)?,
        Loaded::Machine(m) => desugar_hat_moves(&m),
        Loaded::Composition(spec) => reg_closure_machine(&spec)?,
        _ => bail!("bench needs a grammar, machine or composition file"),
    })
}

pub fn bench(b: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let m = bench_machine(load(&b.path)?)?;
    let family = Family::parse(&b.family)?;
    let rows = measure(&m, &family, &b.sizes)?;
    writeln!(out, "n cook.ops direct.steps")?;
    for r in &rows {
        writeln!(out, "{} {} {}", r.n, r.cook_ops, r.direct_steps)?;
    }
    if !b.assert_linear {
        return Ok(EXIT_ACCEPT);
    }
    writeln!(out, "---")?;
    let mut ok = true;
    let ratios = doubling_ratios(&rows);
    if ratios.is_empty() {
        writeln!(out, "no doubling pairs among the sizes")?;
        ok = false;
    }
    for (n, n2, ratio) in ratios {
        let pass = (RATIO_RANGE.0..=RATIO_RANGE.1).contains(&ratio);
        ok &= pass;
        writeln!(out, "ratio.{n2}/{n}={ratio:.3}{}", if pass { "" } else { " FAIL" })?;
    }
    for r in &rows {
        let pass = r.cook_ops <= r.bound;
        ok &= pass;
        writeln!(out, "bound.{}={}/{}{}", r.n, r.cook_ops, r.bound, if pass { "" } else { " FAIL" })?;
    }
    writeln!(out, "linear={}", if ok { "yes" } else { "no" })?;
    Ok(if ok { EXIT_ACCEPT } else { EXIT_REJECT })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        let f = Family::parse("a^n b^n c^n").unwrap();
        assert_eq!(f.word(2).iter().collect::<String>(), "aabbcc");
        assert!(f.word(0).is_empty());
        let g = Family::parse("x ab^2n").unwrap();
        assert_eq!(g.word(1).iter().collect::<String>(), "xabab");
        assert!(Family::parse("a^m").is_err());
        assert!(Family::parse("").is_err());
    }
}
