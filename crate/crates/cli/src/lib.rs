//! Command-line front end: load grammar and machine files, transform them,
//! decide membership under any engine, trace, benchmark, fuzz and compose.

use std::io::Write;

pub mod args;
pub mod bench;
pub mod compose;
pub mod fuzz;
pub mod load;
pub mod run;
pub mod transform;

pub use args::{Cli, Command, EngineChoice};

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_DIVERGENCE: i32 = 4;

/// Runs one command, writing results to `out` and diagnostics to `err`,
/// and returns the process exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Check { path } => transform::check(path, out),
        Command::Desugar(t) => transform::desugar(t, out),
        Command::Cnf(t) => transform::cnf(t, out),
        Command::Normalize(t) => transform::normalize(t, out),
        Command::Compile(t) => transform::compile(t, out),
        Command::Extract(t) => transform::extract(t, out),
        Command::Run(r) => run::run(cli, r, r.trace, out),
        Command::Trace(r) => run::run(cli, r, true, out),
        Command::Bench(b) => bench::bench(b, out),
        Command::Fuzz(f) => fuzz::fuzz(&fuzz::FuzzConfig::from_args(cli, f), out),
        Command::Compose(c) => compose::compose(c, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INVALID
        }
    }
}
