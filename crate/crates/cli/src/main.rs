use std::io::{self, Write};
use std::process;

use clap::Parser;
use pegmachine_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = execute(&cli, &mut out, &mut io::stderr());
    let _ = out.flush();
    drop(out);
    process::exit(code);
}
