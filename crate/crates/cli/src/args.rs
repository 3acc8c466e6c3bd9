use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum EngineChoice {
    /// Direct recursion over the grammar clauses.
    Naive,
    /// Memoizing grammar recognizer.
    Packrat,
    /// Step-by-step machine execution.
    Direct,
    /// Terminator-memoizing machine simulation.
    Cook,
}

impl EngineChoice {
    pub fn name(self) -> &'static str {
        match self {
            EngineChoice::Naive => "naive",
            EngineChoice::Packrat => "packrat",
            EngineChoice::Direct => "direct",
            EngineChoice::Cook => "cook",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pegmachine", version, about = "Parsing expression grammars and pointer pushdown automata")]
pub struct Cli {
    /// Move limit for machine runs [default: 1000·(n+2)·|Q|·|Γ|].
    #[arg(long, global = true, env = "PEGMACHINE_STEP_LIMIT")]
    pub step_limit: Option<u64>,
    /// Clause-application budget for the naive recognizer.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Seed for random generation.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Recognizer to use; defaults to packrat for grammars and direct for machines.
    #[arg(long, global = true, value_enum)]
    pub engine: Option<EngineChoice>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a file; for grammars, report well-formedness.
    Check { path: PathBuf },
    /// Rewrite a grammar using only the core operators.
    Desugar(Transform),
    /// Bring a grammar into normal form.
    Cnf(Transform),
    /// Bring a one-way machine into normal form.
    Normalize(Transform),
    /// Translate a grammar into a machine.
    Compile(Transform),
    /// Translate a one-way machine into a grammar.
    Extract(Transform),
    /// Decide membership of a word.
    Run(RunArgs),
    /// `run --trace`.
    Trace(RunArgs),
    /// Count simulation work on a family of words.
    Bench(BenchArgs),
    /// Compare all recognizers on random grammars and words.
    Fuzz(FuzzArgs),
    /// Build grammars and machines from others.
    Compose(ComposeArgs),
}

#[derive(Debug, Args)]
pub struct Transform {
    pub path: PathBuf,
    /// Write here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub path: PathBuf,
    /// The input word; empty when omitted.
    pub word: Option<String>,
    /// Read the word from a file (one trailing newline is dropped).
    #[arg(long, conflicts_with = "word")]
    pub input_file: Option<PathBuf>,
    /// Print one line per machine move.
    #[arg(long)]
    pub trace: bool,
    /// Print counters after a `---` line.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub path: PathBuf,
    /// Words as space-separated parts, each a literal or `literal^n`,
    /// e.g. `a^n b^n c^n`.
    #[arg(long)]
    pub family: String,
    /// Values of n.
    #[arg(long, value_delimiter = ',', default_value = "0,50,100,200")]
    pub sizes: Vec<usize>,
    /// Fail unless work doubles (within 10%) when n doubles and stays within the bound.
    #[arg(long)]
    pub assert_linear: bool,
}

#[derive(Debug, Args, Clone)]
pub struct FuzzArgs {
    /// Number of random grammars.
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
    /// Random words per grammar.
    #[arg(long, default_value_t = 16)]
    pub words: usize,
    /// Longest word.
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
    #[arg(long, default_value_t = 2)]
    pub alphabet_size: usize,
    /// Nonterminals besides the axiom.
    #[arg(long, default_value_t = 5)]
    pub max_nonterminals: usize,
    /// Flip one engine's answers on odd-length words, to test the harness.
    #[arg(long, hide = true, value_enum)]
    pub corrupt: Option<FuzzEngine>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum FuzzEngine {
    Naive,
    Packrat,
    Direct,
    Cook,
    Extracted,
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    #[command(subcommand)]
    pub op: ComposeOp,
    /// Write here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ComposeOp {
    /// Grammar for the words a grammar rejects.
    Complement { grammar: PathBuf },
    /// Grammar for the union of two grammar languages.
    Union { left: PathBuf, right: PathBuf },
    /// Grammar for the intersection of two grammar languages.
    Intersect { left: PathBuf, right: PathBuf },
    /// Machine for a DPDA language followed by a grammar or one-way machine language.
    ConcatDcfl { dpda: PathBuf, right: PathBuf },
    /// Machine for a composition file.
    RegClosure {
        spec: PathBuf,
        /// Rewrite labels whose languages contain the empty word instead of failing.
        #[arg(long)]
        repair_empty: bool,
    },
}
