mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Check barycentric-associativity laws of variadic operations, factorize
/// finite ones and reconstruct quasi-arithmetic mean generators.
#[derive(Parser, Debug)]
#[command(name = "bary", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check selected laws on one operation.
    Check(CheckArgs),
    /// Check every applicable law, implications between them and agreement
    /// of equivalent formulations.
    Suite(SuiteArgs),
    /// Factor a finite operation as F_n = f_n ∘ H_n.
    Factorize(FactorizeArgs),
    /// Reconstruct a mean generator from ψ on a closed interval.
    Extract(ExtractArgs),
    /// Build the ψ table between two letters and test the ψ-mean identity.
    Psi(PsiArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Interp {
    Linear,
    Cubic,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Operation: a spec file, `builtin:NAME` or `table:NAME`.
    #[arg(long)]
    pub op: String,
    /// JSON object of builtin parameters.
    #[arg(long)]
    pub params: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, env = "BARY_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Closed interval `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated laws, or `all`.
    #[arg(long, default_value = "all")]
    pub prop: String,
    /// Sample even when the domain is finite.
    #[arg(long)]
    pub sampled: bool,
    /// Cap on exhaustive instances (or sampled primary words).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Re-judge the witness stored in a report or witness file.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub sampled: bool,
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct FactorizeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Factor through a length-preserving string function.
    #[arg(long)]
    pub general: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 256)]
    pub grid_q: u32,
    /// Halve the ψ grid step this many times through arity-2 evaluations.
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
    /// Generator to test for affine equivalence with the extracted one.
    #[arg(long)]
    pub compare: Option<String>,
    #[arg(long, default_value_t = 1e-6)]
    pub compare_tol: f64,
    /// Largest acceptable reconstruction residual.
    #[arg(long, default_value_t = 1e-4)]
    pub residual_tol: f64,
    #[arg(long, value_enum, default_value_t = Interp::Linear)]
    pub interpolation: Interp,
    /// Treat the op as a pre-mean and factor out its diagonal first.
    #[arg(long)]
    pub pre_mean: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PsiArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 256)]
    pub grid_q: u32,
    /// Also test F(ψ(z_1)…ψ(z_n)) = ψ(mean z) on grid tuples.
    #[arg(long)]
    pub check: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
