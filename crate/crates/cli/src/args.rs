use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gdpm", version, about = "Gradient descent / power method solvers for quadratic problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver on a loaded or generated problem.
    Solve(SolveArgs),
    /// Reproduce one of the benchmark experiments.
    Experiment(ExperimentArgs),
    /// Generate a problem and write it as Matrix Market plus vector files.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Alg {
    /// Fixed-step gradient descent.
    Gd,
    /// Gradient descent with heavy-ball momentum.
    Gdm,
    /// Momentum descent with leftmost eigen-pair estimates.
    Gdeig,
    /// Fixed steps interrupted by eigenvalue-based kicks.
    Kick,
    /// Steepest descent with exact line search.
    Exact,
    /// Accelerated gradient (strongly convex problems only).
    Agm,
    /// Exact two-step solver for n = 2.
    Planar,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Matrix Market file with a symmetric matrix.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub matrix: Option<PathBuf>,
    /// Generated problem: explicit:v1,v2,... | pd:n=N[,lo=L][,hi=H] |
    /// indefinite:n=N[,neg=K][,leftmost=L] | psd:n=N,zeros=K[,lo=L] | gap:n=N,r=R
    #[arg(long)]
    pub gen: Option<String>,
    /// Right-hand side: a vector file, `zero`, or `from-solution` (b = Ax* with Gaussian x*).
    #[arg(long, default_value = "zero")]
    pub b: String,
    /// Start point: a vector file, a comma-separated list, or an integer seed for a Gaussian draw.
    #[arg(long, default_value = "0")]
    pub x0: String,
    #[arg(long, value_enum, default_value_t = Alg::Gdeig)]
    pub alg: Alg,
    /// Step size; defaults to 1/lambda1. For `planar` it selects the overestimate mode with lambda1 <= 1/alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Momentum (ignored by gd, kick uses it for the inner steps).
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Inner steps between kicks.
    #[arg(long, default_value_t = 19)]
    pub s: usize,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Absolute gradient-norm tolerance; defaults to 1e-8*max(1, |g0|).
    #[arg(long)]
    pub gtol: Option<f64>,
    /// Write the per-iteration trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Seed for generated problems and right-hand sides.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the final eigenvector estimate (gdeig) or eigenvectors (planar).
    #[arg(long)]
    pub direction_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    /// Leftmost eigen-pair recovery on indefinite problems (b = 0).
    EigRecovery,
    /// Saddle escape: kicks with several periods against GD and exact step.
    KickScan,
    /// Step-size study on a positive definite problem with smart initialization.
    StepSize,
    /// Kick against GD and AGM on positive (semi)definite problems.
    KickBench,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    /// Output directory for traces and aggregate CSVs.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Problem dimension (default depends on the experiment: 200 or 1000).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of seeds (default: 100 for eig-recovery, 10 for kick-scan, 5 otherwise).
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Iteration budget per run (default: 1000 for eig-recovery and kick-scan, 20000 otherwise).
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Base seed; run i uses base + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Kick periods s+1 for kick-scan.
    #[arg(long, value_delimiter = ',')]
    pub periods: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Problem specification, same grammar as `solve --gen`.
    #[arg(long)]
    pub spec: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `zero` or `from-solution`.
    #[arg(long, default_value = "zero")]
    pub b: String,
    /// Output prefix: writes PREFIX.mtx, PREFIX.b.txt and PREFIX.eig.txt (ascending eigenvalues).
    #[arg(long)]
    pub out: PathBuf,
}
