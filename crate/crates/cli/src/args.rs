use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lwr", version, about = "Joint classifier/rejector training and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train models for every rejection cost and select hyperparameters on validation data.
    #[command(args_override_self = true)]
    Train(TrainArgs),
    /// Evaluate trained models on a test set and write tradeoff curves.
    #[command(args_override_self = true)]
    Eval(EvalArgs),
    /// Train and evaluate over a list of rejection costs in one run.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Generate a synthetic Gaussian dataset and its optimal rejection risks.
    #[command(args_override_self = true)]
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Key-value configuration file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for all outputs.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct TrainFiles {
    #[arg(long)]
    pub train_labels: Option<PathBuf>,
    #[arg(long)]
    pub train_phi: Option<PathBuf>,
    #[arg(long)]
    pub train_phi_prime: Option<PathBuf>,
    #[arg(long)]
    pub val_labels: Option<PathBuf>,
    #[arg(long)]
    pub val_phi: Option<PathBuf>,
    #[arg(long)]
    pub val_phi_prime: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TestFiles {
    #[arg(long)]
    pub test_labels: Option<PathBuf>,
    #[arg(long)]
    pub test_phi: Option<PathBuf>,
    #[arg(long)]
    pub test_phi_prime: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    InteriorPoint,
    Subgradient,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Comma-separated rejection costs in (0, 1/2).
    #[arg(long)]
    pub c_list: Option<String>,
    /// Comma-separated classifier regularization values.
    #[arg(long)]
    pub lambda_grid: Option<String>,
    /// Comma-separated rejector regularization values.
    #[arg(long)]
    pub lambda_prime_grid: Option<String>,
    /// Z-score every feature using training-split statistics.
    #[arg(long)]
    pub normalize: bool,
    /// Also fit the calibrated-SVM threshold baseline.
    #[arg(long)]
    pub baselines: bool,
    /// External `id,p_plus` table evaluated as a threshold baseline.
    #[arg(long)]
    pub probabilities: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SolverArg::InteriorPoint)]
    pub solver: SolverArg,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub files: TrainFiles,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Directory holding `model_*.json` files written by `train`.
    #[arg(long)]
    pub models: Option<PathBuf>,
    #[command(flatten)]
    pub test: TestFiles,
    /// External `id,p_plus` table; required when an external-baseline model is present.
    #[arg(long)]
    pub probabilities: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub files: TrainFiles,
    #[command(flatten)]
    pub test: TestFiles,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SecondSpaceArg {
    Identity,
    Rotation,
    Squared,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of samples.
    #[arg(long, default_value_t = 4000)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Comma-separated mean of class +1; defaults to (1, 0, ..., 0).
    #[arg(long)]
    pub mu_plus: Option<String>,
    /// Comma-separated mean of class -1; defaults to the negated `mu-plus`.
    #[arg(long)]
    pub mu_minus: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub prior_plus: f64,
    #[arg(long, value_enum, default_value_t = SecondSpaceArg::Identity)]
    pub second_space: SecondSpaceArg,
    /// Output dimension of the rotation space; defaults to `dim`.
    #[arg(long)]
    pub projection_dims: Option<usize>,
    /// Rejection costs for the oracle summary.
    #[arg(long)]
    pub c_list: Option<String>,
    /// Prefix for the written file names.
    #[arg(long, default_value = "")]
    pub prefix: String,
}
