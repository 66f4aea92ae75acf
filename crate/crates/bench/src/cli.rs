use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::curve::{run_learning_curve, CurveConfig};
use crate::dataset::{load_csv, save_csv};
use crate::error::{BenchError, Result};
use crate::runtime::{run_runtime_bench, RuntimeConfig, DEFAULT_QUERIES, DEFAULT_REPEATS};
use crate::synth::{generate, SynthKind};

#[derive(Debug, Parser)]
#[command(name = "albench", version, about = "Active-learning learning curves and runtime comparisons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Held-out accuracy after each query step.
    Curve(CurveArgs),
    /// Mean and std of wall-clock time per strategy.
    Runtime(RuntimeArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub strategy: String,
    #[arg(long, default_value = "gnb")]
    pub estimator: String,
    #[arg(long, default_value_t = 10)]
    pub initial: usize,
    #[arg(long, default_value_t = 50)]
    pub queries: usize,
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RuntimeArgs {
    /// Comma-separated strategy names.
    #[arg(long, value_delimiter = ',', default_value = "least_confident,qbc,eer")]
    pub strategies: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    pub repeats: usize,
    #[arg(long, default_value_t = DEFAULT_QUERIES)]
    pub queries: usize,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "gnb")]
    pub estimator: String,
    #[arg(long, default_value_t = 10)]
    pub initial: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// two-gaussians or quadrants (multilabel).
    #[arg(long, default_value = "two-gaussians")]
    pub kind: String,
    #[arg(long, default_value_t = 400)]
    pub rows: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(f) as Box<dyn Write>)
            .map_err(|source| BenchError::Io {
                path: p.display().to_string(),
                source,
            }),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Curve(a) => {
            let dataset = load_csv(&a.dataset)?;
            let config = CurveConfig {
                strategy: a.strategy,
                estimator: a.estimator,
                initial: a.initial,
                n_queries: a.queries,
                batch_size: a.batch,
                seed: a.seed,
            };
            let result = run_learning_curve(&dataset, &config)?;
            result.write_csv(open_output(&a.output)?, &a.dataset.display().to_string())
        }
        Command::Runtime(a) => {
            let dataset = load_csv(&a.dataset)?;
            let config = RuntimeConfig {
                strategies: a.strategies,
                repeats: a.repeats,
                n_queries: a.queries,
                estimator: a.estimator,
                initial: a.initial,
                seed: a.seed,
            };
            let result = run_runtime_bench(&dataset, &config)?;
            let line = format!(
                "dataset={} estimator={} initial={} repeats={} queries={} seed={}",
                a.dataset.display(),
                config.estimator,
                config.initial,
                config.repeats,
                config.n_queries,
                config.seed
            );
            result.write_csv(open_output(&a.output)?, &line)
        }
        Command::Synth(a) => {
            let kind: SynthKind = a.kind.parse()?;
            if a.rows == 0 {
                return Err(BenchError::Usage("rows must be at least 1".into()));
            }
            save_csv(&generate(kind, a.rows, a.seed), &a.output)
        }
    }
}
