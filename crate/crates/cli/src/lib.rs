//! The `callout` command-line tool.

mod detect;
mod error;
mod evaluate;
mod generate;
pub mod manifest;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use error::{CliError, CliResult};
pub use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "callout", version, about = "Detect and annotate global, local and collective outliers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    Synthetic,
    Realistic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank the objects of a dataset by outlierness.
    Detect {
        /// Feature CSV, or a distance matrix with --distance-matrix.
        input: PathBuf,
        /// Maximum refinement iterations.
        #[arg(long, default_value_t = callout_core::callout::DEFAULT_ITERATIONS)]
        iterations: usize,
        /// Tree node capacity.
        #[arg(long, default_value_t = callout_core::tree::DEFAULT_CAPACITY)]
        capacity: usize,
        /// Read the input as an n x n distance matrix.
        #[arg(long)]
        distance_matrix: bool,
        /// Distance for feature input: euclidean, manhattan or chebyshev.
        #[arg(long, default_value = "euclidean")]
        metric: String,
        /// Write here instead of stdout; a manifest goes next to it.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Worker threads for scoring; 0 uses every core.
        #[arg(long, env = "CALLOUT_THREADS", default_value_t = 0)]
        threads: usize,
        /// Check the tree invariants after building and fail with exit code 3.
        #[arg(long)]
        verify: bool,
    },
    /// Generate a labeled testbed.
    Generate {
        #[arg(value_enum)]
        kind: GeneratorKind,
        /// JSON generator configuration; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the seed of the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Inlier CSV the realistic generator fits its mixture to.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Score rankings against ground-truth labels.
    Evaluate {
        /// Rankings from `detect`, JSON or CSV.
        #[arg(long)]
        rankings: PathBuf,
        /// CSV whose last column holds the labels.
        #[arg(long)]
        labels: PathBuf,
        /// Metric report destination; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Detect {
            input,
            iterations,
            capacity,
            distance_matrix,
            metric,
            output,
            format,
            threads,
            verify,
        } => detect::run(detect::DetectArgs {
            input,
            iterations,
            capacity,
            distance_matrix,
            metric,
            output,
            format,
            threads,
            verify,
        }),
        Command::Generate {
            kind,
            config,
            seed,
            input,
            output,
        } => generate::run(kind, config, seed, input, output),
        Command::Evaluate {
            rankings,
            labels,
            output,
        } => evaluate::run(rankings, labels, output),
    }
}

pub(crate) fn write_output(path: Option<&std::path::Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(CliError::file(p)),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(CliError::file("<stdout>"))
        }
    }
}

pub(crate) fn micros(d: std::time::Duration) -> u64 {
    d.as_micros().try_into().unwrap_or(u64::MAX)
}
