//! Command-line driver for the keylab pipeline.
//!
//! Exit codes: 0 success, 1 internal failure, 2 configuration error,
//! 3 missing upstream artifact.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use keylab::pipeline::{self, Command, PipelineConfig};
use keylab::Error;

#[derive(Parser)]
#[command(name = "keylab", version, about = "Derive labels, extract keyphrases, evaluate")]
struct Cli {
    /// Pipeline configuration file (TOML)
    #[arg(short, long, global = true, default_value = "keylab.toml")]
    config: PathBuf,

    /// Fixes any randomized fixture generation. The pipeline commands are
    /// fully deterministic and do not consume it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Load proposals, assemble and sanitize text blobs, segment documents
    Prepare,
    /// Derive publication-linked labels for prepared documents
    LinkLabels,
    /// Derive ontology labels via dictionary matching and the DF threshold
    OntoLabels {
        /// Override ontology.df_threshold from the config
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Extract keyphrases from prepared documents
    Extract {
        /// Override extract.top_n from the config
        #[arg(long)]
        top_n: Option<usize>,
    },
    /// Score extracted keyphrases against derived labels
    Evaluate,
    /// Grid-search the extractor hyperparameters per cutoff
    Tune,
    /// Render label-frequency, metric and threshold-sweep tables
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut config = match PipelineConfig::load(&cli.config) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("keylab: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    config.seed = cli.seed.or(config.seed);

    let command = match &cli.command {
        CliCommand::Prepare => Command::Prepare,
        CliCommand::LinkLabels => Command::LinkLabels,
        CliCommand::OntoLabels { threshold } => {
            if let Some(t) = threshold {
                config.ontology.df_threshold = *t;
            }
            Command::OntoLabels
        }
        CliCommand::Extract { top_n } => {
            if let Some(n) = top_n {
                config.extract.top_n = *n;
            }
            Command::Extract
        }
        CliCommand::Evaluate => Command::Evaluate,
        CliCommand::Tune => Command::Tune,
        CliCommand::Report => Command::Report,
    };

    match pipeline::run(command, &config) {
        Ok(()) => {
            println!(
                "keylab: {} completed -> {}",
                command.name(),
                config.output.dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("keylab: configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e @ Error::MissingArtifact(_)) => {
            eprintln!("keylab: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("keylab: {e}");
            ExitCode::from(1)
        }
    }
}
