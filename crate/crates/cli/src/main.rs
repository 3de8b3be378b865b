//! `hidden-topics` command-line interface.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::TypedValueParser;
use clap::{Parser, Subcommand, ValueEnum};

use hidden_topics::eval::DEFAULT_FOLDS;
use hidden_topics::DEFAULT_K;

#[derive(Debug, Parser)]
#[command(name = "hidden-topics", version, about = "Match long documents against short summaries with hidden topics")]
pub struct Cli {
    /// Word vectors in whitespace text format ("<count> <dim>" header).
    #[arg(long, global = true, value_name = "PATH")]
    pub embeddings: Option<PathBuf>,

    /// Stopword file, one token per line. Defaults to the bundled English list.
    #[arg(long, global = true, value_name = "PATH", env = "HIDDEN_TOPICS_STOPLIST")]
    pub stoplist: Option<PathBuf>,

    /// Number of hidden topics per document.
    #[arg(short = 'K', long = "topics", global = true, default_value_t = DEFAULT_K,
          value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub k: usize,

    /// Seed for cross-validation shuffles.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Orthonormality tolerance for extracted topics.
    #[arg(long, global = true, default_value_t = 1e-8, value_name = "TOL")]
    pub ortho_tol: f64,

    /// Relative eigen-residual tolerance for extracted topics.
    #[arg(long, global = true, default_value_t = 1e-8, value_name = "TOL")]
    pub residual_tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one summary against one document.
    Match {
        doc_file: PathBuf,
        summary_file: PathBuf,
    },
    /// Rank the documents of a corpus against a summary.
    Rank {
        summary_file: PathBuf,
        /// JSON-lines corpus of {"doc_id", "text"} records.
        corpus_file: PathBuf,
        #[arg(long, default_value_t = 10,
              value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
        top: usize,
    },
    /// Show topic importances and the words the topics reconstruct best.
    Topics {
        doc_file: PathBuf,
        #[arg(long, default_value_t = 10,
              value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
        words: usize,
        /// Also write the topic model in plain-text form to this path.
        #[arg(long, value_name = "PATH")]
        dump_model: Option<PathBuf>,
    },
    /// Threshold classification with cross-validation over labeled pairs.
    EvalClassify {
        /// JSON-lines file of labeled summary-document pairs.
        pairs_file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FOLDS)]
        folds: usize,
        /// Write every pair's score as JSON lines to this path.
        #[arg(long, value_name = "PATH")]
        dump_scores: Option<PathBuf>,
    },
    /// precision@k and precision-bin histograms over ranking categories.
    EvalRank {
        categories_file: PathBuf,
        docs_file: PathBuf,
        /// Comma-separated cutoffs.
        #[arg(long = "k", value_delimiter = ',', default_values_t = [1usize, 3, 6])]
        ks: Vec<usize>,
    },
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    /// Bad input files or data.
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    /// The evaluation protocol cannot run on this data.
    pub fn degenerate(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match commands::run(&cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
