use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use constalg::config::SearchConfig;
use constalg::Error;

mod commands;
mod render;

#[derive(Parser, Debug)]
#[command(name = "constalg", version, about = "Exact GF(p) computations with quasi-Frobenius algebras, derivations and generalized identities")]
struct Cli {
    /// Largest projective point count an exhaustive sweep may visit.
    #[arg(long, global = true, default_value_t = SearchConfig::default().budget)]
    budget_subspaces: u64,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = SearchConfig::default().seed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Double-annihilator and conjugate-pair predicates.
    QfCheck { file: PathBuf },
    /// Nondegenerate associative form and Frobenius functional.
    FrobeniusCheck { file: PathBuf },
    /// Restricted envelope of the file's Lie section, or of the outer quotient of its derivations.
    Envelope { file: PathBuf },
    /// Constants, central mixers and constants operators.
    Constants { file: PathBuf },
    /// Generalized identity from a multilinear polynomial and conjugate pairs of B(L).
    GpiBuild {
        file: PathBuf,
        #[arg(long)]
        poly: String,
        /// Indices into the right conjugate pairs, one per variable.
        #[arg(long, value_delimiter = ',')]
        pairs: Option<Vec<usize>>,
    },
    /// Checks generalized identities on the model and against B_r powers.
    GpiVerify {
        file: PathBuf,
        #[arg(long)]
        poly: String,
    },
    /// Semiprimeness of the algebra and, with derivations, of its constants.
    Semiprime { file: PathBuf },
    /// Splits B(L) into differentially simple summands.
    DiffDecompose { file: PathBuf },
    /// Smallest standard identity satisfied.
    PiSearch {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        dmax: usize,
        /// Search the ring of constants instead of the algebra.
        #[arg(long)]
        constants: bool,
    },
    /// Runs every file in a corpus directory.
    CorpusRun {
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
    },
    /// Right and left normal forms of an operator expression.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        expr: String,
    },
    /// Writes the built-in corpus as algebra files.
    ExportCorpus { dir: PathBuf },
}

/// Exit statuses: 0 all assertions passed, 1 a mathematical assertion
/// failed, 2 undecided within budget, 3 input error.
pub fn exit_code(e: &Error) -> u8 {
    if e.is_violation() {
        1
    } else if e.is_undecided() {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = SearchConfig::default()
        .with_budget(cli.budget_subspaces)
        .with_seed(cli.seed);
    match commands::run(&cli.command, &config) {
        Ok(outcome) => {
            let body = match cli.format {
                Format::Structured => serde_json::to_string_pretty(&outcome.report).expect("json") + "\n",
                Format::Text => render::text(&outcome.report),
            };
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, body) {
                        eprintln!("error: cannot write {}: {}", path.display(), e);
                        return ExitCode::from(3);
                    }
                }
                None => print!("{}", body),
            }
            ExitCode::from(outcome.status)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}
