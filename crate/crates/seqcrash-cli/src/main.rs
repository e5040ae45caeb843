//! `seqcrash`: crash sequence-of-events analysis pipeline.
//!
//! Exit codes: 0 success, 1 analysis or golden-check failure, 2 usage or
//! I/O failure.

mod commands;
mod inputs;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use seqcrash::Error;

#[derive(Parser)]
#[command(name = "seqcrash", version, about = "AV crash sequence analysis")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args)]
pub struct GlobalOpts {
    /// Alphabet CSV (default: bundled, or $SEQCRASH_DATA/alphabet.csv)
    #[arg(long, global = true)]
    pub alphabet: Option<String>,

    /// Corpus CSV (default: bundled, or $SEQCRASH_DATA/corpus_2015_2019.csv)
    #[arg(long, global = true)]
    pub corpus: Option<String>,

    /// Attributes CSV (default: bundled, or $SEQCRASH_DATA/attributes.csv)
    #[arg(long, global = true)]
    pub attributes: Option<String>,

    /// Append unknown codes to the alphabet instead of rejecting them
    #[arg(long, global = true)]
    pub extend_alphabet: bool,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Decimal places for floating-point output
    #[arg(long, global = true, default_value_t = 4)]
    pub precision: usize,

    /// Worker threads for parallel sections (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// `check` verifies that re-reading the inputs reproduces the exact
    /// sequence order and content before running the command
    #[arg(long, global = true, value_name = "MODE")]
    pub seed_order: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Levenshtein,
    Levenshtein2,
    Hamming,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Denom {
    All,
    Nonfinal,
}

#[derive(Args)]
pub struct MetricOpts {
    /// Distance metric preset. `levenshtein2` (indels only) is the metric
    /// behind the published tables.
    #[arg(long, value_enum, default_value_t = Metric::Levenshtein2)]
    pub metric: Metric,

    /// Override the indel cost of the chosen preset
    #[arg(long)]
    pub indel: Option<f64>,

    /// Override the substitution cost of the chosen preset
    #[arg(long)]
    pub sub: Option<f64>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate the inputs and print corpus summary statistics
    Ingest,

    /// Rank subsequences (or n-grams) by containment count
    Freq {
        /// Longest pattern length to enumerate
        #[arg(long, default_value_t = 5)]
        max_len: usize,
        /// Number of rows to keep
        #[arg(long, default_value_t = 15)]
        top: usize,
        /// Count contiguous n-grams instead of general subsequences
        #[arg(long)]
        contiguous: bool,
    },

    /// Print the transition probability matrix, or a focal-label report
    Transitions {
        /// Emit incoming/outgoing rates around this label
        #[arg(long)]
        focus: Option<String>,
        /// Row denominator: all occurrences, or non-final occurrences
        #[arg(long, value_enum, default_value_t = Denom::All)]
        denom: Denom,
    },

    /// Print the pairwise dissimilarity matrix
    Distmat {
        #[command(flatten)]
        metric: MetricOpts,
        /// Emit `id_i,id_j,dist` upper-triangle rows instead of a square
        #[arg(long)]
        condensed: bool,
    },

    /// Partition the corpus into k clusters with PAM
    Cluster {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        metric: MetricOpts,
    },

    /// Run PAM for each k in a range and report silhouette quality
    Sweep {
        #[arg(long)]
        k_min: usize,
        #[arg(long)]
        k_max: usize,
        /// Silhouette margin for the k recommendation
        #[arg(long, default_value_t = seqcrash::clustering::DEFAULT_SWEEP_MARGIN)]
        margin: f64,
        #[command(flatten)]
        metric: MetricOpts,
    },

    /// Cross-tabulate two attributes and run a chi-square test
    Crosstab {
        #[arg(long)]
        row: String,
        #[arg(long)]
        col: String,
        /// Drop sequences whose value is n/a in either attribute
        #[arg(long)]
        drop_na: bool,
        /// JSON file recoding the row attribute's categories
        #[arg(long, value_name = "FILE")]
        regroup: Option<String>,
        /// Compute a PAM clustering and inject it as attribute `cluster`
        #[arg(long, value_name = "K")]
        cluster_k: Option<usize>,
        #[command(flatten)]
        metric: MetricOpts,
    },

    /// Write the headline artifact files from the bundled pipeline
    Report {
        /// Output directory
        #[arg(long, default_value = "report")]
        out: String,
        /// Compare results against the published tables and exit nonzero
        /// on any mismatch
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        metric: MetricOpts,
    },
}

/// Usage and I/O problems exit 2; analysis-domain failures exit 1.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_)
        | Error::Csv(_)
        | Error::Ingest { .. }
        | Error::DuplicateCode { .. }
        | Error::InvalidCode { .. }
        | Error::UnknownCode { .. }
        | Error::DuplicateId { .. }
        | Error::UnknownAttributeId { .. }
        | Error::EmptySequence { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        // Ignore failures from configuring the pool twice (tests call run
        // repeatedly in one process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    if let Some(mode) = cli.global.seed_order.as_deref() {
        if mode != "check" {
            eprintln!("error: --seed-order only supports `check`");
            return ExitCode::from(2);
        }
        if let Err(err) = inputs::verify_seed_order(&cli.global) {
            eprintln!("seed-order check failed: {err}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
