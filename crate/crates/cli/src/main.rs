//! `creanet`: taxonomy import, scoring, simulation and analysis reports.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or config,
//! 3 internal invariant breach.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "creanet",
    version,
    about = "Creativity metrics and follower-network experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Taxonomy conversion.
    #[command(subcommand)]
    Taxonomy(TaxonomyCommand),
    /// Score an idea dataset.
    Score(ScoreArgs),
    /// Run seeded trials of the four-condition protocol.
    Simulate(SimulateArgs),
    /// Run the statistics battery over a dataset and its tallies.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Subcommand)]
enum TaxonomyCommand {
    /// Convert a taxonomy to the native TSV format.
    Import(ImportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaxonomyFormatArg {
    Native,
    Wordnet,
}

impl From<TaxonomyFormatArg> for creanet::taxonomy::TaxonomyFormat {
    fn from(f: TaxonomyFormatArg) -> Self {
        match f {
            TaxonomyFormatArg::Native => creanet::taxonomy::TaxonomyFormat::NativeTsv,
            TaxonomyFormatArg::Wordnet => creanet::taxonomy::TaxonomyFormat::WordNetNounDb,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct ImportArgs {
    /// Source file (`data.noun` for WordNet).
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long, value_enum, default_value = "wordnet")]
    pub format: TaxonomyFormatArg,
    /// WordNet `index.noun`; gives sense order for the lexicon.
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Native taxonomy output.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a `word<TAB>concept,...` lexicon here.
    #[arg(long)]
    pub lexicon_out: Option<PathBuf>,
}

/// Where the taxonomy, lexicon and stop words come from.
#[derive(Debug, Clone, clap::Args)]
pub struct TaxonomyArgs {
    #[arg(long, env = "CREANET_TAXONOMY")]
    pub taxonomy: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "native")]
    pub taxonomy_format: TaxonomyFormatArg,
    /// Lexicon file; by default built from the taxonomy's lemmas.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Stop-word file; by default the built-in English list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Cq,
    Nonredundant,
    Collective,
}

#[derive(Debug, clap::Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum)]
    pub metric: Metric,
    #[command(flatten)]
    pub taxonomy: TaxonomyArgs,
    /// TOML column mapping for external layouts.
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub ego_threshold: usize,
    #[arg(long, default_value_t = 1)]
    pub alter_threshold: usize,
    /// Score file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    /// TOML trial config; defaults apply to missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Consecutive trials; trial `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    pub trials: u32,
    /// Alter idea script (`alter,round,bin,text`); synthetic when absent.
    #[arg(long)]
    pub script: Option<PathBuf>,
    /// Run once per value, each into `<out>/gamma-<value>`.
    #[arg(long, value_delimiter = ',')]
    pub sweep_gamma: Vec<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Md,
}

#[derive(Debug, clap::Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub tallies: PathBuf,
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    #[command(flatten)]
    pub taxonomy: TaxonomyArgs,
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub ego_threshold: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Taxonomy(TaxonomyCommand::Import(args)) => commands::taxonomy_import(&args),
        Command::Score(args) => commands::score(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Analyze(args) => commands::analyze(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        // The panic message is already on stderr.
        Err(_) => ExitCode::from(3),
    }
}
