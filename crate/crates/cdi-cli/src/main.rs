//! `cdi` — the bilingual cultural-difference pipeline, as composable
//! subcommands over one configuration file.
//!
//! The stages, in order: `ingest` builds a per-language sentence corpus
//! from category-organized articles; `fabricate` flips adjectives to
//! antonyms to fabricate negatives and balances the classes; `debias`
//! rewrites sample text through a pivot-language round trip; `train`
//! fits one acceptance classifier per culture; `score` scores bilingual
//! statement pairs with both models and aggregates human annotations;
//! `evaluate` correlates model and human difference scores; `plotdata`
//! emits per-topic scatter data.
//!
//! Every artifact is line-delimited JSON (or fixed-precision JSON for
//! reports), and every stage is deterministic given its config and seed.

mod commands;
mod config;
mod error;

use cdi_core::debias::DebiasMode;
use cdi_core::types::Lang;
use clap::{Parser, Subcommand, ValueEnum};
use config::PipelineConfig;
use error::CliError;
use std::path::PathBuf;

const EXIT_CODES_HELP: &str = "EXIT CODES:
  0  success
  2  input error (missing or invalid files, config, or flags)
  3  external service error (wiki fetch, translation, or scorer)
  4  schema error (an interchange file failed validation)

ENVIRONMENT:
  CDI_MT_ENDPOINT      overrides [debias].endpoint
  CDI_SCORER_ENDPOINT  overrides [score].endpoint
  SOURCE_DATE_EPOCH    timestamp recorded in manifests (default 0)
  RUST_LOG             log filter (default \"info\")";

#[derive(Debug, Parser)]
#[command(name = "cdi", version, about = "Cultural difference identifier pipeline")]
#[command(after_help = EXIT_CODES_HELP)]
struct Cli {
    /// Pipeline configuration file.
    #[arg(long, global = true, value_name = "PATH", default_value = "cdi.toml")]
    config: PathBuf,
    /// Override the global seed from the config file.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

/// Language selector for per-culture stages.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum LangArg {
    En,
    Cn,
}

impl From<LangArg> for Lang {
    fn from(value: LangArg) -> Self {
        match value {
            LangArg::En => Lang::En,
            LangArg::Cn => Lang::Cn,
        }
    }
}

/// Rewrite-mode selector for the debias and train stages.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Rewrite nothing.
    None,
    /// Rewrite only fabricated negatives.
    NegativeOnly,
    /// Rewrite positives and negatives alike.
    Both,
}

impl From<ModeArg> for DebiasMode {
    fn from(value: ModeArg) -> Self {
        match value {
            ModeArg::None => DebiasMode::None,
            ModeArg::NegativeOnly => DebiasMode::NegativeOnly,
            ModeArg::Both => DebiasMode::Both,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Crawl the category tree and segment articles into a sentence corpus.
    Ingest {
        /// Restrict to one language (default: both).
        #[arg(long, value_enum)]
        lang: Option<LangArg>,
    },
    /// Fabricate antonym-flipped negatives and balance the classes.
    Fabricate {
        /// Restrict to one language (default: both).
        #[arg(long, value_enum)]
        lang: Option<LangArg>,
    },
    /// Rewrite sample text through a pivot-language round trip.
    Debias {
        /// Restrict to one language (default: both).
        #[arg(long, value_enum)]
        lang: Option<LangArg>,
        /// Which samples to rewrite (default: [debias].mode).
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Fit one acceptance classifier per culture.
    Train {
        /// Restrict to one language (default: both).
        #[arg(long, value_enum)]
        lang: Option<LangArg>,
        /// Which dataset to train on: `none` uses the raw fabricated
        /// samples, other modes use the debiased file (default:
        /// [debias].mode).
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Score statement pairs with both models and aggregate annotations.
    Score,
    /// Correlate model and human difference scores into a report.
    Evaluate,
    /// Emit scatter points and per-topic correlations for plotting.
    Plotdata {
        /// Keep only these topics (comma-separated; default: all).
        #[arg(long, value_delimiter = ',', value_name = "TOPIC,...")]
        topics: Vec<String>,
    },
}

fn selected_langs(selection: Option<LangArg>) -> Vec<Lang> {
    match selection {
        Some(one) => vec![one.into()],
        None => vec![Lang::En, Lang::Cn],
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = PipelineConfig::load(&cli.config)?;
    let seed = cli.seed.unwrap_or(config.seed);
    match cli.command {
        Command::Ingest { lang } => {
            for lang in selected_langs(lang) {
                commands::ingest::run(&config, lang)?;
            }
        }
        Command::Fabricate { lang } => {
            for lang in selected_langs(lang) {
                commands::fabricate::run(&config, lang, seed)?;
            }
        }
        Command::Debias { lang, mode } => {
            for lang in selected_langs(lang) {
                commands::debias::run(&config, lang, mode.map(DebiasMode::from))?;
            }
        }
        Command::Train { lang, mode } => {
            for lang in selected_langs(lang) {
                commands::train::run(&config, lang, mode.map(DebiasMode::from), seed)?;
            }
        }
        Command::Score => commands::score::run(&config)?,
        Command::Evaluate => commands::evaluate::run(&config, seed)?,
        Command::Plotdata { topics } => commands::plotdata::run(&config, &topics)?,
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code);
    }
}
