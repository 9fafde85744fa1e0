//! `cdi train`: fit one acceptance classifier per culture.
//!
//! Mode picks the training input: `none` trains straight on the
//! fabricated samples (no rewriting), any other mode trains on the
//! debiased file that stage produced.

use crate::config::{stage_seed, PipelineConfig};
use crate::error::CliError;
use cdi_core::classifier::{train, TrainConfig};
use cdi_core::debias::DebiasMode;
use cdi_core::io::read_jsonl;
use cdi_core::types::{LabeledSample, Lang};

pub fn run(
    config: &PipelineConfig,
    lang: Lang,
    mode_override: Option<DebiasMode>,
    global_seed: u64,
) -> Result<(), CliError> {
    let mode = mode_override.unwrap_or(config.debias.mode);
    let input_path = match mode {
        DebiasMode::None => config.paths.samples(lang),
        _ => config.paths.debiased(lang),
    };
    let samples: Vec<LabeledSample> = read_jsonl(&input_path)?;
    if let Some(stray) = samples.iter().find(|s| s.lang != lang) {
        return Err(CliError::input(anyhow::anyhow!(
            "{} holds sample {} with language {}, expected {lang}",
            input_path.display(),
            stray.id,
            stray.lang
        )));
    }

    let section = &config.train;
    let train_config = TrainConfig {
        hash_bits: section.hash_bits,
        ngram_max: section.ngram_max,
        epochs: section.epochs,
        learning_rate: section.learning_rate,
        l2: section.l2,
        max_seq_tokens: section.max_seq_tokens,
        seed: section
            .seed
            .unwrap_or_else(|| stage_seed(global_seed, &format!("train/{}", lang.code()))),
    };

    let model = train(&samples, &train_config)?;
    let model_path = config.paths.model(lang);
    model.save(&model_path)?;
    log::info!(
        "train {lang} (mode {mode}): {} samples from {} -> {} (fingerprint {})",
        samples.len(),
        input_path.display(),
        model_path.display(),
        model.train_fingerprint
    );
    Ok(())
}
