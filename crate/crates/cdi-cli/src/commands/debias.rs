//! `cdi debias`: rewrite sample text through a pivot-language round
//! trip, producing the debiased sample file the training stage reads.

use crate::config::PipelineConfig;
use crate::error::CliError;
use cdi_core::debias::{debias_dataset, BtCache, DebiasMode, PivotConfig};
use cdi_core::io::{read_jsonl, write_jsonl};
use cdi_core::types::{LabeledSample, Lang};

pub fn run(
    config: &PipelineConfig,
    lang: Lang,
    mode_override: Option<DebiasMode>,
) -> Result<(), CliError> {
    let section = &config.debias;
    let mode = mode_override.unwrap_or(section.mode);

    let samples_path = config.paths.samples(lang);
    let samples: Vec<LabeledSample> = read_jsonl(&samples_path)?;
    if let Some(stray) = samples.iter().find(|s| s.lang != lang) {
        return Err(CliError::input(anyhow::anyhow!(
            "{} holds sample {} with language {}, expected {lang}",
            samples_path.display(),
            stray.id,
            stray.lang
        )));
    }

    let pivots = PivotConfig { en: section.pivot.en.clone(), cn: section.pivot.cn.clone() };
    let client = super::build_mt_client(section, &[lang])?;
    let cache_root = section.cache_dir(&config.paths);
    let mut cache =
        BtCache::open(&cache_root, client.backend_name(), lang.code(), pivots.pivot_for(lang))?;

    let rewritten = debias_dataset(&samples, mode, &pivots, client.as_ref(), Some(&mut cache))?;
    let applied = rewritten.iter().filter(|s| s.bt_applied).count();
    let out_path = config.paths.debiased(lang);
    write_jsonl(&out_path, &rewritten)?;
    log::info!(
        "debias {lang} (mode {mode}): {applied} of {} samples rewritten -> {}",
        rewritten.len(),
        out_path.display()
    );
    Ok(())
}
