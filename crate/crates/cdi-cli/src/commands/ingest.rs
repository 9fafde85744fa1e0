//! `cdi ingest`: crawl the category tree, fetch article text, and write
//! the per-language sentence corpus plus its manifest.

use crate::config::{PipelineConfig, SourceMode};
use crate::error::CliError;
use cdi_core::ingest::{
    ingest_corpus, FixtureFetcher, HttpFetcher, IngestOptions, SegmentBounds, WikiFetcher,
};
use cdi_core::io::{write_json_fixed, write_jsonl};
use cdi_core::types::Lang;

pub fn run(config: &PipelineConfig, lang: Lang) -> Result<(), CliError> {
    let section = &config.ingest;
    let roots = section.roots.for_lang(lang);
    if roots.is_empty() {
        return Err(CliError::input(anyhow::anyhow!(
            "no root categories configured for {lang}: set [ingest.roots].{}",
            lang.code()
        )));
    }

    let fetcher: Box<dyn WikiFetcher> = match section.source_mode {
        SourceMode::Fixture => {
            let dir = section.fixture_dir.as_ref().ok_or_else(|| {
                CliError::input(anyhow::anyhow!(
                    "source_mode \"fixture\" needs [ingest].fixture_dir"
                ))
            })?;
            Box::new(FixtureFetcher::open(&dir.join(lang.code()))?)
        }
        SourceMode::Live => {
            let endpoint = section.endpoint.as_ref().ok_or_else(|| {
                CliError::input(anyhow::anyhow!("source_mode \"live\" needs [ingest].endpoint"))
            })?;
            Box::new(HttpFetcher::new(endpoint).with_rate_limit(section.rate_limit_rps))
        }
    };

    let mut bounds = SegmentBounds::default_for(lang);
    if let Some(min) = section.min_len {
        bounds.min_len = min;
    }
    if let Some(max) = section.max_len {
        bounds.max_len = max;
    }
    if bounds.min_len > bounds.max_len {
        return Err(CliError::input(anyhow::anyhow!(
            "sentence length bounds are inverted: min_len {} > max_len {}",
            bounds.min_len,
            bounds.max_len
        )));
    }

    let options = IngestOptions {
        max_depth: section.max_depth,
        article_cap: section.article_cap,
        skip_budget: section.skip_budget,
        bounds,
        source_mode: section.source_mode.as_str().to_string(),
        created_at: super::created_at_from_env()?,
    };

    let (sentences, manifest) = ingest_corpus(roots, lang, &options, fetcher.as_ref())?;
    let sentences_path = config.paths.sentences(lang);
    write_jsonl(&sentences_path, &sentences)?;
    write_json_fixed(&config.paths.manifest(lang), &manifest)?;
    log::info!(
        "ingest {lang}: {} articles, {} sentences -> {}",
        manifest.article_count,
        manifest.sentence_count,
        sentences_path.display()
    );
    Ok(())
}
