//! Translation-based debiasing.
//!
//! Fabricated negatives differ from their parents by a single word, so a
//! surface classifier can learn the edit instead of the content. Routing
//! text through a pivot language and back rewrites both classes with the
//! same translation artifacts, which blunts that shortcut. Three modes
//! are supported: leave everything alone, rewrite only the negatives, or
//! rewrite the whole dataset.

mod cache;
mod client;

pub use cache::{text_key, BtCache};
pub use client::{HttpTranslator, IdentityClient, TableClient, TranslationClient};

use crate::scoring::StatementPair;
use crate::types::{LabeledSample, Lang};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum DebiasError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no translation table for direction {source_lang} -> {target_lang}")]
    MissingTable { source_lang: String, target_lang: String },
    #[error("translation via {backend} failed: {detail}")]
    TranslationFailure { backend: String, detail: String },
    #[error("cache file {path}: {detail}")]
    CacheIo { path: String, detail: String },
    #[error("translation table {path}: {detail}")]
    TableLoad { path: String, detail: String },
}

/// Which samples get the pivot round-trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DebiasMode {
    /// Keep every sample verbatim.
    None,
    /// Rewrite fabricated negatives only (label 0).
    NegativeOnly,
    /// Rewrite positives and negatives alike.
    Both,
}

impl DebiasMode {
    pub const ALL: [DebiasMode; 3] = [DebiasMode::None, DebiasMode::NegativeOnly, DebiasMode::Both];

    pub fn applies_to(self, label: u8) -> bool {
        match self {
            DebiasMode::None => false,
            DebiasMode::NegativeOnly => label == 0,
            DebiasMode::Both => true,
        }
    }
}

impl fmt::Display for DebiasMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DebiasMode::None => "none",
            DebiasMode::NegativeOnly => "negative-only",
            DebiasMode::Both => "both",
        };
        f.write_str(name)
    }
}

impl FromStr for DebiasMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(DebiasMode::None),
            "negative-only" => Ok(DebiasMode::NegativeOnly),
            "both" => Ok(DebiasMode::Both),
            other => Err(format!(
                "unknown debias mode {other:?} (expected none, negative-only, or both)"
            )),
        }
    }
}

/// Pivot language code per culture (defaults: en via de, cn via ja).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PivotConfig {
    pub en: String,
    pub cn: String,
}

impl Default for PivotConfig {
    fn default() -> Self {
        PivotConfig { en: "de".to_string(), cn: "ja".to_string() }
    }
}

impl PivotConfig {
    pub fn pivot_for(&self, lang: Lang) -> &str {
        match lang {
            Lang::En => &self.en,
            Lang::Cn => &self.cn,
        }
    }
}

/// Round-trip one text through `pivot` and back. Both legs go through
/// the same client; an empty input is rejected before any call.
pub fn back_translate(
    text: &str,
    source: &str,
    pivot: &str,
    client: &dyn TranslationClient,
) -> Result<String, DebiasError> {
    if text.trim().is_empty() {
        return Err(DebiasError::InvalidInput("cannot back-translate empty text".to_string()));
    }
    let forward = client.translate(text, source, pivot)?;
    client.translate(&forward, pivot, source)
}

/// Apply `mode` to a labeled dataset.
///
/// Rewritten samples carry `bt_applied = true` and their new text; when
/// the service fails on one sample the original text is kept (with
/// `bt_applied = false`) and a warning is logged, so a flaky backend
/// degrades coverage instead of aborting the run. Hard errors (missing
/// table direction, cache I/O) still abort. Output is sorted by sample
/// id so downstream stages see a canonical order.
pub fn debias_dataset(
    samples: &[LabeledSample],
    mode: DebiasMode,
    pivots: &PivotConfig,
    client: &dyn TranslationClient,
    mut cache: Option<&mut BtCache>,
) -> Result<Vec<LabeledSample>, DebiasError> {
    let mut out = Vec::with_capacity(samples.len());
    for sample in samples {
        let mut next = sample.clone();
        if mode.applies_to(sample.label) {
            let pivot = pivots.pivot_for(sample.lang);
            let cached = cache.as_ref().and_then(|c| c.get(&sample.text).map(str::to_string));
            match cached {
                Some(hit) => {
                    next.text = hit;
                    next.bt_applied = true;
                }
                None => match back_translate(&sample.text, sample.lang.code(), pivot, client) {
                    Ok(rewritten) => {
                        if let Some(c) = cache.as_mut() {
                            c.put(&sample.text, &rewritten)?;
                        }
                        next.text = rewritten;
                        next.bt_applied = true;
                    }
                    Err(DebiasError::TranslationFailure { backend, detail }) => {
                        log::warn!(
                            "keeping original text for sample {}: {backend} failed ({detail})",
                            sample.id
                        );
                        next.bt_applied = false;
                    }
                    Err(hard) => return Err(hard),
                },
            }
        }
        out.push(next);
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

/// An evaluation statement authored in one culture's language, awaiting
/// translation into the other.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSeed {
    pub pair_id: String,
    pub en_text: String,
    pub topic: String,
}

/// Translate English statement seeds into their Chinese counterparts.
/// Pairs whose translation fails are dropped with a warning; input
/// order is preserved for the survivors.
pub fn translate_pairs(
    seeds: &[PairSeed],
    client: &dyn TranslationClient,
) -> Result<Vec<StatementPair>, DebiasError> {
    let mut out = Vec::with_capacity(seeds.len());
    for seed in seeds {
        if seed.en_text.trim().is_empty() {
            return Err(DebiasError::InvalidInput(format!(
                "pair {} has an empty statement",
                seed.pair_id
            )));
        }
        match client.translate(&seed.en_text, "en", "cn") {
            Ok(cn_text) => out.push(StatementPair {
                pair_id: seed.pair_id.clone(),
                en_text: seed.en_text.clone(),
                cn_text,
                topic: seed.topic.clone(),
            }),
            Err(DebiasError::TranslationFailure { backend, detail }) => {
                log::warn!("dropping pair {}: {backend} failed ({detail})", seed.pair_id);
            }
            Err(hard) => return Err(hard),
        }
    }
    Ok(out)
}
