//! Pairing model scores and human judgments into difference scores.
//!
//! For a bilingual statement pair, each culture's model emits an
//! acceptance probability and the model difference is
//!
//! ```text
//! d_model = mp_en - mp_cn
//! ```
//!
//! Human acceptance of a statement is the fraction of annotators who
//! accepted it, and the human difference mirrors the model difference:
//!
//! ```text
//! d_human = ha_en - ha_cn
//! ```
//!
//! Scores near zero mean the cultures agree; the sign says which culture
//! finds the statement more acceptable.

use crate::classifier::{ClassifierError, CultureModel};
use crate::types::Lang;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ScoringError {
    #[error("model for {expected} slot was trained on {got}")]
    ModelLangMismatch { expected: Lang, got: Lang },
    #[error("annotator count must be positive")]
    NoAnnotators,
    #[error("accept count {accepted} exceeds annotator count {total}")]
    CountOverflow { accepted: u32, total: u32 },
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

/// A bilingual statement pair sharing one meaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatementPair {
    pub pair_id: String,
    #[serde(rename = "en")]
    pub en_text: String,
    #[serde(rename = "cn")]
    pub cn_text: String,
    pub topic: String,
}

/// Model-side scores for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScorePair {
    pub pair_id: String,
    pub mp_en: f64,
    pub mp_cn: f64,
    pub d_model: f64,
}

/// One annotator's binary judgment of one statement under one culture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationRecord {
    pub pair_id: String,
    pub culture: Lang,
    pub annotator_id: String,
    pub judgment: u8,
}

/// Human-side scores for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferenceRecord {
    pub pair_id: String,
    pub ha_en: f64,
    pub ha_cn: f64,
    pub d_human: f64,
}

/// Score one pair with its culture models. The en slot must hold an
/// en-trained model and likewise for cn.
pub fn score_pair(
    en_model: &CultureModel,
    cn_model: &CultureModel,
    pair: &StatementPair,
) -> Result<ScorePair, ScoringError> {
    if en_model.lang != Lang::En {
        return Err(ScoringError::ModelLangMismatch { expected: Lang::En, got: en_model.lang });
    }
    if cn_model.lang != Lang::Cn {
        return Err(ScoringError::ModelLangMismatch { expected: Lang::Cn, got: cn_model.lang });
    }
    let mp_en = en_model.score(&pair.en_text)?;
    let mp_cn = cn_model.score(&pair.cn_text)?;
    Ok(ScorePair { pair_id: pair.pair_id.clone(), mp_en, mp_cn, d_model: mp_en - mp_cn })
}

/// Fraction of annotators accepting a statement: one exact integer ratio,
/// converted to a real once.
pub fn human_acceptance(accepted: u32, total: u32) -> Result<f64, ScoringError> {
    if total == 0 {
        return Err(ScoringError::NoAnnotators);
    }
    if accepted > total {
        return Err(ScoringError::CountOverflow { accepted, total });
    }
    Ok(f64::from(accepted) / f64::from(total))
}

/// Human difference score from per-culture accept counts.
pub fn human_difference(
    pair_id: impl Into<String>,
    en_counts: (u32, u32),
    cn_counts: (u32, u32),
) -> Result<DifferenceRecord, ScoringError> {
    let ha_en = human_acceptance(en_counts.0, en_counts.1)?;
    let ha_cn = human_acceptance(cn_counts.0, cn_counts.1)?;
    Ok(DifferenceRecord { pair_id: pair_id.into(), ha_en, ha_cn, d_human: ha_en - ha_cn })
}

/// Strict binarization: 1 iff the score clears the threshold.
pub fn binarize(score: f64, threshold: f64) -> u8 {
    u8::from(score > threshold)
}
