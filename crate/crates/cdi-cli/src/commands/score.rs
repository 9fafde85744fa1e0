//! `cdi score`: score every statement pair with both culture models and
//! turn the raw annotation pool into human difference scores.

use crate::config::{PipelineConfig, ScorerKind};
use crate::error::CliError;
use cdi_core::classifier::{external_score, CultureModel, ExternalScorer, HttpScorer, StdioScorer};
use cdi_core::eval::agreement::{AnnotationMatrix, FilterOutcome};
use cdi_core::io::{read_jsonl, write_jsonl};
use cdi_core::scoring::{
    human_difference, score_pair, AnnotationRecord, DifferenceRecord, ScorePair, StatementPair,
};
use cdi_core::types::Lang;
use std::collections::BTreeMap;

pub fn run(config: &PipelineConfig) -> Result<(), CliError> {
    let pairs_path = config.paths.pairs();
    let pairs: Vec<StatementPair> = read_jsonl(&pairs_path)?;
    if pairs.is_empty() {
        return Err(CliError::input(anyhow::anyhow!(
            "{} holds no statement pairs",
            pairs_path.display()
        )));
    }

    let scores = model_scores(config, &pairs)?;
    let scores_path = config.paths.scores();
    write_jsonl(&scores_path, &scores)?;
    log::info!("score: {} pairs -> {}", scores.len(), scores_path.display());

    let annotations_path = config.paths.annotations();
    if !annotations_path.exists() {
        log::info!(
            "score: no annotation file at {}; skipping human scores",
            annotations_path.display()
        );
        return Ok(());
    }
    let annotations: Vec<AnnotationRecord> = read_jsonl(&annotations_path)?;
    let (en_matrix, cn_matrix) = filtered_matrices(config, &annotations)?;
    let human = human_records(config, &en_matrix, &cn_matrix)?;
    let human_path = config.paths.human();
    write_jsonl(&human_path, &human)?;
    log::info!("score: {} human difference records -> {}", human.len(), human_path.display());
    Ok(())
}

fn model_scores(
    config: &PipelineConfig,
    pairs: &[StatementPair],
) -> Result<Vec<ScorePair>, CliError> {
    match config.score.scorer {
        ScorerKind::Builtin => {
            let en_model = CultureModel::load(&config.paths.model(Lang::En))?;
            let cn_model = CultureModel::load(&config.paths.model(Lang::Cn))?;
            pairs
                .iter()
                .map(|pair| score_pair(&en_model, &cn_model, pair).map_err(CliError::from))
                .collect()
        }
        ScorerKind::Http => {
            let endpoint = std::env::var(super::SCORER_ENDPOINT_VAR)
                .ok()
                .or_else(|| config.score.endpoint.clone())
                .ok_or_else(|| {
                    CliError::input(anyhow::anyhow!(
                        "scorer \"http\" needs an endpoint: set [score].endpoint or {}",
                        super::SCORER_ENDPOINT_VAR
                    ))
                })?;
            let mut scorer = HttpScorer::new(endpoint);
            external_pair_scores(&mut scorer, pairs)
        }
        ScorerKind::Stdio => {
            let command = &config.score.command;
            if command.is_empty() {
                return Err(CliError::input(anyhow::anyhow!(
                    "scorer \"stdio\" needs [score].command (program plus arguments)"
                )));
            }
            let args: Vec<&str> = command[1..].iter().map(String::as_str).collect();
            let mut scorer = StdioScorer::spawn(&command[0], &args)?;
            external_pair_scores(&mut scorer, pairs)
        }
    }
}

fn external_pair_scores(
    scorer: &mut dyn ExternalScorer,
    pairs: &[StatementPair],
) -> Result<Vec<ScorePair>, CliError> {
    pairs
        .iter()
        .map(|pair| {
            let mp_en = external_score(scorer, &pair.en_text)?;
            let mp_cn = external_score(scorer, &pair.cn_text)?;
            Ok(ScorePair { pair_id: pair.pair_id.clone(), mp_en, mp_cn, d_model: mp_en - mp_cn })
        })
        .collect()
}

/// Split the annotation pool by culture, gate each side on its gold
/// pairs, and drop low-agreement annotators. Shared by `score` (for
/// human difference records) and `evaluate` (for agreement statistics).
pub fn filtered_matrices(
    config: &PipelineConfig,
    annotations: &[AnnotationRecord],
) -> Result<(AnnotationMatrix, AnnotationMatrix), CliError> {
    let eval = &config.evaluate;
    let mut split: BTreeMap<Lang, Vec<AnnotationRecord>> = BTreeMap::new();
    for record in annotations {
        split.entry(record.culture).or_default().push(record.clone());
    }
    let mut matrices = Vec::with_capacity(2);
    for lang in [Lang::En, Lang::Cn] {
        let records = split.remove(&lang).ok_or_else(|| {
            CliError::input(anyhow::anyhow!("annotation pool has no {lang} annotations"))
        })?;
        let matrix = AnnotationMatrix::from_records(&records)?;
        let FilterOutcome { retained, dropped } = cdi_core::eval::agreement::filter_annotators(
            &matrix,
            eval.gold.for_lang(lang),
            eval.min_gold_pass,
            eval.min_loo_corr,
        )?;
        for (annotator, reason) in &dropped {
            log::warn!("score: dropping {lang} annotator {annotator}: {reason:?}");
        }
        matrices.push(retained);
    }
    let cn = matrices.pop().expect("two matrices pushed");
    let en = matrices.pop().expect("two matrices pushed");
    Ok((en, cn))
}

/// Human difference records over pairs annotated in both cultures,
/// excluding gold attention pairs. Both cultures must cover the same
/// pair ids so differences are well defined.
fn human_records(
    config: &PipelineConfig,
    en_matrix: &AnnotationMatrix,
    cn_matrix: &AnnotationMatrix,
) -> Result<Vec<DifferenceRecord>, CliError> {
    let en_counts: BTreeMap<String, (u32, u32)> = en_matrix
        .accept_counts()
        .into_iter()
        .map(|(pair, accepted, total)| (pair, (accepted, total)))
        .collect();
    let cn_counts: BTreeMap<String, (u32, u32)> = cn_matrix
        .accept_counts()
        .into_iter()
        .map(|(pair, accepted, total)| (pair, (accepted, total)))
        .collect();

    let only_en: Vec<&String> = en_counts.keys().filter(|k| !cn_counts.contains_key(*k)).collect();
    let only_cn: Vec<&String> = cn_counts.keys().filter(|k| !en_counts.contains_key(*k)).collect();
    if !only_en.is_empty() || !only_cn.is_empty() {
        return Err(CliError::input(anyhow::anyhow!(
            "annotation coverage differs between cultures (en-only: {only_en:?}, cn-only: {only_cn:?})"
        )));
    }

    let mut records = Vec::new();
    for (pair_id, en_c) in &en_counts {
        if config.evaluate.gold.contains(pair_id) {
            continue;
        }
        let cn_c = cn_counts[pair_id];
        records.push(human_difference(pair_id.clone(), *en_c, cn_c)?);
    }
    Ok(records)
}
