//! `cdi evaluate`: correlate model difference scores against human
//! difference scores and write the evaluation report, the annotator
//! agreement summary, and (optionally) the rewrite-mode F1 grid.

use crate::config::{stage_seed, Baseline, PipelineConfig};
use crate::error::CliError;
use cdi_core::classifier::TrainConfig;
use cdi_core::debias::PivotConfig;
use cdi_core::eval::agreement::{
    difference_agreement, inter_annotator_agreement, AnnotationMatrix,
};
use cdi_core::eval::baselines::{lm_baseline, random_baseline, UnigramLm};
use cdi_core::eval::{
    build_report, run_matrix, CorrelationKind, CorrelationResult, EvalRow, MatrixSpec,
    RewriteMatrix,
};
use cdi_core::ingest::RawSentence;
use cdi_core::io::{read_jsonl, write_json_fixed};
use cdi_core::scoring::{AnnotationRecord, DifferenceRecord, ScorePair, StatementPair};
use cdi_core::types::{LabeledSample, Lang};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

pub fn run(config: &PipelineConfig, global_seed: u64) -> Result<(), CliError> {
    let eval = &config.evaluate;
    let eval_seed = eval.perm_seed.unwrap_or_else(|| stage_seed(global_seed, "evaluate"));

    let rows = assemble_rows(config, eval_seed)?;
    let report =
        build_report(eval.baseline.as_str(), &rows, eval.permutations, eval_seed, eval.threshold)?;
    let report_path = config.paths.report();
    write_json_fixed(&report_path, &report)?;
    log::info!(
        "evaluate ({}): {} pairs, difference r = {:.4} (p = {:.4}) -> {}",
        eval.baseline.as_str(),
        report.pairs,
        report.difference.pearson.r,
        report.difference.pearson.p_value,
        report_path.display()
    );

    let annotations_path = config.paths.annotations();
    if annotations_path.exists() {
        let annotations: Vec<AnnotationRecord> = read_jsonl(&annotations_path)?;
        let (en_matrix, cn_matrix) = super::score::filtered_matrices(config, &annotations)?;
        let agreement = agreement_report(eval.permutations, eval_seed, &en_matrix, &cn_matrix)?;
        let agreement_path = config.paths.agreement();
        write_json_fixed(&agreement_path, &agreement)?;
        log::info!("evaluate: annotator agreement -> {}", agreement_path.display());
    } else {
        log::info!(
            "evaluate: no annotation file at {}; skipping the agreement summary",
            annotations_path.display()
        );
    }

    if eval.rewrite_matrix {
        let grids = rewrite_grids(config, eval_seed)?;
        let table_path = config.paths.table3();
        write_json_fixed(&table_path, &grids)?;
        log::info!("evaluate: rewrite-mode F1 grids -> {}", table_path.display());
    }
    Ok(())
}

/// Join model scores with human scores on pair id, then substitute the
/// model side when a baseline asks for it.
fn assemble_rows(config: &PipelineConfig, eval_seed: u64) -> Result<Vec<EvalRow>, CliError> {
    let scores_path = config.paths.scores();
    let scores: Vec<ScorePair> = read_jsonl(&scores_path)?;
    let human_path = config.paths.human();
    let human: Vec<DifferenceRecord> = read_jsonl(&human_path)?;
    let human_by_id: BTreeMap<&str, &DifferenceRecord> =
        human.iter().map(|h| (h.pair_id.as_str(), h)).collect();

    let mut rows = Vec::new();
    for score in &scores {
        if let Some(h) = human_by_id.get(score.pair_id.as_str()) {
            rows.push(EvalRow {
                pair_id: score.pair_id.clone(),
                mp_en: score.mp_en,
                mp_cn: score.mp_cn,
                ha_en: h.ha_en,
                ha_cn: h.ha_cn,
            });
        }
    }
    if rows.is_empty() {
        return Err(CliError::input(anyhow::anyhow!(
            "no pair id appears in both {} and {}",
            scores_path.display(),
            human_path.display()
        )));
    }
    if rows.len() < scores.len() {
        log::warn!(
            "evaluate: {} of {} scored pairs have no human scores and were skipped",
            scores.len() - rows.len(),
            scores.len()
        );
    }

    match config.evaluate.baseline {
        Baseline::Cdi | Baseline::WeakCdi => {}
        Baseline::Random => {
            let (mp_en, mp_cn) =
                random_baseline(rows.len(), stage_seed(eval_seed, "random-baseline"));
            for (row, (e, c)) in rows.iter_mut().zip(mp_en.into_iter().zip(mp_cn)) {
                row.mp_en = e;
                row.mp_cn = c;
            }
        }
        Baseline::Lm => {
            let pairs: Vec<StatementPair> = read_jsonl(&config.paths.pairs())?;
            let by_id: BTreeMap<&str, &StatementPair> =
                pairs.iter().map(|p| (p.pair_id.as_str(), p)).collect();
            let mut en_texts = Vec::with_capacity(rows.len());
            let mut cn_texts = Vec::with_capacity(rows.len());
            for row in &rows {
                let pair = by_id.get(row.pair_id.as_str()).ok_or_else(|| {
                    CliError::input(anyhow::anyhow!(
                        "scored pair {} is missing from the pairs file",
                        row.pair_id
                    ))
                })?;
                en_texts.push(pair.en_text.as_str());
                cn_texts.push(pair.cn_text.as_str());
            }
            let mp_en = lm_scores(config, Lang::En, &en_texts)?;
            let mp_cn = lm_scores(config, Lang::Cn, &cn_texts)?;
            for ((row, e), c) in rows.iter_mut().zip(mp_en).zip(mp_cn) {
                row.mp_en = e;
                row.mp_cn = c;
            }
        }
    }
    Ok(rows)
}

/// Normalized average-log-probability scores from a unigram language
/// model fitted on one culture's corpus sentences.
fn lm_scores(config: &PipelineConfig, lang: Lang, texts: &[&str]) -> Result<Vec<f64>, CliError> {
    let corpus: Vec<RawSentence> = read_jsonl(&config.paths.sentences(lang))?;
    let corpus_texts: Vec<&str> = corpus.iter().map(|s| s.text.as_str()).collect();
    let lm = UnigramLm::fit(&corpus_texts, lang);
    Ok(lm_baseline(texts, lang, &lm)?)
}

#[derive(Debug, Serialize)]
struct AgreementBlock {
    annotators: usize,
    pearson: CorrelationResult,
    spearman: CorrelationResult,
}

#[derive(Debug, Serialize)]
struct AgreementReport {
    en: AgreementBlock,
    cn: AgreementBlock,
    difference: AgreementBlock,
}

fn agreement_block(
    matrix: &AnnotationMatrix,
    permutations: u32,
    seed: u64,
    label: &str,
) -> Result<AgreementBlock, CliError> {
    Ok(AgreementBlock {
        annotators: matrix.n_annotators(),
        pearson: inter_annotator_agreement(
            matrix,
            CorrelationKind::Pearson,
            permutations,
            stage_seed(seed, &format!("agreement/pearson/{label}")),
        )?,
        spearman: inter_annotator_agreement(
            matrix,
            CorrelationKind::Spearman,
            permutations,
            stage_seed(seed, &format!("agreement/spearman/{label}")),
        )?,
    })
}

fn agreement_report(
    permutations: u32,
    seed: u64,
    en_matrix: &AnnotationMatrix,
    cn_matrix: &AnnotationMatrix,
) -> Result<AgreementReport, CliError> {
    let difference = AgreementBlock {
        annotators: en_matrix.n_annotators().min(cn_matrix.n_annotators()),
        pearson: difference_agreement(
            en_matrix,
            cn_matrix,
            CorrelationKind::Pearson,
            permutations,
            stage_seed(seed, "agreement/pearson/difference"),
        )?,
        spearman: difference_agreement(
            en_matrix,
            cn_matrix,
            CorrelationKind::Spearman,
            permutations,
            stage_seed(seed, "agreement/spearman/difference"),
        )?,
    };
    Ok(AgreementReport {
        en: agreement_block(en_matrix, permutations, seed, "en")?,
        cn: agreement_block(cn_matrix, permutations, seed, "cn")?,
        difference,
    })
}

/// Split a balanced sample file into train and test halves by parent
/// group, so a flipped negative never lands opposite its own positive.
fn split_by_parent(
    samples: &[LabeledSample],
    seed: u64,
    train_fraction: f64,
) -> Result<(Vec<LabeledSample>, Vec<LabeledSample>), CliError> {
    let mut group_keys: BTreeSet<&str> = BTreeSet::new();
    for sample in samples {
        group_keys.insert(sample.parent_id.as_deref().unwrap_or(&sample.id));
    }
    if group_keys.len() < 2 {
        return Err(CliError::input(anyhow::anyhow!(
            "need at least two parent groups to split; found {}",
            group_keys.len()
        )));
    }
    let mut keys: Vec<&str> = group_keys.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    keys.shuffle(&mut rng);
    let n_train = ((keys.len() as f64) * train_fraction).round() as usize;
    let n_train = n_train.clamp(1, keys.len() - 1);
    let train_keys: BTreeSet<&str> = keys[..n_train].iter().copied().collect();
    let mut train_set = Vec::new();
    let mut test_set = Vec::new();
    for sample in samples {
        let key = sample.parent_id.as_deref().unwrap_or(&sample.id);
        if train_keys.contains(key) {
            train_set.push(sample.clone());
        } else {
            test_set.push(sample.clone());
        }
    }
    Ok((train_set, test_set))
}

/// One rewrite-mode F1 grid per culture.
fn rewrite_grids(
    config: &PipelineConfig,
    eval_seed: u64,
) -> Result<BTreeMap<&'static str, RewriteMatrix>, CliError> {
    let mut grids = BTreeMap::new();
    for lang in [Lang::En, Lang::Cn] {
        let samples: Vec<LabeledSample> = read_jsonl(&config.paths.samples(lang))?;
        let (train_set, test_set) = split_by_parent(
            &samples,
            stage_seed(eval_seed, &format!("matrix-split/{}", lang.code())),
            0.8,
        )?;
        let client = super::build_mt_client(&config.debias, &[lang])?;
        let pivots =
            PivotConfig { en: config.debias.pivot.en.clone(), cn: config.debias.pivot.cn.clone() };
        let section = &config.train;
        let train_config = TrainConfig {
            hash_bits: section.hash_bits,
            ngram_max: section.ngram_max,
            epochs: section.epochs,
            learning_rate: section.learning_rate,
            l2: section.l2,
            max_seq_tokens: section.max_seq_tokens,
            seed: stage_seed(eval_seed, &format!("matrix-train/{}", lang.code())),
        };
        let matrix = run_matrix(&MatrixSpec {
            train: &train_set,
            test: &test_set,
            pivots: &pivots,
            client: client.as_ref(),
            config: train_config,
            threshold: config.evaluate.threshold,
        })?;
        grids.insert(lang.code(), matrix);
    }
    Ok(grids)
}
