//! Evaluation: correlation statistics, annotator agreement, baselines,
//! the final report, and the 3x3 rewrite matrix that shows what the
//! pivot round-trip buys.

pub mod agreement;
pub mod baselines;
mod stats;

pub use stats::{
    binary_accuracy, pearson, pearson_r, rank_with_ties, spearman, spearman_r, CorrelationKind,
    CorrelationResult, StatsError, DEFAULT_PERMUTATIONS,
};

use crate::classifier::{evaluate_f1, fnv1a64, train, ClassifierError, TrainConfig};
use crate::debias::{debias_dataset, DebiasError, DebiasMode, PivotConfig, TranslationClient};
use crate::types::LabeledSample;
use serde::{Deserialize, Serialize};

/// Pearson and Spearman over the same two vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationPair {
    pub pearson: CorrelationResult,
    pub spearman: CorrelationResult,
}

/// Per-culture model-versus-human correlations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerCulture {
    pub en: CorrelationPair,
    pub cn: CorrelationPair,
}

/// Binarized agreement rates between model and human scores.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryAccuracy {
    pub en: f64,
    pub cn: f64,
    pub difference: f64,
}

/// The headline evaluation artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub model_id: String,
    pub pairs: usize,
    pub per_culture: PerCulture,
    pub difference: CorrelationPair,
    pub binary_accuracy: BinaryAccuracy,
}

/// One evaluation pair with both model and human scores attached.
#[derive(Debug, Clone)]
pub struct EvalRow {
    pub pair_id: String,
    pub mp_en: f64,
    pub mp_cn: f64,
    pub ha_en: f64,
    pub ha_cn: f64,
}

impl EvalRow {
    pub fn d_model(&self) -> f64 {
        self.mp_en - self.mp_cn
    }

    pub fn d_human(&self) -> f64 {
        self.ha_en - self.ha_cn
    }
}

fn sub_seed(seed: u64, label: &str) -> u64 {
    seed ^ fnv1a64(label.as_bytes())
}

fn correlation_pair(
    x: &[f64],
    y: &[f64],
    permutations: u32,
    seed: u64,
    label: &str,
) -> Result<CorrelationPair, StatsError> {
    Ok(CorrelationPair {
        pearson: pearson(x, y, permutations, sub_seed(seed, &format!("pearson/{label}")))?,
        spearman: spearman(x, y, permutations, sub_seed(seed, &format!("spearman/{label}")))?,
    })
}

/// Assemble the evaluation report from aligned per-pair scores.
///
/// Per-culture blocks correlate model probability with the human
/// acceptance rate; the difference block correlates the cross-culture
/// gaps. Binary accuracy thresholds both sides at `threshold` per
/// culture and at zero for the difference (which culture accepts more).
pub fn build_report(
    model_id: &str,
    rows: &[EvalRow],
    permutations: u32,
    seed: u64,
    threshold: f64,
) -> Result<EvalReport, StatsError> {
    let mp_en: Vec<f64> = rows.iter().map(|r| r.mp_en).collect();
    let mp_cn: Vec<f64> = rows.iter().map(|r| r.mp_cn).collect();
    let ha_en: Vec<f64> = rows.iter().map(|r| r.ha_en).collect();
    let ha_cn: Vec<f64> = rows.iter().map(|r| r.ha_cn).collect();
    let d_model: Vec<f64> = rows.iter().map(EvalRow::d_model).collect();
    let d_human: Vec<f64> = rows.iter().map(EvalRow::d_human).collect();

    Ok(EvalReport {
        model_id: model_id.to_string(),
        pairs: rows.len(),
        per_culture: PerCulture {
            en: correlation_pair(&mp_en, &ha_en, permutations, seed, "en")?,
            cn: correlation_pair(&mp_cn, &ha_cn, permutations, seed, "cn")?,
        },
        difference: correlation_pair(&d_model, &d_human, permutations, seed, "difference")?,
        binary_accuracy: BinaryAccuracy {
            en: binary_accuracy(&mp_en, &ha_en, threshold)?,
            cn: binary_accuracy(&mp_cn, &ha_cn, threshold)?,
            difference: binary_accuracy(&d_model, &d_human, 0.0)?,
        },
    })
}

#[derive(Debug, thiserror::Error)]
pub enum MatrixError {
    #[error(transparent)]
    Debias(#[from] DebiasError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

/// Classification quality of one (train rewrite, test rewrite) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellReport {
    pub f1_negative: f64,
    pub f1_positive: f64,
    pub accuracy: f64,
}

/// F1 grid over rewrite modes: `grid[i][j]` trains on `modes[i]` data
/// and evaluates on `modes[j]` data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewriteMatrix {
    pub modes: Vec<String>,
    pub grid: Vec<Vec<CellReport>>,
}

impl RewriteMatrix {
    pub fn cell(&self, train_mode: DebiasMode, test_mode: DebiasMode) -> &CellReport {
        let idx = |m: DebiasMode| {
            DebiasMode::ALL.iter().position(|x| *x == m).expect("mode is one of ALL")
        };
        &self.grid[idx(train_mode)][idx(test_mode)]
    }
}

/// Inputs for the rewrite matrix.
pub struct MatrixSpec<'a> {
    pub train: &'a [LabeledSample],
    pub test: &'a [LabeledSample],
    pub pivots: &'a PivotConfig,
    pub client: &'a dyn TranslationClient,
    pub config: TrainConfig,
    pub threshold: f64,
}

/// Train one model per rewrite mode and score it against every rewrite
/// of the held-out set. Each dataset variant is computed once.
pub fn run_matrix(spec: &MatrixSpec) -> Result<RewriteMatrix, MatrixError> {
    let mut train_variants = Vec::with_capacity(DebiasMode::ALL.len());
    let mut test_variants = Vec::with_capacity(DebiasMode::ALL.len());
    for mode in DebiasMode::ALL {
        train_variants.push(debias_dataset(spec.train, mode, spec.pivots, spec.client, None)?);
        test_variants.push(debias_dataset(spec.test, mode, spec.pivots, spec.client, None)?);
    }
    let mut grid = Vec::with_capacity(DebiasMode::ALL.len());
    for train_data in &train_variants {
        let model = train(train_data, &spec.config)?;
        let mut row = Vec::with_capacity(DebiasMode::ALL.len());
        for test_data in &test_variants {
            let f1 = evaluate_f1(&model, test_data, spec.threshold)?;
            row.push(CellReport {
                f1_negative: f1.f1_negative,
                f1_positive: f1.f1_positive,
                accuracy: f1.accuracy,
            });
        }
        grid.push(row);
    }
    Ok(RewriteMatrix { modes: DebiasMode::ALL.iter().map(DebiasMode::to_string).collect(), grid })
}
