//! Annotator quality filtering and inter-annotator agreement.
//!
//! Agreement is measured leave-one-out: each annotator's judgment vector
//! is correlated against the mean vector of the others, and the reported
//! statistic is the mean of those correlations. The same statistic drives
//! filtering: annotators who fail too many gold (attention) checks are
//! dropped first, then the worst leave-one-out annotator is dropped
//! repeatedly while below the floor, ties broken by annotator id.

use super::stats::{pearson_r, rank_with_ties, CorrelationKind, CorrelationResult, StatsError};
use crate::scoring::AnnotationRecord;
use crate::types::Lang;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error)]
pub enum AgreementError {
    #[error("no annotation records supplied")]
    Empty,
    #[error("records mix cultures {0} and {1}")]
    MixedCultures(Lang, Lang),
    #[error("annotator {annotator} judged pair {pair} more than once")]
    DuplicateJudgment { annotator: String, pair: String },
    #[error("annotator {annotator} is missing a judgment for pair {pair}")]
    NotRectangular { annotator: String, pair: String },
    #[error("judgment {value} of annotator {annotator} is not 0 or 1")]
    BadJudgment { annotator: String, value: u8 },
    #[error("gold check references unknown pair {0}")]
    UnknownGoldPair(String),
    #[error("all annotators were filtered out")]
    AllFiltered,
    #[error("difference agreement needs matching pair sets in both cultures")]
    PairMismatch,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// A rectangular annotator-by-pair judgment matrix for one culture.
/// Rows and columns are sorted by id for deterministic downstream math.
#[derive(Debug, Clone)]
pub struct AnnotationMatrix {
    pub culture: Lang,
    pub pair_ids: Vec<String>,
    pub annotators: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl AnnotationMatrix {
    /// Group flat records into a matrix, insisting on one judgment per
    /// (annotator, pair) cell.
    pub fn from_records(records: &[AnnotationRecord]) -> Result<Self, AgreementError> {
        let culture = records.first().ok_or(AgreementError::Empty)?.culture;
        let mut pairs = BTreeSet::new();
        let mut annotators = BTreeSet::new();
        let mut cells: BTreeMap<(String, String), f64> = BTreeMap::new();
        for r in records {
            if r.culture != culture {
                return Err(AgreementError::MixedCultures(culture, r.culture));
            }
            if r.judgment > 1 {
                return Err(AgreementError::BadJudgment {
                    annotator: r.annotator_id.clone(),
                    value: r.judgment,
                });
            }
            pairs.insert(r.pair_id.clone());
            annotators.insert(r.annotator_id.clone());
            let key = (r.annotator_id.clone(), r.pair_id.clone());
            if cells.insert(key, f64::from(r.judgment)).is_some() {
                return Err(AgreementError::DuplicateJudgment {
                    annotator: r.annotator_id.clone(),
                    pair: r.pair_id.clone(),
                });
            }
        }
        let pair_ids: Vec<String> = pairs.into_iter().collect();
        let annotators: Vec<String> = annotators.into_iter().collect();
        let mut rows = Vec::with_capacity(annotators.len());
        for a in &annotators {
            let mut row = Vec::with_capacity(pair_ids.len());
            for p in &pair_ids {
                match cells.get(&(a.clone(), p.clone())) {
                    Some(v) => row.push(*v),
                    None => {
                        return Err(AgreementError::NotRectangular {
                            annotator: a.clone(),
                            pair: p.clone(),
                        })
                    }
                }
            }
            rows.push(row);
        }
        Ok(AnnotationMatrix { culture, pair_ids, annotators, rows })
    }

    pub fn n_annotators(&self) -> usize {
        self.annotators.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Per-pair accept counts as (accepted, total), in pair id order.
    pub fn accept_counts(&self) -> Vec<(String, u32, u32)> {
        let total = self.annotators.len() as u32;
        self.pair_ids
            .iter()
            .enumerate()
            .map(|(j, pid)| {
                let accepted = self.rows.iter().filter(|r| r[j] > 0.5).count() as u32;
                (pid.clone(), accepted, total)
            })
            .collect()
    }

    fn without_annotator(&self, drop: usize) -> AnnotationMatrix {
        let mut m = self.clone();
        m.annotators.remove(drop);
        m.rows.remove(drop);
        m
    }
}

fn kind_stat(kind: CorrelationKind, x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    match kind {
        CorrelationKind::Pearson => pearson_r(x, y),
        CorrelationKind::Spearman => pearson_r(&rank_with_ties(x), &rank_with_ties(y)),
    }
}

fn mean_of_others(rows: &[Vec<f64>], skip: usize) -> Vec<f64> {
    let n_pairs = rows[0].len();
    let n = (rows.len() - 1) as f64;
    let mut mean = vec![0.0; n_pairs];
    for (i, row) in rows.iter().enumerate() {
        if i == skip {
            continue;
        }
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    mean
}

/// Leave-one-out correlation of one annotator against the mean of the
/// rest. A constant mean-of-others yields 0 (no measurable
/// relationship); a constant own row is a degenerate input error.
fn loo_correlation(rows: &[Vec<f64>], i: usize, kind: CorrelationKind) -> Result<f64, StatsError> {
    let others = mean_of_others(rows, i);
    match kind_stat(kind, &rows[i], &others) {
        Ok(r) => Ok(r),
        Err(StatsError::DegenerateInput("y")) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn mean_loo(rows: &[Vec<f64>], kind: CorrelationKind) -> Result<f64, StatsError> {
    let mut total = 0.0;
    for i in 0..rows.len() {
        total += loo_correlation(rows, i, kind)?;
    }
    Ok(total / rows.len() as f64)
}

/// Why an annotator was dropped.
#[derive(Debug, Clone, PartialEq)]
pub enum DropReason {
    /// Fraction of gold checks passed was below the gate.
    GoldFail { passed: u32, total: u32 },
    /// Leave-one-out correlation below the floor at the time of dropping.
    LowAgreement { loo: f64 },
}

/// Filtering outcome: the retained matrix plus an audit trail.
#[derive(Debug)]
pub struct FilterOutcome {
    pub retained: AnnotationMatrix,
    pub dropped: Vec<(String, DropReason)>,
}

/// Gate annotators on gold checks, then iteratively drop the worst
/// leave-one-out annotator while below `min_loo_corr`.
///
/// `gold` maps pair id to the expected judgment for attention pairs; an
/// annotator passes the gate when their pass fraction is at least
/// `min_gold_pass`. An empty gold map skips the gate. Filtering uses
/// Pearson leave-one-out; constant rows count as negative infinity so
/// they drop first.
pub fn filter_annotators(
    matrix: &AnnotationMatrix,
    gold: &BTreeMap<String, u8>,
    min_gold_pass: f64,
    min_loo_corr: f64,
) -> Result<FilterOutcome, AgreementError> {
    for pair in gold.keys() {
        if !matrix.pair_ids.contains(pair) {
            return Err(AgreementError::UnknownGoldPair(pair.clone()));
        }
    }
    let mut current = matrix.clone();
    let mut dropped = Vec::new();

    if !gold.is_empty() {
        let gold_cols: Vec<(usize, f64)> = matrix
            .pair_ids
            .iter()
            .enumerate()
            .filter_map(|(j, pid)| gold.get(pid).map(|e| (j, f64::from(*e))))
            .collect();
        let total = gold_cols.len() as u32;
        let mut keep = Vec::new();
        for (i, annotator) in current.annotators.iter().enumerate() {
            let passed =
                gold_cols.iter().filter(|(j, expected)| current.rows[i][*j] == *expected).count()
                    as u32;
            if f64::from(passed) / f64::from(total) >= min_gold_pass {
                keep.push(i);
            } else {
                dropped.push((annotator.clone(), DropReason::GoldFail { passed, total }));
            }
        }
        current = AnnotationMatrix {
            culture: current.culture,
            pair_ids: current.pair_ids.clone(),
            annotators: keep.iter().map(|&i| current.annotators[i].clone()).collect(),
            rows: keep.iter().map(|&i| current.rows[i].clone()).collect(),
        };
    }

    loop {
        if current.n_annotators() < 2 {
            return Err(AgreementError::AllFiltered);
        }
        let mut worst: Option<(usize, f64)> = None;
        for i in 0..current.n_annotators() {
            let loo = match loo_correlation(&current.rows, i, CorrelationKind::Pearson) {
                Ok(r) => r,
                Err(StatsError::DegenerateInput(_)) => f64::NEG_INFINITY,
                Err(e) => return Err(e.into()),
            };
            // Strictly-worse wins; ties keep the earliest (smallest id,
            // rows are sorted by annotator id).
            let replace = match worst {
                None => true,
                Some((_, w)) => loo < w,
            };
            if replace {
                worst = Some((i, loo));
            }
        }
        let (idx, loo) = worst.expect("at least two annotators");
        if loo < min_loo_corr {
            dropped.push((current.annotators[idx].clone(), DropReason::LowAgreement { loo }));
            current = current.without_annotator(idx);
        } else {
            break;
        }
    }
    Ok(FilterOutcome { retained: current, dropped })
}

fn permuted_mean_loo(
    rows: &[Vec<f64>],
    kind: CorrelationKind,
    permutations: u32,
    seed: u64,
    observed: f64,
) -> Result<f64, AgreementError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch: Vec<Vec<f64>> = rows.to_vec();
    let mut at_least = 1u64;
    let target = observed.abs();
    for _ in 0..permutations {
        for row in &mut scratch {
            row.shuffle(&mut rng);
        }
        let stat = mean_loo(&scratch, kind)?;
        if stat.abs() >= target {
            at_least += 1;
        }
    }
    Ok(at_least as f64 / f64::from(permutations + 1))
}

/// Mean leave-one-out agreement over the matrix with a permutation
/// p-value (each annotator's vector is shuffled independently under the
/// null of no shared pair effect).
pub fn inter_annotator_agreement(
    matrix: &AnnotationMatrix,
    kind: CorrelationKind,
    permutations: u32,
    seed: u64,
) -> Result<CorrelationResult, AgreementError> {
    if matrix.n_annotators() < 2 {
        return Err(AgreementError::AllFiltered);
    }
    let r = mean_loo(&matrix.rows, kind)?;
    let p_value = permuted_mean_loo(&matrix.rows, kind, permutations, seed, r)?;
    Ok(CorrelationResult { kind, r, p_value, n: matrix.n_annotators() })
}

/// Agreement over per-annotator difference vectors.
///
/// Annotators are paired across cultures by their sorted index (pools
/// are anonymous, so the pairing is positional); the pools are truncated
/// to the shorter one. Each paired difference row is the en row minus
/// the cn row over the shared, identically-ordered pair ids.
pub fn difference_agreement(
    en: &AnnotationMatrix,
    cn: &AnnotationMatrix,
    kind: CorrelationKind,
    permutations: u32,
    seed: u64,
) -> Result<CorrelationResult, AgreementError> {
    if en.pair_ids != cn.pair_ids {
        return Err(AgreementError::PairMismatch);
    }
    let n = en.n_annotators().min(cn.n_annotators());
    if n < 2 {
        return Err(AgreementError::AllFiltered);
    }
    let rows: Vec<Vec<f64>> =
        (0..n).map(|i| en.rows[i].iter().zip(&cn.rows[i]).map(|(a, b)| a - b).collect()).collect();
    let r = mean_loo(&rows, kind)?;
    let p_value = permuted_mean_loo(&rows, kind, permutations, seed, r)?;
    Ok(CorrelationResult { kind, r, p_value, n })
}
