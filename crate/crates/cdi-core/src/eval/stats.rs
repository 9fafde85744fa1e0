//! Correlation statistics with seeded permutation significance.
//!
//! Pearson's r uses the sample convention (the n-1 normalizations cancel
//! in the ratio, but intermediate moments are computed that way).
//! Spearman's rho is Pearson's r over fractional average ranks, so ties
//! share the mean of the rank positions they occupy.
//!
//! Significance is a two-sided permutation test: the second vector is
//! re-paired by seeded shuffles and
//!
//! ```text
//! p = (1 + #{ |r_perm| >= |r_obs| }) / (P + 1)
//! ```
//!
//! which is never exactly zero and equals 1 for n == 2 where every
//! re-pairing reproduces |r| = 1.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Default number of permutations for p-values.
pub const DEFAULT_PERMUTATIONS: u32 = 10_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("input vectors have different lengths ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least two observations, got {0}")]
    TooFew(usize),
    #[error("correlation undefined: {0} input has zero variance")]
    DegenerateInput(&'static str),
}

/// Which rank statistic a correlation was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    Pearson,
    Spearman,
}

/// A correlation coefficient with its permutation p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub kind: CorrelationKind,
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

fn validate(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 2 {
        return Err(StatsError::TooFew(x.len()));
    }
    Ok(())
}

/// Pearson's r without a p-value.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    validate(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::DegenerateInput("x"));
    }
    if syy == 0.0 {
        return Err(StatsError::DegenerateInput("y"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Fractional average ranks, 1-based. Tied values share the mean of the
/// positions they span: ranks of [10, 20, 20, 30] are [1, 2.5, 2.5, 4].
pub fn rank_with_ties(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("rankable values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho without a p-value.
pub fn spearman_r(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    validate(x, y)?;
    pearson_r(&rank_with_ties(x), &rank_with_ties(y))
}

fn permutation_p(
    x: &[f64],
    y: &[f64],
    r_obs: f64,
    permutations: u32,
    seed: u64,
    stat: fn(&[f64], &[f64]) -> Result<f64, StatsError>,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = y.to_vec();
    let mut at_least = 1u64;
    let target = r_obs.abs();
    for _ in 0..permutations {
        shuffled.shuffle(&mut rng);
        // A permutation can be degenerate only if the original was, which
        // validate() already excluded; unwrap is safe for the same data.
        let r = stat(x, &shuffled).expect("permuted stat");
        if r.abs() >= target {
            at_least += 1;
        }
    }
    at_least as f64 / f64::from(permutations + 1)
}

/// Pearson correlation with a seeded two-sided permutation p-value.
pub fn pearson(
    x: &[f64],
    y: &[f64],
    permutations: u32,
    seed: u64,
) -> Result<CorrelationResult, StatsError> {
    let r = pearson_r(x, y)?;
    let p_value = permutation_p(x, y, r, permutations, seed, pearson_r);
    Ok(CorrelationResult { kind: CorrelationKind::Pearson, r, p_value, n: x.len() })
}

/// Spearman correlation with a seeded two-sided permutation p-value.
/// Ranks are computed once; permutations shuffle the rank vector.
pub fn spearman(
    x: &[f64],
    y: &[f64],
    permutations: u32,
    seed: u64,
) -> Result<CorrelationResult, StatsError> {
    validate(x, y)?;
    let rx = rank_with_ties(x);
    let ry = rank_with_ties(y);
    let r = pearson_r(&rx, &ry)?;
    let p_value = permutation_p(&rx, &ry, r, permutations, seed, pearson_r);
    Ok(CorrelationResult { kind: CorrelationKind::Spearman, r, p_value, n: x.len() })
}

/// Fraction of positions where both vectors binarize to the same side of
/// the threshold (strictly greater counts as 1).
pub fn binary_accuracy(pred: &[f64], truth: &[f64], threshold: f64) -> Result<f64, StatsError> {
    if pred.len() != truth.len() {
        return Err(StatsError::LengthMismatch { x: pred.len(), y: truth.len() });
    }
    if pred.is_empty() {
        return Err(StatsError::TooFew(0));
    }
    let hits =
        pred.iter().zip(truth).filter(|(p, t)| (**p > threshold) == (**t > threshold)).count();
    Ok(hits as f64 / pred.len() as f64)
}
