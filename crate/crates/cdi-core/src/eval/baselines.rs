//! Reference baselines the learned scorer must beat: seeded random
//! scores and a plain unigram language model whose per-token average log
//! probability is min-max normalized into [0, 1].

use crate::classifier::{tokenize, ClassifierError};
use crate::types::Lang;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Uniform random acceptance scores for `n` statement pairs. For each
/// pair the first culture's score is drawn before the second's, so the
/// stream layout is stable.
pub fn random_baseline(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for _ in 0..n {
        first.push(rng.gen::<f64>());
        second.push(rng.gen::<f64>());
    }
    (first, second)
}

/// Anything that can assign a total log probability to a text.
pub trait LogProbScorer {
    fn log_prob(&self, text: &str) -> Result<f64, ClassifierError>;
}

/// Add-one smoothed unigram model. The event space is the training
/// vocabulary plus one unseen bucket, so unknown tokens get
/// ln(1 / (total + V + 1)) rather than minus infinity.
#[derive(Debug, Clone)]
pub struct UnigramLm {
    lang: Lang,
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl UnigramLm {
    pub fn fit<S: AsRef<str>>(texts: &[S], lang: Lang) -> Self {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut total = 0u64;
        for t in texts {
            for tok in tokenize(t.as_ref(), lang) {
                *counts.entry(tok).or_insert(0) += 1;
                total += 1;
            }
        }
        UnigramLm { lang, counts, total }
    }

    pub fn lang(&self) -> Lang {
        self.lang
    }

    fn token_log_prob(&self, token: &str) -> f64 {
        let count = self.counts.get(token).copied().unwrap_or(0);
        let vocab = self.counts.len() as u64 + 1;
        ((count + 1) as f64 / (self.total + vocab) as f64).ln()
    }
}

impl LogProbScorer for UnigramLm {
    fn log_prob(&self, text: &str) -> Result<f64, ClassifierError> {
        let tokens = tokenize(text, self.lang);
        if tokens.is_empty() {
            return Err(ClassifierError::EmptyText);
        }
        Ok(tokens.iter().map(|t| self.token_log_prob(t)).sum())
    }
}

/// Score texts with a language model: average log probability per token,
/// then min-max normalize across the batch so the output lives on the
/// same [0, 1] scale as model probabilities. A batch with no spread maps
/// to all 0.5.
pub fn lm_baseline<S: AsRef<str>>(
    texts: &[S],
    lang: Lang,
    scorer: &dyn LogProbScorer,
) -> Result<Vec<f64>, ClassifierError> {
    let mut averages = Vec::with_capacity(texts.len());
    for t in texts {
        let tokens = tokenize(t.as_ref(), lang);
        if tokens.is_empty() {
            return Err(ClassifierError::EmptyText);
        }
        averages.push(scorer.log_prob(t.as_ref())? / tokens.len() as f64);
    }
    if averages.is_empty() {
        return Ok(Vec::new());
    }
    let lo = averages.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = averages.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo == 0.0 {
        return Ok(vec![0.5; averages.len()]);
    }
    Ok(averages.into_iter().map(|a| (a - lo) / (hi - lo)).collect())
}
