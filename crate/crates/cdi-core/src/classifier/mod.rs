//! Per-culture acceptability classifier.
//!
//! A logistic regression over hashed n-gram counts stands in for a heavy
//! pretrained encoder: training is seeded SGD with L2 regularization and
//! is bit-reproducible for a fixed config, seed and input order. The
//! probability it emits for a text is read as the model's acceptance of
//! that statement under the culture it was trained on.

mod external;
mod featurize;

pub use external::{external_score, ExternalScorer, HttpScorer, StdioScorer};
pub use featurize::{featurize, fnv1a64, tokenize, FeatureVector};

use crate::types::{LabeledSample, Lang};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::Path;

/// Errors from featurization, training, scoring and model I/O.
#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("text is empty after normalization")]
    EmptyText,
    #[error("sample {id} has empty text after normalization")]
    EmptySampleText { id: String },
    #[error("no training samples supplied")]
    EmptyData,
    #[error("training data contains a single class ({label})")]
    SingleClassData { label: u8 },
    #[error("expected language {expected} but got {got}")]
    LangMismatch { expected: Lang, got: Lang },
    #[error("sample {id} has label {label}, expected 0 or 1")]
    BadLabel { id: String, label: u8 },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("model file error: {0}")]
    ModelIo(#[from] std::io::Error),
    #[error("model file is not valid: {0}")]
    ModelFormat(String),
    #[error("external scorer unavailable: {0}")]
    ScorerUnavailable(String),
    #[error("external scorer returned malformed score: {0}")]
    MalformedScore(String),
}

/// Hyperparameters for featurization and training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub hash_bits: u8,
    pub ngram_max: u8,
    pub epochs: u32,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
    pub max_seq_tokens: u32,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hash_bits: 20,
            ngram_max: 2,
            epochs: 5,
            learning_rate: 0.1,
            l2: 1e-6,
            seed: 0,
            max_seq_tokens: 128,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        if !(4..=30).contains(&self.hash_bits) {
            return Err(ClassifierError::InvalidConfig(format!(
                "hash_bits must be in 4..=30, got {}",
                self.hash_bits
            )));
        }
        if self.ngram_max == 0 {
            return Err(ClassifierError::InvalidConfig("ngram_max must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(ClassifierError::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.learning_rate <= 0.0 || self.learning_rate.is_nan() {
            return Err(ClassifierError::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.l2 < 0.0 {
            return Err(ClassifierError::InvalidConfig("l2 must be >= 0".into()));
        }
        if self.max_seq_tokens == 0 {
            return Err(ClassifierError::InvalidConfig("max_seq_tokens must be >= 1".into()));
        }
        Ok(())
    }

    pub fn capacity(&self) -> usize {
        1usize << self.hash_bits
    }
}

/// A trained per-culture acceptance model.
#[derive(Debug, Clone)]
pub struct CultureModel {
    pub lang: Lang,
    pub config: TrainConfig,
    pub bias: f64,
    pub weights: Vec<f64>,
    pub train_fingerprint: String,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) computed without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Keep probabilities strictly inside (0, 1) so downstream differences
/// and log-odds stay finite.
const SCORE_FLOOR: f64 = 1e-12;

fn clamp_open(p: f64) -> f64 {
    p.clamp(SCORE_FLOOR, 1.0 - SCORE_FLOOR)
}

fn dot(features: &FeatureVector, weights: &[f64], bias: f64) -> f64 {
    let mut z = bias;
    for (i, c) in features.iter() {
        z += weights[i as usize] * f64::from(c);
    }
    z
}

/// Fingerprint of the training set: SHA-256 over one `id US label US text`
/// line per sample, in input order.
pub fn training_fingerprint(samples: &[LabeledSample]) -> String {
    let mut hasher = Sha256::new();
    for s in samples {
        hasher.update(s.id.as_bytes());
        hasher.update([0x1f]);
        hasher.update([s.label + b'0']);
        hasher.update([0x1f]);
        hasher.update(s.text.as_bytes());
        hasher.update(b"\n");
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

fn validate_training_set(samples: &[LabeledSample]) -> Result<Lang, ClassifierError> {
    let first = samples.first().ok_or(ClassifierError::EmptyData)?;
    let lang = first.lang;
    let mut seen = [false; 2];
    for s in samples {
        if s.lang != lang {
            return Err(ClassifierError::LangMismatch { expected: lang, got: s.lang });
        }
        if s.label > 1 {
            return Err(ClassifierError::BadLabel { id: s.id.clone(), label: s.label });
        }
        seen[s.label as usize] = true;
    }
    if !seen[0] {
        return Err(ClassifierError::SingleClassData { label: 1 });
    }
    if !seen[1] {
        return Err(ClassifierError::SingleClassData { label: 0 });
    }
    Ok(lang)
}

/// Train a logistic regression with seeded per-epoch-shuffle SGD.
///
/// The same samples, config and seed produce bit-identical weights. The
/// L2 term is applied lazily to the coordinates touched by each sample,
/// which keeps updates sparse.
pub fn train(
    samples: &[LabeledSample],
    config: &TrainConfig,
) -> Result<CultureModel, ClassifierError> {
    config.validate()?;
    let lang = validate_training_set(samples)?;
    let mut featurized = Vec::with_capacity(samples.len());
    for s in samples {
        let fv = featurize(&s.text, lang, config)
            .map_err(|_| ClassifierError::EmptySampleText { id: s.id.clone() })?;
        featurized.push((fv, f64::from(s.label)));
    }

    let mut weights = vec![0.0f64; config.capacity()];
    let mut bias = 0.0f64;
    let mut order: Vec<usize> = (0..featurized.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lr = config.learning_rate;

    for _epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let (fv, y) = &featurized[idx];
            let p = sigmoid(dot(fv, &weights, bias));
            let g = p - y;
            for (i, c) in fv.iter() {
                let w = &mut weights[i as usize];
                *w -= lr * (g * f64::from(c) + config.l2 * *w);
            }
            bias -= lr * g;
        }
    }

    Ok(CultureModel {
        lang,
        config: config.clone(),
        bias,
        weights,
        train_fingerprint: training_fingerprint(samples),
    })
}

/// Mean regularized logistic loss and its analytic gradient over a batch
/// of featurized samples. The bias is not regularized.
///
/// loss = (1/N) sum softplus(z_i) - y_i z_i  +  (l2/2) ||w||^2
pub fn loss_and_gradient(
    batch: &[(FeatureVector, f64)],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = batch.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0f64; weights.len()];
    let mut grad_b = 0.0;
    for (fv, y) in batch {
        let z = dot(fv, weights, bias);
        loss += softplus(z) - y * z;
        let g = sigmoid(z) - y;
        for (i, c) in fv.iter() {
            grad_w[i as usize] += g * f64::from(c);
        }
        grad_b += g;
    }
    loss /= n;
    grad_b /= n;
    let mut reg = 0.0;
    for (gw, w) in grad_w.iter_mut().zip(weights) {
        *gw = *gw / n + l2 * w;
        reg += w * w;
    }
    (loss + 0.5 * l2 * reg, grad_w, grad_b)
}

impl CultureModel {
    /// Probability that the model's culture accepts the statement.
    /// Strictly inside (0, 1).
    pub fn score(&self, text: &str) -> Result<f64, ClassifierError> {
        let fv = featurize(text, self.lang, &self.config)?;
        Ok(clamp_open(sigmoid(dot(&fv, &self.weights, self.bias))))
    }

    /// Like [`score`](Self::score) but checks the caller's declared
    /// language against the model's.
    pub fn score_declared(&self, lang: Lang, text: &str) -> Result<f64, ClassifierError> {
        if lang != self.lang {
            return Err(ClassifierError::LangMismatch { expected: self.lang, got: lang });
        }
        self.score(text)
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassifierError> {
        let sparse: Vec<(u32, f64)> = self
            .weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, w)| (i as u32, *w))
            .collect();
        let file = ModelFile {
            version: MODEL_VERSION,
            lang: self.lang,
            config: self.config.clone(),
            bias: self.bias,
            train_fingerprint: self.train_fingerprint.clone(),
            weights: sparse,
        };
        let mut out = std::fs::File::create(path)?;
        let body = serde_json::to_string(&file)
            .map_err(|e| ClassifierError::ModelFormat(e.to_string()))?;
        out.write_all(body.as_bytes())?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ClassifierError> {
        let mut body = String::new();
        std::fs::File::open(path)?.read_to_string(&mut body)?;
        let file: ModelFile =
            serde_json::from_str(&body).map_err(|e| ClassifierError::ModelFormat(e.to_string()))?;
        if file.version != MODEL_VERSION {
            return Err(ClassifierError::ModelFormat(format!(
                "unsupported model version {} (expected {})",
                file.version, MODEL_VERSION
            )));
        }
        file.config.validate()?;
        let mut weights = vec![0.0f64; file.config.capacity()];
        for (i, w) in &file.weights {
            let slot = weights.get_mut(*i as usize).ok_or_else(|| {
                ClassifierError::ModelFormat(format!("weight index {i} out of range"))
            })?;
            *slot = *w;
        }
        Ok(CultureModel {
            lang: file.lang,
            config: file.config,
            bias: file.bias,
            weights,
            train_fingerprint: file.train_fingerprint,
        })
    }
}

const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u32,
    lang: Lang,
    config: TrainConfig,
    bias: f64,
    train_fingerprint: String,
    weights: Vec<(u32, f64)>,
}

/// Per-class F1 and overall accuracy at a decision threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Report {
    pub f1_negative: f64,
    pub f1_positive: f64,
    pub accuracy: f64,
    pub n: usize,
}

/// Evaluate the model on labeled samples; prediction is `score > threshold`.
/// F1 of a class with an empty denominator is defined as 0.
pub fn evaluate_f1(
    model: &CultureModel,
    samples: &[LabeledSample],
    threshold: f64,
) -> Result<F1Report, ClassifierError> {
    if samples.is_empty() {
        return Err(ClassifierError::EmptyData);
    }
    let mut tp = 0u32;
    let mut fp = 0u32;
    let mut tn = 0u32;
    let mut fn_ = 0u32;
    for s in samples {
        if s.label > 1 {
            return Err(ClassifierError::BadLabel { id: s.id.clone(), label: s.label });
        }
        let pred = model.score_declared(s.lang, &s.text)? > threshold;
        match (pred, s.label == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let f1 = |tp: u32, fp: u32, fn_: u32| -> f64 {
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            0.0
        } else {
            f64::from(2 * tp) / f64::from(denom)
        }
    };
    Ok(F1Report {
        f1_negative: f1(tn, fn_, fp),
        f1_positive: f1(tp, fp, fn_),
        accuracy: f64::from(tp + tn) / samples.len() as f64,
        n: samples.len(),
    })
}
