//! Hashed n-gram featurization.
//!
//! Text is normalized, tokenized, expanded into n-grams up to
//! `ngram_max`, and each n-gram is hashed with FNV-1a (64-bit) reduced
//! modulo `2^hash_bits`. The hash is fixed and seedless so that feature
//! indices are stable across runs, processes and platforms.

use super::{ClassifierError, TrainConfig};
use crate::types::Lang;
use std::collections::BTreeMap;

/// FNV-1a 64-bit offset basis.
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
/// FNV-1a 64-bit prime.
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Separator byte inserted between tokens when hashing an n-gram, chosen
/// so that ("ab", "c") and ("a", "bc") hash differently.
const NGRAM_SEP: u8 = 0x1f;

/// Sparse feature counts with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub indices: Vec<u32>,
    pub values: Vec<u32>,
}

impl FeatureVector {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }
}

/// FNV-1a over a byte slice.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Language-dependent tokenization.
///
/// English: lowercased, split on Unicode whitespace. Chinese: one token
/// per character with whitespace skipped and no case folding.
pub fn tokenize(text: &str, lang: Lang) -> Vec<String> {
    match lang {
        Lang::En => text.to_lowercase().split_whitespace().map(str::to_string).collect(),
        Lang::Cn => text.chars().filter(|c| !c.is_whitespace()).map(String::from).collect(),
    }
}

fn hash_ngram(tokens: &[String], mask: u64) -> u32 {
    let mut bytes = Vec::with_capacity(tokens.iter().map(|t| t.len() + 1).sum());
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 {
            bytes.push(NGRAM_SEP);
        }
        bytes.extend_from_slice(tok.as_bytes());
    }
    (fnv1a64(&bytes) & mask) as u32
}

/// Featurize one text into hashed n-gram counts.
///
/// Counts of distinct n-grams that collide after hashing accumulate into
/// one index. Errors with `EmptyText` if normalization leaves no tokens.
pub fn featurize(
    text: &str,
    lang: Lang,
    config: &TrainConfig,
) -> Result<FeatureVector, ClassifierError> {
    config.validate()?;
    let mut tokens = tokenize(text, lang);
    if tokens.is_empty() {
        return Err(ClassifierError::EmptyText);
    }
    tokens.truncate(config.max_seq_tokens as usize);
    let mask = (1u64 << config.hash_bits) - 1;
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for n in 1..=config.ngram_max as usize {
        if n > tokens.len() {
            break;
        }
        for window in tokens.windows(n) {
            *counts.entry(hash_ngram(window, mask)).or_insert(0) += 1;
        }
    }
    let (indices, values) = counts.into_iter().unzip();
    Ok(FeatureVector { indices, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn config() -> TrainConfig {
        TrainConfig::default()
    }

    /// Definitional oracle: enumerate n-grams by hand and hash each one
    /// independently of the production accumulation loop.
    fn oracle_counts(text: &str, lang: Lang, cfg: &TrainConfig) -> BTreeMap<u32, u32> {
        let tokens: Vec<String> =
            tokenize(text, lang).into_iter().take(cfg.max_seq_tokens as usize).collect();
        let mask = (1u64 << cfg.hash_bits) - 1;
        let mut out = BTreeMap::new();
        for n in 1..=cfg.ngram_max as usize {
            for start in 0..tokens.len().saturating_sub(n - 1) {
                let joined = tokens[start..start + n].join("\u{1f}");
                let idx = (fnv1a64(joined.as_bytes()) & mask) as u32;
                *out.entry(idx).or_insert(0) += 1;
            }
        }
        out
    }

    #[test]
    fn fnv1a64_known_vectors() {
        // Published FNV-1a test vectors.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn english_tokens_are_lowercased_whitespace_words() {
        assert_eq!(tokenize("Safe Water  matters", Lang::En), vec!["safe", "water", "matters"]);
    }

    #[test]
    fn chinese_tokens_are_characters_without_case_folding() {
        assert_eq!(tokenize("安全 的水", Lang::Cn), vec!["安", "全", "的", "水"]);
    }

    #[test]
    fn matches_enumeration_oracle_english() {
        let cfg = config();
        let text = "Making safe abortion legal and accessible reduces maternal deaths.";
        let got = featurize(text, Lang::En, &cfg).unwrap();
        let want = oracle_counts(text, Lang::En, &cfg);
        assert_eq!(got.indices, want.keys().copied().collect::<Vec<_>>());
        assert_eq!(got.values, want.values().copied().collect::<Vec<_>>());
    }

    #[test]
    fn matches_enumeration_oracle_chinese() {
        let cfg = config();
        let text = "安全的饮用水减少疾病。";
        let got = featurize(text, Lang::Cn, &cfg).unwrap();
        let want = oracle_counts(text, Lang::Cn, &cfg);
        assert_eq!(got.indices, want.keys().copied().collect::<Vec<_>>());
        assert_eq!(got.values, want.values().copied().collect::<Vec<_>>());
    }

    #[test]
    fn unigram_and_bigram_counts_add_up() {
        let cfg = config();
        let fv = featurize("a b c d", Lang::En, &cfg).unwrap();
        // 4 unigrams + 3 bigrams, distinct tokens so collisions are
        // overwhelmingly unlikely at 2^20 buckets.
        assert_eq!(fv.values.iter().sum::<u32>(), 7);
    }

    #[test]
    fn repeated_tokens_accumulate() {
        let cfg = config();
        let fv = featurize("tea tea tea", Lang::En, &cfg).unwrap();
        // unigram "tea" x3 and bigram "tea tea" x2.
        let mut vals = fv.values.clone();
        vals.sort_unstable();
        assert_eq!(vals, vec![2, 3]);
    }

    #[test]
    fn indices_strictly_increasing_and_below_capacity() {
        let cfg = config();
        let fv = featurize("one two three four five", Lang::En, &cfg).unwrap();
        for pair in fv.indices.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        let cap = 1u64 << cfg.hash_bits;
        assert!(fv.indices.iter().all(|&i| u64::from(i) < cap));
    }

    #[test]
    fn empty_after_normalization_is_an_error() {
        let cfg = config();
        assert!(matches!(featurize("   ", Lang::En, &cfg), Err(ClassifierError::EmptyText)));
        assert!(matches!(featurize("", Lang::Cn, &cfg), Err(ClassifierError::EmptyText)));
    }

    #[test]
    fn truncation_respects_max_seq_tokens() {
        let mut cfg = config();
        cfg.max_seq_tokens = 3;
        let full = featurize("a b c", Lang::En, &cfg).unwrap();
        let truncated = featurize("a b c d e f", Lang::En, &cfg).unwrap();
        assert_eq!(full, truncated);
    }

    #[test]
    fn ngram_separator_prevents_boundary_aliasing() {
        let cfg = config();
        let a = featurize("ab c", Lang::En, &cfg).unwrap();
        let b = featurize("a bc", Lang::En, &cfg).unwrap();
        assert_ne!(a, b);
    }

    mod proptests {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn featurize_is_deterministic(words in proptest::collection::vec("[a-z]{1,8}", 1..20)) {
                let cfg = config();
                let text = words.join(" ");
                let a = featurize(&text, Lang::En, &cfg).unwrap();
                let b = featurize(&text, Lang::En, &cfg).unwrap();
                prop_assert_eq!(a, b);
            }

            #[test]
            fn total_count_equals_ngram_count(words in proptest::collection::vec("[a-z]{1,8}", 1..20)) {
                let cfg = config();
                let text = words.join(" ");
                let fv = featurize(&text, Lang::En, &cfg).unwrap();
                let n = words.len() as u32;
                let expected = n + n.saturating_sub(1);
                prop_assert_eq!(fv.values.iter().sum::<u32>(), expected);
            }
        }
    }
}
