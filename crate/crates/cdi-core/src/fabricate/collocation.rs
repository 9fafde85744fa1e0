//! Collocation protection for the flip guard.
//!
//! A bigram is protected when it appears on the explicit stoplist or when
//! its corpus count reaches the frequency threshold. Protected spans are
//! never flipped: "New" in "New York" is part of a name, not an opinion.
//!
//! Tokens follow the guard convention from the tagger (lowercased word
//! runs for en, characters for cn) so corpus counts, stoplists and
//! guard checks all agree. A stoplist line holds one phrase; phrases
//! longer than two tokens decompose into their adjacent pairs.

use super::tagger::offset_tokens;
use super::FabricateError;
use crate::types::Lang;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

fn tokenize(text: &str, lang: Lang) -> Vec<String> {
    offset_tokens(text, lang).into_iter().map(|t| t.text).collect()
}

#[derive(Debug, Clone)]
pub struct CollocationModel {
    pub lang: Lang,
    pub freq_threshold: u64,
    protected_bigrams: BTreeSet<(String, String)>,
    bigram_counts: BTreeMap<(String, String), u64>,
}

impl CollocationModel {
    pub fn new(lang: Lang, freq_threshold: u64) -> Self {
        CollocationModel {
            lang,
            freq_threshold,
            protected_bigrams: BTreeSet::new(),
            bigram_counts: BTreeMap::new(),
        }
    }

    /// Add one stoplist phrase; it must span at least two tokens.
    pub fn add_phrase(&mut self, phrase: &str) -> Result<(), FabricateError> {
        let tokens = tokenize(phrase, self.lang);
        if tokens.len() < 2 {
            return Err(FabricateError::LexiconFormat(format!(
                "stoplist phrase {phrase:?} is shorter than two tokens"
            )));
        }
        for pair in tokens.windows(2) {
            self.protected_bigrams.insert((pair[0].clone(), pair[1].clone()));
        }
        Ok(())
    }

    /// Load a stoplist file: one phrase per line, `#` comments allowed.
    pub fn load_stoplist(&mut self, path: &Path) -> Result<(), FabricateError> {
        let body = std::fs::read_to_string(path).map_err(|e| FabricateError::ResourceIo {
            path: path.display().to_string(),
            source: e,
        })?;
        for raw in body.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.add_phrase(line)?;
        }
        Ok(())
    }

    /// Count adjacent-token bigrams of one corpus sentence.
    pub fn observe(&mut self, sentence: &str) {
        let tokens = tokenize(sentence, self.lang);
        for pair in tokens.windows(2) {
            *self.bigram_counts.entry((pair[0].clone(), pair[1].clone())).or_insert(0) += 1;
        }
    }

    pub fn observe_all<'a>(&mut self, sentences: impl IntoIterator<Item = &'a str>) {
        for s in sentences {
            self.observe(s);
        }
    }

    pub fn count(&self, left: &str, right: &str) -> u64 {
        self.bigram_counts.get(&(left.to_string(), right.to_string())).copied().unwrap_or(0)
    }

    /// Protected iff stoplisted or frequent enough in the observed corpus.
    pub fn is_protected_pair(&self, left: &str, right: &str) -> bool {
        let key = (left.to_string(), right.to_string());
        if self.protected_bigrams.contains(&key) {
            return true;
        }
        self.freq_threshold > 0 && self.count(left, right) >= self.freq_threshold
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stoplist_protects_case_insensitively() {
        let mut model = CollocationModel::new(Lang::En, 10);
        model.add_phrase("New York").unwrap();
        assert!(model.is_protected_pair("new", "york"));
        assert!(!model.is_protected_pair("york", "new"));
        assert!(!model.is_protected_pair("new", "jersey"));
    }

    #[test]
    fn long_phrases_decompose_into_adjacent_pairs() {
        let mut model = CollocationModel::new(Lang::En, 10);
        model.add_phrase("rio de janeiro").unwrap();
        assert!(model.is_protected_pair("rio", "de"));
        assert!(model.is_protected_pair("de", "janeiro"));
        assert!(!model.is_protected_pair("rio", "janeiro"));
    }

    #[test]
    fn corpus_counts_reach_threshold() {
        let mut model = CollocationModel::new(Lang::En, 3);
        for _ in 0..3 {
            model.observe("strict legal systems exist");
        }
        model.observe("novel legal ideas emerge");
        assert_eq!(model.count("legal", "systems"), 3);
        assert!(model.is_protected_pair("legal", "systems"));
        assert!(!model.is_protected_pair("novel", "legal"), "a single sighting is below 3");

        let mut below = CollocationModel::new(Lang::En, 4);
        for _ in 0..3 {
            below.observe("strict legal systems exist");
        }
        assert!(!below.is_protected_pair("legal", "systems"));
    }

    #[test]
    fn zero_threshold_disables_frequency_protection() {
        let mut model = CollocationModel::new(Lang::En, 0);
        model.observe("a b");
        assert!(!model.is_protected_pair("a", "b"));
    }

    #[test]
    fn chinese_phrases_use_character_pairs() {
        let mut model = CollocationModel::new(Lang::Cn, 10);
        model.add_phrase("新西兰").unwrap();
        assert!(model.is_protected_pair("新", "西"));
        assert!(model.is_protected_pair("西", "兰"));
        assert!(!model.is_protected_pair("新", "兰"));
    }

    #[test]
    fn single_token_phrases_are_rejected() {
        let mut model = CollocationModel::new(Lang::En, 10);
        assert!(model.add_phrase("york").is_err());
    }

    #[test]
    fn stoplist_file_loads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("collocations.en.txt");
        std::fs::write(&path, "# names\nNew York\nUnited Kingdom\n").unwrap();
        let mut model = CollocationModel::new(Lang::En, 10);
        model.load_stoplist(&path).unwrap();
        assert!(model.is_protected_pair("united", "kingdom"));
    }
}
