//! Adjective-to-antonym lookup backing negative-sample fabrication.
//!
//! The on-disk format is one entry per line:
//!
//! ```text
//! lemma<TAB>antonym[,antonym...]
//! ```
//!
//! Antonym order matters: flipping always takes the first one. A lemma
//! never maps to itself and every lemma carries at least one antonym.

use super::FabricateError;
use crate::types::Lang;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct AntonymLexicon {
    pub lang: Lang,
    entries: BTreeMap<String, Vec<String>>,
}

impl AntonymLexicon {
    pub fn new(lang: Lang, pairs: Vec<(String, Vec<String>)>) -> Result<Self, FabricateError> {
        let mut entries = BTreeMap::new();
        for (lemma, antonyms) in pairs {
            Self::validate_entry(&lemma, &antonyms)?;
            entries.insert(lemma, antonyms);
        }
        Ok(AntonymLexicon { lang, entries })
    }

    fn validate_entry(lemma: &str, antonyms: &[String]) -> Result<(), FabricateError> {
        if lemma.is_empty() {
            return Err(FabricateError::LexiconFormat("empty lemma".into()));
        }
        if antonyms.is_empty() {
            return Err(FabricateError::LexiconFormat(format!("lemma {lemma:?} has no antonyms")));
        }
        if antonyms.iter().any(|a| a.is_empty()) {
            return Err(FabricateError::LexiconFormat(format!(
                "lemma {lemma:?} has an empty antonym"
            )));
        }
        if antonyms.iter().any(|a| a == lemma) {
            return Err(FabricateError::LexiconFormat(format!("lemma {lemma:?} maps to itself")));
        }
        Ok(())
    }

    pub fn load(path: &Path, lang: Lang) -> Result<Self, FabricateError> {
        let body = std::fs::read_to_string(path).map_err(|e| FabricateError::ResourceIo {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut pairs = Vec::new();
        for (lineno, raw) in body.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lemma, rest) = line.split_once('\t').ok_or_else(|| {
                FabricateError::LexiconFormat(format!(
                    "{}:{}: expected lemma<TAB>antonyms",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let antonyms: Vec<String> = rest.split(',').map(|a| a.trim().to_string()).collect();
            pairs.push((lemma.trim().to_string(), antonyms));
        }
        Self::new(lang, pairs)
    }

    /// The replacement used when flipping: the first listed antonym.
    pub fn first_antonym(&self, lemma: &str) -> Option<&str> {
        self.entries.get(lemma).map(|a| a[0].as_str())
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.entries.contains_key(lemma)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<String>)> {
        self.entries.iter()
    }
}
