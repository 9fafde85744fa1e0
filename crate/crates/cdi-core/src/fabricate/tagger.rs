//! Adjective span tagging.
//!
//! The tagging contract is a trait so a real POS tagger can be plugged
//! in; the bundled reference implementation matches against an adjective
//! word list. English matching is case-insensitive over word runs;
//! Chinese matching is a greedy longest-match scan over characters.

use super::FabricateError;
use crate::types::{char_slice, Lang};
use std::collections::BTreeSet;
use std::path::Path;

/// A word token with half-open character offsets into the original text.
/// `text` is normalized: lowercased for en, verbatim for cn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffsetToken {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Tokenize with offsets for guard checks. English tokens are maximal
/// alphanumeric runs, lowercased; Chinese tokens are single
/// non-whitespace characters.
pub fn offset_tokens(text: &str, lang: Lang) -> Vec<OffsetToken> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    match lang {
        Lang::En => {
            let mut i = 0;
            while i < chars.len() {
                if chars[i].is_alphanumeric() {
                    let start = i;
                    while i < chars.len() && chars[i].is_alphanumeric() {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect::<String>().to_lowercase();
                    out.push(OffsetToken { text: word, start, end: i });
                } else {
                    i += 1;
                }
            }
        }
        Lang::Cn => {
            for (i, &c) in chars.iter().enumerate() {
                if !c.is_whitespace() {
                    out.push(OffsetToken { text: c.to_string(), start: i, end: i + 1 });
                }
            }
        }
    }
    out
}

/// An adjective occurrence. Offsets are character-based and half-open;
/// `surface` is the verbatim slice and `lemma` its lookup form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjectiveSpan {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub lemma: String,
}

/// Anything that can find adjective spans in a sentence of its language.
pub trait PosTagger {
    fn lang(&self) -> Lang;
    /// Spans in left-to-right order, non-overlapping, within bounds.
    fn adjective_spans(&self, text: &str) -> Result<Vec<AdjectiveSpan>, FabricateError>;
}

/// Reference tagger backed by a per-language adjective word list.
#[derive(Debug, Clone)]
pub struct LexiconTagger {
    lang: Lang,
    words: BTreeSet<String>,
    max_word_chars: usize,
}

impl LexiconTagger {
    pub fn new(lang: Lang, words: impl IntoIterator<Item = String>) -> Self {
        let words: BTreeSet<String> = words
            .into_iter()
            .map(|w| if lang == Lang::En { w.to_lowercase() } else { w })
            .filter(|w| !w.is_empty())
            .collect();
        let max_word_chars = words.iter().map(|w| w.chars().count()).max().unwrap_or(0);
        LexiconTagger { lang, words, max_word_chars }
    }

    /// Load from a word list file: one adjective per line, `#` comments.
    pub fn load(path: &Path, lang: Lang) -> Result<Self, FabricateError> {
        let body = std::fs::read_to_string(path).map_err(|e| FabricateError::ResourceIo {
            path: path.display().to_string(),
            source: e,
        })?;
        let words = body
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string);
        Ok(Self::new(lang, words))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl PosTagger for LexiconTagger {
    fn lang(&self) -> Lang {
        self.lang
    }

    fn adjective_spans(&self, text: &str) -> Result<Vec<AdjectiveSpan>, FabricateError> {
        let mut spans = Vec::new();
        match self.lang {
            Lang::En => {
                for tok in offset_tokens(text, Lang::En) {
                    if self.words.contains(&tok.text) {
                        spans.push(AdjectiveSpan {
                            start: tok.start,
                            end: tok.end,
                            surface: char_slice(text, tok.start, tok.end),
                            lemma: tok.text,
                        });
                    }
                }
            }
            Lang::Cn => {
                let chars: Vec<char> = text.chars().collect();
                let mut i = 0;
                while i < chars.len() {
                    let mut matched = 0;
                    let longest = self.max_word_chars.min(chars.len() - i);
                    for len in (1..=longest).rev() {
                        let candidate: String = chars[i..i + len].iter().collect();
                        if self.words.contains(&candidate) {
                            spans.push(AdjectiveSpan {
                                start: i,
                                end: i + len,
                                surface: candidate.clone(),
                                lemma: candidate,
                            });
                            matched = len;
                            break;
                        }
                    }
                    i += if matched > 0 { matched } else { 1 };
                }
            }
        }
        Ok(spans)
    }
}
