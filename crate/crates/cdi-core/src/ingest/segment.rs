//! Sentence segmentation for encyclopedia prose.
//!
//! Line breaks are hard boundaries (extracts put headings and
//! paragraphs on their own lines). Within a line, English splits on
//! `.`/`!`/`?` followed by whitespace, with guards for abbreviations
//! ("Dr.", "e.g.") and for periods followed by a lowercase continuation;
//! Chinese splits after `。`/`！`/`？`. Length bounds then drop
//! fragments and run-ons: English by whitespace token count, Chinese by
//! character count of the trimmed sentence.

use crate::types::Lang;

/// Abbreviations whose trailing period is not a sentence boundary. The
/// token is matched lowercased, with internal periods kept ("e.g").
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "vol", "fig", "e.g", "i.e",
    "u.s", "u.k", "approx", "dept", "est", "cf", "al",
];

/// Inclusive length bounds for kept sentences. English counts
/// whitespace tokens, Chinese counts characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentBounds {
    pub min_len: usize,
    pub max_len: usize,
}

impl SegmentBounds {
    pub fn default_for(lang: Lang) -> Self {
        match lang {
            Lang::En => SegmentBounds { min_len: 5, max_len: 80 },
            Lang::Cn => SegmentBounds { min_len: 10, max_len: 150 },
        }
    }
}

/// The token immediately preceding `idx` (exclusive), read backwards
/// over alphanumerics and internal periods, lowercased.
fn token_before(chars: &[char], idx: usize) -> String {
    let mut start = idx;
    while start > 0 {
        let c = chars[start - 1];
        if c.is_alphanumeric() || c == '.' {
            start -= 1;
        } else {
            break;
        }
    }
    chars[start..idx].iter().collect::<String>().to_lowercase()
}

fn next_non_space(chars: &[char], mut idx: usize) -> Option<char> {
    while idx < chars.len() {
        if !chars[idx].is_whitespace() {
            return Some(chars[idx]);
        }
        idx += 1;
    }
    None
}

fn split_line_en(line: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = line.chars().collect();
    let mut start = 0usize;
    for i in 0..chars.len() {
        let c = chars[i];
        if c != '.' && c != '!' && c != '?' {
            continue;
        }
        // Only a boundary when followed by whitespace or end of line;
        // this keeps decimals and file-like tokens intact.
        if i + 1 < chars.len() && !chars[i + 1].is_whitespace() {
            continue;
        }
        if c == '.' {
            let token = token_before(&chars, i);
            let token = token.trim_start_matches('.');
            if ABBREVIATIONS.contains(&token) {
                continue;
            }
            // A lowercase continuation means the period did not end a
            // sentence (stray abbreviation we do not know about).
            if let Some(next) = next_non_space(&chars, i + 1) {
                if next.is_lowercase() {
                    continue;
                }
            }
        }
        let sentence: String = chars[start..=i].iter().collect();
        let sentence = sentence.trim();
        if !sentence.is_empty() {
            out.push(sentence.to_string());
        }
        start = i + 1;
    }
    let tail: String = chars[start..].iter().collect();
    let tail = tail.trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
}

fn split_line_cn(line: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = line.chars().collect();
    let mut start = 0usize;
    for (i, &c) in chars.iter().enumerate() {
        if c == '。' || c == '！' || c == '？' {
            let sentence: String = chars[start..=i].iter().collect();
            let sentence = sentence.trim();
            if !sentence.is_empty() {
                out.push(sentence.to_string());
            }
            start = i + 1;
        }
    }
    let tail: String = chars[start..].iter().collect();
    let tail = tail.trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
}

/// Split raw text into sentences without applying length bounds.
pub fn split_sentences(text: &str, lang: Lang) -> Vec<String> {
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        match lang {
            Lang::En => split_line_en(line, &mut out),
            Lang::Cn => split_line_cn(line, &mut out),
        }
    }
    out
}

fn sentence_length(sentence: &str, lang: Lang) -> usize {
    match lang {
        Lang::En => sentence.split_whitespace().count(),
        Lang::Cn => sentence.chars().count(),
    }
}

/// Split text into sentences and keep those within `bounds`.
pub fn extract_sentences(text: &str, lang: Lang, bounds: SegmentBounds) -> Vec<String> {
    split_sentences(text, lang)
        .into_iter()
        .filter(|s| {
            let len = sentence_length(s, lang);
            len >= bounds.min_len && len <= bounds.max_len
        })
        .collect()
}
