//! Shared domain types used across the pipeline stages.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Culture / language code. The two cultures modeled by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lang {
    #[serde(rename = "en")]
    En,
    #[serde(rename = "cn")]
    Cn,
}

impl Lang {
    pub fn code(self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::Cn => "cn",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(Lang::En),
            "cn" => Ok(Lang::Cn),
            other => Err(format!("unknown language code {other:?} (expected \"en\" or \"cn\")")),
        }
    }
}

/// How a training sample came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    #[serde(rename = "corpus")]
    Corpus,
    #[serde(rename = "antonym-flip")]
    AntonymFlip,
}

/// Span replaced during antonym flipping, located in the sample's own text.
///
/// Offsets are in characters, not bytes, so they are meaningful for both
/// alphabetic and CJK text. `text[start..end]` (char-wise) equals
/// `replacement`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlippedSpan(pub u32, pub u32, pub String);

impl FlippedSpan {
    pub fn start(&self) -> u32 {
        self.0
    }

    pub fn end(&self) -> u32 {
        self.1
    }

    pub fn replacement(&self) -> &str {
        &self.2
    }
}

/// One labeled training unit flowing through fabrication, debiasing and
/// training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledSample {
    pub id: String,
    pub lang: Lang,
    pub text: String,
    pub label: u8,
    pub origin: Origin,
    pub parent_id: Option<String>,
    pub flipped_span: Option<FlippedSpan>,
    pub bt_applied: bool,
}

impl LabeledSample {
    /// A corpus-drawn positive sample.
    pub fn positive(id: impl Into<String>, lang: Lang, text: impl Into<String>) -> Self {
        LabeledSample {
            id: id.into(),
            lang,
            text: text.into(),
            label: 1,
            origin: Origin::Corpus,
            parent_id: None,
            flipped_span: None,
            bt_applied: false,
        }
    }
}

/// Slice a string by character offsets. Panics if the range is out of
/// bounds, mirroring std slice behavior.
pub fn char_slice(s: &str, start: usize, end: usize) -> String {
    s.chars().skip(start).take(end.saturating_sub(start)).collect()
}

/// Number of characters in a string.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}
