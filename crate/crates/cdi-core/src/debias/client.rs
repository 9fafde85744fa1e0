//! Translation backends: an identity stub, a deterministic substitution
//! table for offline runs, and an HTTP client for a real service.

use super::DebiasError;
use crate::fabricate::match_first_char_case;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// A direction-aware text translator. `source` and `target` are short
/// language codes such as "en", "de", "cn", "ja".
pub trait TranslationClient {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String, DebiasError>;
    /// Stable name used for cache directories ("identity", "table", "http").
    fn backend_name(&self) -> &str;
}

/// Returns every input unchanged. Useful as a null backend and for
/// exercising plumbing without a table or service.
#[derive(Debug, Default, Clone)]
pub struct IdentityClient;

impl TranslationClient for IdentityClient {
    fn translate(&self, text: &str, _source: &str, _target: &str) -> Result<String, DebiasError> {
        Ok(text.to_string())
    }

    fn backend_name(&self) -> &str {
        "identity"
    }
}

/// One substitution rule: `from` is replaced by `to`.
#[derive(Debug, Clone)]
struct Rule {
    from: String,
    from_lower: String,
    from_chars: usize,
    to: String,
    ascii_wordish: bool,
}

/// Deterministic phrase-substitution translator.
///
/// Each direction holds an ordered rule list (longest source phrase
/// first, ties alphabetical). Translation scans the text left to right;
/// at each position the first matching rule fires, the replacement is
/// emitted with the source's leading case, and scanning resumes after
/// the matched span. ASCII-word rules only match on word boundaries, so
/// a rule for "safe" never rewrites "unsafe". Unmatched characters pass
/// through unchanged.
pub struct TableClient {
    name: String,
    tables: BTreeMap<(String, String), Vec<Rule>>,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '\''
}

fn build_rules(pairs: Vec<(String, String)>) -> Vec<Rule> {
    let mut rules: Vec<Rule> = pairs
        .into_iter()
        .map(|(from, to)| {
            let ascii_wordish = from.chars().all(|c| is_word_char(c) || c == '-');
            Rule {
                from_lower: from.to_lowercase(),
                from_chars: from.chars().count(),
                from,
                to,
                ascii_wordish,
            }
        })
        .collect();
    rules.sort_by(|a, b| b.from_chars.cmp(&a.from_chars).then(a.from.cmp(&b.from)));
    rules
}

impl TableClient {
    pub fn new(name: impl Into<String>) -> Self {
        TableClient { name: name.into(), tables: BTreeMap::new() }
    }

    /// Register rules for one direction, replacing any existing list.
    pub fn with_direction(
        mut self,
        source: &str,
        target: &str,
        pairs: Vec<(String, String)>,
    ) -> Self {
        self.tables.insert((source.to_string(), target.to_string()), build_rules(pairs));
        self
    }

    /// Load one direction from a two-column TSV (`from<TAB>to`). Blank
    /// lines and lines starting with '#' are skipped.
    pub fn load_direction(
        &mut self,
        source: &str,
        target: &str,
        path: &Path,
    ) -> Result<(), DebiasError> {
        let body = std::fs::read_to_string(path).map_err(|e| DebiasError::TableLoad {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let mut pairs = Vec::new();
        for (lineno, line) in body.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.splitn(2, '\t');
            let from = cols.next().unwrap_or("");
            let to = cols.next().ok_or_else(|| DebiasError::TableLoad {
                path: path.display().to_string(),
                detail: format!("line {}: expected from<TAB>to", lineno + 1),
            })?;
            if from.is_empty() {
                return Err(DebiasError::TableLoad {
                    path: path.display().to_string(),
                    detail: format!("line {}: empty source phrase", lineno + 1),
                });
            }
            pairs.push((from.to_string(), to.to_string()));
        }
        self.tables.insert((source.to_string(), target.to_string()), build_rules(pairs));
        Ok(())
    }

    fn apply(&self, rules: &[Rule], text: &str) -> String {
        let chars: Vec<char> = text.chars().collect();
        let lower: Vec<char> = text.to_lowercase().chars().collect();
        // Guard against locale-style length changes; fall back to exact
        // matching if lowercasing altered the char count.
        let lower = if lower.len() == chars.len() { lower } else { chars.clone() };
        let mut out = String::with_capacity(text.len());
        let mut i = 0usize;
        'scan: while i < chars.len() {
            for rule in rules {
                let end = i + rule.from_chars;
                if end > chars.len() {
                    continue;
                }
                let window: String = lower[i..end].iter().collect();
                if window != rule.from_lower {
                    continue;
                }
                if rule.ascii_wordish {
                    let left_ok = i == 0 || !is_word_char(chars[i - 1]);
                    let right_ok = end == chars.len() || !is_word_char(chars[end]);
                    if !left_ok || !right_ok {
                        continue;
                    }
                }
                let surface: String = chars[i..end].iter().collect();
                out.push_str(&match_first_char_case(&rule.to, &surface));
                i = end;
                continue 'scan;
            }
            out.push(chars[i]);
            i += 1;
        }
        out
    }
}

impl TranslationClient for TableClient {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String, DebiasError> {
        let rules =
            self.tables.get(&(source.to_string(), target.to_string())).ok_or_else(|| {
                DebiasError::MissingTable {
                    source_lang: source.to_string(),
                    target_lang: target.to_string(),
                }
            })?;
        Ok(self.apply(rules, text))
    }

    fn backend_name(&self) -> &str {
        &self.name
    }
}

#[derive(Serialize)]
struct TranslateRequest<'a> {
    text: &'a str,
    source: &'a str,
    target: &'a str,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TranslateResponse {
    text: String,
}

/// HTTP translation backend: POSTs `{"text","source","target"}` and
/// expects `{"text"}` back. Transient failures (connect errors, 5xx)
/// are retried with exponential backoff; 4xx responses fail at once.
/// An optional requests-per-second cap throttles between calls.
pub struct HttpTranslator {
    endpoint: String,
    client: reqwest::blocking::Client,
    max_retries: u32,
    min_interval: Option<Duration>,
    last_call: Mutex<Option<Instant>>,
}

impl HttpTranslator {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpTranslator {
            endpoint: endpoint.into(),
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(30))
                .build()
                .expect("default TLS-less client must build"),
            max_retries: 3,
            min_interval: None,
            last_call: Mutex::new(None),
        }
    }

    pub fn with_rate_limit(mut self, requests_per_second: f64) -> Self {
        if requests_per_second > 0.0 {
            self.min_interval = Some(Duration::from_secs_f64(1.0 / requests_per_second));
        }
        self
    }

    pub fn with_max_retries(mut self, max_retries: u32) -> Self {
        self.max_retries = max_retries;
        self
    }

    fn throttle(&self) {
        let Some(interval) = self.min_interval else { return };
        let mut last = self.last_call.lock().expect("rate limiter poisoned");
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < interval {
                std::thread::sleep(interval - elapsed);
            }
        }
        *last = Some(Instant::now());
    }

    fn fail(&self, detail: String) -> DebiasError {
        DebiasError::TranslationFailure { backend: self.backend_name().to_string(), detail }
    }
}

impl TranslationClient for HttpTranslator {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String, DebiasError> {
        let request = TranslateRequest { text, source, target };
        let mut last_error = String::new();
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(100u64 << (attempt - 1)));
            }
            self.throttle();
            match self.client.post(&self.endpoint).json(&request).send() {
                Ok(response) => {
                    let status = response.status();
                    if status.is_success() {
                        return match response.json::<TranslateResponse>() {
                            Ok(body) => Ok(body.text),
                            Err(e) => Err(self.fail(format!("bad response body: {e}"))),
                        };
                    }
                    if status.is_client_error() {
                        return Err(self.fail(format!("service rejected request: {status}")));
                    }
                    last_error = format!("service error: {status}");
                }
                Err(e) => last_error = format!("request failed: {e}"),
            }
        }
        Err(self.fail(format!("{last_error} (after {} retries)", self.max_retries)))
    }

    fn backend_name(&self) -> &str {
        "http"
    }
}
