//! On-disk cache for round-trip translations.
//!
//! One append-only JSONL file per (backend, source-pivot) direction,
//! keyed by the SHA-256 of the input text so source sentences never
//! leak into the cache file names. Entries store the full round-trip
//! result, so a warm cache avoids both translation calls.

use super::DebiasError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacheLine {
    /// SHA-256 hex digest of the input text.
    h: String,
    /// Round-trip output text.
    out: String,
}

/// Hex digest used as the cache key for a text.
pub fn text_key(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// A loaded cache file plus its path for appends.
#[derive(Debug)]
pub struct BtCache {
    path: PathBuf,
    entries: BTreeMap<String, String>,
}

fn cache_error(path: &Path, detail: impl std::fmt::Display) -> DebiasError {
    DebiasError::CacheIo { path: path.display().to_string(), detail: detail.to_string() }
}

impl BtCache {
    /// Open (creating directories as needed) the cache file for one
    /// backend and translation direction under `root`.
    pub fn open(
        root: &Path,
        backend: &str,
        source: &str,
        pivot: &str,
    ) -> Result<Self, DebiasError> {
        let dir = root.join(backend);
        std::fs::create_dir_all(&dir).map_err(|e| cache_error(&dir, e))?;
        let path = dir.join(format!("{source}-{pivot}.jsonl"));
        let mut entries = BTreeMap::new();
        if path.exists() {
            let body = std::fs::read_to_string(&path).map_err(|e| cache_error(&path, e))?;
            for (lineno, line) in body.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let parsed: CacheLine = serde_json::from_str(line)
                    .map_err(|e| cache_error(&path, format!("line {}: {e}", lineno + 1)))?;
                entries.insert(parsed.h, parsed.out);
            }
        }
        Ok(BtCache { path, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Cached round-trip output for a text, if present.
    pub fn get(&self, text: &str) -> Option<&str> {
        self.entries.get(&text_key(text)).map(String::as_str)
    }

    /// Record a round-trip result, appending it to the cache file.
    /// Re-inserting an existing key is a no-op (first write wins).
    pub fn put(&mut self, text: &str, output: &str) -> Result<(), DebiasError> {
        let key = text_key(text);
        if self.entries.contains_key(&key) {
            return Ok(());
        }
        let line = serde_json::to_string(&CacheLine { h: key.clone(), out: output.to_string() })
            .expect("cache line serializes");
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| cache_error(&self.path, e))?;
        writeln!(file, "{line}").map_err(|e| cache_error(&self.path, e))?;
        self.entries.insert(key, output.to_string());
        Ok(())
    }
}
