//! Encyclopedia access: a trait over category/article lookups, a
//! directory-backed implementation for offline runs, and an HTTP
//! implementation speaking the standard wiki action API.

use super::IngestError;
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Category tree and article source.
pub trait WikiFetcher {
    /// Child categories of `category`, sorted by title.
    fn subcategories(&self, category: &str) -> Result<Vec<String>, IngestError>;
    /// Article titles directly in `category`, sorted by title.
    fn articles(&self, category: &str) -> Result<Vec<String>, IngestError>;
    /// Plain text of one article.
    fn article_text(&self, title: &str) -> Result<String, IngestError>;
}

/// Directory-backed fetcher.
///
/// Layout: `graph.tsv` holds one `parent<TAB>child` edge per line; a
/// child with a `<title>.txt` file beside the graph is an article, a
/// child without one is a subcategory. Titles must not contain path
/// separators.
#[derive(Debug)]
pub struct FixtureFetcher {
    dir: PathBuf,
    children: BTreeMap<String, Vec<String>>,
    article_titles: BTreeSet<String>,
    known_categories: BTreeSet<String>,
}

impl FixtureFetcher {
    pub fn open(dir: &Path) -> Result<Self, IngestError> {
        let graph_path = dir.join("graph.tsv");
        let body = std::fs::read_to_string(&graph_path).map_err(|e| IngestError::FetchFailure {
            what: graph_path.display().to_string(),
            detail: e.to_string(),
        })?;

        let mut article_titles = BTreeSet::new();
        let entries = std::fs::read_dir(dir).map_err(|e| IngestError::FetchFailure {
            what: dir.display().to_string(),
            detail: e.to_string(),
        })?;
        for entry in entries {
            let entry = entry.map_err(|e| IngestError::FetchFailure {
                what: dir.display().to_string(),
                detail: e.to_string(),
            })?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) == Some("txt") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    article_titles.insert(stem.to_string());
                }
            }
        }

        let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut known_categories = BTreeSet::new();
        for (lineno, line) in body.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.splitn(2, '\t');
            let parent = cols.next().unwrap_or("");
            let child = cols.next().ok_or_else(|| IngestError::GraphFormat {
                line: lineno + 1,
                detail: "expected parent<TAB>child".to_string(),
            })?;
            if parent.is_empty() || child.is_empty() {
                return Err(IngestError::GraphFormat {
                    line: lineno + 1,
                    detail: "empty title".to_string(),
                });
            }
            children.entry(parent.to_string()).or_default().push(child.to_string());
            known_categories.insert(parent.to_string());
            if !article_titles.contains(child) {
                known_categories.insert(child.to_string());
            }
        }
        for list in children.values_mut() {
            list.sort();
            list.dedup();
        }
        Ok(FixtureFetcher { dir: dir.to_path_buf(), children, article_titles, known_categories })
    }

    fn children_of(&self, category: &str) -> Result<&[String], IngestError> {
        if !self.known_categories.contains(category) {
            return Err(IngestError::UnknownCategory(category.to_string()));
        }
        Ok(self.children.get(category).map(Vec::as_slice).unwrap_or(&[]))
    }
}

impl WikiFetcher for FixtureFetcher {
    fn subcategories(&self, category: &str) -> Result<Vec<String>, IngestError> {
        Ok(self
            .children_of(category)?
            .iter()
            .filter(|c| !self.article_titles.contains(*c))
            .cloned()
            .collect())
    }

    fn articles(&self, category: &str) -> Result<Vec<String>, IngestError> {
        Ok(self
            .children_of(category)?
            .iter()
            .filter(|c| self.article_titles.contains(*c))
            .cloned()
            .collect())
    }

    fn article_text(&self, title: &str) -> Result<String, IngestError> {
        let path = self.dir.join(format!("{title}.txt"));
        std::fs::read_to_string(&path).map_err(|e| IngestError::FetchFailure {
            what: format!("article {title}"),
            detail: e.to_string(),
        })
    }
}

#[derive(Deserialize)]
struct MemberList {
    #[serde(default)]
    categorymembers: Vec<Member>,
}

#[derive(Deserialize)]
struct Member {
    title: String,
}

#[derive(Deserialize)]
struct ContinueBlock {
    #[serde(default)]
    cmcontinue: Option<String>,
}

#[derive(Deserialize)]
struct MembersResponse {
    #[serde(default, rename = "continue")]
    cont: Option<ContinueBlock>,
    query: Option<MemberList>,
}

#[derive(Deserialize)]
struct ExtractPage {
    #[serde(default)]
    extract: Option<String>,
}

#[derive(Deserialize)]
struct ExtractQuery {
    #[serde(default)]
    pages: BTreeMap<String, ExtractPage>,
}

#[derive(Deserialize)]
struct ExtractResponse {
    query: Option<ExtractQuery>,
}

/// Fetcher speaking the wiki action API (`list=categorymembers` for the
/// tree, `prop=extracts` for plain text). Requests are throttled to a
/// configured rate and retried on transient failures.
pub struct HttpFetcher {
    endpoint: String,
    client: reqwest::blocking::Client,
    max_retries: u32,
    min_interval: Option<Duration>,
    last_call: Mutex<Option<Instant>>,
}

impl HttpFetcher {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpFetcher {
            endpoint: endpoint.into(),
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(30))
                .build()
                .expect("default client must build"),
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

    fn get_json<T: serde::de::DeserializeOwned>(
        &self,
        what: &str,
        params: &[(&str, &str)],
    ) -> Result<T, IngestError> {
        let fail = |detail: String| IngestError::FetchFailure { what: what.to_string(), detail };
        let mut last_error = String::new();
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(100u64 << (attempt - 1)));
            }
            self.throttle();
            match self.client.get(&self.endpoint).query(params).send() {
                Ok(response) => {
                    let status = response.status();
                    if status.is_success() {
                        return response.json::<T>().map_err(|e| fail(format!("bad body: {e}")));
                    }
                    if status.is_client_error() {
                        return Err(fail(format!("service rejected request: {status}")));
                    }
                    last_error = format!("service error: {status}");
                }
                Err(e) => last_error = format!("request failed: {e}"),
            }
        }
        Err(fail(format!("{last_error} (after {} retries)", self.max_retries)))
    }

    fn members(&self, category: &str, kind: &str) -> Result<Vec<String>, IngestError> {
        let cmtitle = format!("Category:{category}");
        let mut titles = Vec::new();
        let mut cont: Option<String> = None;
        loop {
            let mut params = vec![
                ("action", "query"),
                ("list", "categorymembers"),
                ("cmtitle", cmtitle.as_str()),
                ("cmtype", kind),
                ("cmlimit", "500"),
                ("format", "json"),
            ];
            if let Some(c) = cont.as_deref() {
                params.push(("cmcontinue", c));
            }
            let response: MembersResponse =
                self.get_json(&format!("category {category}"), &params)?;
            if let Some(query) = response.query {
                for member in query.categorymembers {
                    let title = member.title.strip_prefix("Category:").unwrap_or(&member.title);
                    titles.push(title.to_string());
                }
            }
            match response.cont.and_then(|c| c.cmcontinue) {
                Some(next) => cont = Some(next),
                None => break,
            }
        }
        titles.sort();
        titles.dedup();
        Ok(titles)
    }
}

impl WikiFetcher for HttpFetcher {
    fn subcategories(&self, category: &str) -> Result<Vec<String>, IngestError> {
        self.members(category, "subcat")
    }

    fn articles(&self, category: &str) -> Result<Vec<String>, IngestError> {
        self.members(category, "page")
    }

    fn article_text(&self, title: &str) -> Result<String, IngestError> {
        let params = [
            ("action", "query"),
            ("prop", "extracts"),
            ("explaintext", "1"),
            ("titles", title),
            ("format", "json"),
        ];
        let response: ExtractResponse = self.get_json(&format!("article {title}"), &params)?;
        let text = response
            .query
            .and_then(|q| q.pages.into_values().next())
            .and_then(|p| p.extract)
            .unwrap_or_default();
        if text.is_empty() {
            return Err(IngestError::FetchFailure {
                what: format!("article {title}"),
                detail: "no extract in response".to_string(),
            });
        }
        Ok(text)
    }
}
