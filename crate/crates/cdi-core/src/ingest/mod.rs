//! Corpus construction: expand category trees breadth-first, pull
//! article text, and segment it into length-bounded sentences with
//! stable ids.

mod fetcher;
mod segment;

pub use fetcher::{FixtureFetcher, HttpFetcher, WikiFetcher};
pub use segment::{extract_sentences, split_sentences, SegmentBounds};

use crate::types::Lang;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("root category {0:?} cannot be resolved")]
    UnresolvableRoot(String),
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("fetching {what} failed: {detail}")]
    FetchFailure { what: String, detail: String },
    #[error("graph line {line}: {detail}")]
    GraphFormat { line: usize, detail: String },
    #[error("skipped {skipped} articles, more than the budget of {budget}")]
    SkipBudgetExceeded { skipped: u32, budget: u32 },
}

/// One node of the expanded category tree. Titles double as ids; the
/// parent is the category that first discovered this node.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TopicNode {
    pub title: String,
    pub lang: Lang,
    pub depth: u32,
    pub parent: Option<String>,
}

/// A corpus sentence with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawSentence {
    pub id: String,
    pub lang: Lang,
    pub text: String,
    pub topic_id: String,
    pub article_title: String,
}

/// Summary of one ingestion run, written beside the sentence file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusManifest {
    pub lang: Lang,
    pub source_mode: String,
    pub created_at: String,
    pub article_count: u64,
    pub sentence_count: u64,
    pub topics: Vec<TopicNode>,
}

/// An article claimed by a topic, with its full text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchedArticle {
    pub topic_id: String,
    pub title: String,
    pub text: String,
}

/// Breadth-first expansion of `roots` down to `max_depth` levels below
/// them. Every discovered category becomes a node; a category reachable
/// by several parents is attributed to its first discoverer (parents
/// are visited level by level, siblings in sorted order). The result is
/// sorted by (depth, title). Roots that the source does not know:
/// `UnresolvableRoot`.
pub fn expand_category_tree(
    roots: &[String],
    lang: Lang,
    max_depth: u32,
    fetcher: &dyn WikiFetcher,
) -> Result<Vec<TopicNode>, IngestError> {
    let mut nodes: Vec<TopicNode> = Vec::new();
    let mut visited: BTreeSet<String> = BTreeSet::new();
    let mut queue: VecDeque<(String, u32)> = VecDeque::new();

    for root in roots {
        if visited.insert(root.clone()) {
            nodes.push(TopicNode { title: root.clone(), lang, depth: 0, parent: None });
            queue.push_back((root.clone(), 0));
        }
    }

    while let Some((title, depth)) = queue.pop_front() {
        let mut children = match fetcher.subcategories(&title) {
            Ok(children) => children,
            Err(IngestError::UnknownCategory(name)) if depth == 0 => {
                return Err(IngestError::UnresolvableRoot(name));
            }
            Err(other) => return Err(other),
        };
        if depth >= max_depth {
            continue;
        }
        // Attribution must not depend on the source's listing order.
        children.sort();
        for child in children {
            if visited.insert(child.clone()) {
                nodes.push(TopicNode {
                    title: child.clone(),
                    lang,
                    depth: depth + 1,
                    parent: Some(title.clone()),
                });
                queue.push_back((child, depth + 1));
            }
        }
    }

    nodes.sort_by(|a, b| a.depth.cmp(&b.depth).then_with(|| a.title.cmp(&b.title)));
    Ok(nodes)
}

/// Fetch up to `article_cap` fresh articles per topic, in topic order.
///
/// An article listed under several topics is ingested once: the first
/// topic in traversal order claims it, later topics skip it without it
/// counting against their cap. Individual articles whose text cannot be
/// fetched are skipped; more than `skip_budget` such skips abort the
/// run.
pub fn fetch_articles(
    topics: &[TopicNode],
    article_cap: u32,
    skip_budget: u32,
    fetcher: &dyn WikiFetcher,
) -> Result<Vec<FetchedArticle>, IngestError> {
    let mut claimed: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    let mut skipped = 0u32;
    for topic in topics {
        let mut taken = 0u32;
        for title in fetcher.articles(&topic.title)? {
            if taken >= article_cap {
                break;
            }
            if claimed.contains(&title) {
                continue;
            }
            match fetcher.article_text(&title) {
                Ok(text) => {
                    claimed.insert(title.clone());
                    out.push(FetchedArticle { topic_id: topic.title.clone(), title, text });
                    taken += 1;
                }
                Err(e) => {
                    skipped += 1;
                    log::warn!("skipping article {title}: {e}");
                    if skipped > skip_budget {
                        return Err(IngestError::SkipBudgetExceeded {
                            skipped,
                            budget: skip_budget,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Everything `ingest_corpus` needs beyond the fetcher.
#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub max_depth: u32,
    pub article_cap: u32,
    pub skip_budget: u32,
    pub bounds: SegmentBounds,
    /// Recorded verbatim in the manifest ("fixture" or "live").
    pub source_mode: String,
    /// RFC 3339 timestamp recorded in the manifest; injected by the
    /// caller so runs can be reproducible.
    pub created_at: String,
}

/// Expand, fetch, segment. Sentence ids are `<lang>-s<counter>` in
/// emission order (topics by (depth, title), a topic's articles in
/// listing order, a document's sentences in text order).
pub fn ingest_corpus(
    roots: &[String],
    lang: Lang,
    options: &IngestOptions,
    fetcher: &dyn WikiFetcher,
) -> Result<(Vec<RawSentence>, CorpusManifest), IngestError> {
    let topics = expand_category_tree(roots, lang, options.max_depth, fetcher)?;
    let articles = fetch_articles(&topics, options.article_cap, options.skip_budget, fetcher)?;
    let mut sentences = Vec::new();
    let mut counter = 0u64;
    for article in &articles {
        for text in extract_sentences(&article.text, lang, options.bounds) {
            counter += 1;
            sentences.push(RawSentence {
                id: format!("{}-s{counter:05}", lang.code()),
                lang,
                text,
                topic_id: article.topic_id.clone(),
                article_title: article.title.clone(),
            });
        }
    }
    let manifest = CorpusManifest {
        lang,
        source_mode: options.source_mode.clone(),
        created_at: options.created_at.clone(),
        article_count: articles.len() as u64,
        sentence_count: sentences.len() as u64,
        topics,
    };
    Ok((sentences, manifest))
}
