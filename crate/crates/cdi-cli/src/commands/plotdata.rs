//! `cdi plotdata`: emit one scatter point per scored pair (x = English
//! model probability, y = Chinese model probability) plus a per-topic
//! correlation summary, for plotting cross-culture alignment by topic.

use crate::config::PipelineConfig;
use crate::error::CliError;
use cdi_core::eval::pearson_r;
use cdi_core::io::{read_jsonl, write_json_fixed, write_jsonl};
use cdi_core::scoring::{ScorePair, StatementPair};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// One scatter point: a statement pair placed by its two model scores.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterRecord {
    pub pair_id: String,
    pub topic: String,
    pub x: f64,
    pub y: f64,
}

pub fn run(config: &PipelineConfig, topics: &[String]) -> Result<(), CliError> {
    let scores: Vec<ScorePair> = read_jsonl(&config.paths.scores())?;
    let pairs_path = config.paths.pairs();
    let pairs: Vec<StatementPair> = read_jsonl(&pairs_path)?;
    let topic_of: BTreeMap<&str, &str> =
        pairs.iter().map(|p| (p.pair_id.as_str(), p.topic.as_str())).collect();
    let known_topics: BTreeSet<&str> = pairs.iter().map(|p| p.topic.as_str()).collect();

    for topic in topics {
        if !known_topics.contains(topic.as_str()) {
            return Err(CliError::input(anyhow::anyhow!(
                "unknown topic {topic:?}; {} defines: {}",
                pairs_path.display(),
                known_topics.iter().copied().collect::<Vec<_>>().join(", ")
            )));
        }
    }
    let filter: BTreeSet<&str> = topics.iter().map(String::as_str).collect();

    let mut records = Vec::new();
    let mut grouped: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for score in &scores {
        let topic = topic_of.get(score.pair_id.as_str()).ok_or_else(|| {
            CliError::input(anyhow::anyhow!(
                "scored pair {} is missing from {}",
                score.pair_id,
                pairs_path.display()
            ))
        })?;
        if !filter.is_empty() && !filter.contains(topic) {
            continue;
        }
        records.push(ScatterRecord {
            pair_id: score.pair_id.clone(),
            topic: (*topic).to_string(),
            x: score.mp_en,
            y: score.mp_cn,
        });
        let slot = grouped.entry((*topic).to_string()).or_default();
        slot.0.push(score.mp_en);
        slot.1.push(score.mp_cn);
    }

    let scatter_path = config.paths.scatter();
    write_jsonl(&scatter_path, &records)?;

    // Per-topic correlation between the two cultures' scores; topics
    // where it is undefined (fewer than two pairs, or no variance on a
    // side) report null rather than a made-up number.
    let topic_r: BTreeMap<String, Option<f64>> =
        grouped.into_iter().map(|(topic, (x, y))| (topic, pearson_r(&x, &y).ok())).collect();
    let topic_r_path = config.paths.topic_r();
    write_json_fixed(&topic_r_path, &topic_r)?;

    log::info!(
        "plotdata: {} points -> {}; {} topics -> {}",
        records.len(),
        scatter_path.display(),
        topic_r.len(),
        topic_r_path.display()
    );
    Ok(())
}
