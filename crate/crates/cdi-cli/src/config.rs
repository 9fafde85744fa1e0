//! Pipeline configuration: one TOML document drives every stage.
//!
//! Relative paths inside the file resolve against the directory that
//! contains the file, so a config can be invoked from anywhere. One
//! global `seed` fans out to per-stage seeds as
//! `seed XOR fnv1a64(stage_label)`; a stage section may pin its own
//! seed explicitly, which then wins over the fan-out.

use crate::error::CliError;
use cdi_core::classifier::fnv1a64;
use cdi_core::debias::DebiasMode;
use cdi_core::types::Lang;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Derive a stage seed from the global seed and a stage label.
pub fn stage_seed(global: u64, label: &str) -> u64 {
    global ^ fnv1a64(label.as_bytes())
}

fn anchor(base: &Path, path: &mut PathBuf) {
    if path.is_relative() {
        *path = base.join(&*path);
    }
}

fn anchor_opt(base: &Path, path: &mut Option<PathBuf>) {
    if let Some(p) = path {
        anchor(base, p);
    }
}

/// The whole pipeline configuration, with defaults for every field.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: PathsSection,
    pub ingest: IngestSection,
    pub fabricate: FabricateSection,
    pub debias: DebiasSection,
    pub train: TrainSection,
    pub score: ScoreSection,
    pub evaluate: EvaluateSection,
}

impl PipelineConfig {
    /// Read, parse, and anchor a configuration file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::input(anyhow::anyhow!("cannot read config {}: {e}", path.display()))
        })?;
        let mut config: PipelineConfig = toml::from_str(&text)
            .map_err(|e| CliError::input(anyhow::anyhow!("config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.anchor_paths(&base);
        Ok(config)
    }

    fn anchor_paths(&mut self, base: &Path) {
        let p = &mut self.paths;
        anchor(base, &mut p.work_dir);
        for slot in [
            &mut p.sentences_en,
            &mut p.sentences_cn,
            &mut p.manifest_en,
            &mut p.manifest_cn,
            &mut p.samples_en,
            &mut p.samples_cn,
            &mut p.debiased_en,
            &mut p.debiased_cn,
            &mut p.model_en,
            &mut p.model_cn,
            &mut p.pairs,
            &mut p.annotations,
            &mut p.scores,
            &mut p.human,
            &mut p.report,
            &mut p.agreement,
            &mut p.table3,
            &mut p.scatter,
            &mut p.topic_r,
        ] {
            anchor_opt(base, slot);
        }
        anchor_opt(base, &mut self.ingest.fixture_dir);
        anchor_opt(base, &mut self.fabricate.resources_dir);
        anchor_opt(base, &mut self.debias.tables_dir);
        anchor_opt(base, &mut self.debias.cache_dir);
    }
}

/// Where every interchange artifact lives. Anything not pinned
/// explicitly defaults to a conventional name under `work_dir`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsSection {
    pub work_dir: PathBuf,
    sentences_en: Option<PathBuf>,
    sentences_cn: Option<PathBuf>,
    manifest_en: Option<PathBuf>,
    manifest_cn: Option<PathBuf>,
    samples_en: Option<PathBuf>,
    samples_cn: Option<PathBuf>,
    debiased_en: Option<PathBuf>,
    debiased_cn: Option<PathBuf>,
    model_en: Option<PathBuf>,
    model_cn: Option<PathBuf>,
    pairs: Option<PathBuf>,
    annotations: Option<PathBuf>,
    scores: Option<PathBuf>,
    human: Option<PathBuf>,
    report: Option<PathBuf>,
    agreement: Option<PathBuf>,
    table3: Option<PathBuf>,
    scatter: Option<PathBuf>,
    topic_r: Option<PathBuf>,
}

impl Default for PathsSection {
    fn default() -> Self {
        PathsSection {
            work_dir: PathBuf::from("work"),
            sentences_en: None,
            sentences_cn: None,
            manifest_en: None,
            manifest_cn: None,
            samples_en: None,
            samples_cn: None,
            debiased_en: None,
            debiased_cn: None,
            model_en: None,
            model_cn: None,
            pairs: None,
            annotations: None,
            scores: None,
            human: None,
            report: None,
            agreement: None,
            table3: None,
            scatter: None,
            topic_r: None,
        }
    }
}

impl PathsSection {
    pub fn sentences(&self, lang: Lang) -> PathBuf {
        self.pick(lang, &self.sentences_en, &self.sentences_cn)
            .cloned()
            .unwrap_or_else(|| self.work_dir.join(format!("sentences.{}.jsonl", lang.code())))
    }

    fn pick<'a>(
        &self,
        lang: Lang,
        en: &'a Option<PathBuf>,
        cn: &'a Option<PathBuf>,
    ) -> Option<&'a PathBuf> {
        match lang {
            Lang::En => en.as_ref(),
            Lang::Cn => cn.as_ref(),
        }
    }

    pub fn manifest(&self, lang: Lang) -> PathBuf {
        self.pick(lang, &self.manifest_en, &self.manifest_cn)
            .cloned()
            .unwrap_or_else(|| self.work_dir.join(format!("manifest.{}.json", lang.code())))
    }

    pub fn samples(&self, lang: Lang) -> PathBuf {
        self.pick(lang, &self.samples_en, &self.samples_cn)
            .cloned()
            .unwrap_or_else(|| self.work_dir.join(format!("samples.{}.jsonl", lang.code())))
    }

    pub fn debiased(&self, lang: Lang) -> PathBuf {
        self.pick(lang, &self.debiased_en, &self.debiased_cn)
            .cloned()
            .unwrap_or_else(|| self.work_dir.join(format!("debiased.{}.jsonl", lang.code())))
    }

    pub fn model(&self, lang: Lang) -> PathBuf {
        self.pick(lang, &self.model_en, &self.model_cn)
            .cloned()
            .unwrap_or_else(|| self.work_dir.join(format!("model.{}.json", lang.code())))
    }

    pub fn pairs(&self) -> PathBuf {
        self.pairs.clone().unwrap_or_else(|| self.work_dir.join("pairs.jsonl"))
    }

    pub fn annotations(&self) -> PathBuf {
        self.annotations.clone().unwrap_or_else(|| self.work_dir.join("annotations.jsonl"))
    }

    pub fn scores(&self) -> PathBuf {
        self.scores.clone().unwrap_or_else(|| self.work_dir.join("scores.jsonl"))
    }

    pub fn human(&self) -> PathBuf {
        self.human.clone().unwrap_or_else(|| self.work_dir.join("human.jsonl"))
    }

    pub fn report(&self) -> PathBuf {
        self.report.clone().unwrap_or_else(|| self.work_dir.join("report.json"))
    }

    pub fn agreement(&self) -> PathBuf {
        self.agreement.clone().unwrap_or_else(|| self.work_dir.join("agreement.json"))
    }

    pub fn table3(&self) -> PathBuf {
        self.table3.clone().unwrap_or_else(|| self.work_dir.join("table3.json"))
    }

    pub fn scatter(&self) -> PathBuf {
        self.scatter.clone().unwrap_or_else(|| self.work_dir.join("scatter.jsonl"))
    }

    pub fn topic_r(&self) -> PathBuf {
        self.topic_r.clone().unwrap_or_else(|| self.work_dir.join("topic_r.json"))
    }
}

/// Where corpus text comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceMode {
    Fixture,
    Live,
}

impl SourceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceMode::Fixture => "fixture",
            SourceMode::Live => "live",
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RootsSection {
    pub en: Vec<String>,
    pub cn: Vec<String>,
}

impl RootsSection {
    pub fn for_lang(&self, lang: Lang) -> &[String] {
        match lang {
            Lang::En => &self.en,
            Lang::Cn => &self.cn,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestSection {
    pub source_mode: SourceMode,
    pub fixture_dir: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub max_depth: u32,
    pub article_cap: u32,
    pub rate_limit_rps: f64,
    pub skip_budget: u32,
    pub min_len: Option<usize>,
    pub max_len: Option<usize>,
    pub roots: RootsSection,
}

impl Default for IngestSection {
    fn default() -> Self {
        IngestSection {
            source_mode: SourceMode::Fixture,
            fixture_dir: None,
            endpoint: None,
            max_depth: 2,
            article_cap: 100,
            rate_limit_rps: 2.0,
            skip_budget: 0,
            min_len: None,
            max_len: None,
            roots: RootsSection::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FabricateSection {
    pub colloc_threshold: u64,
    pub seed: Option<u64>,
    pub resources_dir: Option<PathBuf>,
}

impl Default for FabricateSection {
    fn default() -> Self {
        FabricateSection { colloc_threshold: 3, seed: None, resources_dir: None }
    }
}

/// Which translation client the debias stage talks to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MtBackend {
    Table,
    Http,
    Identity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PivotSection {
    pub en: String,
    pub cn: String,
}

impl Default for PivotSection {
    fn default() -> Self {
        PivotSection { en: "de".to_string(), cn: "ja".to_string() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DebiasSection {
    pub backend: MtBackend,
    pub endpoint: Option<String>,
    pub rate_limit_rps: f64,
    pub mode: DebiasMode,
    pub tables_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub pivot: PivotSection,
}

impl Default for DebiasSection {
    fn default() -> Self {
        DebiasSection {
            backend: MtBackend::Table,
            endpoint: None,
            rate_limit_rps: 4.0,
            mode: DebiasMode::Both,
            tables_dir: None,
            cache_dir: None,
            pivot: PivotSection::default(),
        }
    }
}

impl DebiasSection {
    pub fn cache_dir(&self, paths: &PathsSection) -> PathBuf {
        self.cache_dir.clone().unwrap_or_else(|| paths.work_dir.join("btcache"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub hash_bits: u8,
    pub ngram_max: u8,
    pub epochs: u32,
    pub learning_rate: f64,
    pub l2: f64,
    pub max_seq_tokens: u32,
    pub seed: Option<u64>,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            hash_bits: 20,
            ngram_max: 2,
            epochs: 5,
            learning_rate: 0.1,
            l2: 1e-6,
            max_seq_tokens: 128,
            seed: None,
        }
    }
}

/// Which scorer produces model probabilities for statement pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Builtin,
    Http,
    Stdio,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScoreSection {
    pub scorer: ScorerKind,
    pub endpoint: Option<String>,
    /// Program plus arguments for the stdio scorer.
    pub command: Vec<String>,
}

impl Default for ScoreSection {
    fn default() -> Self {
        ScoreSection { scorer: ScorerKind::Builtin, endpoint: None, command: Vec::new() }
    }
}

/// Which score source the evaluation report is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    Random,
    Lm,
    WeakCdi,
    Cdi,
}

impl Baseline {
    pub fn as_str(self) -> &'static str {
        match self {
            Baseline::Random => "random",
            Baseline::Lm => "lm",
            Baseline::WeakCdi => "weak-cdi",
            Baseline::Cdi => "cdi",
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct GoldSection {
    pub en: BTreeMap<String, u8>,
    pub cn: BTreeMap<String, u8>,
}

impl GoldSection {
    pub fn for_lang(&self, lang: Lang) -> &BTreeMap<String, u8> {
        match lang {
            Lang::En => &self.en,
            Lang::Cn => &self.cn,
        }
    }

    pub fn contains(&self, pair_id: &str) -> bool {
        self.en.contains_key(pair_id) || self.cn.contains_key(pair_id)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateSection {
    pub permutations: u32,
    pub perm_seed: Option<u64>,
    pub min_gold_pass: f64,
    pub min_loo_corr: f64,
    pub baseline: Baseline,
    pub threshold: f64,
    pub rewrite_matrix: bool,
    pub gold: GoldSection,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        EvaluateSection {
            permutations: 10_000,
            perm_seed: None,
            min_gold_pass: 0.8,
            min_loo_corr: 0.0,
            baseline: Baseline::Cdi,
            threshold: 0.5,
            rewrite_matrix: false,
            gold: GoldSection::default(),
        }
    }
}
